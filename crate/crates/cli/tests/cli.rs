use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uncommon"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let o = run(&full);
    assert_eq!(code(&o), 0, "stderr: {}", stderr(&o));
    serde_json::from_str(&stdout(&o)).expect("valid JSON")
}

fn write(dir: &TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, body).unwrap();
    path.display().to_string()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analyze_four_ap() {
    let o = run(&["analyze", "--system", path(&data("four_ap_f5.txt"))]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.starts_with("seed: 0\n"));
    assert!(out.contains("shortest_equation: 3"));
    assert!(out.contains("additive_tuple: true"));
    assert!(out.contains("restricted-support witness: not applicable"));
    assert!(out.contains("full-phase witness: applicable"));
    assert!(out.contains("lifting certificate: applicable"));
}

#[test]
fn analyze_single_equation() {
    let dir = TempDir::new().unwrap();
    let sys = write(&dir, "one.txt", "7 1 3\n1 1 -2\n");
    let v = json(&["analyze", "--system", &sys]);
    assert_eq!(v["command"], "analyze");
    assert_eq!(v["result"]["m"], 1);
    assert!(v["result"]["minors_generic"].is_null());
}

#[test]
fn malformed_row_reports_line() {
    let dir = TempDir::new().unwrap();
    let sys = write(&dir, "bad.txt", "5 2 4\n1 -2 1\n0 1 -2 1\n");
    let o = run(&["analyze", "--system", &sys]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn missing_file_is_usage_error() {
    let o = run(&["analyze", "--system", "/nonexistent/system.txt"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn constant_density_is_power() {
    let dir = TempDir::new().unwrap();
    let body: String = std::iter::once("5 1 values\n".to_string())
        .chain((0..5).map(|i| format!("{i} 0.3\n")))
        .collect();
    let f = write(&dir, "c.txt", &body);
    let v = json(&["density", "--system", path(&data("four_ap_f5.txt")), "--function", &f]);
    let r = &v["result"];
    let expected = 0.3f64.powi(4);
    assert!((r["value_direct"].as_f64().unwrap() - expected).abs() < 1e-12);
    assert!((r["value_fourier"].as_f64().unwrap() - expected).abs() < 1e-12);
}

#[test]
fn fourier_file_matches_values_file() {
    let dir = TempDir::new().unwrap();
    // f̂ = δ_0 + ½ δ_1 + ½ δ_{-1} on F_5
    let f = write(
        &dir,
        "f.txt",
        "5 1 fourier\n0 1 0\n1 0.5 0\n2 0 0\n3 0 0\n4 0.5 0\n",
    );
    let v = json(&["density", "--system", path(&data("four_ap_f5.txt")), "--function", &f]);
    let r = &v["result"];
    let d = r["value_direct"].as_f64().unwrap();
    let q = r["value_fourier"].as_f64().unwrap();
    assert!((d - q).abs() < 1e-12, "{d} vs {q}");
}

#[test]
fn mismatched_prime_is_rejected() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.txt", "7 1 values\n0 1\n1 0\n2 0\n3 0\n4 0\n5 0\n6 0\n");
    let o = run(&["density", "--system", path(&data("four_ap_f5.txt")), "--function", &f]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}

#[test]
fn budget_overflow_is_capacity_error() {
    let dir = TempDir::new().unwrap();
    let body: String = std::iter::once("5 2 values\n".to_string())
        .chain((0..25).map(|i| format!("{i} 0.1\n")))
        .collect();
    let f = write(&dir, "f.txt", &body);
    let o = run(&[
        "--budget",
        "100",
        "density",
        "--system",
        path(&data("four_ap_f5.txt")),
        "--function",
        &f,
    ]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("capacity"));
}

#[test]
fn defect_rejects_nonzero_mean() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.txt", "5 1 values\n0 0.1\n1 0\n2 0\n3 0\n4 0\n");
    let o = run(&["defect", "--system", path(&data("four_ap_f5.txt")), "--function", &f]);
    assert_eq!(code(&o), 2);
}

#[test]
fn witness_roundtrip_and_tamper() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("w.json");
    let o = run(&[
        "--seed",
        "1",
        "witness",
        "--system",
        path(&data("generic_f7.txt")),
        "--out",
        path(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("restricted-support"));

    let o = run(&["witness", "--verify", path(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("verified: true"));

    let mut cert: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    cert["values"][0] = Value::from(cert["values"][0].as_f64().unwrap() + 1e-3);
    let bad = dir.path().join("bad.json");
    fs::write(&bad, cert.to_string()).unwrap();
    let o = run(&["witness", "--verify", path(&bad)]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
}

#[test]
fn witness_full_phase_for_four_ap() {
    let v = json(&["witness", "--system", path(&data("four_ap_f5.txt"))]);
    let r = &v["result"];
    assert_eq!(r["method"]["kind"], "full-phase");
    assert!(r["t_direct"].as_f64().unwrap() < 0.0);
    assert!(r["mean"].as_f64().unwrap().abs() < 1e-10);
}

#[test]
fn odd_variable_count_uses_negation() {
    let dir = TempDir::new().unwrap();
    let sys = write(&dir, "odd.txt", "5 2 5\n1 0 1 1 1\n0 1 1 2 3\n");
    let v = json(&["witness", "--system", &sys, "--n", "1"]);
    assert_eq!(v["result"]["method"]["kind"], "odd-negation");
    assert!(v["result"]["t_direct"].as_f64().unwrap() < 0.0);
}

#[test]
fn witness_exhaustion_exit_code() {
    // a single iteration at n = 1 cannot produce a negative density for the 4-AP
    let o = run(&["witness", "--system", path(&data("four_ap_f5.txt")), "--n", "1", "--iters", "1"]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
}

#[test]
fn witness_is_reproducible_across_workers() {
    let sys = data("generic_f7.txt");
    let a = run(&["--seed", "3", "--workers", "1", "--format", "json", "witness", "--system", path(&sys)]);
    let b = run(&["--seed", "3", "--workers", "4", "--format", "json", "witness", "--system", path(&sys)]);
    assert_eq!(code(&a), 0);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn certify_and_replay() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("c.json");
    let o = run(&[
        "certify",
        "--system",
        path(&data("six_var_f5.txt")),
        "--auto",
        "--out",
        path(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("inequality"));
    let v = json(&["verify-certificate", "--certificate", path(&out)]);
    assert!(v["result"]["lead_upper"].as_f64().unwrap() < 0.0);
}

#[test]
fn certify_with_explicit_subsystem() {
    let ap = data("four_ap_f5.txt");
    let v = json(&["certify", "--system", path(&ap), "--sub", path(&ap)]);
    assert_eq!(v["result"]["exact"]["holds"], true);
    assert_eq!(v["result"]["direct"]["signs_match"], true);
}

#[test]
fn certify_rejects_wrong_shortest_equation() {
    let dir = TempDir::new().unwrap();
    // shortest equation has length 2, so no generic 2×3 subsystem can be lifted
    let sys = write(&dir, "s.txt", "5 2 4\n1 -1 0 0\n0 1 1 1\n");
    let o = run(&["certify", "--system", &sys, "--sub", path(&data("four_ap_f5.txt"))]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}

#[test]
fn clt_needs_samples() {
    let o = run(&["clt", "--system", path(&data("generic_f3.txt")), "--n", "2", "--samples", "0"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn clt_reports_statistics() {
    let v = json(&["clt", "--system", path(&data("generic_f3.txt")), "--n", "2", "--samples", "200"]);
    let r = &v["result"];
    assert_eq!(r["samples"], 200);
    assert!(r["exact_variance"].as_f64().unwrap() >= r["diagonal_variance"].as_f64().unwrap());
    assert!(r["max_identity_error"].as_f64().unwrap() < 1e-8);
}

#[test]
fn bad_flag_is_usage_error() {
    let o = run(&["density", "--system", "x", "--function", "y", "--method", "nope"]);
    assert_eq!(code(&o), 2);
}
