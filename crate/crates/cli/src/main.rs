use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use uncommon_core::amplify::{self, CertifyParams, UncommonnessCertificate};
use uncommon_core::analysis;
use uncommon_core::density::{self, Method, DEFAULT_BUDGET};
use uncommon_core::function::FunctionFile;
use uncommon_core::witness::{self, SearchOutcome, WitnessCertificate};
use uncommon_core::{Error, LinearSystem, Result};

#[derive(Parser, Debug)]
#[command(name = "uncommon", version, about = "Solution densities, uncommonness witnesses and lifting certificates over F_p^n")]
struct Cli {
    /// Worker threads for data-parallel sections (results do not depend on it).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Maximum number of terms per density evaluation.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u128,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Direct,
    Fourier,
    Both,
    Auto,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Direct => Method::Direct,
            MethodArg::Fourier => Method::Fourier,
            MethodArg::Both => Method::Both,
            MethodArg::Auto => Method::Auto,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Structural report and which constructions apply.
    Analyze {
        #[arg(long)]
        system: PathBuf,
    },
    /// Solution density of a function.
    Density {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        function: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
    },
    /// Commonness defect T(1/2+f) + T(1/2-f) - 2^{1-t} of a zero-mean f.
    Defect {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        function: PathBuf,
    },
    /// Search for f with zero mean and negative density, or replay a certificate.
    Witness {
        #[arg(long, required_unless_present = "verify")]
        system: Option<PathBuf>,
        /// Group dimension for the full-phase search (default: try 1, 2, 3).
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, default_value_t = 10_000)]
        iters: u64,
        /// Where to write the certificate.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Replay the certificate in this file instead of searching.
        #[arg(long, conflicts_with = "system")]
        verify: Option<PathBuf>,
    },
    /// Lift a witness for a contained generic 2×k subsystem to an
    /// uncommonness certificate for the whole system.
    Certify {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, conflicts_with = "auto", required_unless_present = "auto")]
        sub: Option<PathBuf>,
        /// Find the contained subsystem among the restrictions.
        #[arg(long)]
        auto: bool,
        #[arg(long, default_value_t = 10_000)]
        iters: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay an uncommonness certificate.
    VerifyCertificate {
        #[arg(long = "certificate", value_name = "FILE")]
        path: PathBuf,
    },
    /// Martingale and normal-approximation statistics of the full-phase sum.
    Clt {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 2000)]
        samples: u64,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

fn load_system(path: &Path) -> Result<LinearSystem> {
    LinearSystem::parse(&read(path)?)
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

/// Text body or JSON value of one command's result.
struct Output {
    text: String,
    json: Value,
}

fn emit(cli: &Cli, command: &str, out: Output) {
    match cli.format {
        Format::Text if out.text.lines().any(|l| l.starts_with("seed: ")) => print!("{}", out.text),
        Format::Text => print!("seed: {}\n{}", cli.seed, out.text),
        Format::Json => {
            let v = json!({ "command": command, "seed": cli.seed, "result": out.json });
            println!("{}", serde_json::to_string_pretty(&v).expect("json values serialize"));
        }
    }
}

fn witness_search(system: &LinearSystem, n: Option<u32>, seed: u64, iters: u64, budget: u128) -> Result<WitnessCertificate> {
    let report = analysis::analyze(system);
    let restricted = report
        .verdict("restricted-support witness")
        .is_some_and(|v| v.applicable);
    if restricted && n.is_none_or(|n| n == 2) {
        return witness::search_witness_restricted(system, seed, iters, budget)?.into_result("restricted-support witness");
    }
    if !report.verdict("full-phase witness").is_some_and(|v| v.applicable) {
        return Err(Error::Usage(format!(
            "no witness construction applies: {}",
            report.verdicts.iter().map(|v| v.reason.as_str()).collect::<Vec<_>>().join("; ")
        )));
    }
    let dims = n.map_or(vec![1, 2, 3], |n| vec![n]);
    let mut last = None;
    for n in dims {
        match witness::search_witness_full(system, n, seed, iters, budget)? {
            SearchOutcome::Found { certificate, .. } => return Ok(*certificate),
            other => last = Some(other),
        }
    }
    last.expect("at least one dimension").into_result("full-phase witness")
}

fn run(cli: &Cli) -> Result<()> {
    let budget = cli.budget;
    let seed = cli.seed;
    match &cli.command {
        Command::Analyze { system } => {
            let a = analysis::analyze(&load_system(system)?);
            emit(cli, "analyze", Output { text: a.to_text(), json: serde_json::to_value(&a)? });
        }
        Command::Density { system, function, method } => {
            let sys = load_system(system)?;
            let f = FunctionFile::parse(&read(function)?)?.into_function();
            let mut report = density::density(sys.space(), &f, (*method).into(), budget)?;
            report.function_id = function.display().to_string();
            emit(cli, "density", Output { text: report.to_text(), json: serde_json::to_value(&report)? });
        }
        Command::Defect { system, function } => {
            let sys = load_system(system)?;
            let f = FunctionFile::parse(&read(function)?)?.into_function();
            let report = density::commonness_defect(&sys, &f, budget)?;
            emit(cli, "defect", Output { text: report.to_text(), json: serde_json::to_value(&report)? });
        }
        Command::Witness { system, n, iters, out, verify } => {
            if let Some(path) = verify {
                let cert: WitnessCertificate = serde_json::from_str(&read(path)?)?;
                let v = cert.verify(budget)?;
                let text = format!(
                    "verified: true\nmethod: {}\nmean: {:e}\nmax_abs: {}\nT_direct: {:e}\nT_fourier: {:e}\n",
                    witness::method_name(&cert.method),
                    v.mean,
                    v.max_abs,
                    v.t_direct,
                    v.t_fourier
                );
                let json = json!({ "verified": true, "mean": v.mean, "max_abs": v.max_abs, "t_direct": v.t_direct, "t_fourier": v.t_fourier });
                emit(cli, "witness-verify", Output { text, json });
                return Ok(());
            }
            let sys = load_system(system.as_ref().expect("clap enforces --system"))?;
            let cert = witness_search(&sys, *n, seed, *iters, budget)?;
            if let Some(path) = out {
                write_json(path, &cert)?;
            }
            emit(cli, "witness", Output { text: cert.to_text(), json: serde_json::to_value(&cert)? });
        }
        Command::Certify { system, sub, auto: _, iters, out } => {
            let sys = load_system(system)?;
            let sub = sub.as_deref().map(load_system).transpose()?;
            let params = CertifyParams {
                seed,
                witness_iters: *iters,
                budget,
                direct_budget: budget,
                ..CertifyParams::default()
            };
            let cert = amplify::certify_uncommon(&sys, sub.as_ref(), &params)?;
            if let Some(path) = out {
                write_json(path, &cert)?;
            }
            emit(cli, "certify", Output { text: cert.to_text(), json: serde_json::to_value(&cert)? });
        }
        Command::VerifyCertificate { path } => {
            let cert: UncommonnessCertificate = serde_json::from_str(&read(path)?)?;
            let replay = cert.verify(budget)?;
            let text = format!(
                "verified: true\nclasses: {}\nlead_upper: {:e}\ntail_upper: {:e}\ndirect_replayed: {}\ninequality: {}\n",
                replay.classes, replay.lead_upper, replay.tail_upper, replay.direct_replayed, cert.inequality
            );
            emit(cli, "verify-certificate", Output { text, json: serde_json::to_value(&replay)? });
        }
        Command::Clt { system, n, samples } => {
            let sys = load_system(system)?;
            let report = witness::clt_diagnostic(&sys, *n, *samples, seed, budget)?;
            emit(cli, "clt", Output { text: report.to_text(), json: serde_json::to_value(&report)? });
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Usage(_) | Error::Parse { .. } | Error::Io(_) | Error::Json(_) => 2,
        Error::Capacity { .. } => 3,
        Error::SearchExhausted { .. } => 4,
        Error::Invariant(_) | Error::Verification(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build_global() {
            eprintln!("error: cannot start {w} workers: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
