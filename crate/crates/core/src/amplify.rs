//! Lifting a negative witness for a generic `2 × k` subsystem to a proof that
//! a larger system `Ψ'` with shortest equation length `k − 1` is uncommon.
//!
//! For `f` with zero mean,
//! `T(½+f) + T(½−f) − 2^{1−t} = Σ_{S even, |S| ≥ k} 2^{1−t+|S|} T_{Ψ'|_S}(f)`.
//! With `f₃ = p^{−B} (f₀^{⊗A} ⊗ f₁) ⊗ 1₀` the term of `S` scales like
//! `p^{−B e_S}` where `e_S = |S| + deg(Ψ'|_S)`, so the classes with the least
//! exponent dominate for large `B`. Nothing of size `p^{A n₀ + n₁ + B}` is
//! ever built: every term is `T_S(f₀)^A · T_S(f₁)` times an exact scale.

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::{self, DEFAULT_BUDGET};
use crate::error::{usage, Error, Result};
use crate::fp::PrimeModulus;
use crate::function::GroupFunction;
use crate::interval::{self, approx, density_enclosure, DensityEnclosure, Interval};
use crate::rng::{self, PhaseStream};
use crate::system::{combinations, contains, operators_equal, LinearSystem, SolutionSpace};
use crate::witness::{self, SearchOutcome, WitnessCertificate};

/// Subsets of the same size whose restrictions define the same density
/// operator, up to relabeling variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestrictionClass {
    /// Sorted column subsets; the first one is the representative.
    pub members: Vec<Vec<usize>>,
    pub size: usize,
    pub deg: usize,
    /// `|S| + deg(Ψ'|_S)`.
    pub exponent: usize,
    /// `|S| = k` and `deg = k − 2`.
    pub leading: bool,
    pub space: SolutionSpace,
}

impl RestrictionClass {
    pub fn representative(&self) -> &[usize] {
        &self.members[0]
    }

    pub fn multiplicity(&self) -> usize {
        self.members.len()
    }
}

fn shortest(system: &LinearSystem) -> usize {
    system.shortest_equation_length()
}

/// All even `S ⊆ [t]` with `|S| ≥ k`, grouped by operator. Checks that
/// `deg(Ψ'|_S) ≥ k − 2` everywhere and that the minimal exponent `2k − 2` is
/// attained exactly on the leading classes.
pub fn restriction_classes(system: &LinearSystem, k: usize) -> Result<Vec<RestrictionClass>> {
    let s = shortest(system);
    if k < 2 || s + 1 != k {
        return usage(format!(
            "the shortest equation has length {s}, but k = {k} needs length {}",
            k.saturating_sub(1)
        ));
    }
    let t = system.cols();
    let mut classes: Vec<RestrictionClass> = Vec::new();
    let first = if k % 2 == 0 { k } else { k + 1 };
    for size in (first..=t).step_by(2) {
        let views: Vec<_> = combinations(t, size)
            .into_par_iter()
            .map(|cols| system.restrict(&cols))
            .collect::<Result<_>>()?;
        let start = classes.len();
        for view in views {
            let deg = view.deg();
            if deg + 2 < k {
                return Err(Error::Invariant(format!(
                    "restriction to {:?} has {deg} degrees of freedom, fewer than k − 2 = {}",
                    view.columns,
                    k - 2
                )));
            }
            let mut placed = false;
            for class in classes[start..].iter_mut() {
                if class.deg == deg && operators_equal(&class.space, &view.space)?.equivalent() {
                    class.members.push(view.columns.clone());
                    placed = true;
                    break;
                }
            }
            if !placed {
                classes.push(RestrictionClass {
                    members: vec![view.columns.clone()],
                    size,
                    deg,
                    exponent: size + deg,
                    leading: size == k && deg + 2 == k,
                    space: view.space,
                });
            }
        }
    }
    let floor = 2 * k - 2;
    for c in &classes {
        if c.exponent < floor || (c.exponent == floor) != c.leading {
            return Err(Error::Invariant(format!(
                "class {:?} has exponent {} against the minimum {floor}",
                c.representative(),
                c.exponent
            )));
        }
    }
    Ok(classes)
}

/// Random zero-mean function on `F_p^{n₀}` separating the leading classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Separator {
    pub p: u32,
    pub n0: u32,
    pub seed: u64,
    pub iteration: u64,
    pub values: Vec<f64>,
    /// Index (into the class list) of the class with strictly largest `|T|`.
    pub dominant: usize,
    /// `|T_dominant| / max_{other} |T|`; `f64::MAX` with a single class.
    pub ratio: f64,
    pub margin: f64,
}

impl Separator {
    pub fn function(&self) -> Result<GroupFunction> {
        GroupFunction::from_real(PrimeModulus::new(self.p, self.n0)?, &self.values)
    }
}

/// Uniform values in `[−½, ½)`, centered, then shrunk so `max |f| ≤ ½`.
pub fn separator_sample(p: u32, n0: u32, seed: u64, iteration: u64) -> Result<GroupFunction> {
    let modulus = PrimeModulus::new(p, n0)?;
    let mut stream = PhaseStream::new(seed, rng::DOMAIN_LIFT, (u64::from(n0) << 32) | iteration);
    let raw: Vec<f64> = (0..modulus.size()).map(|j| stream.uniform(j as u64) - 0.5).collect();
    let mean = raw.iter().sum::<f64>() / raw.len() as f64;
    let centered: Vec<f64> = raw.iter().map(|v| v - mean).collect();
    let max = centered.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let shrink = if max > 0.5 { 0.5 / max } else { 1.0 };
    GroupFunction::from_real(modulus, &centered.iter().map(|v| v * shrink).collect::<Vec<_>>())
}

pub const DEFAULT_MARGIN: f64 = 1e-3;
pub const N0_SCHEDULE: [u32; 3] = [1, 2, 3];

/// Find `f₀` such that one leading class has `|T|` larger than every other
/// leading class by the relative `margin`.
pub fn separate(
    classes: &[RestrictionClass],
    p: u32,
    seed: u64,
    margin: f64,
    iters_per_n: u64,
    budget: u128,
) -> Result<Separator> {
    let leading: Vec<usize> = (0..classes.len()).filter(|&i| classes[i].leading).collect();
    if leading.is_empty() {
        return usage("no leading class to separate");
    }
    let mut best_ratio = 0.0f64;
    for &n0 in &N0_SCHEDULE {
        for iteration in 0..iters_per_n {
            let f = separator_sample(p, n0, seed, iteration)?;
            let dens: Vec<f64> = leading
                .iter()
                .map(|&i| density::density_value(&classes[i].space, &f, budget).map(f64::abs))
                .collect::<Result<_>>()?;
            let (top, &lead) = dens
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .expect("at least one leading class");
            let rest = dens
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != top)
                .map(|(_, &v)| v)
                .fold(0.0f64, f64::max);
            let ratio = if rest > 0.0 { lead / rest } else { f64::MAX };
            best_ratio = best_ratio.max(ratio);
            if lead > 1e-12 && ratio > 1.0 + margin {
                return Ok(Separator {
                    p,
                    n0,
                    seed,
                    iteration,
                    values: f.real_values(),
                    dominant: leading[top],
                    ratio,
                    margin,
                });
            }
        }
    }
    Err(Error::SearchExhausted {
        stage: "separation".into(),
        summary: format!(
            "no sample separated the {} leading classes by margin {margin} up to n0 = {}; best ratio {best_ratio}; try a larger n0",
            leading.len(),
            N0_SCHEDULE[N0_SCHEDULE.len() - 1]
        ),
    })
}

/// Least even `A ≥ 2` with
/// `mult_d |T_d(f₀)|^A |T_d(f₁)| > Σ_{j ≠ d leading} mult_j |T_j(f₀)|^A |T_j(f₁)|`,
/// decided in log space.
pub fn choose_a(
    leading: &[(usize, f64, f64)],
    dominant: usize,
    cap: u32,
) -> Result<u32> {
    let (md, ad, bd) = leading[dominant];
    if ad == 0.0 || bd == 0.0 {
        return usage("the dominant class has zero density");
    }
    let lhs = |a: f64| (md as f64).ln() + a * ad.abs().ln() + bd.abs().ln();
    let rhs = |a: f64| {
        let logs: Vec<f64> = leading
            .iter()
            .enumerate()
            .filter(|&(j, &(_, x, y))| j != dominant && x != 0.0 && y != 0.0)
            .map(|(_, &(m, x, y))| (m as f64).ln() + a * x.abs().ln() + y.abs().ln())
            .collect();
        log_sum_exp(&logs)
    };
    let mut a = 2;
    while a <= cap {
        if lhs(a as f64) > rhs(a as f64) {
            return Ok(a);
        }
        a += 2;
    }
    Err(Error::SearchExhausted {
        stage: "amplification exponent".into(),
        summary: format!(
            "no even A ≤ {cap}; lead {:e} vs rest {:e} at A = {cap}",
            lhs(cap as f64),
            rhs(cap as f64)
        ),
    })
}

fn log_sum_exp(logs: &[f64]) -> f64 {
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + logs.iter().map(|l| (l - max).exp()).sum::<f64>().ln()
}

/// One class's contribution data: `(multiplicity, |S| − k, e_S − (2k − 2),
/// T_S(f₀), T_S(f₁))`.
#[derive(Debug, Clone, Copy)]
pub struct TermData {
    pub multiplicity: usize,
    pub extra_size: usize,
    pub extra_exponent: usize,
    pub t0: f64,
    pub t1: f64,
}

/// Least `B ≥ 0` with `tail(B) ≤ |lead| / 2`, where, after dividing out
/// `2^{1−t+k} p^{−B(2k−2)}`,
/// `lead = Σ_leading mult·T(f₀)^A T(f₁)` and
/// `tail(B) = Σ_other mult·2^{|S|−k} p^{−B(e_S−2k+2)} |T(f₀)|^A |T(f₁)|`.
pub fn choose_b(terms: &[TermData], a: u32, p: u32, cap: u32) -> Result<u32> {
    let ln = |x: f64| x.abs().ln();
    let lead_terms: Vec<&TermData> = terms.iter().filter(|t| t.extra_exponent == 0).collect();
    // factor out the largest leading term so nothing underflows
    let pivot = lead_terms
        .iter()
        .map(|t| (t.multiplicity as f64).ln() + a as f64 * ln(t.t0) + ln(t.t1))
        .fold(f64::NEG_INFINITY, f64::max);
    if pivot == f64::NEG_INFINITY {
        return usage("the leading total vanishes");
    }
    let lead_rel: f64 = lead_terms
        .iter()
        .map(|t| {
            let sign = t.t1.signum() * if a % 2 == 0 { 1.0 } else { t.t0.signum() };
            sign * ((t.multiplicity as f64).ln() + a as f64 * ln(t.t0) + ln(t.t1) - pivot).exp()
        })
        .sum();
    if lead_rel >= 0.0 {
        return usage("the leading total is not negative");
    }
    let ln_lead = pivot + lead_rel.abs().ln();
    let tail_logs = |b: u32| -> Vec<f64> {
        terms
            .iter()
            .filter(|t| t.extra_exponent > 0 && t.t0 != 0.0 && t.t1 != 0.0)
            .map(|t| {
                (t.multiplicity as f64).ln() + t.extra_size as f64 * 2f64.ln()
                    - (b as f64) * t.extra_exponent as f64 * (p as f64).ln()
                    + a as f64 * ln(t.t0)
                    + ln(t.t1)
            })
            .collect()
    };
    for b in 0..=cap {
        if log_sum_exp(&tail_logs(b)) <= ln_lead - 2f64.ln() {
            return Ok(b);
        }
    }
    Err(Error::SearchExhausted {
        stage: "tensor scaling".into(),
        summary: format!("tail still exceeds half the lead at B = {cap}"),
    })
}

/// Per-class record in a certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassRecord {
    pub members: Vec<Vec<usize>>,
    pub size: usize,
    pub deg: usize,
    pub exponent: usize,
    pub leading: bool,
    pub t_f0: DensityEnclosure,
    pub t_f1: DensityEnclosure,
}

/// Outcome of the exact inequality check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactCheck {
    /// Upper end of the enclosure of the leading total (approximate).
    pub lead_upper: f64,
    /// Upper bound on the magnitude of the tail (approximate).
    pub tail_upper: f64,
    pub holds: bool,
}

/// `lead_hi + tail_hi < 0` in exact rational arithmetic over the stored
/// enclosures: the defect of `f₃`, divided by `2^{1−t+k} p^{−B(2k−2)}`.
pub fn exact_check(records: &[ClassRecord], k: usize, a: u32, b: u32, p: u32) -> Result<ExactCheck> {
    let mut lead = Interval::point(BigRational::zero());
    let mut tail = BigRational::zero();
    for r in records {
        let t0 = r.t_f0.interval()?;
        let t1 = r.t_f1.interval()?;
        let mult = BigRational::from_integer((r.members.len() as i64).into());
        if r.leading {
            lead = lead.add(&t0.pow(a).mul(&t1).scale(&mult));
        } else {
            let extra = (r.exponent - (2 * k - 2)) as u64 * b as u64;
            let scale = &mult * interval::power_of_two((r.size - k) as i64) * interval::inverse_power(p, extra);
            tail += scale * num_traits::pow(t0.abs_upper(), a as usize) * t1.abs_upper();
        }
    }
    let holds = lead.hi() + &tail < BigRational::zero();
    Ok(ExactCheck {
        lead_upper: approx(lead.hi()),
        tail_upper: approx(&tail),
        holds,
    })
}

/// Optional small-scale confirmation with `f₃` built explicitly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectCheck {
    pub dimension: u32,
    pub terms: u128,
    pub defect_direct: Option<f64>,
    /// The defect predicted by the class expansion at the certified `A`, `B`.
    pub defect_predicted: f64,
    pub signs_match: Option<bool>,
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncommonnessCertificate {
    pub system: LinearSystem,
    pub k: usize,
    pub subsystem: LinearSystem,
    /// Columns of the system that carry the subsystem, in its variable order.
    pub subsystem_columns: Vec<usize>,
    pub classes: Vec<ClassRecord>,
    pub separator: Separator,
    pub dominant: usize,
    pub witness: WitnessCertificate,
    pub a: u32,
    pub b: u32,
    /// `p^{−B} max|f₀|^A max|f₁|`, which must be at most ½.
    pub final_max_abs: f64,
    pub exact: ExactCheck,
    pub inequality: String,
    pub direct: DirectCheck,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct CertifyParams {
    pub seed: u64,
    pub margin: f64,
    pub separation_iters: u64,
    pub witness_iters: u64,
    /// Dimensions tried by the full-phase search when the restricted
    /// construction does not apply.
    pub witness_dims: Vec<u32>,
    pub a_cap: u32,
    pub b_cap: u32,
    pub budget: u128,
    /// Largest `p^{dim · deg}` for the explicit `f₃` confirmation.
    pub direct_budget: u128,
}

impl Default for CertifyParams {
    fn default() -> Self {
        Self {
            seed: 0,
            margin: DEFAULT_MARGIN,
            separation_iters: 200,
            witness_iters: 10_000,
            witness_dims: vec![2, 3],
            a_cap: 10_000,
            b_cap: 100_000,
            budget: DEFAULT_BUDGET,
            direct_budget: DEFAULT_BUDGET,
        }
    }
}

fn validate_subsystem(system: &LinearSystem, sub: &LinearSystem) -> Result<(usize, Vec<usize>)> {
    if sub.rows() != 2 {
        return usage(format!("the subsystem must have 2 equations, it has {}", sub.rows()));
    }
    let k = sub.cols();
    if k < 4 || k % 2 == 1 {
        return usage(format!("the subsystem needs an even number k ≥ 4 of variables, got {k}"));
    }
    let s_sub = sub.shortest_equation_length();
    if s_sub + 1 != k {
        return usage(format!("the subsystem is not generic: shortest equation {s_sub}, need {}", k - 1));
    }
    if sub.p() != system.p() {
        return usage("system and subsystem use different primes");
    }
    let s = shortest(system);
    if s + 1 != k {
        return usage(format!("the shortest equation of the system has length {s}, need {}", k - 1));
    }
    let cols = contains(system.space(), sub.space())
        .ok_or_else(|| Error::Usage("the system does not contain the subsystem".into()))?;
    Ok((k, cols))
}

/// Whether every solution of `system`, read at `columns` in order, solves `sub`.
pub fn carries(system: &LinearSystem, sub: &LinearSystem, columns: &[usize]) -> bool {
    let p = system.p();
    columns.len() == sub.cols()
        && columns.iter().all(|&c| c < system.cols())
        && system.space().kernel().iter().all(|u| {
            let x: Vec<u32> = columns.iter().map(|&c| u[c]).collect();
            crate::linalg::mat_vec(sub.space().equations(), &x, p).iter().all(|&v| v == 0)
        })
}

/// Pick the first leading class as the contained generic subsystem.
pub fn find_subsystem(system: &LinearSystem) -> Result<(LinearSystem, Vec<usize>)> {
    let k = shortest(system) + 1;
    if k < 4 || k % 2 == 1 {
        return usage(format!(
            "shortest equation length {} gives k = {k}; the lifting needs an even k ≥ 4",
            k - 1
        ));
    }
    let classes = restriction_classes(system, k)?;
    let class = classes.iter().find(|c| c.leading).ok_or_else(|| Error::SearchExhausted {
        stage: "containment".into(),
        summary: format!("no {k}-subset of the variables carries a generic 2×{k} subsystem"),
    })?;
    Ok((class.space.to_system()?, class.representative().to_vec()))
}

fn find_witness(hat: &LinearSystem, params: &CertifyParams) -> Result<WitnessCertificate> {
    let seed = params.seed;
    if !hat.contains_additive_tuple() {
        return witness::search_witness_restricted(hat, seed, params.witness_iters, params.budget)?
            .into_result("restricted-support witness");
    }
    let mut last = None;
    for &n in &params.witness_dims {
        match witness::search_witness_full(hat, n, seed, params.witness_iters, params.budget)? {
            SearchOutcome::Found { certificate, .. } => return Ok(*certificate),
            other => last = Some(other),
        }
    }
    match last {
        Some(outcome) => outcome.into_result("full-phase witness"),
        None => usage("no witness dimensions configured"),
    }
}

fn class_records(
    classes: &[RestrictionClass],
    f0: &GroupFunction,
    f1: &GroupFunction,
    budget: u128,
) -> Result<Vec<ClassRecord>> {
    classes
        .par_iter()
        .map(|c| {
            Ok(ClassRecord {
                members: c.members.clone(),
                size: c.size,
                deg: c.deg,
                exponent: c.exponent,
                leading: c.leading,
                t_f0: density_enclosure(&c.space, f0, budget)?,
                t_f1: density_enclosure(&c.space, f1, budget)?,
            })
        })
        .collect()
}

fn term_data(records: &[ClassRecord], k: usize) -> Vec<TermData> {
    records
        .iter()
        .map(|r| TermData {
            multiplicity: r.members.len(),
            extra_size: r.size - k,
            extra_exponent: r.exponent - (2 * k - 2),
            t0: r.t_f0.value,
            t1: r.t_f1.value,
        })
        .collect()
}

fn predicted_defect(records: &[ClassRecord], t: usize, a: u32, b: u32, p: u32) -> f64 {
    records
        .iter()
        .map(|r| {
            let log2 = (1 - t as i64 + r.size as i64) as f64 * 2f64.ln();
            let log_scale = log2 - (b as f64) * r.exponent as f64 * (p as f64).ln();
            let mag = (r.members.len() as f64).ln()
                + log_scale
                + a as f64 * r.t_f0.value.abs().ln()
                + r.t_f1.value.abs().ln();
            let sign = r.t_f1.value.signum() * if a % 2 == 0 { 1.0 } else { r.t_f0.value.signum() };
            sign * mag.exp()
        })
        .sum()
}

/// `f₃ = p^{−B} f₀^{⊗A} ⊗ f₁ ⊗ 1₀`, materialized.
pub fn lifted_function(f0: &GroupFunction, a: u32, f1: &GroupFunction, b: u32, p: u32, max_len: u64) -> Result<GroupFunction> {
    let mut f = f0.tensor_power(a, max_len)?.tensor(f1)?;
    if b > 0 {
        f = f.tensor(&GroupFunction::indicator_zero(PrimeModulus::new(p, b)?))?;
    }
    Ok(f.scale((p as f64).powi(-(b as i32))))
}

fn direct_check(
    system: &LinearSystem,
    f0: &GroupFunction,
    f1: &GroupFunction,
    a: u32,
    b: u32,
    predicted: f64,
    budget: u128,
) -> Result<DirectCheck> {
    let p = system.p();
    let dimension = f0.modulus().n() * a + f1.modulus().n() + b;
    let terms = (p as u128).saturating_pow(dimension.saturating_mul(system.deg() as u32));
    let table = (p as u128).saturating_pow(dimension);
    if terms > budget || table > budget {
        return Ok(DirectCheck {
            dimension,
            terms,
            defect_direct: None,
            defect_predicted: predicted,
            signs_match: None,
            skipped: Some(format!("needs {terms} terms, budget {budget}")),
        });
    }
    let f3 = lifted_function(f0, a, f1, b, p, budget as u64)?;
    let plus = density::density_direct(system.space(), &f3.offset(0.5), budget)?.value.re;
    let minus = density::density_direct(system.space(), &f3.neg().offset(0.5), budget)?.value.re;
    let defect = plus + minus - 2f64.powi(1 - system.cols() as i32);
    Ok(DirectCheck {
        dimension,
        terms,
        defect_direct: Some(defect),
        defect_predicted: predicted,
        signs_match: Some((defect < 0.0) == (predicted < 0.0)),
        skipped: None,
    })
}

fn describe_inequality(records: &[ClassRecord], k: usize, t: usize, a: u32, b: u32, p: u32, exact: &ExactCheck) -> String {
    let floor = 2 * k - 2;
    let mut parts = Vec::new();
    for r in records {
        parts.push(format!(
            "{}·2^{}·{p}^-{}·T{:?}(f0)^{a}·T{:?}(f1)",
            r.members.len(),
            1 + r.size as i64 - t as i64,
            b as usize * r.exponent,
            r.members[0],
            r.members[0]
        ));
    }
    format!(
        "defect(f3) = {} ≤ 2^{}·{p}^-{}·({:e} + {:e}) < 0",
        parts.join(" + "),
        1 + k as i64 - t as i64,
        b as usize * floor,
        exact.lead_upper,
        exact.tail_upper
    )
}

/// Full lifting pipeline. With `sub = None` the contained subsystem is found
/// among the restrictions.
pub fn certify_uncommon(
    system: &LinearSystem,
    sub: Option<&LinearSystem>,
    params: &CertifyParams,
) -> Result<UncommonnessCertificate> {
    let (subsystem, k, columns) = match sub {
        Some(sub) => {
            let (k, cols) = validate_subsystem(system, sub)?;
            (sub.clone(), k, cols)
        }
        None => {
            let (sub, cols) = find_subsystem(system)?;
            let k = sub.cols();
            validate_subsystem(system, &sub)?;
            (sub, k, cols)
        }
    };
    let p = system.p();
    let t = system.cols();
    let mut warnings = Vec::new();
    if p < 7 {
        warnings.push(format!(
            "no explicit lower bound on p is known for this lifting argument; proceeding with p = {p}"
        ));
    }
    let classes = restriction_classes(system, k)?;
    if !classes.iter().any(|c| c.leading) {
        return Err(Error::Invariant("the contained subsystem gives no leading class".into()));
    }

    let separator = separate(&classes, p, params.seed, params.margin, params.separation_iters, params.budget)?;
    let dominant = separator.dominant;
    let hat = classes[dominant].space.to_system()?;
    let witness = find_witness(&hat, params)?;
    let f0 = separator.function()?;
    let f1 = witness.function()?;

    let records = class_records(&classes, &f0, &f1, params.budget)?;
    let data = term_data(&records, k);
    let leading: Vec<(usize, f64, f64)> = data
        .iter()
        .filter(|d| d.extra_exponent == 0)
        .map(|d| (d.multiplicity, d.t0, d.t1))
        .collect();
    let dom_pos = records[..dominant].iter().filter(|r| r.leading).count();
    let mut a = choose_a(&leading, dom_pos, params.a_cap)?;
    let (b, exact) = loop {
        let b = choose_b(&data, a, p, params.b_cap)?;
        let mut last = None;
        // the float choice of B can be off by rounding; nudge it up
        for b in b..=b.saturating_add(4) {
            let check = exact_check(&records, k, a, b, p)?;
            if check.holds {
                last = Some((b, check));
                break;
            }
        }
        if let Some(found) = last {
            break found;
        }
        a += 2;
        if a > params.a_cap {
            return Err(Error::Verification(
                "the leading total cannot be certified negative from the density enclosures".into(),
            ));
        }
    };

    let final_max_abs = (p as f64).powi(-(b as i32)) * f0.max_abs().powi(a as i32) * f1.max_abs();
    if final_max_abs > 0.5 {
        return Err(Error::Invariant(format!("lifted function reaches {final_max_abs} > 1/2")));
    }
    let predicted = predicted_defect(&records, t, a, b, p);
    let direct = direct_check(system, &f0, &f1, a, b, predicted, params.direct_budget)?;
    if direct.signs_match == Some(false) {
        return Err(Error::Verification(format!(
            "explicit defect {:?} disagrees in sign with the expansion {predicted:e}",
            direct.defect_direct
        )));
    }
    Ok(UncommonnessCertificate {
        inequality: describe_inequality(&records, k, t, a, b, p, &exact),
        system: system.clone(),
        k,
        subsystem,
        subsystem_columns: columns,
        classes: records,
        separator,
        dominant,
        witness,
        a,
        b,
        final_max_abs,
        exact,
        direct,
        warnings,
    })
}

/// What a replay re-established.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReplay {
    pub classes: usize,
    pub lead_upper: f64,
    pub tail_upper: f64,
    pub direct_replayed: bool,
}

impl UncommonnessCertificate {
    /// Recheck everything from the stored data: containment, classes,
    /// the separator and witness tables, every density enclosure, the exact
    /// inequality and (when recorded) the explicit defect.
    pub fn verify(&self, budget: u128) -> Result<CertificateReplay> {
        let fail = |msg: String| Err(Error::Verification(msg));
        let p = self.system.p();
        let (k, cols) = validate_subsystem(&self.system, &self.subsystem)?;
        if k != self.k {
            return fail(format!("stored k = {} but the subsystem has {k} variables", self.k));
        }
        let _ = cols;
        if !carries(&self.system, &self.subsystem, &self.subsystem_columns) {
            return fail("the stored columns do not carry the subsystem".into());
        }
        let classes = restriction_classes(&self.system, k)?;
        if classes.len() != self.classes.len() {
            return fail(format!("{} classes recomputed, {} stored", classes.len(), self.classes.len()));
        }
        let regenerated = separator_sample(p, self.separator.n0, self.separator.seed, self.separator.iteration)?;
        let bits_equal = regenerated
            .real_values()
            .iter()
            .zip(&self.separator.values)
            .all(|(a, b)| a.to_bits() == b.to_bits());
        if !bits_equal || regenerated.modulus().size() != self.separator.values.len() {
            return fail("the separator does not regenerate from its seed".into());
        }
        let f0 = self.separator.function()?;
        let dominant = &classes[self.dominant];
        if !dominant.leading {
            return fail("the dominant class is not leading".into());
        }
        if !operators_equal(&dominant.space, self.witness.system.space())?.labeled {
            return fail("the witness is not for the dominant class".into());
        }
        self.witness.verify(budget)?;
        let f1 = self.witness.function()?;
        for (c, r) in classes.iter().zip(&self.classes) {
            if c.members != r.members || c.deg != r.deg || c.exponent != r.exponent || c.leading != r.leading {
                return fail(format!("class {:?} does not match the recomputation", r.members[0]));
            }
            let e0 = density_enclosure(&c.space, &f0, budget)?;
            let e1 = density_enclosure(&c.space, &f1, budget)?;
            if !r.t_f0.contains(e0.value) || !r.t_f1.contains(e1.value) {
                return fail(format!("recomputed densities of {:?} leave the stored enclosures", r.members[0]));
            }
        }
        let top = self.classes[self.dominant].t_f0.value.abs();
        let beaten = self
            .classes
            .iter()
            .enumerate()
            .filter(|&(i, r)| r.leading && i != self.dominant)
            .all(|(_, r)| top > (1.0 + self.separator.margin) * r.t_f0.value.abs());
        if !beaten {
            return fail("the separator does not single out the dominant class".into());
        }
        if self.a < 2 || self.a % 2 == 1 {
            return fail(format!("A = {} is not an even integer ≥ 2", self.a));
        }
        let exact = exact_check(&self.classes, k, self.a, self.b, p)?;
        if !exact.holds {
            return fail("the exact inequality does not hold".into());
        }
        let final_max = (p as f64).powi(-(self.b as i32)) * f0.max_abs().powi(self.a as i32) * f1.max_abs();
        if final_max > 0.5 || f0.mean().re.abs() > 1e-10 {
            return fail("the lifted function leaves [-1/2, 1/2] or f0 is not centered".into());
        }
        let mut direct_replayed = false;
        if self.direct.defect_direct.is_some() {
            let again = direct_check(&self.system, &f0, &f1, self.a, self.b, self.direct.defect_predicted, budget.max(self.direct.terms))?;
            if again.defect_direct.map(f64::to_bits) != self.direct.defect_direct.map(f64::to_bits) {
                return fail("the explicit defect does not replay".into());
            }
            direct_replayed = true;
        }
        Ok(CertificateReplay {
            classes: classes.len(),
            lead_upper: exact.lead_upper,
            tail_upper: exact.tail_upper,
            direct_replayed,
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "system: {}\nk: {}\nsubsystem_columns: {:?}\nclasses: {}\nleading_classes: {}\ndominant: {:?}\nn0: {}\nwitness: {} (n = {}, T = {:e})\nA: {}\nB: {}\nfinal_max_abs: {:e}\nlead_upper: {:e}\ntail_upper: {:e}\nexact_inequality_holds: {}\ninequality: {}\n",
            density::describe(self.system.space()),
            self.k,
            self.subsystem_columns,
            self.classes.len(),
            self.classes.iter().filter(|c| c.leading).count(),
            self.classes[self.dominant].members[0],
            self.separator.n0,
            witness::method_name(&self.witness.method),
            self.witness.n,
            self.witness.t_direct,
            self.a,
            self.b,
            self.final_max_abs,
            self.exact.lead_upper,
            self.exact.tail_upper,
            self.exact.holds,
            self.inequality
        );
        match (&self.direct.defect_direct, &self.direct.skipped) {
            (Some(d), _) => s.push_str(&format!(
                "direct_defect: {d:e} (predicted {:e}, dimension {})\n",
                self.direct.defect_predicted, self.direct.dimension
            )),
            (None, Some(why)) => s.push_str(&format!("direct_defect: skipped ({why})\n")),
            _ => {}
        }
        for w in &self.warnings {
            s.push_str(&format!("warning: {w}\n"));
        }
        s
    }
}

/// The scaling law behind `B`: `T(g ⊗ 1₀) = p^{−deg} T(g)` with `1₀` on F_p.
pub fn zero_indicator_ratio(space: &SolutionSpace, g: &GroupFunction, budget: u128) -> Result<(f64, f64)> {
    let one = GroupFunction::indicator_zero(PrimeModulus::new(g.modulus().p(), 1)?);
    let lifted = density::density_value(space, &g.tensor(&one)?, budget)?;
    let base = density::density_value(space, g, budget)?;
    Ok((lifted, (g.modulus().p() as f64).powi(-(space.deg() as i32)) * base))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four_ap(p: u32) -> LinearSystem {
        LinearSystem::new(p, &[vec![1, -2, 1, 0], vec![0, 1, -2, 1]]).unwrap()
    }

    #[test]
    fn single_system_has_one_class() {
        let c = restriction_classes(&four_ap(5), 4).unwrap();
        assert_eq!(c.len(), 1);
        assert!(c[0].leading);
        assert_eq!((c[0].multiplicity(), c[0].exponent), (1, 6));
    }

    #[test]
    fn wrong_k_is_rejected() {
        let err = restriction_classes(&four_ap(5), 5).unwrap_err();
        assert!(matches!(err, Error::Usage(m) if m.contains("length 3")));
    }

    #[test]
    fn choose_a_closed_form() {
        // 1·0.5^A·1 > 2·0.4^A·1  ⇔  A > ln 2 / ln 1.25 ≈ 3.1
        let a = choose_a(&[(1, 0.5, -1.0), (2, 0.4, 1.0)], 0, 100).unwrap();
        assert_eq!(a, 4);
        assert_eq!(choose_a(&[(3, 0.1, -1.0)], 0, 100).unwrap(), 2);
    }

    #[test]
    fn choose_b_cases() {
        let lead = TermData {
            multiplicity: 1,
            extra_size: 0,
            extra_exponent: 0,
            t0: 0.1,
            t1: -1e-3,
        };
        assert_eq!(choose_b(&[lead], 2, 5, 100).unwrap(), 0);
        // tail/lead = 1e3 at B = 0: need 5^B ≥ 2e3, B = 5
        let tail = TermData {
            multiplicity: 1,
            extra_size: 0,
            extra_exponent: 1,
            t0: 0.1,
            t1: 1.0,
        };
        assert_eq!(choose_b(&[lead, tail], 2, 5, 100).unwrap(), 5);
    }

    #[test]
    fn zero_indicator_scaling() {
        let sys = four_ap(5);
        let g = separator_sample(5, 1, 3, 0).unwrap();
        let (lifted, scaled) = zero_indicator_ratio(sys.space(), &g, DEFAULT_BUDGET).unwrap();
        assert!((lifted - scaled).abs() < 1e-12);
    }

    #[test]
    fn separator_is_centered_and_small() {
        for it in 0..10 {
            let f = separator_sample(5, 2, 1, it).unwrap();
            assert!(f.mean().re.abs() < 1e-15);
            assert!(f.max_abs() <= 0.5);
        }
    }
}
