//! Random witnesses `f` with `𝔼f = 0` and `T_Ψ(f) < 0` for generic `2 × k`
//! systems, and the martingale statistics behind the full-phase construction.
//!
//! Two samplers are implemented. The restricted-support one lives on
//! `F_p^2` and puts `2k` random Fourier coefficients on `±M(r0, s0)`; it
//! works whenever the system has no additive `k`-tuple. The full-phase one
//! puts a random unit phase on every nonzero frequency of `F_p^n`.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::density::{self, pairwise_sum, product_over, DualPairs, Method};
use crate::error::{usage, Error, Result};
use crate::fp::{self, GroupElement, PrimeModulus};
use crate::function::{inverse_transform, FourierTable, GroupFunction};
use crate::linalg;
use crate::rng::{self, PhaseStream};
use crate::system::LinearSystem;

/// Agreement required between the two density oracles on a certificate.
pub const ORACLE_TOL: f64 = 1e-8;
/// A density counts as negative below `-NEGATIVE_TOL · terms`.
pub const NEGATIVE_TOL: f64 = 1e-9;
/// ε grid, in standardized units, for the Lindeberg-type diagnostic.
pub const EPSILON_GRID: [f64; 3] = [0.5, 0.1, 0.02];

const BATCH: u64 = 64;

pub fn linearly_independent(modulus: &PrimeModulus, r: usize, s: usize) -> bool {
    r != 0 && (0..modulus.p()).all(|c| modulus.scale_index(r, c) != s)
}

/// `M(r, s) = {a_i r + b_i s : i ∈ [k]}` as table indices, in column order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyMultiset {
    pub modulus: PrimeModulus,
    pub r: usize,
    pub s: usize,
    pub entries: Vec<usize>,
    pub independent: bool,
}

impl FrequencyMultiset {
    pub fn new(columns: &[(u32, u32)], modulus: PrimeModulus, r: usize, s: usize) -> Self {
        Self {
            entries: columns
                .iter()
                .map(|&(a, b)| modulus.combine_index(a, r, b, s))
                .collect(),
            independent: linearly_independent(&modulus, r, s),
            modulus,
            r,
            s,
        }
    }

    pub fn elements(&self) -> Vec<GroupElement> {
        self.entries.iter().map(|&i| self.modulus.element(i)).collect()
    }

    /// `|M(r, s)|`, in column order.
    pub fn abs_entries(&self) -> Vec<usize> {
        self.entries.iter().map(|&i| self.modulus.abs_index(i)).collect()
    }

    pub fn distinct(&self) -> bool {
        all_distinct(&self.entries)
    }

    pub fn abs_distinct(&self) -> bool {
        all_distinct(&self.abs_entries())
    }

    pub fn contains_zero(&self) -> bool {
        self.entries.contains(&0)
    }
}

fn all_distinct(v: &[usize]) -> bool {
    let mut sorted = v.to_vec();
    sorted.sort_unstable();
    sorted.windows(2).all(|w| w[0] != w[1])
}

/// Whether the multiset splits into pairs `{v, -v}`.
pub fn cancelling_partition(w: &[GroupElement]) -> bool {
    let Some(first) = w.first() else {
        return true;
    };
    if w.iter().any(|x| x.p() != first.p() || x.dim() != first.dim()) {
        return false;
    }
    let modulus = match PrimeModulus::new(first.p(), first.dim() as u32) {
        Ok(m) => m,
        Err(_) => return false,
    };
    let idx: Vec<usize> = w.iter().map(|x| modulus.index_of(x.coords())).collect();
    cancelling_partition_indices(&modulus, &idx)
}

/// Same as [`cancelling_partition`] on table indices: every `h ≠ 0` must occur
/// as often as `-h`, and `0` an even number of times.
pub fn cancelling_partition_indices(modulus: &PrimeModulus, w: &[usize]) -> bool {
    if w.len() % 2 == 1 {
        return false;
    }
    let mut counts: HashMap<usize, i64> = HashMap::new();
    for &h in w {
        let key = modulus.abs_index(h);
        let delta = match modulus.sign_of(h) {
            Ordering::Less => -1,
            Ordering::Greater => 1,
            // zero pairs with itself: track parity only
            Ordering::Equal => {
                let c = counts.entry(0).or_insert(0);
                *c = 1 - *c;
                continue;
            }
        };
        *counts.entry(key).or_insert(0) += delta;
    }
    counts.values().all(|&c| c == 0)
}

fn check_generic(system: &LinearSystem) -> Result<Vec<(u32, u32)>> {
    let cols = system.column_pairs()?;
    if !system.minors_generic()? {
        return usage("the system has a singular 2×2 minor");
    }
    Ok(cols)
}

/// Supported dual pair: `M(r, s) ⊆ M0 ∪ -M0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportedPair {
    pub r: usize,
    pub s: usize,
    pub independent: bool,
    /// For each column, the index into `M0` and whether it is the negated copy.
    pub slots: Vec<(usize, bool)>,
}

/// The restricted-support construction on `F_p^2` around a base pair `(r0, s0)`.
#[derive(Debug, Clone)]
pub struct RestrictedSupport {
    modulus: PrimeModulus,
    columns: Vec<(u32, u32)>,
    r0: usize,
    s0: usize,
    m0: Vec<usize>,
    slot_of: HashMap<usize, (usize, bool)>,
    supported: Vec<SupportedPair>,
}

impl RestrictedSupport {
    pub fn new(system: &LinearSystem, r0: &GroupElement, s0: &GroupElement) -> Result<Self> {
        let columns = check_generic(system)?;
        let modulus = PrimeModulus::new(system.p(), 2)?;
        for (name, v) in [("r0", r0), ("s0", s0)] {
            if v.p() != system.p() || v.dim() != 2 {
                return usage(format!("{name} must be an element of F_{}^2", system.p()));
            }
        }
        let r0 = modulus.index_of(r0.coords());
        let s0 = modulus.index_of(s0.coords());
        if !linearly_independent(&modulus, r0, s0) {
            return usage("r0 and s0 are linearly dependent");
        }
        let m0 = FrequencyMultiset::new(&columns, modulus, r0, s0);
        if m0.contains_zero() {
            return usage("0 ∈ M0");
        }
        if !m0.distinct() {
            return usage("M0 has repeated entries");
        }
        if !m0.abs_distinct() {
            return usage("M0 meets -M0");
        }
        let mut slot_of = HashMap::new();
        for (i, &h) in m0.entries.iter().enumerate() {
            slot_of.insert(h, (i, false));
            slot_of.insert(modulus.neg_index(h), (i, true));
        }
        let mut out = Self {
            modulus,
            columns,
            r0,
            s0,
            m0: m0.entries,
            slot_of,
            supported: Vec::new(),
        };
        out.supported = out.find_supported();
        Ok(out)
    }

    /// Base pair `r0 = (1, 0)`, `s0 = (0, 1)`.
    pub fn standard(system: &LinearSystem) -> Result<Self> {
        let p = system.p();
        Self::new(
            system,
            &GroupElement::new(p, vec![1, 0]),
            &GroupElement::new(p, vec![0, 1]),
        )
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn k(&self) -> usize {
        self.columns.len()
    }

    pub fn m0(&self) -> &[usize] {
        &self.m0
    }

    pub fn base_pair(&self) -> (GroupElement, GroupElement) {
        (self.modulus.element(self.r0), self.modulus.element(self.s0))
    }

    pub fn supported_pairs(&self) -> &[SupportedPair] {
        &self.supported
    }

    /// The first two columns form an invertible minor, so `(r, s)` is
    /// determined by where they land; try all `(2k)^2` landings.
    fn find_supported(&self) -> Vec<SupportedPair> {
        let p = self.modulus.p();
        let ((a1, b1), (a2, b2)) = (self.columns[0], self.columns[1]);
        let det_inv = fp::inv(fp::sub(fp::mul(a1, b2, p), fp::mul(a2, b1, p), p), p);
        let support: Vec<usize> = self
            .m0
            .iter()
            .flat_map(|&h| [h, self.modulus.neg_index(h)])
            .collect();
        let mut found = Vec::new();
        for &h1 in &support {
            for &h2 in &support {
                // [a1 b1; a2 b2] (r, s)^T = (h1, h2)^T
                let r = self.modulus.combine_index(
                    fp::mul(b2, det_inv, p),
                    h1,
                    fp::mul(fp::neg(b1, p), det_inv, p),
                    h2,
                );
                let s = self.modulus.combine_index(
                    fp::mul(fp::neg(a2, p), det_inv, p),
                    h1,
                    fp::mul(a1, det_inv, p),
                    h2,
                );
                if let Some(pair) = self.classify(r, s) {
                    found.push(pair);
                }
            }
        }
        found.sort_by_key(|x| (x.r, x.s));
        found
    }

    fn classify(&self, r: usize, s: usize) -> Option<SupportedPair> {
        let m = FrequencyMultiset::new(&self.columns, self.modulus, r, s);
        let slots: Option<Vec<(usize, bool)>> =
            m.entries.iter().map(|h| self.slot_of.get(h).copied()).collect();
        slots.map(|slots| SupportedPair {
            r,
            s,
            independent: m.independent,
            slots,
        })
    }

    /// Supported pairs by scanning all `p^4` dual pairs.
    pub fn supported_pairs_exhaustive(&self) -> Vec<SupportedPair> {
        let size = self.modulus.size();
        (0..size)
            .flat_map(|r| (0..size).map(move |s| (r, s)))
            .filter_map(|(r, s)| self.classify(r, s))
            .collect()
    }

    /// Supported pairs whose frequencies cancel in pairs. The construction
    /// relies on this being empty.
    pub fn cancelling_supported(&self) -> Vec<SupportedPair> {
        self.supported
            .iter()
            .filter(|pair| {
                let m = FrequencyMultiset::new(&self.columns, self.modulus, pair.r, pair.s);
                cancelling_partition_indices(&self.modulus, &m.entries)
            })
            .cloned()
            .collect()
    }

    /// `k` phases for iteration `iteration`, one per entry of `M0`; the slot
    /// of entry `h` is its table index.
    pub fn phases(&self, seed: u64, iteration: u64) -> Vec<f64> {
        let mut stream = PhaseStream::new(seed, rng::DOMAIN_RESTRICTED, iteration);
        self.m0.iter().map(|&h| stream.phase(h as u64)).collect()
    }

    /// `F̂ = ξ_h / 2k` on `M0`, conjugate on `-M0`, zero elsewhere.
    pub fn spectrum(&self, phases: &[f64]) -> FourierTable {
        let mut t = FourierTable::zeros(self.modulus);
        let c = 1.0 / (2 * self.k()) as f64;
        for (&h, &theta) in self.m0.iter().zip(phases) {
            let z = Complex64::from_polar(c, theta);
            t.coeffs_mut()[h] = z;
            t.coeffs_mut()[self.modulus.neg_index(h)] = z.conj();
        }
        t
    }

    pub fn function(&self, phases: &[f64]) -> Result<GroupFunction> {
        real_part(&inverse_transform(&self.spectrum(phases)))
    }

    /// `T_Ψ(F)` summed over supported pairs only.
    pub fn density_from_phases(&self, phases: &[f64]) -> f64 {
        let c = 1.0 / (2 * self.k()) as f64;
        let terms: Vec<Complex64> = self
            .supported
            .iter()
            .map(|pair| {
                pair.slots.iter().fold(Complex64::new(1.0, 0.0), |acc, &(i, conj)| {
                    let z = Complex64::from_polar(c, phases[i]);
                    acc * if conj { z.conj() } else { z }
                })
            })
            .collect();
        pairwise_sum(&terms).re
    }

    /// Empirical mean and standard error of `T_Ψ(F)` over the phase law.
    pub fn mean_density(&self, seed: u64, samples: u64) -> (f64, f64) {
        let values: Vec<f64> = (0..samples)
            .into_par_iter()
            .map(|i| self.density_from_phases(&self.phases(seed, i)))
            .collect();
        let s = SampleSummary::from_values(&values);
        (s.mean, s.std / (samples as f64).sqrt())
    }
}

fn real_part(f: &GroupFunction) -> Result<GroupFunction> {
    let imag = f.values().iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if imag > 1e-10 {
        return Err(Error::Invariant(format!(
            "inverse transform of a conjugate-symmetric spectrum has imaginary part {imag:e}"
        )));
    }
    Ok(f.to_real())
}

/// Restricted-support sample for one iteration.
pub fn restricted_support_sampler(
    system: &LinearSystem,
    r0: &GroupElement,
    s0: &GroupElement,
    seed: u64,
) -> Result<GroupFunction> {
    let support = RestrictedSupport::new(system, r0, s0)?;
    support.function(&support.phases(seed, 0))
}

/// Statistics of the sampled densities of a search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub samples: u64,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub negatives: u64,
}

impl SampleSummary {
    pub fn from_values(values: &[f64]) -> Self {
        let len = values.len().max(1) as f64;
        let mean = values.iter().sum::<f64>() / len;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / len;
        Self {
            samples: values.len() as u64,
            mean,
            std: var.sqrt(),
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            negatives: values.iter().filter(|&&v| v < 0.0).count() as u64,
        }
    }
}

impl std::fmt::Display for SampleSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} samples, T mean {:e}, std {:e}, min {:e}, max {:e}, {} negative",
            self.samples, self.mean, self.std, self.min, self.max, self.negatives
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WitnessMethod {
    RestrictedSupport { r0: Vec<u32>, s0: Vec<u32> },
    FullPhase,
    /// Odd number of variables: a full-phase sample, negated if its density
    /// is positive.
    OddNegation { negated: bool },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessCertificate {
    pub system: LinearSystem,
    pub n: u32,
    pub seed: u64,
    pub iteration: u64,
    pub method: WitnessMethod,
    /// Factor applied to the raw sample to get `values`.
    pub scale: f64,
    pub values: Vec<f64>,
    pub mean: f64,
    pub max_abs: f64,
    pub t_direct: f64,
    pub t_fourier: f64,
    /// Terms in the Fourier-side sum that decided the sign.
    pub term_count: u128,
}

impl WitnessCertificate {
    pub fn modulus(&self) -> Result<PrimeModulus> {
        PrimeModulus::new(self.system.p(), self.n)
    }

    pub fn function(&self) -> Result<GroupFunction> {
        GroupFunction::from_real(self.modulus()?, &self.values)
    }

    pub fn tolerance(&self) -> f64 {
        NEGATIVE_TOL * self.term_count as f64
    }

    /// Rebuild `f` from the recipe alone.
    pub fn regenerate(&self) -> Result<GroupFunction> {
        match &self.method {
            WitnessMethod::RestrictedSupport { r0, s0 } => {
                if self.n != 2 {
                    return usage("restricted-support certificates live on F_p^2");
                }
                let p = self.system.p();
                let support = RestrictedSupport::new(
                    &self.system,
                    &GroupElement::new(p, r0.clone()),
                    &GroupElement::new(p, s0.clone()),
                )?;
                Ok(support
                    .function(&support.phases(self.seed, self.iteration))?
                    .scale(self.scale))
            }
            WitnessMethod::FullPhase => {
                let fp = FullPhase::new(&self.system, self.n, u128::MAX)?;
                Ok(fp.function(self.seed, self.iteration)?.scale(self.scale))
            }
            WitnessMethod::OddNegation { negated } => {
                let fp = FullPhase::new(&self.system, self.n, u128::MAX)?;
                let f = fp.function(self.seed, self.iteration)?.scale(self.scale);
                Ok(if *negated { f.neg() } else { f })
            }
        }
    }

    /// Replay: regenerate bit-for-bit, recompute both densities and recheck
    /// every invariant.
    pub fn verify(&self, budget: u128) -> Result<WitnessVerification> {
        let f = self.regenerate()?;
        let stored = self.function()?;
        let mismatch = f
            .values()
            .iter()
            .zip(stored.values())
            .position(|(a, b)| a.re.to_bits() != b.re.to_bits());
        if let Some(i) = mismatch {
            return Err(Error::Verification(format!(
                "regenerated value at index {i} differs from the stored table"
            )));
        }
        let report = density::density(self.system.space(), &f, Method::Both, budget)?;
        let (t_direct, t_fourier) = (report.value_direct.unwrap(), report.value_fourier.unwrap());
        let mean = f.mean().re;
        let max_abs = f.max_abs();
        let checks = [
            (mean.abs() < 1e-10, format!("|𝔼f| = {:e} is not below 1e-10", mean.abs())),
            (max_abs <= 1.0 + 1e-12, format!("max |f| = {max_abs} exceeds 1")),
            (
                (t_direct - t_fourier).abs() < ORACLE_TOL,
                format!("oracles disagree: {t_direct:e} vs {t_fourier:e}"),
            ),
            (
                t_direct < -self.tolerance() && t_fourier < -self.tolerance(),
                format!("T = {t_direct:e} is not below -{:e}", self.tolerance()),
            ),
        ];
        if let Some((_, msg)) = checks.iter().find(|(ok, _)| !ok) {
            return Err(Error::Verification(msg.clone()));
        }
        Ok(WitnessVerification {
            mean,
            max_abs,
            t_direct,
            t_fourier,
        })
    }

    pub fn to_text(&self) -> String {
        format!(
            "system: {}\nn: {}\nmethod: {}\nseed: {}\niteration: {}\nscale: {:e}\nmean: {:e}\nmax_abs: {}\nT_direct: {:e}\nT_fourier: {:e}\nterm_count: {}\n",
            density::describe(self.system.space()),
            self.n,
            method_name(&self.method),
            self.seed,
            self.iteration,
            self.scale,
            self.mean,
            self.max_abs,
            self.t_direct,
            self.t_fourier,
            self.term_count
        )
    }
}

pub fn method_name(m: &WitnessMethod) -> &'static str {
    match m {
        WitnessMethod::RestrictedSupport { .. } => "restricted-support",
        WitnessMethod::FullPhase => "full-phase",
        WitnessMethod::OddNegation { .. } => "odd-negation",
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessVerification {
    pub mean: f64,
    pub max_abs: f64,
    pub t_direct: f64,
    pub t_fourier: f64,
}

#[derive(Debug, Clone)]
pub enum SearchOutcome {
    Found {
        certificate: Box<WitnessCertificate>,
        summary: SampleSummary,
    },
    Exhausted {
        summary: SampleSummary,
        hint: String,
    },
}

impl SearchOutcome {
    pub fn into_result(self, stage: &str) -> Result<WitnessCertificate> {
        match self {
            SearchOutcome::Found { certificate, .. } => Ok(*certificate),
            SearchOutcome::Exhausted { summary, hint } => Err(Error::SearchExhausted {
                stage: stage.to_string(),
                summary: format!("{summary}; {hint}"),
            }),
        }
    }

    pub fn summary(&self) -> &SampleSummary {
        match self {
            SearchOutcome::Found { summary, .. } | SearchOutcome::Exhausted { summary, .. } => summary,
        }
    }
}

/// Evaluate iterations in parallel batches; the first iteration (in index
/// order) whose value passes `accept` wins.
fn first_accepted(
    max_iters: u64,
    eval: impl Fn(u64) -> Result<f64> + Sync,
    accept: impl Fn(f64) -> bool,
) -> Result<(Option<u64>, Vec<f64>)> {
    let mut seen = Vec::new();
    let mut start = 0;
    while start < max_iters {
        let end = (start + BATCH).min(max_iters);
        let batch: Vec<f64> = (start..end)
            .into_par_iter()
            .map(&eval)
            .collect::<Result<_>>()?;
        for (offset, &v) in batch.iter().enumerate() {
            seen.push(v);
            if accept(v) {
                return Ok((Some(start + offset as u64), seen));
            }
        }
        start = end;
    }
    Ok((None, seen))
}

fn confirm(
    system: &LinearSystem,
    f: &GroupFunction,
    budget: u128,
) -> Result<(f64, f64)> {
    let report = density::density(system.space(), f, Method::Both, budget)?;
    let (d, q) = (report.value_direct.unwrap(), report.value_fourier.unwrap());
    if (d - q).abs() >= ORACLE_TOL {
        return Err(Error::Invariant(format!("oracles disagree on a witness: {d:e} vs {q:e}")));
    }
    Ok((d, q))
}

/// Restricted-support search on `F_p^2` with base pair `(1,0), (0,1)`.
pub fn search_witness_restricted(
    system: &LinearSystem,
    seed: u64,
    max_iters: u64,
    budget: u128,
) -> Result<SearchOutcome> {
    if system.contains_additive_tuple() {
        return usage("the system contains an additive tuple; the restricted-support construction does not apply");
    }
    let support = RestrictedSupport::standard(system)?;
    if let Some(pair) = support.cancelling_supported().first() {
        return Err(Error::Invariant(format!(
            "supported dual pair ({}, {}) cancels",
            pair.r, pair.s
        )));
    }
    let terms = support.supported_pairs().len() as u128;
    let tol = NEGATIVE_TOL * terms as f64;
    let (hit, values) = first_accepted(
        max_iters,
        |i| Ok(support.density_from_phases(&support.phases(seed, i))),
        |t| t < -tol,
    )?;
    let summary = SampleSummary::from_values(&values);
    let Some(iteration) = hit else {
        return Ok(SearchOutcome::Exhausted {
            summary,
            hint: "try another seed or more iterations".into(),
        });
    };
    let f = support.function(&support.phases(seed, iteration))?;
    let (t_direct, t_fourier) = confirm(system, &f, budget)?;
    let (r0, s0) = support.base_pair();
    Ok(SearchOutcome::Found {
        certificate: Box::new(WitnessCertificate {
            system: system.clone(),
            n: 2,
            seed,
            iteration,
            method: WitnessMethod::RestrictedSupport {
                r0: r0.coords().to_vec(),
                s0: s0.coords().to_vec(),
            },
            scale: 1.0,
            mean: f.mean().re,
            max_abs: f.max_abs(),
            values: f.real_values(),
            t_direct,
            t_fourier,
            term_count: terms,
        }),
        summary,
    })
}

/// The full-phase construction on `F_p^n`.
#[derive(Debug, Clone)]
pub struct FullPhase {
    modulus: PrimeModulus,
    pairs: DualPairs,
    positive: Vec<usize>,
}

impl FullPhase {
    pub fn new(system: &LinearSystem, n: u32, budget: u128) -> Result<Self> {
        check_generic(system)?;
        let modulus = PrimeModulus::new(system.p(), n)?;
        let mut positive = modulus.positive_indices();
        positive.sort_by_key(|&h| modulus.order_rank(h));
        Ok(Self {
            pairs: DualPairs::new(system, modulus, budget)?,
            modulus,
            positive,
        })
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn pairs(&self) -> &DualPairs {
        &self.pairs
    }

    /// `h ≻ 0` in increasing `⪯` order.
    pub fn positive(&self) -> &[usize] {
        &self.positive
    }

    /// Unit phases on `h ≻ 0` (slot = table index of `h`), conjugates on
    /// `-h`, zero at 0.
    pub fn spectrum(&self, seed: u64, domain: &str, iteration: u64) -> FourierTable {
        let mut stream = PhaseStream::new(seed, domain, iteration);
        let mut t = FourierTable::zeros(self.modulus);
        for &h in &self.positive {
            let z = Complex64::from_polar(1.0, stream.phase(h as u64));
            t.coeffs_mut()[h] = z;
            t.coeffs_mut()[self.modulus.neg_index(h)] = z.conj();
        }
        t
    }

    /// `F / p^n` for the witness-search stream.
    pub fn function(&self, seed: u64, iteration: u64) -> Result<GroupFunction> {
        let f = real_part(&inverse_transform(&self.spectrum(seed, rng::DOMAIN_FULL, iteration)))?;
        Ok(f.scale(1.0 / self.modulus.size() as f64))
    }

    /// `T_Ψ(F/p^n) = (P + Q) / p^{nk}`.
    pub fn normalized_density(&self, spectrum: &FourierTable) -> Result<f64> {
        let (p, q) = density::pq_split(&self.pairs, spectrum)?;
        Ok((p + q).re / (self.modulus.size() as f64).powi(self.pairs.k as i32))
    }

    pub fn term_count(&self) -> u128 {
        (self.modulus.size() as u128).pow(2)
    }
}

/// Unnormalized full-phase sample `F` (values in `[-p^n, p^n]`) and its spectrum.
pub fn full_phase_sampler(
    system: &LinearSystem,
    n: u32,
    seed: u64,
    iteration: u64,
) -> Result<(GroupFunction, FourierTable)> {
    check_generic(system)?;
    let modulus = PrimeModulus::new(system.p(), n)?;
    let mut positive = modulus.positive_indices();
    positive.sort_by_key(|&h| modulus.order_rank(h));
    let mut stream = PhaseStream::new(seed, rng::DOMAIN_FULL, iteration);
    let mut t = FourierTable::zeros(modulus);
    for &h in &positive {
        let z = Complex64::from_polar(1.0, stream.phase(h as u64));
        t.coeffs_mut()[h] = z;
        t.coeffs_mut()[modulus.neg_index(h)] = z.conj();
    }
    Ok((real_part(&inverse_transform(&t))?, t))
}

/// Full-phase search at a fixed `n`. With an odd number of variables any
/// sample with nonzero density works after possibly negating it.
pub fn search_witness_full(
    system: &LinearSystem,
    n: u32,
    seed: u64,
    max_iters: u64,
    budget: u128,
) -> Result<SearchOutcome> {
    let fp = FullPhase::new(system, n, budget)?;
    let terms = fp.term_count();
    let tol = NEGATIVE_TOL * terms as f64;
    let odd = system.cols() % 2 == 1;
    let eval = |i: u64| fp.normalized_density(&fp.spectrum(seed, rng::DOMAIN_FULL, i));
    let (hit, values) = if odd {
        first_accepted(max_iters, eval, |t| t.abs() > tol)?
    } else {
        first_accepted(max_iters, eval, |t| t < -tol)?
    };
    let summary = SampleSummary::from_values(&values);
    let Some(iteration) = hit else {
        return Ok(SearchOutcome::Exhausted {
            summary,
            hint: format!("no negative sample at n = {n}; try a larger n"),
        });
    };
    let mut f = fp.function(seed, iteration)?;
    let method = if odd {
        let negated = values[iteration as usize] > 0.0;
        if negated {
            f = f.neg();
        }
        WitnessMethod::OddNegation { negated }
    } else {
        WitnessMethod::FullPhase
    };
    let (t_direct, t_fourier) = confirm(system, &f, budget)?;
    Ok(SearchOutcome::Found {
        certificate: Box::new(WitnessCertificate {
            system: system.clone(),
            n,
            seed,
            iteration,
            method,
            scale: 1.0,
            mean: f.mean().re,
            max_abs: f.max_abs(),
            values: f.real_values(),
            t_direct,
            t_fourier,
            term_count: terms,
        }),
        summary,
    })
}

/// For each linearly independent dual pair whose largest absolute entry
/// occurs with positive sign, the position of that entry among `h ≻ 0`.
#[derive(Debug, Clone)]
pub struct MartingaleIndex {
    positive: Vec<usize>,
    /// `(slot of h, index into pairs.independent)`
    members: Vec<(usize, usize)>,
}

impl MartingaleIndex {
    pub fn new(pairs: &DualPairs) -> Self {
        let m = pairs.modulus;
        let mut positive = m.positive_indices();
        positive.sort_by_key(|&h| m.order_rank(h));
        let slot: HashMap<usize, usize> = positive.iter().enumerate().map(|(i, &h)| (h, i)).collect();
        let members = pairs
            .independent
            .iter()
            .enumerate()
            .filter_map(|(j, (_, _, freqs))| {
                let top = *freqs.iter().max_by_key(|&&h| m.order_rank(m.abs_index(h)))?;
                (m.sign_of(top) == Ordering::Greater).then(|| (slot[&top], j))
            })
            .collect();
        Self { positive, members }
    }

    pub fn positive(&self) -> &[usize] {
        &self.positive
    }

    /// `|A_h|` per `h ≻ 0`.
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.positive.len()];
        for &(slot, _) in &self.members {
            sizes[slot] += 1;
        }
        sizes
    }

    /// `X_h = 2 Σ_{M ∈ A_h} Re Π_{m ∈ M} F̂(m)` for each `h ≻ 0`.
    pub fn increments(&self, pairs: &DualPairs, fhat: &FourierTable) -> Vec<f64> {
        let mut x = vec![0.0; self.positive.len()];
        for &(slot, j) in &self.members {
            x[slot] += 2.0 * product_over(fhat, &pairs.independent[j].2).re;
        }
        x
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MartingaleDecomposition {
    /// `(h, X_h)` for `h ≻ 0` in increasing order.
    pub increments: Vec<(GroupElement, f64)>,
    pub class_sizes: Vec<usize>,
    pub sum: f64,
    /// `Re P(F̂)` from the direct split.
    pub p_real: f64,
}

pub fn martingale_decomposition(pairs: &DualPairs, fhat: &FourierTable) -> Result<MartingaleDecomposition> {
    let index = MartingaleIndex::new(pairs);
    let x = index.increments(pairs, fhat);
    let (p, _) = density::pq_split(pairs, fhat)?;
    let sum = x.iter().sum();
    Ok(MartingaleDecomposition {
        increments: index
            .positive()
            .iter()
            .zip(&x)
            .map(|(&h, &v)| (pairs.modulus.element(h), v))
            .collect(),
        class_sizes: index.class_sizes(),
        sum,
        p_real: p.re,
    })
}

/// Exact `Var P` under independent uniform phases, and its diagonal part.
///
/// `Π_{m∈M(r,s)} F̂(m) = Π_{h≻0} ξ_h^{σ(h)}` with `σ(h) = #h − #(−h)` in
/// `M(r,s)`, and two such monomials are orthonormal unless their exponent
/// vectors agree. So `Var P` is the sum of squared class sizes when the
/// independent pairs are grouped by `σ`.
pub fn exact_variance(pairs: &DualPairs) -> (f64, usize) {
    let m = pairs.modulus;
    let mut classes: HashMap<Vec<(usize, i64)>, usize> = HashMap::new();
    for (_, _, freqs) in &pairs.independent {
        let mut sig: HashMap<usize, i64> = HashMap::new();
        for &h in freqs {
            let d = match m.sign_of(h) {
                Ordering::Greater => 1,
                Ordering::Less => -1,
                Ordering::Equal => 0,
            };
            *sig.entry(m.abs_index(h)).or_insert(0) += d;
        }
        let mut key: Vec<(usize, i64)> = sig.into_iter().filter(|&(_, e)| e != 0).collect();
        key.sort_unstable();
        *classes.entry(key).or_insert(0) += 1;
    }
    let var = classes.values().map(|&c| (c * c) as f64).sum();
    (var, pairs.independent.len())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CltReport {
    pub system: String,
    pub p: u32,
    pub n: u32,
    pub samples: u64,
    pub seed: u64,
    pub independent_pairs: usize,
    pub exact_variance: f64,
    /// The subsum of `Var P` with `M = M'`: one per independent pair.
    pub diagonal_variance: f64,
    pub empirical_mean: f64,
    pub empirical_variance: f64,
    /// Mean of `P / √Var P`.
    pub standardized_mean: f64,
    pub ks_distance: f64,
    /// `(ε, Σ_h 𝔼[X̃_h² 1{|X̃_h| > ε}])`
    pub m1: Vec<(f64, f64)>,
    /// `Σ_{h1 ≠ h2} 𝔼[X̃_{h1}² X̃_{h2}²]`, i.e. the cross sum divided by `Var²`.
    pub m2_ratio: f64,
    pub max_abs_q: f64,
    pub q_bound: f64,
    pub max_identity_error: f64,
}

impl CltReport {
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "system: {}\np: {}\nn: {}\nsamples: {}\nseed: {}\nindependent_pairs: {}\nexact_variance: {}\ndiagonal_variance: {}\nempirical_mean: {:e}\nempirical_variance: {}\nstandardized_mean: {:e}\nks_distance: {}\n",
            self.system,
            self.p,
            self.n,
            self.samples,
            self.seed,
            self.independent_pairs,
            self.exact_variance,
            self.diagonal_variance,
            self.empirical_mean,
            self.empirical_variance,
            self.standardized_mean,
            self.ks_distance
        );
        for (eps, v) in &self.m1 {
            s.push_str(&format!("m1[eps={eps}]: {v}\n"));
        }
        s.push_str(&format!(
            "m2_ratio: {}\nmax_abs_q: {}\nq_bound: {}\nmax_identity_error: {:e}\n",
            self.m2_ratio, self.max_abs_q, self.q_bound, self.max_identity_error
        ));
        s
    }
}

/// Kolmogorov–Smirnov distance between a sample and the standard normal.
pub fn ks_distance_normal(values: &[f64]) -> f64 {
    let normal = Normal::standard();
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let len = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let c = normal.cdf(x);
            f64::max((i + 1) as f64 / len - c, c - i as f64 / len)
        })
        .fold(0.0, f64::max)
}

pub fn clt_diagnostic(
    system: &LinearSystem,
    n: u32,
    samples: u64,
    seed: u64,
    budget: u128,
) -> Result<CltReport> {
    if samples == 0 {
        return usage("at least one sample is required");
    }
    let fp = FullPhase::new(system, n, budget)?;
    let pairs = fp.pairs();
    let index = MartingaleIndex::new(pairs);
    let (var, diagonal) = exact_variance(pairs);
    let sd = var.sqrt();

    struct Draw {
        p: f64,
        q: f64,
        identity_err: f64,
        x: Vec<f64>,
    }
    let draws: Vec<Draw> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let fhat = fp.spectrum(seed, rng::DOMAIN_CLT, i);
            let (p, q) = density::pq_split(pairs, &fhat)?;
            let x: Vec<f64> = index.increments(pairs, &fhat).iter().map(|v| v / sd).collect();
            let total = x.iter().sum::<f64>() * sd;
            Ok(Draw {
                p: p.re,
                q: q.norm(),
                identity_err: (total - p.re).abs(),
                x,
            })
        })
        .collect::<Result<_>>()?;

    let len = samples as f64;
    let ps: Vec<f64> = draws.iter().map(|d| d.p).collect();
    let mean = ps.iter().sum::<f64>() / len;
    let emp_var = ps.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / len;
    let z: Vec<f64> = ps.iter().map(|v| v / sd).collect();
    let m1 = EPSILON_GRID
        .iter()
        .map(|&eps| {
            let total: f64 = draws
                .iter()
                .map(|d| d.x.iter().filter(|v| v.abs() > eps).map(|v| v * v).sum::<f64>())
                .sum();
            (eps, total / len)
        })
        .collect();
    let m2 = draws
        .iter()
        .map(|d| {
            let sq: f64 = d.x.iter().map(|v| v * v).sum();
            let quad: f64 = d.x.iter().map(|v| v.powi(4)).sum();
            sq * sq - quad
        })
        .sum::<f64>()
        / len;
    let size = fp.modulus().size() as f64;
    let p = system.p() as f64;
    Ok(CltReport {
        system: density::describe(system.space()),
        p: system.p(),
        n,
        samples,
        seed,
        independent_pairs: diagonal,
        exact_variance: var,
        diagonal_variance: diagonal as f64,
        empirical_mean: mean,
        empirical_variance: emp_var,
        standardized_mean: mean / sd,
        ks_distance: ks_distance_normal(&z),
        m1,
        m2_ratio: m2,
        max_abs_q: draws.iter().map(|d| d.q).fold(0.0, f64::max),
        q_bound: p * size + size - p,
        max_identity_error: draws.iter().map(|d| d.identity_err).fold(0.0, f64::max),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObservationReport {
    pub samples: u64,
    /// Samples with exactly one shared absolute value.
    pub overlap_one: u64,
    /// Samples with at least two shared absolute values.
    pub overlap_many: u64,
    pub violations: u64,
}

/// Sample quadruples `(r, s, r', s')` of two independent pairs and check:
/// one shared absolute value forces `dim span ≤ 3`, two or more force
/// `dim span = 2`. Odd-numbered samples force an overlap by solving for `s'`.
pub fn observation_check(system: &LinearSystem, n: u32, samples: u64, seed: u64) -> Result<ObservationReport> {
    let columns = check_generic(system)?;
    let modulus = PrimeModulus::new(system.p(), n)?;
    let size = modulus.size() as u64;
    let p = system.p();
    let forcing: Vec<usize> = (0..columns.len()).filter(|&j| columns[j].1 != 0).collect();

    let outcomes: Vec<(usize, bool)> = (0..samples)
        .into_par_iter()
        .map(|it| {
            let mut stream = PhaseStream::new(seed, rng::DOMAIN_OBSERVATION, it);
            let mut slot = 0u64;
            let mut draw = |bound: u64| {
                slot += 1;
                stream.below(slot, bound) as usize
            };
            let (r, s) = loop {
                let (r, s) = (draw(size), draw(size));
                if linearly_independent(&modulus, r, s) {
                    break (r, s);
                }
            };
            let m = FrequencyMultiset::new(&columns, modulus, r, s);
            let (r2, s2) = loop {
                let (r2, s2) = if it % 2 == 1 {
                    let i = draw(columns.len() as u64);
                    let j = forcing[draw(forcing.len() as u64)];
                    let target = if draw(2) == 0 {
                        m.entries[i]
                    } else {
                        modulus.neg_index(m.entries[i])
                    };
                    let r2 = draw(size);
                    // a_j r2 + b_j s2 = target
                    let (a, b) = columns[j];
                    let b_inv = fp::inv(b, p);
                    let s2 = modulus.combine_index(
                        b_inv,
                        target,
                        fp::mul(fp::neg(a, p), b_inv, p),
                        r2,
                    );
                    (r2, s2)
                } else {
                    (draw(size), draw(size))
                };
                if linearly_independent(&modulus, r2, s2) {
                    break (r2, s2);
                }
            };
            let m2 = FrequencyMultiset::new(&columns, modulus, r2, s2);
            let a: Vec<usize> = m.abs_entries();
            let mut b = m2.abs_entries();
            b.sort_unstable();
            b.dedup();
            let shared = a.iter().filter(|h| b.binary_search(h).is_ok()).count();
            let vecs: Vec<Vec<u32>> = [r, s, r2, s2].iter().map(|&v| modulus.coords_of(v)).collect();
            let dim = linalg::rank(&vecs, p);
            let ok = match shared {
                0 => true,
                1 => dim <= 3,
                _ => dim == 2,
            };
            (shared, ok)
        })
        .collect();
    Ok(ObservationReport {
        samples,
        overlap_one: outcomes.iter().filter(|o| o.0 == 1).count() as u64,
        overlap_many: outcomes.iter().filter(|o| o.0 >= 2).count() as u64,
        violations: outcomes.iter().filter(|o| !o.1).count() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::DEFAULT_BUDGET;

    fn four_ap(p: u32) -> LinearSystem {
        LinearSystem::new(p, &[vec![1, -2, 1, 0], vec![0, 1, -2, 1]]).unwrap()
    }

    fn el(p: u32, c: &[i64]) -> GroupElement {
        GroupElement::from_signed(p, c)
    }

    #[test]
    fn cancelling_partition_examples() {
        let h = el(5, &[1, 2]);
        let mh = h.neg();
        assert!(cancelling_partition(&[h.clone(), mh.clone()]));
        assert!(!cancelling_partition(&[h.clone(), h.clone(), mh.clone()]));
        assert!(cancelling_partition(&[h.clone(), h.clone(), mh.clone(), mh.clone()]));
        assert!(!cancelling_partition(&[h.clone(), h.clone(), h.clone(), mh.clone()]));
        let z = el(5, &[0, 0]);
        assert!(cancelling_partition(&[z.clone(), z.clone()]));
        assert!(!cancelling_partition(&[z.clone(), h.clone()]));
        assert!(cancelling_partition(&[]));
    }

    /// Oracle: try every perfect matching.
    fn matching_exists(w: &[GroupElement]) -> bool {
        if w.is_empty() {
            return true;
        }
        if w.len() % 2 == 1 {
            return false;
        }
        (1..w.len()).any(|j| {
            w[0].add(&w[j]).unwrap().is_zero() && {
                let rest: Vec<GroupElement> = w
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != 0 && i != j)
                    .map(|(_, x)| x.clone())
                    .collect();
                matching_exists(&rest)
            }
        })
    }

    #[test]
    fn cancelling_partition_matches_matching_search() {
        let m = PrimeModulus::new(3, 1).unwrap();
        let elems: Vec<GroupElement> = (0..3).map(|i| m.element(i)).collect();
        for len in 0..=6u32 {
            for code in 0..3usize.pow(len) {
                let mut c = code;
                let w: Vec<GroupElement> = (0..len)
                    .map(|_| {
                        let e = elems[c % 3].clone();
                        c /= 3;
                        e
                    })
                    .collect();
                assert_eq!(cancelling_partition(&w), matching_exists(&w), "{w:?}");
            }
        }
    }

    #[test]
    fn four_ap_m0_is_distinct_and_not_opposite() {
        let sys = four_ap(5);
        let support = RestrictedSupport::standard(&sys).unwrap();
        let m = support.modulus();
        let got: Vec<Vec<i64>> = support.m0().iter().map(|&h| m.element(h).signed()).collect();
        // columns (1,0), (-2,1), (1,-2), (0,1)
        assert_eq!(got, vec![vec![1, 0], vec![-2, 1], vec![1, -2], vec![0, 1]]);
    }

    #[test]
    fn sampler_bounds_and_mean() {
        let sys = LinearSystem::new(7, &[vec![1, 0, 1, 1], vec![0, 1, 1, 3]]).unwrap();
        let support = RestrictedSupport::standard(&sys).unwrap();
        for it in 0..20 {
            let ph = support.phases(4, it);
            let f = support.function(&ph).unwrap();
            assert!(f.max_abs() <= 1.0 + 1e-12);
            assert!(f.mean().re.abs() < 1e-12);
            assert!(f.is_real(1e-15));
            let full = density::density_fourier(sys.space(), &support.spectrum(&ph), DEFAULT_BUDGET).unwrap();
            assert!((full.value.re - support.density_from_phases(&ph)).abs() < 1e-14);
        }
    }

    #[test]
    fn sampler_rejects_bad_inputs() {
        let sys = four_ap(5);
        let r = el(5, &[1, 0]);
        let err = RestrictedSupport::new(&sys, &r, &el(5, &[2, 0])).unwrap_err();
        assert!(matches!(err, Error::Usage(m) if m.contains("dependent")));
        let singular = LinearSystem::new(5, &[vec![1, 2, 1, 0], vec![2, 4, 1, 1]]).unwrap();
        assert!(RestrictedSupport::standard(&singular).is_err());
    }

    #[test]
    fn supported_pairs_agree_with_exhaustive_scan() {
        for sys in [
            four_ap(5),
            LinearSystem::new(7, &[vec![1, 0, 1, 1], vec![0, 1, 1, 3]]).unwrap(),
            LinearSystem::new(5, &[vec![1, 0, 1, 1], vec![0, 1, 2, 3]]).unwrap(),
        ] {
            let s = RestrictedSupport::standard(&sys).unwrap();
            assert_eq!(s.supported_pairs(), s.supported_pairs_exhaustive().as_slice());
            let p = sys.p() as usize;
            assert!(s.supported_pairs().iter().any(|x| (x.r, x.s) == (p, 1) && x.independent));
        }
    }

    #[test]
    fn phases_near_one_give_positive_density() {
        let sys = LinearSystem::new(7, &[vec![1, 0, 1, 1], vec![0, 1, 1, 3]]).unwrap();
        let s = RestrictedSupport::standard(&sys).unwrap();
        assert!(s.density_from_phases(&vec![0.0; 4]) > 0.0);
    }

    #[test]
    fn restricted_search_and_replay() {
        let sys = LinearSystem::new(7, &[vec![1, 0, 1, 1], vec![0, 1, 1, 3]]).unwrap();
        assert!(!sys.contains_additive_tuple());
        let cert = search_witness_restricted(&sys, 1, 1000, DEFAULT_BUDGET)
            .unwrap()
            .into_result("restricted")
            .unwrap();
        assert!(cert.t_direct < 0.0);
        cert.verify(DEFAULT_BUDGET).unwrap();
        let json = serde_json::to_string(&cert).unwrap();
        let back: WitnessCertificate = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cert);
        back.verify(DEFAULT_BUDGET).unwrap();

        let mut tampered = cert.clone();
        tampered.values[3] += 1e-12;
        assert!(matches!(tampered.verify(DEFAULT_BUDGET), Err(Error::Verification(_))));
    }

    #[test]
    fn restricted_search_rejects_additive_tuple() {
        assert!(matches!(
            search_witness_restricted(&four_ap(5), 1, 10, DEFAULT_BUDGET),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn odd_fast_path() {
        let sys = LinearSystem::new(5, &[vec![1, 1, 1], vec![0, 1, 2]]).unwrap();
        let out = search_witness_full(&sys, 1, 0, 4, DEFAULT_BUDGET).unwrap();
        let SearchOutcome::Found { certificate, summary } = out else {
            panic!("odd fast path failed");
        };
        assert!(summary.samples <= 2);
        assert!(matches!(certificate.method, WitnessMethod::OddNegation { .. }));
        certificate.verify(DEFAULT_BUDGET).unwrap();
    }

    #[test]
    fn full_phase_sampler_bounds() {
        let sys = four_ap(5);
        for it in 0..5 {
            let (f, t) = full_phase_sampler(&sys, 2, 3, it).unwrap();
            assert!(f.max_abs() <= 25.0 + 1e-9);
            assert!(f.mean().re.abs() < 1e-12);
            assert_eq!(t.get(0), Complex64::new(0.0, 0.0));
            assert!(t.is_conjugate_symmetric(0.0));
        }
    }

    #[test]
    fn martingale_identity_and_class_sizes() {
        let sys = LinearSystem::new(3, &[vec![1, 0, 1, 1], vec![0, 1, 1, 2]]).unwrap();
        let fp = FullPhase::new(&sys, 2, DEFAULT_BUDGET).unwrap();
        let n_pairs = fp.pairs().independent.len();
        for it in 0..10 {
            let fhat = fp.spectrum(2, rng::DOMAIN_CLT, it);
            let d = martingale_decomposition(fp.pairs(), &fhat).unwrap();
            assert!((d.sum - d.p_real).abs() < 1e-9);
            // each ±(r, s) orbit is counted once
            assert_eq!(d.class_sizes.iter().sum::<usize>() * 2, n_pairs);
        }
        let zero = martingale_decomposition(fp.pairs(), &FourierTable::zeros(fp.modulus())).unwrap();
        assert!(zero.increments.iter().all(|(_, x)| *x == 0.0));
    }

    #[test]
    fn exact_variance_matches_monte_carlo() {
        let sys = LinearSystem::new(3, &[vec![1, 0, 1, 1], vec![0, 1, 1, 2]]).unwrap();
        let fp = FullPhase::new(&sys, 2, DEFAULT_BUDGET).unwrap();
        let (var, diag) = exact_variance(fp.pairs());
        assert!(var >= diag as f64);
        let samples = 4000;
        let ps: Vec<f64> = (0..samples)
            .map(|i| density::pq_split(fp.pairs(), &fp.spectrum(9, rng::DOMAIN_CLT, i)).unwrap().0.re)
            .collect();
        let s = SampleSummary::from_values(&ps);
        assert!((s.std * s.std / var - 1.0).abs() < 0.1, "{} vs {var}", s.std * s.std);
    }

    #[test]
    fn observation_small() {
        let sys = LinearSystem::new(3, &[vec![1, 0, 1, 1], vec![0, 1, 1, 2]]).unwrap();
        let r = observation_check(&sys, 3, 500, 1).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.overlap_one + r.overlap_many > 100);
    }

    #[test]
    fn ks_distance_sanity() {
        assert!(ks_distance_normal(&[0.0]) >= 0.5 - 1e-12);
        let grid: Vec<f64> = (1..1000)
            .map(|i| {
                let u = i as f64 / 1000.0;
                Normal::standard().inverse_cdf(u)
            })
            .collect();
        assert!(ks_distance_normal(&grid) < 0.002);
    }
}
