//! Solution densities `T_Ψ(f)`.
//!
//! Two independent evaluations are provided. The direct one averages
//! `f(x_1)⋯f(x_t)` over all solutions, parametrized by the kernel basis. The
//! Fourier one sums `Π_i f̂(Σ_j M_{ji} λ_j)` over all dual vectors
//! `λ ∈ (F_p^n)^m`. Both enumerate the image of a `t × d` generator matrix
//! acting coordinate-wise on `(F_p^n)^d`, so they share one engine.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::fp::{self, PrimeModulus};
use crate::function::{forward_transform, FourierTable, GroupFunction, TensorPower};
use crate::system::{combinations, LinearSystem, SolutionSpace};

/// Default cap on evaluated terms per density call.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// Imaginary parts of densities of real functions must stay below this.
pub const IMAG_TOL: f64 = 1e-10;

/// Terms per leaf chunk are bounded by fixing leading coordinates until at
/// least this many chunks exist.
const MIN_CHUNKS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Direct,
    Fourier,
    /// Both oracles, cross-checked.
    Both,
    /// Whichever enumerates fewer terms.
    #[default]
    Auto,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Method::Direct),
            "fourier" => Ok(Method::Fourier),
            "both" => Ok(Method::Both),
            "auto" => Ok(Method::Auto),
            other => usage(format!("unknown method {other:?}")),
        }
    }
}

/// A raw density value and the number of enumerated terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Density {
    pub value: Complex64,
    pub terms: u128,
}

/// Sum in a fixed binary tree: `[a, b, c, d]` is `(a + b) + (c + d)`.
pub fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    match values.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => values[0],
        len => {
            let mid = len / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

fn term_count(p: u32, n: u32, d: usize) -> u128 {
    (p as u128).saturating_pow(n.saturating_mul(d as u32))
}

fn check_budget(what: &str, needed: u128, budget: u128) -> Result<()> {
    if needed > budget {
        return Err(Error::Capacity {
            what: what.to_string(),
            needed,
            budget,
        });
    }
    Ok(())
}

/// `Σ_{u ∈ (F_p^n)^d} Π_i table[(G u)_i]` where `generator` is `t × d`.
///
/// The image splits coordinate by coordinate: coordinate `c` of `(G u)_i`
/// only depends on coordinate `c` of the `u_j`. So we enumerate, per
/// coordinate, the `p^d` vectors of F_p^t in the column span of `G`, and
/// combine them with place values `p^{n-1-c}`.
fn image_sum(modulus: &PrimeModulus, generator: &[Vec<u32>], d: usize, table: &[Complex64]) -> Complex64 {
    let p = modulus.p();
    let n = modulus.n() as usize;
    let t = generator.len();
    let per_coord = (p as usize).pow(d as u32);

    // line[l][i] = (G · digits(l))_i
    let line: Vec<Vec<usize>> = (0..per_coord)
        .map(|l| {
            let mut digits = vec![0u32; d];
            let mut x = l;
            for slot in digits.iter_mut() {
                *slot = (x % p as usize) as u32;
                x /= p as usize;
            }
            generator
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(&digits)
                        .fold(0u32, |acc, (&g, &u)| fp::add(acc, fp::mul(g, u, p), p))
                        as usize
                })
                .collect()
        })
        .collect();
    let places: Vec<usize> = (0..n).map(|c| (p as usize).pow((n - 1 - c) as u32)).collect();

    let mut prefix = 0;
    let mut chunks = 1usize;
    while prefix < n && chunks < MIN_CHUNKS {
        chunks *= per_coord;
        prefix += 1;
    }

    let chunk_sum = |chunk: usize| -> Complex64 {
        let mut base = vec![0usize; t];
        let mut x = chunk;
        for c in (0..prefix).rev() {
            let l = x % per_coord;
            x /= per_coord;
            for (b, &v) in base.iter_mut().zip(&line[l]) {
                *b += v * places[c];
            }
        }
        let mut stack = vec![vec![0usize; t]; n - prefix + 1];
        stack[0] = base;
        let mut acc = Complex64::new(0.0, 0.0);
        accumulate(&line, &places, table, prefix, &mut stack, 0, &mut acc);
        acc
    };

    let partials: Vec<Complex64> = (0..chunks).into_par_iter().map(chunk_sum).collect();
    pairwise_sum(&partials)
}

fn accumulate(
    line: &[Vec<usize>],
    places: &[usize],
    table: &[Complex64],
    coord: usize,
    stack: &mut [Vec<usize>],
    level: usize,
    acc: &mut Complex64,
) {
    if coord == places.len() {
        let mut prod = Complex64::new(1.0, 0.0);
        for &idx in &stack[level] {
            prod *= table[idx];
        }
        *acc += prod;
        return;
    }
    let place = places[coord];
    for v in line {
        let (lo, hi) = stack.split_at_mut(level + 1);
        for ((dst, &src), &x) in hi[0].iter_mut().zip(&lo[level]).zip(v) {
            *dst = src + x * place;
        }
        accumulate(line, places, table, coord + 1, stack, level + 1, acc);
    }
}

fn check_field(space: &SolutionSpace, modulus: &PrimeModulus) -> Result<()> {
    if space.p() != modulus.p() {
        return usage(format!(
            "system is over F_{} but the function is on F_{}^{}",
            space.p(),
            modulus.p(),
            modulus.n()
        ));
    }
    Ok(())
}

/// Average of `f(x_1)⋯f(x_t)` over `sol(Ψ; F_p^n)`: `p^{n·deg}` terms.
pub fn density_direct(space: &SolutionSpace, f: &GroupFunction, budget: u128) -> Result<Density> {
    let modulus = f.modulus();
    check_field(space, &modulus)?;
    let d = space.deg();
    let terms = term_count(modulus.p(), modulus.n(), d);
    check_budget("direct density enumeration", terms, budget)?;
    let generator: Vec<Vec<u32>> = (0..space.vars())
        .map(|i| space.kernel().iter().map(|k| k[i]).collect())
        .collect();
    let sum = image_sum(&modulus, &generator, d, f.values());
    Ok(Density {
        value: sum / terms as f64,
        terms,
    })
}

/// `Σ_{λ ∈ (F_p^n)^m} Π_i f̂(Σ_j M_{ji} λ_j)`: `p^{n·m}` terms.
pub fn density_fourier(space: &SolutionSpace, fhat: &FourierTable, budget: u128) -> Result<Density> {
    let modulus = fhat.modulus();
    check_field(space, &modulus)?;
    let m = space.codim();
    let terms = term_count(modulus.p(), modulus.n(), m);
    check_budget("Fourier density enumeration", terms, budget)?;
    let generator: Vec<Vec<u32>> = (0..space.vars())
        .map(|i| space.equations().iter().map(|e| e[i]).collect())
        .collect();
    Ok(Density {
        value: image_sum(&modulus, &generator, m, fhat.coeffs()),
        terms,
    })
}

/// Both oracles' results for one (system, function) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub system: String,
    pub function_id: String,
    pub p: u32,
    pub n: u32,
    pub method: Method,
    pub value_direct: Option<f64>,
    pub value_fourier: Option<f64>,
    pub imag: f64,
    pub discrepancy: Option<f64>,
    pub terms_direct: Option<u128>,
    pub terms_fourier: Option<u128>,
}

impl DensityReport {
    /// The reported value: direct if computed, otherwise Fourier.
    pub fn value(&self) -> f64 {
        self.value_direct
            .or(self.value_fourier)
            .expect("a report always carries at least one value")
    }

    pub fn to_text(&self) -> String {
        let mut lines = vec![
            format!("system: {}", self.system),
            format!("function: {}", self.function_id),
            format!("p: {}", self.p),
            format!("n: {}", self.n),
            format!("method: {:?}", self.method).to_lowercase(),
        ];
        if let Some(v) = self.value_direct {
            lines.push(format!("value_direct: {v:e}"));
        }
        if let Some(v) = self.value_fourier {
            lines.push(format!("value_fourier: {v:e}"));
        }
        if let Some(v) = self.discrepancy {
            lines.push(format!("discrepancy: {v:e}"));
        }
        if let Some(v) = self.terms_direct {
            lines.push(format!("terms_direct: {v}"));
        }
        if let Some(v) = self.terms_fourier {
            lines.push(format!("terms_fourier: {v}"));
        }
        lines.push(format!("imag: {:e}", self.imag));
        lines.join("\n") + "\n"
    }
}

fn choose(space: &SolutionSpace, method: Method) -> Method {
    match method {
        Method::Auto if space.deg() <= space.codim() => Method::Direct,
        Method::Auto => Method::Fourier,
        m => m,
    }
}

/// Evaluate `T_Ψ(f)` with the requested method(s).
pub fn density(
    space: &SolutionSpace,
    f: &GroupFunction,
    method: Method,
    budget: u128,
) -> Result<DensityReport> {
    let resolved = choose(space, method);
    let direct = matches!(resolved, Method::Direct | Method::Both)
        .then(|| density_direct(space, f, budget))
        .transpose()?;
    let fourier = matches!(resolved, Method::Fourier | Method::Both)
        .then(|| density_fourier(space, &forward_transform(f), budget))
        .transpose()?;
    let imag = direct
        .iter()
        .chain(fourier.iter())
        .map(|d| d.value.im.abs())
        .fold(0.0, f64::max);
    if f.is_real(crate::function::REAL_TOL) && imag > IMAG_TOL {
        return Err(Error::Invariant(format!(
            "density of a real function has imaginary part {imag:e}"
        )));
    }
    let value_direct = direct.map(|d| d.value.re);
    let value_fourier = fourier.map(|d| d.value.re);
    let discrepancy = value_direct
        .zip(value_fourier)
        .map(|(a, b)| (a - b).abs());
    Ok(DensityReport {
        system: describe(space),
        function_id: String::new(),
        p: f.modulus().p(),
        n: f.modulus().n(),
        method: resolved,
        value_direct,
        value_fourier,
        imag,
        discrepancy,
        terms_direct: direct.map(|d| d.terms),
        terms_fourier: fourier.map(|d| d.terms),
    })
}

/// Real density by the cheaper method.
pub fn density_value(space: &SolutionSpace, f: &GroupFunction, budget: u128) -> Result<f64> {
    Ok(density(space, f, Method::Auto, budget)?.value())
}

/// `T_Ψ(base^{⊗A}) = T_Ψ(base)^A`, without building the tensor power.
pub fn density_tensor_power(space: &SolutionSpace, power: &TensorPower, budget: u128) -> Result<f64> {
    Ok(density_value(space, &power.base, budget)?.powi(power.exponent as i32))
}

pub fn describe(space: &SolutionSpace) -> String {
    let p = space.p();
    let rows: Vec<String> = space
        .equations()
        .iter()
        .map(|r| {
            let xs: Vec<String> = r.iter().map(|&x| fp::signed(x, p).to_string()).collect();
            format!("[{}]", xs.join(","))
        })
        .collect();
    format!("F_{p} t={} [{}]", space.vars(), rows.join(","))
}

/// The dual pairs `(r, s) ∈ (F_p^n)^2` of a `2 × k` system with their
/// frequency lists `a_i r + b_i s`, split by linear independence.
#[derive(Debug, Clone)]
pub struct DualPairs {
    pub modulus: PrimeModulus,
    pub k: usize,
    /// `(r, s, frequencies)` for linearly independent pairs.
    pub independent: Vec<(usize, usize, Vec<usize>)>,
    pub dependent: Vec<(usize, usize, Vec<usize>)>,
}

impl DualPairs {
    pub fn new(system: &LinearSystem, modulus: PrimeModulus, budget: u128) -> Result<Self> {
        let cols = system.column_pairs()?;
        if system.p() != modulus.p() {
            return usage("system and group use different primes");
        }
        let size = modulus.size();
        check_budget("dual pair enumeration", (size as u128).pow(2), budget)?;
        let mut independent = Vec::new();
        let mut dependent = Vec::new();
        for r in 0..size {
            let multiples: Vec<usize> = (0..modulus.p()).map(|c| modulus.scale_index(r, c)).collect();
            for s in 0..size {
                let freqs: Vec<usize> = cols
                    .iter()
                    .map(|&(a, b)| modulus.combine_index(a, r, b, s))
                    .collect();
                let li = r != 0 && !multiples.contains(&s);
                if li {
                    independent.push((r, s, freqs));
                } else {
                    dependent.push((r, s, freqs));
                }
            }
        }
        Ok(Self {
            modulus,
            k: cols.len(),
            independent,
            dependent,
        })
    }
}

pub fn product_over(fhat: &FourierTable, freqs: &[usize]) -> Complex64 {
    freqs.iter().fold(Complex64::new(1.0, 0.0), |acc, &h| acc * fhat.get(h))
}

/// `(P, Q)`: the Fourier-side sum of a `2 × k` system split by linear
/// independence of the dual pair.
pub fn pq_split(pairs: &DualPairs, fhat: &FourierTable) -> Result<(Complex64, Complex64)> {
    if fhat.modulus() != pairs.modulus {
        return usage("Fourier table and dual pairs live on different groups");
    }
    let sum = |list: &[(usize, usize, Vec<usize>)]| -> Complex64 {
        let terms: Vec<Complex64> = list.iter().map(|(_, _, f)| product_over(fhat, f)).collect();
        pairwise_sum(&terms)
    };
    Ok((sum(&pairs.independent), sum(&pairs.dependent)))
}

/// One subset term of the multilinear expansion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionTerm {
    pub columns: Vec<usize>,
    pub deg: usize,
    pub density: f64,
    /// `2^{1-t+|S|} T_{Ψ|_S}(f)`.
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectReport {
    pub system: String,
    pub vars: usize,
    pub shortest_equation: usize,
    /// `T(½+f) + T(½−f) − 2^{1−t}` from the expansion (the reported value).
    pub defect: f64,
    /// The same quantity from two direct density calls.
    pub defect_direct: f64,
    pub discrepancy: f64,
    pub terms: Vec<ExpansionTerm>,
}

impl DefectReport {
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "system: {}\nvars: {}\nshortest_equation: {}\ndefect: {:e}\ndefect_direct: {:e}\ndiscrepancy: {:e}\n",
            self.system, self.vars, self.shortest_equation, self.defect, self.defect_direct, self.discrepancy
        );
        for t in &self.terms {
            s.push_str(&format!(
                "term {:?}: deg {} density {:e} contribution {:e}\n",
                t.columns, t.deg, t.density, t.contribution
            ));
        }
        s
    }
}

/// `T(½+f) + T(½−f) − 2^{1−t}` for real `f` with zero mean and values in
/// `[−½, ½]`, both directly and through the even-subset expansion.
pub fn commonness_defect(system: &LinearSystem, f: &GroupFunction, budget: u128) -> Result<DefectReport> {
    if !f.is_real(crate::function::REAL_TOL) {
        return usage("defect requires a real-valued function");
    }
    let mean = f.mean().re;
    if mean.abs() > 1e-10 {
        return usage(format!("defect requires 𝔼f = 0, got {mean:e}"));
    }
    if f.max_abs() > 0.5 + 1e-12 {
        return usage(format!("defect requires values in [-1/2, 1/2], max |f| = {}", f.max_abs()));
    }
    let t = system.cols();
    let space = system.space();
    let base = 2f64.powi(1 - t as i32);
    let plus = density_value(space, &f.offset(0.5), budget)?;
    let minus = density_value(space, &f.offset(-0.5).neg(), budget)?;
    let defect_direct = (plus + minus) - base;

    let shortest = system.shortest_equation_length();
    let mut terms = Vec::new();
    // subsets smaller than the shortest equation are unconstrained and contribute (𝔼f)^|S| = 0
    let mut size = shortest.max(2);
    if size % 2 == 1 {
        size += 1;
    }
    while size <= t {
        for cols in combinations(t, size) {
            let view = system.restrict(&cols)?;
            let density = density_value(&view.space, f, budget)?;
            terms.push(ExpansionTerm {
                contribution: 2f64.powi(1 - t as i32 + size as i32) * density,
                deg: view.deg(),
                columns: cols,
                density,
            });
        }
        size += 2;
    }
    let contributions: Vec<Complex64> = terms
        .iter()
        .map(|t| Complex64::new(t.contribution, 0.0))
        .collect();
    let defect = pairwise_sum(&contributions).re;
    Ok(DefectReport {
        system: describe(space),
        vars: t,
        shortest_equation: shortest,
        defect,
        defect_direct,
        discrepancy: (defect - defect_direct).abs(),
        terms,
    })
}
