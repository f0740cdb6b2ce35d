//! Functions on F_p^n and their Fourier transforms.
//!
//! Convention: `f̂(h) = p^{-n} Σ_x f(x) e_p(x·h)` with `e_p(a) = exp(2πi a/p)`,
//! and the inverse `f(x) = Σ_h f̂(h) e_p(-x·h)`. With this normalization the
//! Fourier-side density formula needs no extra factors and `f̂(0) = 𝔼f`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::fp::{self, PrimeModulus, MAX_TABLE_LEN};

/// Tolerance below which imaginary parts count as zero.
pub const REAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupFunction {
    modulus: PrimeModulus,
    values: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierTable {
    modulus: PrimeModulus,
    coeffs: Vec<Complex64>,
}

fn check_len(modulus: &PrimeModulus, len: usize) -> Result<()> {
    if len != modulus.size() {
        return usage(format!(
            "table has {len} entries but F_{}^{} has {}",
            modulus.p(),
            modulus.n(),
            modulus.size()
        ));
    }
    Ok(())
}

impl GroupFunction {
    pub fn new(modulus: PrimeModulus, values: Vec<Complex64>) -> Result<Self> {
        check_len(&modulus, values.len())?;
        Ok(Self { modulus, values })
    }

    pub fn from_real(modulus: PrimeModulus, values: &[f64]) -> Result<Self> {
        Self::new(modulus, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn constant(modulus: PrimeModulus, value: f64) -> Self {
        Self {
            modulus,
            values: vec![Complex64::new(value, 0.0); modulus.size()],
        }
    }

    /// Characteristic function of `{0}`.
    pub fn indicator_zero(modulus: PrimeModulus) -> Self {
        let mut f = Self::constant(modulus, 0.0);
        f.values[0] = Complex64::new(1.0, 0.0);
        f
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.values.iter().all(|v| v.im.abs() <= tol)
    }

    pub fn is_bounded(&self, tol: f64) -> bool {
        self.max_abs() <= 1.0 + tol
    }

    /// Drop imaginary parts (callers check `is_real` first).
    pub fn to_real(&self) -> Self {
        Self {
            modulus: self.modulus,
            values: self.values.iter().map(|v| Complex64::new(v.re, 0.0)).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            modulus: self.modulus,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| v * c)
    }

    /// `c + f`.
    pub fn offset(&self, c: f64) -> Self {
        self.map(|v| v + c)
    }

    pub fn neg(&self) -> Self {
        self.map(|v| -v)
    }

    /// `(f ⊗ g)(x, y) = f(x) g(y)` on F_p^{n1+n2}; `x` holds the leading coordinates.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let modulus = tensor_modulus(&self.modulus, &other.modulus)?;
        let values = self
            .values
            .iter()
            .flat_map(|&a| other.values.iter().map(move |&b| a * b))
            .collect();
        Ok(Self { modulus, values })
    }

    /// The materialized `exponent`-fold tensor power. Fails with a capacity
    /// error when the table would exceed `max_len` entries; use
    /// [`TensorPower`] for density-only work in that case.
    pub fn tensor_power(&self, exponent: u32, max_len: u64) -> Result<Self> {
        if exponent == 0 {
            return usage("tensor power exponent must be positive");
        }
        let n = self.modulus.n() as u64 * exponent as u64;
        let needed = (self.modulus.p() as u128).saturating_pow(n.min(u32::MAX as u64) as u32);
        if needed > max_len.min(MAX_TABLE_LEN) as u128 {
            return Err(Error::Capacity {
                what: format!("tensor power {exponent} of a function on F_{}^{}", self.modulus.p(), self.modulus.n()),
                needed,
                budget: max_len.min(MAX_TABLE_LEN) as u128,
            });
        }
        let mut acc = self.clone();
        for _ in 1..exponent {
            acc = acc.tensor(self)?;
        }
        Ok(acc)
    }
}

fn tensor_modulus(a: &PrimeModulus, b: &PrimeModulus) -> Result<PrimeModulus> {
    if a.p() != b.p() {
        return usage(format!("cannot tensor functions over F_{} and F_{}", a.p(), b.p()));
    }
    PrimeModulus::new(a.p(), a.n() + b.n())
}

/// `base^{⊗ exponent}` kept symbolic. Only densities and the mean are
/// exposed; they follow from multiplicativity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorPower {
    pub base: GroupFunction,
    pub exponent: u32,
}

impl TensorPower {
    pub fn new(base: GroupFunction, exponent: u32) -> Result<Self> {
        if exponent == 0 {
            return usage("tensor power exponent must be positive");
        }
        Ok(Self { base, exponent })
    }

    pub fn mean(&self) -> Complex64 {
        self.base.mean().powu(self.exponent)
    }

    /// Dimension of the (never materialized) domain.
    pub fn dim(&self) -> u64 {
        self.base.modulus().n() as u64 * self.exponent as u64
    }
}

impl FourierTable {
    pub fn new(modulus: PrimeModulus, coeffs: Vec<Complex64>) -> Result<Self> {
        check_len(&modulus, coeffs.len())?;
        Ok(Self { modulus, coeffs })
    }

    pub fn zeros(modulus: PrimeModulus) -> Self {
        Self {
            modulus,
            coeffs: vec![Complex64::new(0.0, 0.0); modulus.size()],
        }
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn get(&self, index: usize) -> Complex64 {
        self.coeffs[index]
    }

    /// `f̂(0)`, the mean of the time-side function.
    pub fn mean(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// `Σ_h |f̂(h)|²`.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `f̂(-h) = conj(f̂(h))` for every h.
    pub fn is_conjugate_symmetric(&self, tol: f64) -> bool {
        (0..self.coeffs.len()).all(|i| {
            let j = self.modulus.neg_index(i);
            (self.coeffs[j] - self.coeffs[i].conj()).norm() <= tol
        })
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let modulus = tensor_modulus(&self.modulus, &other.modulus)?;
        let coeffs = self
            .coeffs
            .iter()
            .flat_map(|&a| other.coeffs.iter().map(move |&b| a * b))
            .collect();
        Ok(Self { modulus, coeffs })
    }
}

/// `exp(2πi j/p)` for `j ∈ [0, p)`.
pub fn roots_of_unity(p: u32) -> Vec<Complex64> {
    let mut roots = vec![Complex64::new(1.0, 0.0); p as usize];
    for j in 1..=(p as usize / 2) {
        let theta = 2.0 * PI * j as f64 / p as f64;
        roots[j] = Complex64::new(theta.cos(), theta.sin());
        roots[p as usize - j] = roots[j].conj();
    }
    roots
}

/// Separable transform: one size-p DFT per coordinate axis.
/// `sign = +1` computes `Σ_x v(x) e_p(x·h)`, `sign = -1` uses `e_p(-x·h)`.
fn separable_dft(modulus: &PrimeModulus, input: &[Complex64], sign: i64) -> Vec<Complex64> {
    let p = modulus.p() as usize;
    let size = modulus.size();
    let roots = roots_of_unity(modulus.p());
    let mut data = input.to_vec();
    let mut line = vec![Complex64::new(0.0, 0.0); p];
    let mut stride = 1usize;
    for _ in 0..modulus.n() {
        for base in 0..size {
            if (base / stride) % p != 0 {
                continue;
            }
            for (j, slot) in line.iter_mut().enumerate() {
                *slot = data[base + j * stride];
            }
            for h in 0..p {
                let mut acc = Complex64::new(0.0, 0.0);
                for (x, &v) in line.iter().enumerate() {
                    let e = (sign * (x * h) as i64).rem_euclid(p as i64) as usize;
                    acc += v * roots[e];
                }
                data[base + h * stride] = acc;
            }
        }
        stride *= p;
    }
    data
}

fn direct_dft(modulus: &PrimeModulus, input: &[Complex64], sign: i64) -> Vec<Complex64> {
    let p = modulus.p();
    let roots = roots_of_unity(p);
    let coords: Vec<Vec<u32>> = (0..modulus.size()).map(|i| modulus.coords_of(i)).collect();
    coords
        .iter()
        .map(|h| {
            coords
                .iter()
                .zip(input)
                .map(|(x, &v)| {
                    let dot = x
                        .iter()
                        .zip(h)
                        .fold(0u32, |acc, (&a, &b)| fp::add(acc, fp::mul(a, b, p), p));
                    let e = (sign * dot as i64).rem_euclid(p as i64) as usize;
                    v * roots[e]
                })
                .sum()
        })
        .collect()
}

/// Forward transform by the separable fast path, `O(n p^{n+1})`.
pub fn forward_transform(f: &GroupFunction) -> FourierTable {
    let scale = 1.0 / f.modulus.size() as f64;
    let coeffs = separable_dft(&f.modulus, &f.values, 1)
        .into_iter()
        .map(|c| c * scale)
        .collect();
    FourierTable {
        modulus: f.modulus,
        coeffs,
    }
}

/// Forward transform by direct `O(p^{2n})` summation.
pub fn forward_transform_direct(f: &GroupFunction) -> FourierTable {
    let scale = 1.0 / f.modulus.size() as f64;
    let coeffs = direct_dft(&f.modulus, &f.values, 1)
        .into_iter()
        .map(|c| c * scale)
        .collect();
    FourierTable {
        modulus: f.modulus,
        coeffs,
    }
}

pub fn inverse_transform(t: &FourierTable) -> GroupFunction {
    GroupFunction {
        modulus: t.modulus,
        values: separable_dft(&t.modulus, &t.coeffs, -1),
    }
}

pub fn inverse_transform_direct(t: &FourierTable) -> GroupFunction {
    GroupFunction {
        modulus: t.modulus,
        values: direct_dft(&t.modulus, &t.coeffs, -1),
    }
}

/// Contents of a function file.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionFile {
    Values(GroupFunction),
    Fourier(FourierTable),
}

impl FunctionFile {
    /// The time-side function, inverting a Fourier table if necessary.
    pub fn into_function(self) -> GroupFunction {
        match self {
            FunctionFile::Values(f) => f,
            FunctionFile::Fourier(t) => inverse_transform(&t),
        }
    }

    pub fn modulus(&self) -> PrimeModulus {
        match self {
            FunctionFile::Values(f) => f.modulus,
            FunctionFile::Fourier(t) => t.modulus,
        }
    }

    /// Header `p n mode`, then one `index re [im]` line per element. The
    /// imaginary column is omitted for real value tables.
    pub fn to_text(&self) -> String {
        let (modulus, mode, entries, omit_im) = match self {
            FunctionFile::Values(f) => (f.modulus, "values", &f.values, f.is_real(0.0)),
            FunctionFile::Fourier(t) => (t.modulus, "fourier", &t.coeffs, false),
        };
        let mut s = format!("{} {} {}\n", modulus.p(), modulus.n(), mode);
        for (i, v) in entries.iter().enumerate() {
            if omit_im {
                let _ = writeln!(s, "{i} {}", v.re);
            } else {
                let _ = writeln!(s, "{i} {} {}", v.re, v.im);
            }
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let perr = |line: usize, msg: String| Error::Parse { line, msg };
        let (hl, header) = lines
            .next()
            .ok_or_else(|| perr(1, "empty function file".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let [p, n, mode] = fields[..] else {
            return Err(perr(hl, "header must be `p n mode`".into()));
        };
        let p: u32 = p.parse().map_err(|_| perr(hl, format!("bad p {p:?}")))?;
        let n: u32 = n.parse().map_err(|_| perr(hl, format!("bad n {n:?}")))?;
        let modulus = PrimeModulus::new(p, n).map_err(|e| perr(hl, e.to_string()))?;
        let fourier = match mode {
            "values" => false,
            "fourier" => true,
            other => return Err(perr(hl, format!("unknown mode {other:?}"))),
        };
        let mut entries = vec![None; modulus.size()];
        for (ln, l) in lines {
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.len() < 2 || toks.len() > 3 || (fourier && toks.len() != 3) {
                return Err(perr(ln, "expected `index re im`".into()));
            }
            let idx: usize = toks[0]
                .parse()
                .map_err(|_| perr(ln, format!("bad index {:?}", toks[0])))?;
            let re: f64 = toks[1]
                .parse()
                .map_err(|_| perr(ln, format!("bad real part {:?}", toks[1])))?;
            let im: f64 = match toks.get(2) {
                Some(t) => t.parse().map_err(|_| perr(ln, format!("bad imaginary part {t:?}")))?,
                None => 0.0,
            };
            let slot = entries
                .get_mut(idx)
                .ok_or_else(|| perr(ln, format!("index {idx} out of range")))?;
            if slot.is_some() {
                return Err(perr(ln, format!("duplicate index {idx}")));
            }
            *slot = Some(Complex64::new(re, im));
        }
        let values = entries
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| perr(0, format!("missing entry for index {i}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(if fourier {
            FunctionFile::Fourier(FourierTable { modulus, coeffs: values })
        } else {
            FunctionFile::Values(GroupFunction { modulus, values })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_function(modulus: PrimeModulus, rng: &mut ChaCha8Rng, complex: bool) -> GroupFunction {
        let values = (0..modulus.size())
            .map(|_| {
                let re = rng.random_range(-1.0..1.0);
                let im = if complex { rng.random_range(-1.0..1.0) } else { 0.0 };
                Complex64::new(re, im)
            })
            .collect();
        GroupFunction::new(modulus, values).unwrap()
    }

    fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn constant_and_delta() {
        let m = PrimeModulus::new(5, 2).unwrap();
        let t = forward_transform(&GroupFunction::constant(m, 0.3));
        assert!((t.get(0) - Complex64::new(0.3, 0.0)).norm() < 1e-14);
        assert!(t.coeffs()[1..].iter().all(|c| c.norm() < 1e-14));

        let delta = GroupFunction::indicator_zero(m).scale(m.size() as f64);
        let t = forward_transform(&delta);
        assert!(t.coeffs().iter().all(|c| (c - Complex64::new(1.0, 0.0)).norm() < 1e-12));

        let mut only_zero = FourierTable::zeros(m);
        only_zero.coeffs_mut()[0] = Complex64::new(0.7, 0.0);
        let f = inverse_transform(&only_zero);
        assert!(f.values().iter().all(|v| (v - Complex64::new(0.7, 0.0)).norm() < 1e-14));
    }

    #[test]
    fn parseval_and_mean() {
        let m = PrimeModulus::new(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let f = random_function(m, &mut rng, true);
            let t = forward_transform(&f);
            let lhs: f64 = f.values().iter().map(|v| v.norm_sqr()).sum::<f64>() / m.size() as f64;
            assert!((lhs - t.energy()).abs() < 1e-10);
            assert!((t.mean() - f.mean()).norm() < 1e-12);
        }
    }

    #[test]
    fn round_trip_and_fast_path_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for (p, n) in [(5, 2), (3, 3), (7, 1), (3, 4)] {
            let m = PrimeModulus::new(p, n).unwrap();
            for _ in 0..25 {
                let f = random_function(m, &mut rng, true);
                let fast = forward_transform(&f);
                let slow = forward_transform_direct(&f);
                assert!(max_diff(fast.coeffs(), slow.coeffs()) < 1e-12);
                let back = inverse_transform(&fast);
                assert!(max_diff(back.values(), f.values()) < 1e-10);
                let back_direct = inverse_transform_direct(&fast);
                assert!(max_diff(back_direct.values(), f.values()) < 1e-10);
            }
        }
    }

    #[test]
    fn conjugate_symmetry_iff_real() {
        let m = PrimeModulus::new(5, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let real = random_function(m, &mut rng, false);
        assert!(forward_transform(&real).is_conjugate_symmetric(1e-12));
        let complex = random_function(m, &mut rng, true);
        assert!(!forward_transform(&complex).is_conjugate_symmetric(1e-6));

        let mut t = FourierTable::zeros(m);
        for i in m.positive_indices() {
            let z = Complex64::from_polar(1.0, rng.random_range(0.0..6.0));
            t.coeffs_mut()[i] = z;
            t.coeffs_mut()[m.neg_index(i)] = z.conj();
        }
        assert!(inverse_transform(&t).is_real(1e-10));
        t.coeffs_mut()[1] += Complex64::new(0.0, 0.5);
        assert!(!inverse_transform(&t).is_real(1e-6));
    }

    #[test]
    fn tensor_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random_function(PrimeModulus::new(3, 1).unwrap(), &mut rng, false);
        let b = random_function(PrimeModulus::new(3, 2).unwrap(), &mut rng, false);
        let ab = a.tensor(&b).unwrap();
        assert_eq!(ab.modulus(), PrimeModulus::new(3, 3).unwrap());
        assert!((ab.mean() - a.mean() * b.mean()).norm() < 1e-14);
        let lhs = forward_transform(&ab);
        let rhs = forward_transform(&a).tensor(&forward_transform(&b)).unwrap();
        assert!(max_diff(lhs.coeffs(), rhs.coeffs()) < 1e-12);

        let c = random_function(PrimeModulus::new(5, 1).unwrap(), &mut rng, false);
        assert!(matches!(a.tensor(&c), Err(Error::Usage(_))));

        assert_eq!(a.tensor_power(1, 1 << 20).unwrap(), a);
        let a3 = a.tensor_power(3, 1 << 20).unwrap();
        assert!((a3.mean() - a.mean().powu(3)).norm() < 1e-14);
        assert!(matches!(a.tensor_power(30, 1 << 20), Err(Error::Capacity { .. })));
        let lazy = TensorPower::new(a.clone(), 30).unwrap();
        assert_eq!(lazy.dim(), 30);
        assert!((lazy.mean() - a.mean().powu(30)).norm() < 1e-14);
    }

    #[test]
    fn function_file_round_trip() {
        let m = PrimeModulus::new(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = random_function(m, &mut rng, false);
        let file = FunctionFile::Values(f.clone());
        let text = file.to_text();
        assert!(text.lines().nth(1).unwrap().split_whitespace().count() == 2);
        assert_eq!(FunctionFile::parse(&text).unwrap(), file);

        let t = FunctionFile::Fourier(forward_transform(&f));
        assert_eq!(FunctionFile::parse(&t.to_text()).unwrap(), t);

        assert!(matches!(
            FunctionFile::parse("3 1 values\n0 1\n1 2\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            FunctionFile::parse("3 1 values\n0 1\n1 2\n7 1\n"),
            Err(Error::Parse { line: 4, .. })
        ));
    }
}
