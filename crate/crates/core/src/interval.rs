//! Closed rational intervals and float enclosures of computed densities.
//!
//! Floats convert to rationals exactly, so an enclosure `[lo, hi]` with float
//! endpoints can be pushed through exact arithmetic without further rounding.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::density::{self, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::function::{forward_transform, GroupFunction};
use crate::system::SolutionSpace;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    lo: BigRational,
    hi: BigRational,
}

pub fn rational(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Invariant(format!("non-finite value {x}")))
}

/// `p^{-e}` exactly.
pub fn inverse_power(p: u32, e: u64) -> BigRational {
    let e = u32::try_from(e).expect("exponent fits in u32");
    BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(p), e as usize))
}

/// `2^e` exactly, for possibly negative `e`.
pub fn power_of_two(e: i64) -> BigRational {
    let two = BigInt::from(2);
    let mag = num_traits::pow(two, e.unsigned_abs() as usize);
    if e >= 0 {
        BigRational::from_integer(mag)
    } else {
        BigRational::new(BigInt::one(), mag)
    }
}

impl Interval {
    pub fn new(lo: BigRational, hi: BigRational) -> Result<Self> {
        if lo > hi {
            return Err(Error::Invariant("interval with lo > hi".into()));
        }
        Ok(Self { lo, hi })
    }

    pub fn point(x: BigRational) -> Self {
        Self { lo: x.clone(), hi: x }
    }

    pub fn from_floats(lo: f64, hi: f64) -> Result<Self> {
        Self::new(rational(lo)?, rational(hi)?)
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let c = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        Self {
            lo: c.iter().min().unwrap().clone(),
            hi: c.iter().max().unwrap().clone(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        self.mul(&Self::point(c.clone()))
    }

    pub fn contains_zero(&self) -> bool {
        self.lo <= BigRational::zero() && self.hi >= BigRational::zero()
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// `max |x|` over the interval.
    pub fn abs_upper(&self) -> BigRational {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn pow(&self, e: u32) -> Self {
        let up = |x: &BigRational| num_traits::pow(x.clone(), e as usize);
        if e == 0 {
            return Self::point(BigRational::one());
        }
        if e % 2 == 1 || self.lo >= BigRational::zero() {
            return Self {
                lo: up(&self.lo),
                hi: up(&self.hi),
            };
        }
        if self.hi <= BigRational::zero() {
            return Self {
                lo: up(&self.hi),
                hi: up(&self.lo),
            };
        }
        Self {
            lo: BigRational::zero(),
            hi: up(&self.abs_upper()),
        }
    }
}

pub fn approx(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// A density value with a rigorous-in-practice error radius and float
/// endpoints rounded outward.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityEnclosure {
    pub value: f64,
    pub radius: f64,
    pub lo: f64,
    pub hi: f64,
    pub terms: u128,
}

impl DensityEnclosure {
    pub fn interval(&self) -> Result<Interval> {
        Interval::from_floats(self.lo, self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Direct density with radius `max(2(N + t)·u·M^t, 2·|direct − Fourier|)`,
/// where `N` is the number of summed terms, `u` the unit roundoff and `M`
/// the largest `|f|`. The Fourier value is only consulted when affordable.
pub fn density_enclosure(space: &SolutionSpace, f: &GroupFunction, budget: u128) -> Result<DensityEnclosure> {
    let direct = density::density_direct(space, f, budget)?;
    let value = direct.value.re;
    let t = space.vars() as i32;
    let unit = f64::EPSILON / 2.0;
    let mut radius = 2.0 * (direct.terms as f64 + t as f64) * unit * f.max_abs().powi(t);
    let fourier_terms = (f.modulus().size() as u128).saturating_pow(space.codim() as u32);
    if fourier_terms <= budget.min(DEFAULT_BUDGET * 10) {
        let q = density::density_fourier(space, &forward_transform(f), budget)?;
        radius = radius.max(2.0 * (q.value.re - value).abs());
    }
    Ok(DensityEnclosure {
        value,
        radius,
        lo: (value - radius).next_down(),
        hi: (value + radius).next_up(),
        terms: direct.terms,
    })
}
