//! Arithmetic in F_p and in the group F_p^n.
//!
//! Elements are stored as canonical residues in `[0, p)`. The signed view maps
//! each coordinate into `[-(p-1)/2, (p-1)/2]`, and the total order `⪯` used by
//! the full-phase construction is the lexicographic order on signed views.
//! Table indices are the mixed-radix expansion of the canonical residues, most
//! significant coordinate first.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};

/// Largest table we are willing to index (number of group elements).
pub const MAX_TABLE_LEN: u64 = 1 << 32;

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Reduce an arbitrary integer to its canonical residue.
pub fn reduce(x: i64, p: u32) -> u32 {
    x.rem_euclid(p as i64) as u32
}

/// Signed representative in `[-(p-1)/2, (p-1)/2]`.
pub fn signed(x: u32, p: u32) -> i64 {
    if x > (p - 1) / 2 {
        x as i64 - p as i64
    } else {
        x as i64
    }
}

pub fn add(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 + b as u64) % p as u64) as u32
}

pub fn sub(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 + p as u64 - b as u64) % p as u64) as u32
}

pub fn mul(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

pub fn neg(a: u32, p: u32) -> u32 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

/// Multiplicative inverse by Fermat's little theorem. Panics on zero.
pub fn inv(a: u32, p: u32) -> u32 {
    assert!(a % p != 0, "inverse of zero mod {p}");
    let mut base = a as u64 % p as u64;
    let mut e = p as u64 - 2;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

/// The group F_p^n together with its indexing scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeModulus {
    p: u32,
    n: u32,
}

impl PrimeModulus {
    pub fn new(p: u32, n: u32) -> Result<Self> {
        if p < 3 || !is_prime(p as u64) {
            return usage(format!("p = {p} is not an odd prime"));
        }
        if n == 0 {
            return usage("dimension n must be at least 1");
        }
        (p as u64)
            .checked_pow(n)
            .filter(|&s| s <= MAX_TABLE_LEN)
            .ok_or_else(|| Error::Capacity {
                what: format!("group F_{p}^{n}"),
                needed: (p as u128).saturating_pow(n),
                budget: MAX_TABLE_LEN as u128,
            })?;
        Ok(Self { p, n })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Number of group elements, `p^n`.
    pub fn size(&self) -> usize {
        (self.p as usize).pow(self.n)
    }

    /// Canonical residues of the element with the given table index.
    pub fn coords_of(&self, mut index: usize) -> Vec<u32> {
        let p = self.p as usize;
        let mut coords = vec![0u32; self.n as usize];
        for c in coords.iter_mut().rev() {
            *c = (index % p) as u32;
            index /= p;
        }
        coords
    }

    pub fn index_of(&self, coords: &[u32]) -> usize {
        debug_assert_eq!(coords.len(), self.n as usize);
        coords
            .iter()
            .fold(0usize, |acc, &c| acc * self.p as usize + c as usize)
    }

    pub fn element(&self, index: usize) -> GroupElement {
        GroupElement {
            p: self.p,
            coords: self.coords_of(index),
        }
    }

    pub fn neg_index(&self, index: usize) -> usize {
        self.map_digits(index, |d| neg(d, self.p))
    }

    pub fn scale_index(&self, index: usize, c: u32) -> usize {
        self.map_digits(index, |d| mul(d, c, self.p))
    }

    /// Index of `a·x + b·y`.
    pub fn combine_index(&self, a: u32, x: usize, b: u32, y: usize) -> usize {
        let p = self.p as usize;
        let (mut x, mut y) = (x, y);
        let mut out = 0usize;
        let mut place = 1usize;
        for _ in 0..self.n {
            let dx = (x % p) as u32;
            let dy = (y % p) as u32;
            out += place * add(mul(a, dx, self.p), mul(b, dy, self.p), self.p) as usize;
            place *= p;
            x /= p;
            y /= p;
        }
        out
    }

    fn map_digits(&self, mut index: usize, f: impl Fn(u32) -> u32) -> usize {
        let p = self.p as usize;
        let mut out = 0usize;
        let mut place = 1usize;
        for _ in 0..self.n {
            out += place * f((index % p) as u32) as usize;
            place *= p;
            index /= p;
        }
        out
    }

    /// Position of the element in the `⪯` order (0 is the smallest element).
    pub fn order_rank(&self, index: usize) -> usize {
        let half = (self.p - 1) / 2;
        // shift signed digits into [0, p) so lexicographic order becomes numeric
        self.map_digits(index, |d| (signed(d, self.p) + half as i64) as u32)
    }

    /// Whether the element with this index is `≻ 0`, `= 0` or `≺ 0`.
    pub fn sign_of(&self, index: usize) -> Ordering {
        let zero_rank = self.order_rank(0);
        self.order_rank(index).cmp(&zero_rank)
    }

    pub fn abs_index(&self, index: usize) -> usize {
        if self.sign_of(index) == Ordering::Less {
            self.neg_index(index)
        } else {
            index
        }
    }

    /// Indices of all elements `h ≻ 0`, in increasing table-index order.
    pub fn positive_indices(&self) -> Vec<usize> {
        (0..self.size())
            .filter(|&i| self.sign_of(i) == Ordering::Greater)
            .collect()
    }
}

/// An element of F_p^n.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupElement {
    p: u32,
    coords: Vec<u32>,
}

impl GroupElement {
    pub fn new(p: u32, coords: Vec<u32>) -> Self {
        let coords = coords.into_iter().map(|c| c % p).collect();
        Self { p, coords }
    }

    pub fn from_signed(p: u32, coords: &[i64]) -> Self {
        Self {
            p,
            coords: coords.iter().map(|&c| reduce(c, p)).collect(),
        }
    }

    pub fn zero(p: u32, n: usize) -> Self {
        Self {
            p,
            coords: vec![0; n],
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn signed(&self) -> Vec<i64> {
        self.coords.iter().map(|&c| signed(c, self.p)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn neg(&self) -> Self {
        Self {
            p: self.p,
            coords: self.coords.iter().map(|&c| neg(c, self.p)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            p: self.p,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| add(a, b, self.p))
                .collect(),
        })
    }

    pub fn scale(&self, c: u32) -> Self {
        Self {
            p: self.p,
            coords: self.coords.iter().map(|&x| mul(x, c, self.p)).collect(),
        }
    }

    /// Sign class relative to zero: the sign of the first nonzero signed coordinate.
    pub fn sign(&self) -> Ordering {
        self.coords
            .iter()
            .map(|&c| signed(c, self.p))
            .find(|&c| c != 0)
            .map_or(Ordering::Equal, |c| c.cmp(&0))
    }

    /// Lexicographic comparison of signed views.
    pub fn compare(&self, other: &Self) -> Result<Ordering> {
        self.check_compatible(other)?;
        Ok(self.signed().cmp(&other.signed()))
    }

    pub fn abs(&self) -> Self {
        if self.sign() == Ordering::Less {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn index(&self) -> usize {
        self.coords
            .iter()
            .fold(0usize, |acc, &c| acc * self.p as usize + c as usize)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.p != other.p || self.coords.len() != other.coords.len() {
            return usage(format!(
                "group elements from F_{}^{} and F_{}^{} cannot be compared",
                self.p,
                self.coords.len(),
                other.p,
                other.coords.len()
            ));
        }
        Ok(())
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl GroupElement {
    /// Parse `"3,0,4"`; entries may be negative and are reduced mod p.
    pub fn parse(p: u32, s: &str) -> Result<Self> {
        let coords = s
            .split(',')
            .map(|tok| {
                i64::from_str(tok.trim()).map_err(|e| Error::Parse {
                    line: 1,
                    msg: format!("bad coordinate {tok:?}: {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_signed(p, &coords))
    }
}

/// All elements of F_p^n sorted under `⪯`.
pub fn enumerate_group(p: u32, n: u32) -> Result<Vec<GroupElement>> {
    let modulus = PrimeModulus::new(p, n)?;
    let mut elems: Vec<GroupElement> = (0..modulus.size()).map(|i| modulus.element(i)).collect();
    elems.sort_by_key(|e| e.signed());
    Ok(elems)
}
