//! Linear systems over F_p: structure, restrictions and containment.
//!
//! A system acts coordinate-wise on `(F_p^n)^t`, so every structural question
//! reduces to linear algebra on the `m × t` coefficient matrix. Systems are
//! kept alongside a canonical [`SolutionSpace`] (RREF equations plus an RREF
//! basis of the kernel), which is what densities and comparisons consume.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::fp;
use crate::linalg;

/// Solution space of a homogeneous system in canonical form.
///
/// Two values compare equal iff they describe the same labeled subspace of
/// F_p^t, because both the equations and the kernel basis are stored in
/// reduced row-echelon form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SolutionSpace {
    p: u32,
    vars: usize,
    equations: Vec<Vec<u32>>,
    kernel: Vec<Vec<u32>>,
}

impl SolutionSpace {
    pub fn from_equations(p: u32, vars: usize, rows: &[Vec<u32>]) -> Self {
        let (equations, _) = linalg::rref(rows, p);
        let kernel = linalg::rref(&linalg::kernel_basis(&equations, vars, p), p).0;
        Self {
            p,
            vars,
            equations,
            kernel,
        }
    }

    /// The subspace spanned by `generators`, described by its annihilator.
    pub fn from_generators(p: u32, vars: usize, generators: &[Vec<u32>]) -> Self {
        let (kernel, _) = linalg::rref(generators, p);
        let equations = linalg::rref(&linalg::kernel_basis(&kernel, vars, p), p).0;
        Self {
            p,
            vars,
            equations,
            kernel,
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Number of variables `t`.
    pub fn vars(&self) -> usize {
        self.vars
    }

    /// Independent equations in RREF; empty for the free system.
    pub fn equations(&self) -> &[Vec<u32>] {
        &self.equations
    }

    pub fn kernel(&self) -> &[Vec<u32>] {
        &self.kernel
    }

    pub fn codim(&self) -> usize {
        self.equations.len()
    }

    /// Degrees of freedom: dimension of the solution space.
    pub fn deg(&self) -> usize {
        self.kernel.len()
    }

    pub fn contains_vector(&self, v: &[u32]) -> bool {
        linalg::mat_vec(&self.equations, v, self.p)
            .iter()
            .all(|&x| x == 0)
    }

    fn row_space(&self) -> Vec<Vec<u32>> {
        linalg::span_vectors(&self.equations, self.vars, self.p)
    }

    /// Minimum support size of a nonzero vector in the row space, or `None`
    /// when there are no equations.
    pub fn shortest_equation_length(&self) -> Option<usize> {
        self.row_space()
            .iter()
            .skip(1)
            .map(|v| v.iter().filter(|&&x| x != 0).count())
            .min()
    }

    /// All `2 × 2` minors nonsingular. Row operations scale every minor by the
    /// same nonzero determinant, so the canonical equations can be used.
    pub fn minors_generic(&self) -> Result<bool> {
        if self.codim() != 2 {
            return usage(format!(
                "minor genericity is defined for 2-equation systems, this one has {}",
                self.codim()
            ));
        }
        let (a, b) = (&self.equations[0], &self.equations[1]);
        let p = self.p;
        for i in 0..self.vars {
            for j in i + 1..self.vars {
                let det = fp::sub(fp::mul(a[i], b[j], p), fp::mul(a[j], b[i], p), p);
                if det == 0 {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Whether some row-space vector is a scalar multiple of a balanced ±1
    /// vector. Always false for an odd number of variables.
    pub fn contains_additive_tuple(&self) -> bool {
        if self.vars % 2 == 1 {
            return false;
        }
        let p = self.p;
        self.row_space().iter().skip(1).any(|v| {
            let c = v[0];
            if c == 0 {
                return false;
            }
            let minus_c = fp::neg(c, p);
            let plus = v.iter().filter(|&&x| x == c).count();
            let minus = v.iter().filter(|&&x| x == minus_c).count();
            plus == self.vars / 2 && minus == self.vars / 2
        })
    }

    /// Project the solution space onto the ordered column list `columns`.
    pub fn restrict(&self, columns: &[usize]) -> Result<SubsystemView> {
        if columns.is_empty() {
            return usage("restriction to an empty column set");
        }
        let mut seen = vec![false; self.vars];
        for &c in columns {
            if c >= self.vars || seen[c] {
                return usage(format!(
                    "invalid restriction column {c} for a system in {} variables",
                    self.vars
                ));
            }
            seen[c] = true;
        }
        let projected: Vec<Vec<u32>> = self
            .kernel
            .iter()
            .map(|u| columns.iter().map(|&c| u[c]).collect())
            .collect();
        Ok(SubsystemView {
            parent_vars: self.vars,
            columns: columns.to_vec(),
            space: SolutionSpace::from_generators(self.p, columns.len(), &projected),
        })
    }

    /// Apply a column relabeling: variable `i` of `self` becomes variable
    /// `perm[i]` of the result.
    pub fn permute(&self, perm: &[usize]) -> SolutionSpace {
        let moved: Vec<Vec<u32>> = self
            .equations
            .iter()
            .map(|row| {
                let mut out = vec![0u32; self.vars];
                for (i, &x) in row.iter().enumerate() {
                    out[perm[i]] = x;
                }
                out
            })
            .collect();
        SolutionSpace::from_equations(self.p, self.vars, &moved)
    }

    /// Per-column invariant under column permutations: the sorted weights of
    /// the row-space vectors that are nonzero in that column.
    fn column_signatures(&self) -> Vec<Vec<usize>> {
        const MAX_ROW_SPACE: u128 = 1 << 14;
        if (self.p as u128).pow(self.codim() as u32) > MAX_ROW_SPACE {
            return vec![Vec::new(); self.vars];
        }
        let rs = self.row_space();
        (0..self.vars)
            .map(|j| {
                let mut sig: Vec<usize> = rs
                    .iter()
                    .filter(|v| v[j] != 0)
                    .map(|v| v.iter().filter(|&&x| x != 0).count())
                    .collect();
                sig.sort_unstable();
                sig
            })
            .collect()
    }

    /// Convert back to a full-rank system; requires at least one equation.
    pub fn to_system(&self) -> Result<LinearSystem> {
        let rows: Vec<Vec<i64>> = self
            .equations
            .iter()
            .map(|r| r.iter().map(|&x| fp::signed(x, self.p)).collect())
            .collect();
        LinearSystem::new(self.p, &rows)
    }
}

/// The system induced on a subset of a parent's variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsystemView {
    pub parent_vars: usize,
    pub columns: Vec<usize>,
    pub space: SolutionSpace,
}

impl SubsystemView {
    pub fn deg(&self) -> usize {
        self.space.deg()
    }

    pub fn size(&self) -> usize {
        self.columns.len()
    }
}

impl AsRef<SolutionSpace> for SubsystemView {
    fn as_ref(&self) -> &SolutionSpace {
        &self.space
    }
}

/// An `m × t` full-rank system with `t > m ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SystemRepr", into = "SystemRepr")]
pub struct LinearSystem {
    matrix: Vec<Vec<u32>>,
    space: SolutionSpace,
}

#[derive(Serialize, Deserialize)]
struct SystemRepr {
    p: u32,
    matrix: Vec<Vec<i64>>,
}

impl TryFrom<SystemRepr> for LinearSystem {
    type Error = Error;
    fn try_from(r: SystemRepr) -> Result<Self> {
        LinearSystem::new(r.p, &r.matrix)
    }
}

impl From<LinearSystem> for SystemRepr {
    fn from(s: LinearSystem) -> Self {
        SystemRepr {
            p: s.p(),
            matrix: s.signed_matrix(),
        }
    }
}

impl LinearSystem {
    /// Build from integer rows; entries are reduced mod p.
    pub fn new(p: u32, rows: &[Vec<i64>]) -> Result<Self> {
        if p < 3 || !fp::is_prime(p as u64) {
            return usage(format!("p = {p} is not an odd prime"));
        }
        let m = rows.len();
        if m == 0 {
            return usage("a system needs at least one equation");
        }
        let t = rows[0].len();
        if rows.iter().any(|r| r.len() != t) {
            return usage("rows of the coefficient matrix have different lengths");
        }
        if t <= m {
            return usage(format!("need more variables than equations, got {m}×{t}"));
        }
        let matrix: Vec<Vec<u32>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| fp::reduce(x, p)).collect())
            .collect();
        let rank = linalg::rank(&matrix, p);
        if rank != m {
            return usage(format!("matrix has rank {rank} but {m} rows; systems must be full rank"));
        }
        let space = SolutionSpace::from_equations(p, t, &matrix);
        Ok(Self { matrix, space })
    }

    pub fn p(&self) -> u32 {
        self.space.p
    }

    pub fn rows(&self) -> usize {
        self.matrix.len()
    }

    pub fn cols(&self) -> usize {
        self.space.vars
    }

    pub fn matrix(&self) -> &[Vec<u32>] {
        &self.matrix
    }

    pub fn signed_matrix(&self) -> Vec<Vec<i64>> {
        self.matrix
            .iter()
            .map(|r| r.iter().map(|&x| fp::signed(x, self.p())).collect())
            .collect()
    }

    pub fn space(&self) -> &SolutionSpace {
        &self.space
    }

    pub fn rank(&self) -> usize {
        self.matrix.len()
    }

    pub fn deg(&self) -> usize {
        self.space.deg()
    }

    pub fn shortest_equation_length(&self) -> usize {
        self.space
            .shortest_equation_length()
            .expect("full-rank systems have at least one equation")
    }

    pub fn minors_generic(&self) -> Result<bool> {
        self.space.minors_generic()
    }

    pub fn contains_additive_tuple(&self) -> bool {
        self.space.contains_additive_tuple()
    }

    pub fn restrict(&self, columns: &[usize]) -> Result<SubsystemView> {
        self.space.restrict(columns)
    }

    /// Row `i` of a `2 × k` system as `(a_i, b_i)` column pairs.
    pub fn column_pairs(&self) -> Result<Vec<(u32, u32)>> {
        if self.rows() != 2 {
            return usage(format!("expected a 2×k system, got {} rows", self.rows()));
        }
        Ok((0..self.cols())
            .map(|i| (self.matrix[0][i], self.matrix[1][i]))
            .collect())
    }

    /// Text form: `p m t` then one row per line, signed representatives.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.p(), self.rows(), self.cols());
        for row in self.signed_matrix() {
            let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty system file".into(),
        })?;
        let nums = parse_ints(hline, header)?;
        let [p, m, t] = nums[..] else {
            return Err(Error::Parse {
                line: hline,
                msg: format!("header must be `p m t`, found {} fields", nums.len()),
            });
        };
        if p < 3 || p > u32::MAX as i64 || m < 1 || t < 1 {
            return Err(Error::Parse {
                line: hline,
                msg: format!("invalid header values p={p} m={m} t={t}"),
            });
        }
        let mut rows = Vec::new();
        let mut last_line = hline;
        for (ln, l) in lines {
            let row = parse_ints(ln, l)?;
            if row.len() != t as usize {
                return Err(Error::Parse {
                    line: ln,
                    msg: format!("expected {t} coefficients, found {}", row.len()),
                });
            }
            rows.push(row);
            last_line = ln;
        }
        if rows.len() != m as usize {
            return Err(Error::Parse {
                line: last_line,
                msg: format!("expected {m} rows, found {}", rows.len()),
            });
        }
        Self::new(p as u32, &rows)
    }
}

impl AsRef<SolutionSpace> for LinearSystem {
    fn as_ref(&self) -> &SolutionSpace {
        &self.space
    }
}

impl AsRef<SolutionSpace> for SolutionSpace {
    fn as_ref(&self) -> &SolutionSpace {
        self
    }
}

fn parse_ints(line: usize, s: &str) -> Result<Vec<i64>> {
    s.split_whitespace()
        .map(|tok| {
            tok.parse::<i64>().map_err(|_| Error::Parse {
                line,
                msg: format!("not an integer: {tok:?}"),
            })
        })
        .collect()
}

/// Find an ordered injection `σ` of `small`'s variables into `big`'s such
/// that every solution of `big`, read at columns `σ(0), …, σ(t'-1)`, solves
/// `small`. Returns the lexicographically first one found.
pub fn contains(big: &SolutionSpace, small: &SolutionSpace) -> Option<Vec<usize>> {
    let (t, ts) = (big.vars, small.vars);
    if big.p != small.p || ts > t {
        return None;
    }
    let p = big.p;
    // equation e can be checked once all columns up to its last support index are placed
    let ready_at: Vec<usize> = small
        .equations
        .iter()
        .map(|e| e.iter().rposition(|&x| x != 0).unwrap_or(0))
        .collect();

    let mut subset: Vec<usize> = (0..ts).collect();
    loop {
        let projected: Vec<Vec<u32>> = big
            .kernel
            .iter()
            .map(|u| subset.iter().map(|&c| u[c]).collect())
            .collect();
        if linalg::rank(&projected, p) <= small.deg() {
            let mut assignment = Vec::with_capacity(ts);
            let mut used = vec![false; ts];
            if place(big, small, &subset, &ready_at, &mut assignment, &mut used) {
                return Some(assignment);
            }
        }
        if !next_combination(&mut subset, t) {
            return None;
        }
    }
}

fn place(
    big: &SolutionSpace,
    small: &SolutionSpace,
    subset: &[usize],
    ready_at: &[usize],
    assignment: &mut Vec<usize>,
    used: &mut [bool],
) -> bool {
    let depth = assignment.len();
    if depth == subset.len() {
        return true;
    }
    let p = big.p;
    for (slot, &col) in subset.iter().enumerate() {
        if used[slot] {
            continue;
        }
        assignment.push(col);
        used[slot] = true;
        let ok = small
            .equations
            .iter()
            .zip(ready_at)
            .filter(|(_, &r)| r == depth)
            .all(|(e, _)| {
                big.kernel.iter().all(|u| {
                    e.iter()
                        .zip(assignment.iter())
                        .fold(0u32, |acc, (&c, &col)| fp::add(acc, fp::mul(c, u[col], p), p))
                        == 0
                })
            });
        if ok && place(big, small, subset, ready_at, assignment, used) {
            return true;
        }
        assignment.pop();
        used[slot] = false;
    }
    false
}

/// Advance a sorted k-subset of `0..n` to the next one in lexicographic order.
pub fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// All sorted subsets of `0..n` with the given size.
pub fn combinations(n: usize, size: usize) -> Vec<Vec<usize>> {
    if size > n {
        return Vec::new();
    }
    let mut c: Vec<usize> = (0..size).collect();
    let mut out = vec![c.clone()];
    if size == 0 {
        return out;
    }
    while next_combination(&mut c, n) {
        out.push(c.clone());
    }
    out
}

/// Outcome of comparing two density operators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorEquality {
    /// Same labeled subspace.
    pub labeled: bool,
    /// A relabeling `perm` with `a.permute(perm) == b`, if one exists.
    pub permutation: Option<Vec<usize>>,
}

impl OperatorEquality {
    pub fn equivalent(&self) -> bool {
        self.labeled || self.permutation.is_some()
    }
}

pub fn operators_equal(a: &SolutionSpace, b: &SolutionSpace) -> Result<OperatorEquality> {
    if a.p != b.p || a.vars != b.vars {
        return usage("operators over different p or numbers of variables cannot be compared");
    }
    let labeled = a == b;
    if labeled {
        return Ok(OperatorEquality {
            labeled,
            permutation: Some((0..a.vars).collect()),
        });
    }
    if a.codim() != b.codim() {
        return Ok(OperatorEquality {
            labeled,
            permutation: None,
        });
    }
    let sa = a.column_signatures();
    let sb = b.column_signatures();
    let mut perm = vec![usize::MAX; a.vars];
    let mut used = vec![false; a.vars];
    let found = match_columns(a, b, &sa, &sb, 0, &mut perm, &mut used);
    Ok(OperatorEquality {
        labeled,
        permutation: found.then_some(perm),
    })
}

fn match_columns(
    a: &SolutionSpace,
    b: &SolutionSpace,
    sa: &[Vec<usize>],
    sb: &[Vec<usize>],
    i: usize,
    perm: &mut [usize],
    used: &mut [bool],
) -> bool {
    if i == a.vars {
        return a.permute(perm) == *b;
    }
    for j in 0..b.vars {
        if used[j] || sa[i] != sb[j] {
            continue;
        }
        perm[i] = j;
        used[j] = true;
        if match_columns(a, b, sa, sb, i + 1, perm, used) {
            return true;
        }
        used[j] = false;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn four_ap(p: u32) -> LinearSystem {
        LinearSystem::new(p, &[vec![1, -2, 1, 0], vec![0, 1, -2, 1]]).unwrap()
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(LinearSystem::new(4, &[vec![1, 1, 1]]).is_err());
        assert!(LinearSystem::new(5, &[vec![1, 1], vec![1, 2]]).is_err());
        assert!(LinearSystem::new(5, &[vec![1, 1, 1], vec![2, 2, 2]]).is_err());
        assert!(LinearSystem::new(5, &[vec![1, 1, 1], vec![2, 2]]).is_err());
        let s = four_ap(5);
        assert_eq!(s.deg(), 2);
        for v in s.space().kernel() {
            assert!(s.space().contains_vector(v));
        }
    }

    #[test]
    fn shortest_equation_examples() {
        assert_eq!(four_ap(5).shortest_equation_length(), 3);
        let s = LinearSystem::new(3, &[vec![1, 1, 1]]).unwrap();
        assert_eq!(s.shortest_equation_length(), 3);
        let s = LinearSystem::new(3, &[vec![1, 1, 0], vec![0, 1, 1]]).unwrap();
        assert_eq!(s.shortest_equation_length(), 2);
    }

    #[test]
    fn minors_examples() {
        assert!(four_ap(5).minors_generic().unwrap());
        let s = LinearSystem::new(5, &[vec![1, 0, 1, 1], vec![0, 1, 1, 1]]).unwrap();
        assert!(!s.minors_generic().unwrap());
        let one = LinearSystem::new(5, &[vec![1, 1, 1]]).unwrap();
        assert!(matches!(one.minors_generic(), Err(Error::Usage(_))));
    }

    #[test]
    fn additive_tuple_examples() {
        let s = LinearSystem::new(5, &[vec![1, 1, -1, -1]]).unwrap();
        assert!(s.contains_additive_tuple());
        assert!(four_ap(5).contains_additive_tuple());
        let s = LinearSystem::new(7, &[vec![1, 2, 3, 4]]).unwrap();
        assert!(!s.contains_additive_tuple());
        let odd = LinearSystem::new(5, &[vec![1, 1, -1]]).unwrap();
        assert!(!odd.contains_additive_tuple());
    }

    #[test]
    fn restrict_examples() {
        let s = four_ap(5);
        let r = s.restrict(&[0, 1, 2]).unwrap();
        assert_eq!(r.deg(), 2);
        assert_eq!(r.space.equations(), &[vec![1, 3, 1]]);
        let r = s.restrict(&[0, 1]).unwrap();
        assert_eq!(r.deg(), 2);
        assert_eq!(r.space.codim(), 0);
        let r = s.restrict(&[0, 1, 2, 3]).unwrap();
        assert_eq!(&r.space, s.space());
        assert!(s.restrict(&[]).is_err());
        assert!(s.restrict(&[0, 0]).is_err());
    }

    #[test]
    fn restriction_matches_projection_double_inclusion() {
        // projection ⊆ induced solutions, and dimensions agree
        let s = LinearSystem::new(5, &[vec![1, 2, 0, 3, 1, 4], vec![0, 1, 1, 2, 0, 1]]).unwrap();
        for size in 1..=6 {
            for cols in combinations(6, size) {
                let r = s.restrict(&cols).unwrap();
                let gens: Vec<Vec<u32>> = s
                    .space()
                    .kernel()
                    .iter()
                    .map(|u| cols.iter().map(|&c| u[c]).collect())
                    .collect();
                for v in linalg::span_vectors(&gens, size, 5) {
                    assert!(r.space.contains_vector(&v));
                }
                assert_eq!(r.deg(), linalg::rank(&gens, 5));
                assert_eq!(r.deg() + r.space.codim(), size);
                assert!(r.deg() + 2 >= size && r.deg() <= size);
            }
        }
    }

    #[test]
    fn contains_examples() {
        let s = four_ap(5);
        assert_eq!(contains(s.space(), s.space()), Some(vec![0, 1, 2, 3]));
        let quad = LinearSystem::new(5, &[vec![1, -1, -1, 1]]).unwrap();
        let sigma = contains(s.space(), quad.space()).expect("4-AP contains an additive quadruple");
        let r = s.restrict(&sigma).unwrap();
        for v in r.space.kernel() {
            assert!(quad.space().contains_vector(v));
        }
        let tiny = LinearSystem::new(5, &[vec![1, 1, 1]]).unwrap();
        assert_eq!(contains(tiny.space(), s.space()), None);
    }

    #[test]
    fn operators_equal_examples() {
        let s = four_ap(5);
        let swapped = LinearSystem::new(5, &[vec![0, 1, -2, 1], vec![1, -2, 1, 0]]).unwrap();
        let eq = operators_equal(s.space(), swapped.space()).unwrap();
        assert!(eq.labeled);

        let reversed = LinearSystem::new(5, &[vec![0, 1, -2, 1], vec![1, -2, 1, 0]])
            .unwrap()
            .space()
            .permute(&[3, 2, 1, 0]);
        let eq = operators_equal(s.space(), &reversed).unwrap();
        assert!(eq.equivalent());

        let a = LinearSystem::new(5, &[vec![1, 1, 1]]).unwrap();
        let b = LinearSystem::new(5, &[vec![1, 2, 3]]).unwrap();
        let eq = operators_equal(a.space(), b.space()).unwrap();
        assert!(!eq.labeled && eq.permutation.is_none());
    }

    #[test]
    fn permutation_found_is_valid() {
        let a = LinearSystem::new(7, &[vec![1, 2, 3, 4, 5], vec![0, 1, 1, 3, 2]]).unwrap();
        let perm = [2, 4, 0, 1, 3];
        let b = a.space().permute(&perm);
        let eq = operators_equal(a.space(), &b).unwrap();
        let found = eq.permutation.unwrap();
        assert_eq!(a.space().permute(&found), b);
    }

    #[test]
    fn parse_and_print() {
        let text = "# 4-AP\n5 2 4\n1 -2 1 0  # first\n0 1 -2 1\n";
        let s = LinearSystem::parse(text).unwrap();
        assert_eq!(s, four_ap(5));
        assert_eq!(s.to_text(), "5 2 4\n1 -2 1 0\n0 1 -2 1\n");
        assert_eq!(LinearSystem::parse(&s.to_text()).unwrap(), s);

        let bad = "5 2 4\n1 -2 1 0\n0 1 x 1\n";
        match LinearSystem::parse(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        let short = "5 2 4\n1 -2 1 0\n0 1 1\n";
        assert!(matches!(LinearSystem::parse(short), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn serde_round_trip() {
        let s = four_ap(7);
        let json = serde_json::to_string(&s).unwrap();
        let back: LinearSystem = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }
}
