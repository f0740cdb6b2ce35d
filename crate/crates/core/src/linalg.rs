//! Dense linear algebra over F_p for the small matrices that describe systems.

use crate::fp;

/// Reduced row-echelon form. Pivots are the leftmost nonzero entry of each
/// row, scaled to 1, rows sorted by pivot column, zero rows dropped. The RREF
/// of a row space is unique, so two matrices have the same row space iff
/// their RREFs are identical.
pub fn rref(rows: &[Vec<u32>], p: u32) -> (Vec<Vec<u32>>, Vec<usize>) {
    let mut m: Vec<Vec<u32>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == m.len() {
            break;
        }
        let Some(sel) = (r..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, sel);
        let scale = fp::inv(m[r][c], p);
        for x in m[r].iter_mut() {
            *x = fp::mul(*x, scale, p);
        }
        for i in 0..m.len() {
            if i != r && m[i][c] != 0 {
                let factor = m[i][c];
                for j in 0..cols {
                    let sub = fp::mul(factor, m[r][j], p);
                    m[i][j] = fp::sub(m[i][j], sub, p);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[Vec<u32>], p: u32) -> usize {
    rref(rows, p).1.len()
}

/// Basis of `{x : rows · x = 0}` with `cols - rank` vectors.
pub fn kernel_basis(rows: &[Vec<u32>], cols: usize, p: u32) -> Vec<Vec<u32>> {
    let (reduced, pivots) = rref(rows, p);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u32; cols];
            v[f] = 1;
            for (row, &pc) in reduced.iter().zip(&pivots) {
                v[pc] = fp::neg(row[f], p);
            }
            v
        })
        .collect()
}

pub fn mat_vec(rows: &[Vec<u32>], v: &[u32], p: u32) -> Vec<u32> {
    rows.iter()
        .map(|r| {
            r.iter()
                .zip(v)
                .fold(0u32, |acc, (&a, &b)| fp::add(acc, fp::mul(a, b, p), p))
        })
        .collect()
}

/// Every vector `Σ c_i rows[i]` as the coefficients range over F_p^{rows}.
/// The zero combination comes first.
pub fn span_vectors(rows: &[Vec<u32>], cols: usize, p: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0u32; cols]];
    for r in rows {
        let prev = out.clone();
        for c in 1..p {
            for v in &prev {
                out.push(
                    v.iter()
                        .zip(r)
                        .map(|(&a, &b)| fp::add(a, fp::mul(c, b, p), p))
                        .collect(),
                );
            }
        }
    }
    out
}

pub fn transpose(rows: &[Vec<u32>], cols: usize) -> Vec<Vec<u32>> {
    (0..cols).map(|c| rows.iter().map(|r| r[c]).collect()).collect()
}
