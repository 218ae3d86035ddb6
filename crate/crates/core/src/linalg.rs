//! Dense row reduction over either scalar backend.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalar::{Rational, Scalar};

/// Reduced row echelon form together with its pivot columns.
#[derive(Debug, Clone)]
pub struct Rref<S> {
    pub rows: Vec<Vec<S>>,
    pub pivots: Vec<usize>,
    pub ncols: usize,
}

impl<S: Scalar> Rref<S> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Kernel basis parametrized by the free columns in increasing order:
    /// the vector for free column `j` has a 1 in position `j`, zeros at the
    /// other free columns, and `-rref[i][j]` at the pivot column of row `i`.
    pub fn kernel(&self) -> Vec<Vec<S>> {
        let mut is_pivot = vec![false; self.ncols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ncols)
            .filter(|&j| !is_pivot[j])
            .map(|j| {
                let mut v = vec![S::zero(); self.ncols];
                v[j] = S::one();
                for (i, &p) in self.pivots.iter().enumerate() {
                    v[p] = -self.rows[i][j].clone();
                }
                v
            })
            .collect()
    }
}

/// Gauss-Jordan elimination. Exact backend: first nonzero pivot in each
/// column. Float backend: partial pivoting, with entries of magnitude at most
/// `tol * max_abs_entry` treated as zero.
pub fn rref<S: Scalar>(matrix: &[Vec<S>], ncols: usize, tol: f64) -> Rref<S> {
    let mut a: Vec<Vec<S>> = matrix.to_vec();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .map(|x| x.to_f64().abs())
        .fold(0.0, f64::max);
    let cutoff = tol * scale;
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == a.len() {
            break;
        }
        let pick = match S::BACKEND {
            crate::scalar::Backend::Exact => (r..a.len()).find(|&i| !a[i][c].is_zero()),
            crate::scalar::Backend::Float => (r..a.len())
                .filter(|&i| a[i][c].to_f64().abs() > cutoff)
                .max_by(|&i, &j| {
                    a[i][c]
                        .to_f64()
                        .abs()
                        .partial_cmp(&a[j][c].to_f64().abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                }),
        };
        let Some(p) = pick else {
            if S::BACKEND == crate::scalar::Backend::Float {
                for row in a.iter_mut().skip(r) {
                    row[c] = S::zero();
                }
            }
            continue;
        };
        a.swap(r, p);
        let inv = S::one() / a[r][c].clone();
        for x in a[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x = x.clone() - f.clone() * y.clone();
            }
            row[c] = S::zero();
        }
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    Rref {
        rows: a,
        pivots,
        ncols,
    }
}

pub fn rank<S: Scalar>(matrix: &[Vec<S>], ncols: usize, tol: f64) -> usize {
    rref(matrix, ncols, tol).rank()
}

pub fn kernel<S: Scalar>(matrix: &[Vec<S>], ncols: usize, tol: f64) -> Vec<Vec<S>> {
    rref(matrix, ncols, tol).kernel()
}

/// Solves the square system `a x = b`; `None` when `a` is singular.
pub fn solve<S: Scalar>(a: &[Vec<S>], b: &[S], tol: f64) -> Option<Vec<S>> {
    let n = b.len();
    let aug: Vec<Vec<S>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let red = rref(&aug, n + 1, tol);
    if red.pivots.len() != n || red.pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some(red.rows.iter().map(|r| r[n].clone()).collect())
}

/// Rank by fraction-free (Bareiss) elimination. Rows are first cleared of
/// denominators, so every intermediate value is an integer.
pub fn bareiss_rank(matrix: &[Vec<Rational>], ncols: usize) -> usize {
    let mut a: Vec<Vec<BigInt>> = matrix
        .iter()
        .map(|row| {
            let l = row
                .iter()
                .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter()
                .map(|x| x.numer() * (&l / x.denom()))
                .collect()
        })
        .collect();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..ncols {
        if r == a.len() {
            break;
        }
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let pivot = a[r][c].clone();
        let (head, tail) = a.split_at_mut(r + 1);
        let prow = &head[r];
        for row in tail.iter_mut() {
            let f = row[c].clone();
            for j in 0..ncols {
                let v = &pivot * &row[j] - &f * &prow[j];
                debug_assert!((&v % &prev).is_zero());
                row[j] = v / &prev;
            }
        }
        prev = pivot.abs();
        if prev.is_zero() {
            prev = BigInt::one();
        }
        r += 1;
    }
    r
}
