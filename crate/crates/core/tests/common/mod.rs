//! Oracles that share no code with the library under test.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use polyrig::graph::Graph;

/// Textbook Gaussian elimination over the rationals.
pub fn rank_q(rows: &[Vec<BigRational>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..ncols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, p);
        let inv = BigRational::one() / m[rank][c].clone();
        for r in 0..m.len() {
            if r != rank && !m[r][c].is_zero() {
                let f = m[r][c].clone() * inv.clone();
                for k in c..ncols {
                    let t = m[rank][k].clone() * f.clone();
                    m[r][k] -= t;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank of a float matrix through singular values of `A^T A`, computed by
/// cyclic Jacobi rotations. Squaring halves the usable precision, so the
/// cutoff applies to the eigenvalues: `sigma^2 <= tol * max(sigma^2)` is zero.
pub fn rank_f64(rows: &[Vec<f64>], tol: f64) -> usize {
    let n = rows.first().map_or(0, Vec::len);
    let mut a = vec![vec![0.0; n]; n];
    for r in rows {
        for i in 0..n {
            for j in 0..n {
                a[i][j] += r[i] * r[j];
            }
        }
    }
    for _ in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p][q] * a[p][q];
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
        if off < 1e-30 {
            break;
        }
    }
    let ev: Vec<f64> = (0..n).map(|i| a[i][i].max(0.0)).collect();
    let max = ev.iter().cloned().fold(0.0, f64::max);
    ev.iter().filter(|&&s| s > tol * max.max(1.0)).count()
}

pub fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn qr(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

/// Every vertex subset of size >= 2 spans at most `d|V'| - d` edges.
pub fn brute_sparse(g: &Graph, d: usize) -> bool {
    let n = g.vertex_count();
    (0u32..(1 << n)).all(|mask| {
        let k = mask.count_ones() as usize;
        k < 2 || g.edges().iter().filter(|&&(a, b)| mask >> a & 1 == 1 && mask >> b & 1 == 1).count() <= d * k - d
    })
}

pub fn brute_tight(g: &Graph, d: usize) -> bool {
    g.edge_count() + d == d * g.vertex_count() && brute_sparse(g, d)
}

/// Brute-force spanning-tree check: `n - 1` edges and connected, by
/// repeated relaxation rather than union-find.
pub fn is_spanning_tree(n: usize, edges: &[(usize, usize)]) -> bool {
    if edges.len() + 1 != n {
        return false;
    }
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut changed = true;
    while changed {
        changed = false;
        for &(a, b) in edges {
            if seen[a] != seen[b] {
                seen[a] = true;
                seen[b] = true;
                changed = true;
            }
        }
    }
    seen.iter().all(|&s| s)
}

pub fn abs_le(x: &BigRational, y: &BigRational) -> bool {
    x.abs() <= y.abs()
}
