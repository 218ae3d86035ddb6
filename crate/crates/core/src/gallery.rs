//! Builders for standard polyhedral norms.

use serde_json::Value;
use thiserror::Error;

use crate::linalg;
use crate::polytope::{Polytope, PolytopeError};
use crate::scalar::{scalar_from_json, Point, Rational, Scalar, DEFAULT_TOLERANCE};

/// Largest ground set accepted for submodular functions.
pub const MAX_SUBMODULAR_GROUND: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GalleryError {
    #[error("n-gon needs an even n >= 4, got {0}")]
    OddN(usize),
    #[error("vectors of B do not span R^{0}")]
    DegenerateB(usize),
    #[error("set function is not submodular at S={set:?}, i={i}, j={j}")]
    NotSubmodular { set: Vec<usize>, i: usize, j: usize },
    #[error("set function is not monotone at S={set:?}, j={j}")]
    NotMonotone { set: Vec<usize>, j: usize },
    #[error("set function must vanish on the empty set and be positive on singletons")]
    BadNormalization,
    #[error("ground set size must be 1..={max}, got {0}", max = MAX_SUBMODULAR_GROUND)]
    GroundSize(usize),
    #[error("cannot parse norm name {0:?}")]
    UnknownName(String),
    #[error("the {0} norm is only available in the float backend")]
    FloatOnly(String),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

fn unit<S: Scalar>(d: usize, k: usize, s: i64) -> Point<S> {
    let mut e = vec![S::zero(); d];
    e[k] = S::from_int(s);
    e
}

fn sign_vectors<S: Scalar>(d: usize) -> Vec<Point<S>> {
    (0..1u64 << d)
        .map(|m| (0..d).map(|k| S::from_int(if m >> k & 1 == 0 { 1 } else { -1 })).collect())
        .collect()
}

fn pm_units<S: Scalar>(d: usize) -> Vec<Point<S>> {
    (0..d).flat_map(|k| [unit(d, k, 1), unit(d, k, -1)]).collect()
}

/// Unit ball of the 1-norm.
pub fn crosspolytope<S: Scalar>(d: usize) -> Result<Polytope<S>, GalleryError> {
    if d <= 3 {
        Ok(Polytope::new(pm_units(d), d, DEFAULT_TOLERANCE)?)
    } else {
        Ok(Polytope::with_polar_override(pm_units(d), d, sign_vectors(d), DEFAULT_TOLERANCE)?)
    }
}

/// Unit ball of the maximum norm.
pub fn hypercube<S: Scalar>(d: usize) -> Result<Polytope<S>, GalleryError> {
    if d <= 3 {
        Ok(Polytope::new(sign_vectors(d), d, DEFAULT_TOLERANCE)?)
    } else {
        Ok(Polytope::with_polar_override(sign_vectors(d), d, pm_units(d), DEFAULT_TOLERANCE)?)
    }
}

/// Regular n-gon with vertices `(cos 2pi k/n, sin 2pi k/n)`.
pub fn ngon(n: usize) -> Result<Polytope<f64>, GalleryError> {
    ngon_with_tolerance(n, DEFAULT_TOLERANCE)
}

pub fn ngon_with_tolerance(n: usize, tol: f64) -> Result<Polytope<f64>, GalleryError> {
    if n < 4 || n % 2 == 1 {
        return Err(GalleryError::OddN(n));
    }
    let vertices: Vec<Point<f64>> = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            vec![t.cos(), t.sin()]
        })
        .collect();
    Ok(Polytope::new(vertices, 2, tol)?)
}

/// Norm `sum_b |x . b|`; its polar extreme points are the sign sums of B.
pub fn additive_norm<S: Scalar>(b: &[Point<S>]) -> Result<Polytope<S>, GalleryError> {
    let d = b.first().map_or(0, |v| v.len());
    if d == 0 || b.iter().any(|v| v.len() != d) || linalg::rank(b, d, DEFAULT_TOLERANCE) < d {
        return Err(GalleryError::DegenerateB(d));
    }
    let candidates: Vec<Point<S>> = (0..1u64 << b.len())
        .map(|m| {
            let mut y = vec![S::zero(); d];
            for (k, v) in b.iter().enumerate() {
                for i in 0..d {
                    y[i] = if m >> k & 1 == 0 { y[i].clone() + v[i].clone() } else { y[i].clone() - v[i].clone() };
                }
            }
            y
        })
        .collect();
    Ok(Polytope::from_polar_points(candidates, d, DEFAULT_TOLERANCE)?)
}

/// Set function on subsets of `{0..d-1}`, indexed by bitmask.
#[derive(Debug, Clone, PartialEq)]
pub struct SubmodularFn {
    ground: usize,
    values: Vec<Rational>,
}

impl SubmodularFn {
    pub fn new(ground: usize, values: Vec<Rational>) -> Result<Self, GalleryError> {
        if ground == 0 || ground > MAX_SUBMODULAR_GROUND || values.len() != 1 << ground {
            return Err(GalleryError::GroundSize(ground));
        }
        let f = SubmodularFn { ground, values };
        f.validate()?;
        Ok(f)
    }

    fn members(&self, mask: usize) -> Vec<usize> {
        (0..self.ground).filter(|&j| mask >> j & 1 == 1).map(|j| j + 1).collect()
    }

    fn validate(&self) -> Result<(), GalleryError> {
        use num_traits::{Signed, Zero};
        let f = &self.values;
        if !f[0].is_zero() || (0..self.ground).any(|j| !f[1 << j].is_positive()) {
            return Err(GalleryError::BadNormalization);
        }
        for s in 0..(1usize << self.ground) {
            for j in (0..self.ground).filter(|&j| s >> j & 1 == 0) {
                if f[s | 1 << j] < f[s] {
                    return Err(GalleryError::NotMonotone { set: self.members(s), j: j + 1 });
                }
                for i in (0..j).filter(|&i| s >> i & 1 == 0) {
                    if f[s | 1 << i].clone() + f[s | 1 << j].clone() < f[s | 1 << i | 1 << j].clone() + f[s].clone() {
                        return Err(GalleryError::NotSubmodular { set: self.members(s), i: i + 1, j: j + 1 });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn ground(&self) -> usize {
        self.ground
    }

    pub fn value(&self, mask: usize) -> &Rational {
        &self.values[mask]
    }

    /// `f_hat(|x|)`: sort `|x|` decreasingly and weight the marginal gains.
    pub fn lovasz_extension<S: Scalar>(&self, x: &[S]) -> S {
        let mut idx: Vec<usize> = (0..self.ground).collect();
        idx.sort_by(|&a, &b| x[b].abs().partial_cmp(&x[a].abs()).unwrap_or(std::cmp::Ordering::Equal));
        let mut mask = 0usize;
        let mut total = S::zero();
        for j in idx {
            let gain = self.values[mask | 1 << j].clone() - self.values[mask].clone();
            total = total + x[j].abs() * rational_to::<S>(&gain);
            mask |= 1 << j;
        }
        total
    }

    /// Marginal-gain vectors over all orderings; their sign variants are
    /// the candidate polar points.
    fn marginal_vectors<S: Scalar>(&self) -> Vec<Point<S>> {
        let d = self.ground;
        let mut out = Vec::new();
        let mut perm: Vec<usize> = (0..d).collect();
        loop {
            let mut y = vec![S::zero(); d];
            let mut mask = 0usize;
            for &j in &perm {
                y[j] = rational_to::<S>(&(self.values[mask | 1 << j].clone() - self.values[mask].clone()));
                mask |= 1 << j;
            }
            for signs in 0..(1u64 << d) {
                out.push(
                    y.iter()
                        .enumerate()
                        .map(|(k, v)| if signs >> k & 1 == 1 { -v.clone() } else { v.clone() })
                        .collect(),
                );
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
        out
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else { return false };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn rational_to<S: Scalar>(r: &Rational) -> S {
    S::parse_literal(&crate::scalar::format_rational(r)).expect("rational literal")
}

/// Unit ball of `x -> f_hat(|x|)` for a monotone submodular `f` (d <= 3).
pub fn lovasz_norm<S: Scalar>(f: &SubmodularFn) -> Result<Polytope<S>, GalleryError> {
    let mut cands: Vec<Point<S>> = Vec::new();
    for y in f.marginal_vectors::<S>() {
        if !cands.contains(&y) {
            cands.push(y);
        }
    }
    Ok(Polytope::from_polar_points(cands, f.ground(), DEFAULT_TOLERANCE)?)
}

/// The hexagonal norm with `f({1}) = 1`, `f({2}) = 2`, `f({1,2}) = 2`.
pub fn hexagon_lovasz_fn() -> SubmodularFn {
    let q = |n: i64| Rational::from_int(n);
    SubmodularFn::new(2, vec![q(0), q(1), q(2), q(2)]).expect("valid submodular function")
}

/// Any norm the gallery can name, in the backend it requires.
#[derive(Debug, Clone)]
pub enum NamedNorm {
    Exact(Polytope<Rational>),
    Float(Polytope<f64>),
}

fn parse_dim(name: &str, arg: &str) -> Result<usize, GalleryError> {
    arg.trim().parse().map_err(|_| GalleryError::UnknownName(name.into()))
}

/// Parses `l1:d`, `linf:d`, `ngon:n`, `additive:[[..],..]`, and
/// `lovasz:[f(0), f(1), ..]` (bitmask order) or `lovasz:{"1":..,"1,2":..}`.
pub fn parse_gallery_name<S: Scalar>(name: &str) -> Result<Polytope<S>, GalleryError> {
    let (kind, arg) = name.split_once(':').ok_or_else(|| GalleryError::UnknownName(name.into()))?;
    match kind.trim() {
        "l1" => crosspolytope(parse_dim(name, arg)?),
        "linf" => hypercube(parse_dim(name, arg)?),
        "additive" => {
            let v: Value = serde_json::from_str(arg).map_err(|_| GalleryError::UnknownName(name.into()))?;
            let rows = v.as_array().ok_or_else(|| GalleryError::UnknownName(name.into()))?;
            let b: Vec<Point<S>> = rows
                .iter()
                .map(|r| {
                    r.as_array()
                        .ok_or(())
                        .and_then(|c| c.iter().map(|x| scalar_from_json::<S>(x).map_err(|_| ())).collect())
                })
                .collect::<Result<_, _>>()
                .map_err(|_| GalleryError::UnknownName(name.into()))?;
            additive_norm(&b)
        }
        "lovasz" => lovasz_norm(&parse_submodular(name, arg)?),
        "ngon" => Err(GalleryError::FloatOnly(name.into())),
        _ => Err(GalleryError::UnknownName(name.into())),
    }
}

fn parse_submodular(name: &str, arg: &str) -> Result<SubmodularFn, GalleryError> {
    let bad = || GalleryError::UnknownName(name.into());
    let v: Value = serde_json::from_str(arg).map_err(|_| bad())?;
    match v {
        Value::Array(items) => {
            let values: Vec<Rational> = items.iter().map(scalar_from_json::<Rational>).collect::<Result<_, _>>().map_err(|_| bad())?;
            let ground = values.len().trailing_zeros() as usize;
            if values.len() != 1 << ground {
                return Err(bad());
            }
            SubmodularFn::new(ground, values)
        }
        Value::Object(map) => {
            let mut entries = Vec::new();
            let mut ground = 0usize;
            for (k, x) in &map {
                let mut mask = 0usize;
                for part in k.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    let j: usize = part.parse().map_err(|_| bad())?;
                    if j == 0 || j > MAX_SUBMODULAR_GROUND {
                        return Err(bad());
                    }
                    ground = ground.max(j);
                    mask |= 1 << (j - 1);
                }
                entries.push((mask, scalar_from_json::<Rational>(x).map_err(|_| bad())?));
            }
            let mut values = vec![Rational::from_int(0); 1 << ground];
            let mut seen = vec![false; 1 << ground];
            seen[0] = true;
            for (mask, x) in entries {
                values[mask] = x;
                seen[mask] = true;
            }
            if seen.iter().any(|s| !s) {
                return Err(bad());
            }
            SubmodularFn::new(ground, values)
        }
        _ => Err(bad()),
    }
}

/// Resolves a gallery name in whichever backend the norm needs.
pub fn named_norm(name: &str, tolerance: f64) -> Result<NamedNorm, GalleryError> {
    if let Some(arg) = name.strip_prefix("ngon:") {
        return Ok(NamedNorm::Float(ngon_with_tolerance(parse_dim(name, arg)?, tolerance)?));
    }
    Ok(NamedNorm::Exact(parse_gallery_name(name)?))
}
