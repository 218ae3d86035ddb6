//! Symmetric polytopes, their facet classes, and the gauge norm.

use std::cmp::Ordering;

use thiserror::Error;

use crate::hull::{facet_planes, HullError};
use crate::linalg;
use crate::scalar::{dot, format_point, max_abs, neg, points_equal, scale, Backend, Point, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolytopeError {
    #[error("polytope must have dimension at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("polytope has no vertices")]
    Empty,
    #[error("point {index} has {found} coordinates, expected {expected}")]
    WrongArity { index: usize, found: usize, expected: usize },
    #[error("vertex {index} {point} has no antipode in the vertex list")]
    NotSymmetric { index: usize, point: String },
    #[error("vertices do not affinely span R^{0}")]
    NotFullDimensional(usize),
    #[error("point {index} {point} is not an extreme point")]
    NonExtremePoint { index: usize, point: String },
    #[error("native facet enumeration supports d <= 3; supply polar_override for d = {0}")]
    DimensionUnsupported(usize),
    #[error("facet computation failed: {0}")]
    DegenerateFacet(String),
    #[error("the zero vector has no support functional")]
    ZeroVector,
    #[error("polar point {index} {point} is not a facet functional: {reason}")]
    BadPolarPoint { index: usize, point: String, reason: String },
}

/// A ±-pair of facets, carried by the polar extreme point of the
/// representative whose first nonzero coordinate is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct FacetClass<S> {
    /// Position in the sorted class list; displayed as `F{index+1}`.
    pub index: usize,
    pub fhat: Point<S>,
    pub member_vertices: Vec<usize>,
}

impl<S: Scalar> FacetClass<S> {
    pub fn label(&self) -> String {
        format!("F{}", self.index + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum ConeMembership {
    InteriorPositive,
    InteriorNegative,
    Boundary,
    Outside,
}

/// A class attaining the gauge of a vector, with the sign of the attaining
/// functional and whether the vector lies in the interior of that cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Support {
    pub class: usize,
    pub positive: bool,
    pub interior: bool,
}

#[derive(Debug, Clone)]
pub struct Polytope<S> {
    dim: usize,
    vertices: Vec<Point<S>>,
    tolerance: f64,
    classes: Vec<FacetClass<S>>,
    polar_override: bool,
}

fn canonical<S: Scalar>(f: Point<S>, tol: f64) -> Point<S> {
    match f.iter().find(|x| !x.is_negligible(tol)) {
        Some(x) if x.is_negative() => neg(&f),
        _ => f,
    }
}

fn lex_cmp<S: Scalar>(a: &[S], b: &[S]) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

fn check_arity<S: Scalar>(points: &[Point<S>], dim: usize) -> Result<(), PolytopeError> {
    if dim < 2 {
        return Err(PolytopeError::DimensionTooSmall(dim));
    }
    if points.is_empty() {
        return Err(PolytopeError::Empty);
    }
    for (index, p) in points.iter().enumerate() {
        if p.len() != dim {
            return Err(PolytopeError::WrongArity { index, found: p.len(), expected: dim });
        }
    }
    Ok(())
}

fn affine_rank<S: Scalar>(points: &[Point<S>], tol: f64) -> usize {
    let base = &points[0];
    let diffs: Vec<Point<S>> = points[1..].iter().map(|p| crate::scalar::sub(p, base)).collect();
    let d = base.len();
    linalg::rank(&diffs, d, tol)
}

fn first_asymmetric<S: Scalar>(points: &[Point<S>], tol: f64) -> Option<usize> {
    (0..points.len()).find(|&i| {
        let m = neg(&points[i]);
        !points.iter().any(|q| points_equal(q, &m, tol))
    })
}

impl<S: Scalar> Polytope<S> {
    /// Validates a vertex list and enumerates its facets (d = 2 or 3).
    pub fn new(vertices: Vec<Point<S>>, dim: usize, tolerance: f64) -> Result<Self, PolytopeError> {
        let tol = effective_tol::<S>(tolerance);
        check_arity(&vertices, dim)?;
        if dim > 3 {
            return Err(PolytopeError::DimensionUnsupported(dim));
        }
        if affine_rank(&vertices, tol) < dim {
            return Err(match first_asymmetric(&vertices, tol) {
                Some(index) => PolytopeError::NotSymmetric { index, point: format_point(&vertices[index]) },
                None => PolytopeError::NotFullDimensional(dim),
            });
        }
        let planes = facet_planes(&vertices, dim, tol).map_err(|e| match e {
            HullError::Degenerate => PolytopeError::NotFullDimensional(dim),
            HullError::Unsupported(d) => PolytopeError::DimensionUnsupported(d),
        })?;
        let scale_v = vertices.iter().map(|v| max_abs(v)).fold(1.0, f64::max);
        for (index, v) in vertices.iter().enumerate() {
            let duplicate = vertices[..index].iter().any(|u| points_equal(u, v, tol));
            let active: Vec<Point<S>> = planes
                .iter()
                .filter(|pl| {
                    let s = max_abs(&pl.normal).max(1.0) * scale_v;
                    (dot(&pl.normal, v) - pl.offset.clone()).is_negligible(tol * s)
                })
                .map(|pl| pl.normal.clone())
                .collect();
            if duplicate || linalg::rank(&active, dim, tol) < dim {
                return Err(PolytopeError::NonExtremePoint { index, point: format_point(v) });
            }
        }
        if let Some(index) = first_asymmetric(&vertices, tol) {
            return Err(PolytopeError::NotSymmetric { index, point: format_point(&vertices[index]) });
        }
        let mut fhats = Vec::new();
        for pl in planes {
            if !pl.offset.is_positive() || pl.offset.is_negligible(tol) {
                return Err(PolytopeError::DegenerateFacet("facet plane through the origin".into()));
            }
            let f = scale(&pl.normal, &(S::one() / pl.offset.clone()));
            fhats.push(f);
        }
        Self::assemble(vertices, dim, tol, fhats, false)
    }

    /// Builds a polytope from its vertices and an explicit list of polar
    /// extreme points (required for d >= 4). Both signs of each functional
    /// may be listed; duplicates up to sign are merged.
    pub fn with_polar_override(
        vertices: Vec<Point<S>>,
        dim: usize,
        polar: Vec<Point<S>>,
        tolerance: f64,
    ) -> Result<Self, PolytopeError> {
        let tol = effective_tol::<S>(tolerance);
        check_arity(&vertices, dim)?;
        check_arity(&polar, dim)?;
        if affine_rank(&vertices, tol) < dim {
            return Err(match first_asymmetric(&vertices, tol) {
                Some(index) => PolytopeError::NotSymmetric { index, point: format_point(&vertices[index]) },
                None => PolytopeError::NotFullDimensional(dim),
            });
        }
        if let Some(index) = first_asymmetric(&vertices, tol) {
            return Err(PolytopeError::NotSymmetric { index, point: format_point(&vertices[index]) });
        }
        for (index, y) in polar.iter().enumerate() {
            let bad = |reason: &str| PolytopeError::BadPolarPoint {
                index,
                point: format_point(y),
                reason: reason.into(),
            };
            let vals: Vec<S> = vertices.iter().map(|x| dot(x, y)).collect();
            let vscale = vals.iter().map(|v| v.to_f64().abs()).fold(1.0, f64::max);
            let on: Vec<Point<S>> = vertices
                .iter()
                .zip(&vals)
                .filter(|(_, v)| ((*v).clone() - S::one()).is_negligible(tol * vscale))
                .map(|(x, _)| x.clone())
                .collect();
            if vals.iter().any(|v| (v.clone() - S::one()).is_positive() && !(v.clone() - S::one()).is_negligible(tol * vscale)) {
                return Err(bad("some vertex has x.y > 1"));
            }
            if linalg::rank(&on, dim, tol) < dim {
                return Err(bad("fewer than d affinely independent vertices attain x.y = 1"));
            }
        }
        let p = Self::assemble(vertices, dim, tol, polar, true)?;
        for (index, v) in p.vertices.iter().enumerate() {
            let active: Vec<Point<S>> = p
                .classes
                .iter()
                .filter(|c| (dot(v, &c.fhat).abs() - S::one()).is_negligible(tol * max_abs(v).max(1.0)))
                .map(|c| c.fhat.clone())
                .collect();
            if linalg::rank(&active, dim, tol) < dim {
                return Err(PolytopeError::NonExtremePoint { index, point: format_point(v) });
            }
        }
        Ok(p)
    }

    /// The unit ball of the gauge whose polar hull is `conv(candidates)`
    /// (d <= 3). Non-extreme candidates are discarded; the facets of the
    /// polar hull supply the vertices of the polytope.
    pub fn from_polar_points(candidates: Vec<Point<S>>, dim: usize, tolerance: f64) -> Result<Self, PolytopeError> {
        let tol = effective_tol::<S>(tolerance);
        check_arity(&candidates, dim)?;
        if dim > 3 {
            return Err(PolytopeError::DimensionUnsupported(dim));
        }
        let mut sym = candidates.clone();
        sym.extend(candidates.iter().map(|c| neg(c)));
        let mut uniq: Vec<Point<S>> = Vec::new();
        for c in sym {
            if !uniq.iter().any(|u| points_equal(u, &c, tol)) {
                uniq.push(c);
            }
        }
        let planes = facet_planes(&uniq, dim, tol).map_err(|e| match e {
            HullError::Degenerate => PolytopeError::NotFullDimensional(dim),
            HullError::Unsupported(d) => PolytopeError::DimensionUnsupported(d),
        })?;
        let mut vertices = Vec::new();
        for pl in &planes {
            if !pl.offset.is_positive() || pl.offset.is_negligible(tol) {
                return Err(PolytopeError::DegenerateFacet("polar facet through the origin".into()));
            }
            vertices.push(scale(&pl.normal, &(S::one() / pl.offset.clone())));
        }
        let extreme: Vec<Point<S>> = uniq
            .into_iter()
            .filter(|y| {
                let active: Vec<Point<S>> = planes
                    .iter()
                    .filter(|pl| (dot(&pl.normal, y) - pl.offset.clone()).is_negligible(tol * max_abs(&pl.normal).max(1.0) * max_abs(y).max(1.0)))
                    .map(|pl| pl.normal.clone())
                    .collect();
                linalg::rank(&active, dim, tol) == dim
            })
            .collect();
        Self::with_polar_override(vertices, dim, extreme, tol)
    }

    fn assemble(
        vertices: Vec<Point<S>>,
        dim: usize,
        tol: f64,
        fhats: Vec<Point<S>>,
        polar_override: bool,
    ) -> Result<Self, PolytopeError> {
        let mut reps: Vec<Point<S>> = Vec::new();
        for f in fhats {
            let f = canonical(f, tol);
            if !reps.iter().any(|r| points_equal(r, &f, tol)) {
                reps.push(f);
            }
        }
        reps.sort_by(|a, b| lex_cmp(a, b));
        let classes = reps
            .into_iter()
            .enumerate()
            .map(|(index, fhat)| {
                let member_vertices = vertices
                    .iter()
                    .enumerate()
                    .filter(|(_, x)| (dot(x, &fhat) - S::one()).is_negligible(tol * max_abs(x).max(1.0)))
                    .map(|(i, _)| i)
                    .collect();
                FacetClass { index, fhat, member_vertices }
            })
            .collect();
        Ok(Polytope { dim, vertices, tolerance: tol, classes, polar_override })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Point<S>] {
        &self.vertices
    }

    /// Zero for the exact backend.
    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Replaces the float tolerance; the exact backend keeps zero.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        if S::BACKEND == Backend::Float {
            self.tolerance = tol;
        }
        self
    }

    pub fn has_polar_override(&self) -> bool {
        self.polar_override
    }

    pub fn facet_classes(&self) -> &[FacetClass<S>] {
        &self.classes
    }

    pub fn class(&self, index: usize) -> &FacetClass<S> {
        &self.classes[index]
    }

    /// `max |x . fhat|` over all classes.
    pub fn gauge_norm(&self, x: &[S]) -> S {
        self.classes
            .iter()
            .map(|c| dot(x, &c.fhat).abs())
            .fold(S::zero(), |m, v| if v > m { v } else { m })
    }

    fn attains(&self, value: &S, norm: &S) -> bool {
        let slack = self.tolerance * norm.to_f64().abs().max(1.0);
        (norm.clone() - value.clone()).is_negligible(slack)
    }

    /// Every class whose (signed) functional attains the gauge of `x`.
    pub fn supports(&self, x: &[S]) -> Result<Vec<Support>, PolytopeError> {
        let norm = self.gauge_norm(x);
        if norm.is_negligible(self.tolerance * max_abs(x).max(1.0)) {
            return Err(PolytopeError::ZeroVector);
        }
        let mut out: Vec<Support> = Vec::new();
        for c in &self.classes {
            let v = dot(x, &c.fhat);
            if self.attains(&v, &norm) {
                out.push(Support { class: c.index, positive: true, interior: true });
            } else if self.attains(&-v, &norm) {
                out.push(Support { class: c.index, positive: false, interior: true });
            }
        }
        if out.len() > 1 {
            for s in &mut out {
                s.interior = false;
            }
        }
        Ok(out)
    }

    pub fn cone_membership(&self, class: &FacetClass<S>, x: &[S]) -> Result<ConeMembership, PolytopeError> {
        let sup = self.supports(x)?;
        Ok(match sup.iter().find(|s| s.class == class.index) {
            None => ConeMembership::Outside,
            Some(s) if !s.interior => ConeMembership::Boundary,
            Some(s) if s.positive => ConeMembership::InteriorPositive,
            Some(_) => ConeMembership::InteriorNegative,
        })
    }

    pub fn support_classes(&self, x: &[S]) -> Result<Vec<&FacetClass<S>>, PolytopeError> {
        Ok(self.supports(x)?.iter().map(|s| &self.classes[s.class]).collect())
    }

    /// Index of the class with polar point `±f`, if any.
    pub fn find_class(&self, f: &[S]) -> Option<usize> {
        let c = canonical(f.to_vec(), self.tolerance);
        self.classes
            .iter()
            .position(|k| points_equal(&k.fhat, &c, self.tolerance))
    }
}

fn effective_tol<S: Scalar>(tol: f64) -> f64 {
    match S::BACKEND {
        crate::scalar::Backend::Exact => 0.0,
        crate::scalar::Backend::Float => tol,
    }
}
