//! Convex hulls in the plane and in space.
//!
//! Both routines return the supporting planes `normal . x <= offset` of the
//! hull. Faces in 3D are triangles; coplanar triangles are merged afterwards,
//! so each returned plane is a genuine facet.

use crate::scalar::{dot, max_abs, points_equal, sub, Point, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct Plane<S> {
    pub normal: Point<S>,
    pub offset: S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HullError {
    /// Fewer than `d + 1` affinely independent points.
    Degenerate,
    /// Only dimensions 2 and 3 are handled natively.
    Unsupported(usize),
}

fn cross2<S: Scalar>(o: &[S], a: &[S], b: &[S]) -> S {
    (a[0].clone() - o[0].clone()) * (b[1].clone() - o[1].clone())
        - (a[1].clone() - o[1].clone()) * (b[0].clone() - o[0].clone())
}

fn cross3<S: Scalar>(u: &[S], v: &[S]) -> Point<S> {
    vec![
        u[1].clone() * v[2].clone() - u[2].clone() * v[1].clone(),
        u[2].clone() * v[0].clone() - u[0].clone() * v[2].clone(),
        u[0].clone() * v[1].clone() - u[1].clone() * v[0].clone(),
    ]
}

fn orient3<S: Scalar>(a: &[S], b: &[S], c: &[S], p: &[S]) -> S {
    let n = cross3(&sub(b, a), &sub(c, a));
    dot(&n, &sub(p, a))
}

fn positive<S: Scalar>(x: &S, eps: f64) -> bool {
    x.is_positive() && !x.is_negligible(eps)
}

/// Strict-turn monotone chain. Returns hull vertex indices in
/// counter-clockwise order; collinear boundary points are dropped.
pub fn hull2<S: Scalar>(points: &[Point<S>], tol: f64) -> Vec<usize> {
    let scale = points.iter().map(|p| max_abs(p)).fold(1.0, f64::max);
    let eps = tol * scale * scale;
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&i, &j| {
        points[i]
            .partial_cmp(&points[j])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    idx.dedup_by(|a, b| points_equal(&points[*a], &points[*b], tol));
    if idx.len() < 3 {
        return idx;
    }
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2 {
            let t = cross2(
                &points[lower[lower.len() - 2]],
                &points[lower[lower.len() - 1]],
                &points[i],
            );
            if positive(&t, eps) {
                break;
            }
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2 {
            let t = cross2(
                &points[upper[upper.len() - 2]],
                &points[upper[upper.len() - 1]],
                &points[i],
            );
            if positive(&t, eps) {
                break;
            }
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Incremental hull with strict visibility. Returns outward-oriented
/// triangles as index triples.
pub fn hull3<S: Scalar>(points: &[Point<S>], tol: f64) -> Result<Vec<[usize; 3]>, HullError> {
    let scale = points.iter().map(|p| max_abs(p)).fold(1.0, f64::max);
    let eps = tol * scale.powi(3);
    let n = points.len();
    let i0 = 0;
    let i1 = (1..n)
        .find(|&i| !points_equal(&points[i], &points[i0], tol))
        .ok_or(HullError::Degenerate)?;
    let i2 = (1..n)
        .find(|&i| {
            let c = cross3(&sub(&points[i1], &points[i0]), &sub(&points[i], &points[i0]));
            c.iter().any(|x| !x.is_negligible(tol * scale * scale))
        })
        .ok_or(HullError::Degenerate)?;
    let i3 = (1..n)
        .find(|&i| !orient3(&points[i0], &points[i1], &points[i2], &points[i]).is_negligible(eps))
        .ok_or(HullError::Degenerate)?;

    let mut faces: Vec<[usize; 3]> = if orient3(&points[i0], &points[i1], &points[i2], &points[i3])
        .is_positive()
    {
        vec![[i0, i2, i1], [i0, i1, i3], [i1, i2, i3], [i2, i0, i3]]
    } else {
        vec![[i0, i1, i2], [i0, i3, i1], [i1, i3, i2], [i2, i3, i0]]
    };

    for p in 0..n {
        if p == i0 || p == i1 || p == i2 || p == i3 {
            continue;
        }
        let visible: Vec<bool> = faces
            .iter()
            .map(|f| positive(&orient3(&points[f[0]], &points[f[1]], &points[f[2]], &points[p]), eps))
            .collect();
        if !visible.iter().any(|&v| v) {
            continue;
        }
        let mut horizon = Vec::new();
        for (f, _) in faces.iter().zip(&visible).filter(|(_, &v)| v) {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                let shared_with_hidden = faces.iter().zip(&visible).any(|(g, &gv)| {
                    !gv && (0..3).any(|m| g[m] == b && g[(m + 1) % 3] == a)
                });
                if shared_with_hidden {
                    horizon.push((a, b));
                }
            }
        }
        let mut next: Vec<[usize; 3]> = faces
            .iter()
            .zip(&visible)
            .filter(|(_, &v)| !v)
            .map(|(f, _)| *f)
            .collect();
        next.extend(horizon.into_iter().map(|(a, b)| [a, b, p]));
        faces = next;
    }
    Ok(faces)
}

/// Supporting planes of the hull of `points`, one per facet.
pub fn facet_planes<S: Scalar>(points: &[Point<S>], dim: usize, tol: f64) -> Result<Vec<Plane<S>>, HullError> {
    let mut planes: Vec<Plane<S>> = Vec::new();
    match dim {
        2 => {
            let ring = hull2(points, tol);
            if ring.len() < 3 {
                return Err(HullError::Degenerate);
            }
            for k in 0..ring.len() {
                let a = &points[ring[k]];
                let b = &points[ring[(k + 1) % ring.len()]];
                let normal = vec![b[1].clone() - a[1].clone(), a[0].clone() - b[0].clone()];
                let offset = dot(&normal, a);
                planes.push(Plane { normal, offset });
            }
        }
        3 => {
            for f in hull3(points, tol)? {
                let (a, b, c) = (&points[f[0]], &points[f[1]], &points[f[2]]);
                let normal = cross3(&sub(b, a), &sub(c, a));
                let offset = dot(&normal, a);
                let plane = Plane { normal, offset };
                if !planes.iter().any(|q| same_plane(q, &plane, tol)) {
                    planes.push(plane);
                }
            }
        }
        d => return Err(HullError::Unsupported(d)),
    }
    Ok(planes)
}

/// Two outward planes coincide iff their (normal, offset) vectors are
/// positively proportional.
fn same_plane<S: Scalar>(p: &Plane<S>, q: &Plane<S>, tol: f64) -> bool {
    let mut u = p.normal.clone();
    u.push(p.offset.clone());
    let mut v = q.normal.clone();
    v.push(q.offset.clone());
    let s = max_abs(&u).max(max_abs(&v)).max(1.0);
    let eps = tol * s * s;
    for i in 0..u.len() {
        for j in (i + 1)..u.len() {
            let m = u[i].clone() * v[j].clone() - u[j].clone() * v[i].clone();
            if !m.is_negligible(eps) {
                return false;
            }
        }
    }
    dot(&u, &v).is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{point_from_ints, Rational};

    fn pts(raw: &[&[i64]]) -> Vec<Point<Rational>> {
        raw.iter().map(|p| point_from_ints(p)).collect()
    }

    #[test]
    fn square_with_midpoints() {
        let p = pts(&[&[1, 1], &[-1, 1], &[-1, -1], &[1, -1], &[0, 1], &[1, 0]]);
        let ring = hull2(&p, 0.0);
        assert_eq!(ring.len(), 4);
        assert!(!ring.contains(&4) && !ring.contains(&5));
        assert_eq!(facet_planes(&p, 2, 0.0).unwrap().len(), 4);
    }

    #[test]
    fn cube_has_six_facets() {
        let mut raw = Vec::new();
        for s in 0..8 {
            raw.push(vec![
                if s & 1 == 0 { 1 } else { -1 },
                if s & 2 == 0 { 1 } else { -1 },
                if s & 4 == 0 { 1 } else { -1 },
            ]);
        }
        raw.push(vec![0, 0, 0]);
        raw.push(vec![1, 0, 0]);
        let p: Vec<Point<Rational>> = raw.iter().map(|v| point_from_ints(v)).collect();
        let planes = facet_planes(&p, 3, 0.0).unwrap();
        assert_eq!(planes.len(), 6);
        for pl in &planes {
            for q in &p {
                assert!(dot(&pl.normal, q) <= pl.offset);
            }
        }
    }

    #[test]
    fn octahedron_float() {
        let p: Vec<Point<f64>> = vec![
            vec![1.0, 0.0, 0.0],
            vec![-1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, -1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![0.0, 0.0, -1.0],
        ];
        assert_eq!(facet_planes(&p, 3, 1e-9).unwrap().len(), 8);
    }

    #[test]
    fn flat_input_is_degenerate() {
        let p = pts(&[&[1, 0, 0], &[0, 1, 0], &[-1, 0, 0], &[0, -1, 0]]);
        assert_eq!(facet_planes(&p, 3, 0.0), Err(HullError::Degenerate));
        let q = pts(&[&[1, 1], &[2, 2], &[3, 3]]);
        assert_eq!(facet_planes(&q, 2, 0.0), Err(HullError::Degenerate));
    }
}
