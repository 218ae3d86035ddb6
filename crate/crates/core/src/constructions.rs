//! Placement-carrying graph moves in the plane, the K4 gadget, inverse-move
//! reduction of (2,2)-tight graphs, and synthesis of minimally rigid
//! placements.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::framework::{Framework, FrameworkError};
use crate::graph::{Graph, GraphError};
use crate::iso::IsoSet;
use crate::pebble::{maxwell_count, MaxwellVerdict};
use crate::polytope::Polytope;
use crate::rigidity::{is_infinitesimally_rigid, is_minimally_rigid};
use crate::scalar::{add, dot, points_equal, scale, sub, Point, Scalar};

/// Halving steps allowed in every radius search.
pub const MAX_HALVINGS: u32 = 64;
/// Default vertex cap for the inverse-move search.
pub const DEFAULT_VERTEX_CAP: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstructionError {
    #[error("graph moves are defined in the plane only (d = {0})")]
    NotPlanar(usize),
    #[error("input framework is not well-positioned (edge {0:?})")]
    NotWellPositioned((usize, usize)),
    #[error("invalid move: {0}")]
    InvalidMove(String),
    #[error("the two double cones do not meet away from the base joints")]
    EmptyConeIntersection,
    #[error("the line through the split edge misses the double cone at the third joint")]
    EmptyIntersection,
    #[error("no colour-preserving radius found after {0} halvings")]
    RadiusSearchFailed(u32),
    #[error("K4 gadget search exhausted")]
    SearchFailed,
    #[error("graph is not (2,2)-tight: {0:?}")]
    NotTight(MaxwellVerdict),
    #[error("inverse-move search exhausted; smallest stuck graph has {} vertices", .stuck.vertex_count())]
    SearchExhausted { stuck: Graph },
    #[error("graph has {n} vertices, above the search cap {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("synthesized placement failed verification: {0}")]
    VerificationFailed(String),
    #[error(transparent)]
    Framework(#[from] FrameworkError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

type Result<T> = std::result::Result<T, ConstructionError>;

/// A graph move. Vertex ids are creation-order ids; new vertices take the
/// next free ids. Colour fields hold class numbers `k` of labels `Fk`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Move {
    H1 {
        v1: usize,
        v2: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c1: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c2: Option<usize>,
    },
    H2 {
        v1: usize,
        v2: usize,
        v3: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c2: Option<usize>,
    },
    VSplit {
        v1: usize,
        v2: usize,
        #[serde(default)]
        moved: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c2: Option<usize>,
    },
    VtoK4 {
        v0: usize,
        /// `(w, k)`: edge `v0 w` moves to gadget vertex `k` (0 keeps it on
        /// `v0`; 1..=3 are the new vertices in creation order).
        #[serde(default)]
        reassign: Vec<(usize, usize)>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveSequence {
    pub moves: Vec<Move>,
    /// `target_iso[id]` is the target-graph vertex built as `id`.
    pub target_iso: Vec<usize>,
}

fn require_planar<S: Scalar>(fw: &Framework<S>) -> Result<()> {
    if fw.dim() != 2 {
        return Err(ConstructionError::NotPlanar(fw.dim()));
    }
    Ok(())
}

fn require_well_positioned<S: Scalar>(fw: &Framework<S>) -> Result<()> {
    let wp = fw.is_well_positioned();
    match wp.witness {
        Some((e, _)) => Err(ConstructionError::NotWellPositioned(fw.graph().edges()[e])),
        None => Ok(()),
    }
}

fn check_class<S: Scalar>(p: &Polytope<S>, c: usize) -> Result<()> {
    if c >= p.facet_classes().len() {
        return Err(ConstructionError::InvalidMove(format!("class index {c} out of range")));
    }
    Ok(())
}

/// The unique colour of edge `(a, b)` in a well-positioned framework.
pub fn edge_colour<S: Scalar>(fw: &Framework<S>, a: usize, b: usize) -> Option<usize> {
    let e = fw.graph().edge_index(a, b)?;
    let s = &fw.colouring().edge_supports[e];
    (s.len() == 1 && s[0].interior).then(|| s[0].class)
}

/// The two polytope vertices spanning the positive facet of class `c`.
fn facet_ends<S: Scalar>(p: &Polytope<S>, c: usize) -> (Point<S>, Point<S>) {
    let m = &p.class(c).member_vertices;
    (p.vertices()[m[0]].clone(), p.vertices()[m[m.len() - 1]].clone())
}

/// `a + lambda b`, interior to `cone(F)` for `lambda > 0`.
fn cone_direction<S: Scalar>(p: &Polytope<S>, c: usize, lambda: &S) -> Point<S> {
    let (a, b) = facet_ends(p, c);
    add(&a, &scale(&b, lambda))
}

fn distinct_from_all<S: Scalar>(fw: &Framework<S>, x: &[S]) -> bool {
    let tol = fw.polytope().tolerance();
    fw.placement().iter().all(|p| !points_equal(p, x, tol.max(0.0) * 1e3))
}

fn ratio_choices<S: Scalar>() -> Vec<S> {
    [(1, 1), (1, 2), (2, 1), (1, 3), (3, 1), (2, 3), (3, 2), (1, 5), (5, 1), (3, 7)]
        .iter()
        .map(|&(a, b)| S::from_ratio(a, b))
        .collect()
}

/// Adds `v0` joined to `v1` (colour `c1`) and `v2` (colour `c2`).
pub fn henneberg1<S: Scalar>(fw: &Framework<S>, v1: usize, v2: usize, c1: usize, c2: usize) -> Result<Framework<S>> {
    require_planar(fw)?;
    let n = fw.vertex_count();
    if v1 == v2 || v1 >= n || v2 >= n {
        return Err(ConstructionError::InvalidMove("H1 needs two distinct existing vertices".into()));
    }
    check_class(fw.polytope(), c1)?;
    check_class(fw.polytope(), c2)?;
    if c1 == c2 {
        return Err(ConstructionError::InvalidMove("H1 needs two distinct colours".into()));
    }
    require_well_positioned(fw)?;
    let p = fw.polytope();
    let tol = p.tolerance();
    let diff = sub(fw.point(v2), fw.point(v1));
    for l1 in ratio_choices::<S>() {
        for l2 in ratio_choices::<S>() {
            let m1 = cone_direction(p, c1, &l1);
            let m2 = cone_direction(p, c2, &l2);
            let det = m2[0].clone() * m1[1].clone() - m1[0].clone() * m2[1].clone();
            if det.is_negligible(tol) {
                continue;
            }
            let s = (m2[0].clone() * diff[1].clone() - m2[1].clone() * diff[0].clone()) / det.clone();
            let t = (m1[0].clone() * diff[1].clone() - m1[1].clone() * diff[0].clone()) / det;
            if s.is_negligible(tol) || t.is_negligible(tol) {
                continue;
            }
            let p0 = add(fw.point(v1), &scale(&m1, &s));
            if !distinct_from_all(fw, &p0) {
                continue;
            }
            let mut g = fw.graph().clone();
            let v0 = g.add_vertex();
            g.add_edge(v0, v1)?;
            g.add_edge(v0, v2)?;
            let mut placement = fw.placement().to_vec();
            placement.push(p0);
            let Ok(out) = Framework::new(g, placement, p.clone()) else { continue };
            if out.is_well_positioned().ok
                && edge_colour(&out, v0, v1) == Some(c1)
                && edge_colour(&out, v0, v2) == Some(c2)
            {
                return Ok(out);
            }
        }
    }
    Err(ConstructionError::EmptyConeIntersection)
}

/// Open set of `s` where `c0 + s c1 > 0`, as optional (lower, upper) bounds.
fn positive_ray<S: Scalar>(c0: &S, c1: &S, tol: f64) -> Option<(Option<S>, Option<S>)> {
    if c1.is_negligible(tol) {
        return (c0.is_positive() && !c0.is_negligible(tol)).then_some((None, None));
    }
    let root = -c0.clone() / c1.clone();
    Some(if c1.is_positive() { (Some(root), None) } else { (None, Some(root)) })
}

fn meet<S: Scalar>(a: (Option<S>, Option<S>), b: (Option<S>, Option<S>), tol: f64) -> Option<(Option<S>, Option<S>)> {
    let lo = match (a.0, b.0) {
        (Some(x), Some(y)) => Some(if x > y { x } else { y }),
        (x, y) => x.or(y),
    };
    let hi = match (a.1, b.1) {
        (Some(x), Some(y)) => Some(if x < y { x } else { y }),
        (x, y) => x.or(y),
    };
    if let (Some(l), Some(h)) = (&lo, &hi) {
        if (h.clone() - l.clone()).is_negligible(tol) || h < l {
            return None;
        }
    }
    Some((lo, hi))
}

fn interval_samples<S: Scalar>(iv: &(Option<S>, Option<S>)) -> Vec<S> {
    let fr: Vec<S> = [(1, 2), (1, 3), (2, 3), (1, 4), (3, 4), (1, 5), (4, 5), (3, 8)]
        .iter()
        .map(|&(a, b)| S::from_ratio(a, b))
        .collect();
    let steps: Vec<S> = [(1, 1), (2, 1), (1, 2), (3, 1), (1, 3), (5, 1)]
        .iter()
        .map(|&(a, b)| S::from_ratio(a, b))
        .collect();
    match iv {
        (Some(l), Some(h)) => fr.iter().map(|t| l.clone() + t.clone() * (h.clone() - l.clone())).collect(),
        (Some(l), None) => steps.iter().map(|t| l.clone() + t.clone()).collect(),
        (None, Some(h)) => steps.iter().map(|t| h.clone() - t.clone()).collect(),
        (None, None) => steps.iter().flat_map(|t| [t.clone(), -t.clone()]).collect(),
    }
}

/// Replaces edge `v1 v2` by a new joint on the line through its ends,
/// joined to `v1`, `v2` (old colour) and `v3` (colour `c2`).
pub fn henneberg2<S: Scalar>(fw: &Framework<S>, v1: usize, v2: usize, v3: usize, c2: usize) -> Result<Framework<S>> {
    require_planar(fw)?;
    let n = fw.vertex_count();
    if v3 >= n || v3 == v1 || v3 == v2 || !fw.graph().has_edge(v1, v2) {
        return Err(ConstructionError::InvalidMove("H2 needs an edge v1v2 and a third vertex v3".into()));
    }
    check_class(fw.polytope(), c2)?;
    require_well_positioned(fw)?;
    let c = edge_colour(fw, v1, v2).expect("well-positioned edge");
    if c == c2 {
        return Err(ConstructionError::InvalidMove("c2 must differ from the colour of v1v2".into()));
    }
    let p = fw.polytope();
    let tol = p.tolerance();
    let (a, b) = facet_ends(p, c2);
    let q0 = sub(fw.point(v1), fw.point(v3));
    let r = sub(fw.point(v2), fw.point(v1));
    // Coordinates in the basis (a, b).
    let det = a[0].clone() * b[1].clone() - a[1].clone() * b[0].clone();
    let coords = |x: &[S]| {
        (
            (x[0].clone() * b[1].clone() - x[1].clone() * b[0].clone()) / det.clone(),
            (a[0].clone() * x[1].clone() - a[1].clone() * x[0].clone()) / det.clone(),
        )
    };
    let (al0, be0) = coords(&q0);
    let (alr, ber) = coords(&r);
    let mut intervals = Vec::new();
    if let (Some(x), Some(y)) = (positive_ray(&al0, &alr, tol), positive_ray(&be0, &ber, tol)) {
        intervals.extend(meet(x, y, tol));
    }
    if let (Some(x), Some(y)) = (positive_ray(&-al0, &-alr, tol), positive_ray(&-be0, &-ber, tol)) {
        intervals.extend(meet(x, y, tol));
    }
    for iv in &intervals {
        for s in interval_samples(iv) {
            if s.is_negligible(tol) || (s.clone() - S::one()).is_negligible(tol) {
                continue;
            }
            let p0 = add(fw.point(v1), &scale(&r, &s));
            if !distinct_from_all(fw, &p0) {
                continue;
            }
            let mut g = fw.graph().clone();
            g.remove_edge(v1, v2);
            let v0 = g.add_vertex();
            for w in [v1, v2, v3] {
                g.add_edge(v0, w)?;
            }
            let mut placement = fw.placement().to_vec();
            placement.push(p0);
            let Ok(out) = Framework::new(g, placement, p.clone()) else { continue };
            if out.is_well_positioned().ok
                && edge_colour(&out, v0, v1) == Some(c)
                && edge_colour(&out, v0, v2) == Some(c)
                && edge_colour(&out, v0, v3) == Some(c2)
            {
                return Ok(out);
            }
        }
    }
    Err(ConstructionError::EmptyIntersection)
}

fn min_incident_length<S: Scalar>(fw: &Framework<S>, v: usize) -> S {
    fw.graph()
        .neighbors(v)
        .iter()
        .map(|&w| fw.polytope().gauge_norm(&sub(fw.point(v), fw.point(w))))
        .fold(None, |m: Option<S>, x| Some(match m { Some(y) if y < x => y, _ => x }))
        .unwrap_or_else(S::one)
}

/// Splits `v1`: the new joint sits at `p_v1 + delta m` with `m` interior to
/// `cone(c2)`, joined to `v1` and `v2`; edges `v1 w` for `w` in `moved`
/// are transferred to the new joint.
pub fn vertex_split<S: Scalar>(fw: &Framework<S>, v1: usize, v2: usize, moved: &[usize], c2: usize) -> Result<Framework<S>> {
    require_planar(fw)?;
    if !fw.graph().has_edge(v1, v2) {
        return Err(ConstructionError::InvalidMove("vertex split needs an edge v1v2".into()));
    }
    for &w in moved {
        if w == v2 || !fw.graph().has_edge(v1, w) {
            return Err(ConstructionError::InvalidMove(format!("edge {v1}-{w} cannot be reassigned")));
        }
    }
    check_class(fw.polytope(), c2)?;
    require_well_positioned(fw)?;
    let c = edge_colour(fw, v1, v2).expect("well-positioned edge");
    if c == c2 {
        return Err(ConstructionError::InvalidMove("c2 must differ from the colour of v1v2".into()));
    }
    let p = fw.polytope();
    let m = cone_direction(p, c2, &S::one());
    let kept: Vec<Option<usize>> = moved.iter().map(|&w| edge_colour(fw, v1, w)).collect();
    let mut delta = min_incident_length(fw, v1) / (S::from_int(4) * p.gauge_norm(&m));
    for _ in 0..MAX_HALVINGS {
        let p0 = add(fw.point(v1), &scale(&m, &delta));
        delta = delta * S::half();
        if !distinct_from_all(fw, &p0) {
            continue;
        }
        let mut g = fw.graph().clone();
        let v0 = g.add_vertex();
        g.add_edge(v0, v1)?;
        g.add_edge(v0, v2)?;
        for &w in moved {
            g.remove_edge(v1, w);
            g.add_edge(v0, w)?;
        }
        let mut placement = fw.placement().to_vec();
        placement.push(p0);
        let Ok(out) = Framework::new(g, placement, p.clone()) else { continue };
        if out.is_well_positioned().ok
            && edge_colour(&out, v0, v1) == Some(c2)
            && edge_colour(&out, v0, v2) == Some(c)
            && moved.iter().zip(&kept).all(|(&w, k)| edge_colour(&out, v0, w) == *k)
        {
            return Ok(out);
        }
    }
    Err(ConstructionError::RadiusSearchFailed(MAX_HALVINGS))
}

/// A well-positioned, minimally rigid K4 with joint 0 at the origin.
pub fn k4_gadget<S: Scalar>(p: &Arc<Polytope<S>>, seed: u64) -> Result<Framework<S>> {
    if p.dim() != 2 {
        return Err(ConstructionError::NotPlanar(p.dim()));
    }
    let tol = p.tolerance();
    for x0 in p.vertices() {
        let signed: Vec<Point<S>> = p
            .facet_classes()
            .iter()
            .filter_map(|c| {
                let v = dot(x0, &c.fhat);
                if (v.clone() - S::one()).is_negligible(tol) {
                    Some(c.fhat.clone())
                } else if (v + S::one()).is_negligible(tol) {
                    Some(crate::scalar::neg(&c.fhat))
                } else {
                    None
                }
            })
            .collect();
        if signed.len() != 2 {
            continue;
        }
        let (g1, g2) = (&signed[0], &signed[1]);
        let other = |g: &Point<S>| {
            p.vertices()
                .iter()
                .find(|y| !points_equal(y, x0, tol) && (dot(y, g) - S::one()).is_negligible(tol))
                .cloned()
        };
        let (Some(a), Some(b)) = (other(g1), other(g2)) else { continue };
        let ratio = (S::one() - dot(&a, g2)) / (S::one() - dot(&b, g1));
        let mut s = S::from_ratio(1, 4);
        for _ in 0..20 {
            let s2 = s.clone() * ratio.clone();
            if s2 < S::one() {
                let x1 = add(x0, &scale(&sub(&a, x0), &s));
                let x2 = add(x0, &scale(&sub(&b, x0), &s2));
                let mut eps = S::from_ratio(1, 4);
                for _ in 0..20 {
                    let placement = vec![
                        vec![S::zero(); 2],
                        x1.clone(),
                        scale(&x2, &(S::one() - eps.clone())),
                        add(&x1, &scale(&x2, &(S::one() + eps.clone()))),
                    ];
                    if let Ok(fw) = Framework::new(Graph::complete(4), placement, p.clone()) {
                        let radius = eps.clone() * s2.clone() / S::from_int(64);
                        if let Ok(fw) = fw.perturb_well_positioned(&radius, seed) {
                            if is_minimally_rigid(&fw).minimally_rigid {
                                return Ok(fw.translated(&crate::scalar::neg(fw.point(0))));
                            }
                        }
                    }
                    eps = eps * S::half();
                }
            }
            s = s * S::half();
        }
    }
    Err(ConstructionError::SearchFailed)
}

/// Replaces `v0` by a scaled copy of the K4 gadget planted at `p_v0`.
/// `reassign` lists `(w, k)`: edge `v0 w` moves to gadget joint `k`.
pub fn vertex_to_k4<S: Scalar>(fw: &Framework<S>, v0: usize, reassign: &[(usize, usize)], seed: u64) -> Result<Framework<S>> {
    require_planar(fw)?;
    if v0 >= fw.vertex_count() {
        return Err(ConstructionError::InvalidMove(format!("vertex {v0} does not exist")));
    }
    for &(w, k) in reassign {
        if k > 3 {
            return Err(ConstructionError::InvalidMove(format!("gadget joint {k} does not exist")));
        }
        if !fw.graph().has_edge(v0, w) {
            return Err(ConstructionError::InvalidMove(format!("{v0}-{w} is not an edge")));
        }
    }
    require_well_positioned(fw)?;
    let p = fw.polytope();
    let gadget = k4_gadget(p, seed)?;
    let size = gadget
        .placement()
        .iter()
        .map(|x| p.gauge_norm(x))
        .fold(S::zero(), |m, x| if x > m { x } else { m });
    let n = fw.vertex_count();
    let ids = [v0, n, n + 1, n + 2];
    let colours: Vec<Option<usize>> = reassign.iter().map(|&(w, _)| edge_colour(fw, v0, w)).collect();
    let mut eps = min_incident_length(fw, v0) / (S::from_int(4) * size);
    for _ in 0..MAX_HALVINGS {
        let mut placement = fw.placement().to_vec();
        for k in 1..4 {
            placement.push(add(fw.point(v0), &scale(gadget.point(k), &eps)));
        }
        eps = eps * S::half();
        let fresh_ok = (1..4).all(|k| distinct_from_all(fw, &placement[n + k - 1]));
        if !fresh_ok {
            continue;
        }
        let mut g = fw.graph().clone();
        for _ in 0..3 {
            g.add_vertex();
        }
        for i in 0..4 {
            for j in (i + 1)..4 {
                g.add_edge(ids[i], ids[j])?;
            }
        }
        for &(w, k) in reassign {
            if k != 0 {
                g.remove_edge(v0, w);
                g.add_edge(ids[k], w)?;
            }
        }
        let Ok(out) = Framework::new(g, placement, p.clone()) else { continue };
        if out.is_well_positioned().ok
            && reassign.iter().zip(&colours).all(|(&(w, k), c)| edge_colour(&out, ids[k], w) == *c)
        {
            return Ok(out);
        }
    }
    Err(ConstructionError::RadiusSearchFailed(MAX_HALVINGS))
}

/// Applies the combinatorial part of a move.
pub fn apply_move_to_graph(g: &Graph, mv: &Move) -> Result<Graph> {
    let mut g = g.clone();
    let n = g.vertex_count();
    let bad = |m: &str| ConstructionError::InvalidMove(m.to_string());
    let check = |v: usize| if v < n { Ok(()) } else { Err(bad("vertex out of range")) };
    match mv {
        Move::H1 { v1, v2, .. } => {
            check(*v1)?;
            check(*v2)?;
            if v1 == v2 {
                return Err(bad("H1 needs distinct vertices"));
            }
            let v0 = g.add_vertex();
            g.add_edge(v0, *v1)?;
            g.add_edge(v0, *v2)?;
        }
        Move::H2 { v1, v2, v3, .. } => {
            check(*v3)?;
            if v3 == v1 || v3 == v2 || !g.remove_edge(*v1, *v2) {
                return Err(bad("H2 needs an edge v1v2 and a third vertex"));
            }
            let v0 = g.add_vertex();
            for w in [*v1, *v2, *v3] {
                g.add_edge(v0, w)?;
            }
        }
        Move::VSplit { v1, v2, moved, .. } => {
            if !g.has_edge(*v1, *v2) {
                return Err(bad("vertex split needs an edge v1v2"));
            }
            let v0 = g.add_vertex();
            g.add_edge(v0, *v1)?;
            g.add_edge(v0, *v2)?;
            for &w in moved {
                if w == *v2 || !g.remove_edge(*v1, w) {
                    return Err(bad("reassigned edge is not incident to v1"));
                }
                g.add_edge(v0, w)?;
            }
        }
        Move::VtoK4 { v0, reassign } => {
            check(*v0)?;
            let ids = [*v0, n, n + 1, n + 2];
            for _ in 0..3 {
                g.add_vertex();
            }
            for i in 0..4 {
                for j in (i + 1)..4 {
                    g.add_edge(ids[i], ids[j])?;
                }
            }
            for &(w, k) in reassign {
                if k > 3 || w >= n || !g.has_edge(*v0, w) {
                    return Err(bad("bad VtoK4 reassignment"));
                }
                if k != 0 {
                    g.remove_edge(*v0, w);
                    g.add_edge(ids[k], w)?;
                }
            }
        }
    }
    Ok(g)
}

/// Replays the moves on K1 and relabels through `target_iso`.
pub fn replay(seq: &MoveSequence) -> Result<Graph> {
    let mut g = Graph::empty(1);
    for mv in &seq.moves {
        g = apply_move_to_graph(&g, mv)?;
    }
    if seq.target_iso.len() != g.vertex_count() {
        return Err(ConstructionError::InvalidMove("target_iso has the wrong length".into()));
    }
    let mut seen = vec![false; g.vertex_count()];
    for &t in &seq.target_iso {
        if t >= seen.len() || std::mem::replace(&mut seen[t], true) {
            return Err(ConstructionError::InvalidMove("target_iso is not a permutation".into()));
        }
    }
    Ok(Graph::new(g.vertex_count(), g.edges().iter().map(|&(a, b)| (seq.target_iso[a], seq.target_iso[b])))?)
}

/// A forward move in terms of the target graph's labels.
#[derive(Debug, Clone)]
enum LabelMove {
    H1 { new: usize, v1: usize, v2: usize },
    H2 { new: usize, v1: usize, v2: usize, v3: usize },
    VSplit { new: usize, v1: usize, v2: usize, moved: Vec<usize> },
    VtoK4 { v0: usize, new: [usize; 3], reassign: Vec<(usize, usize)> },
}

struct Reducer {
    failed: IsoSet,
    stuck: Option<Graph>,
}

fn is_tight(g: &Graph) -> bool {
    maxwell_count(g, 2) == MaxwellVerdict::Tight
}

fn without(g: &Graph, labels: &[usize], v: usize) -> (Graph, Vec<usize>) {
    let mut h = g.clone();
    h.remove_vertex(v);
    let mut l = labels.to_vec();
    l.remove(v);
    (h, l)
}

fn shift(x: usize, removed: &[usize]) -> usize {
    x - removed.iter().filter(|&&r| r < x).count()
}

/// Inverse moves applicable to `g`, in preference order H1, H2, VtoK4,
/// VSplit, each paired with the resulting (tight) graph.
fn inverse_moves(g: &Graph, labels: &[usize]) -> Vec<(LabelMove, Graph, Vec<usize>)> {
    let n = g.vertex_count();
    let adj = g.adjacency();
    let mut out = Vec::new();
    for v in 0..n {
        if adj[v].len() == 2 {
            let (h, l) = without(g, labels, v);
            out.push((LabelMove::H1 { new: labels[v], v1: labels[adj[v][0]], v2: labels[adj[v][1]] }, h, l));
        }
    }
    for v in 0..n {
        if adj[v].len() != 3 {
            continue;
        }
        let nb = &adj[v];
        for (x, y, z) in [(nb[0], nb[1], nb[2]), (nb[0], nb[2], nb[1]), (nb[1], nb[2], nb[0])] {
            if g.has_edge(x, y) {
                continue;
            }
            let (mut h, l) = without(g, labels, v);
            h.add_edge(shift(x, &[v]), shift(y, &[v])).expect("valid edge");
            if is_tight(&h) {
                out.push((LabelMove::H2 { new: labels[v], v1: labels[x], v2: labels[y], v3: labels[z] }, h, l));
            }
        }
    }
    for a in 0..n {
        for &b in adj[a].iter().filter(|&&b| b > a) {
            for &c in adj[b].iter().filter(|&&c| c > b && g.has_edge(a, c)) {
                for &e in adj[c].iter().filter(|&&e| e > c && g.has_edge(a, e) && g.has_edge(b, e)) {
                    let quad = [a, b, c, e];
                    let ext: Vec<Vec<usize>> = quad
                        .iter()
                        .map(|&q| adj[q].iter().copied().filter(|w| !quad.contains(w)).collect())
                        .collect();
                    let mut all: Vec<usize> = ext.iter().flatten().copied().collect();
                    all.sort_unstable();
                    if all.windows(2).any(|w| w[0] == w[1]) {
                        continue;
                    }
                    let mut h = g.clone();
                    for (k, list) in ext.iter().enumerate().skip(1) {
                        for &w in list {
                            h.remove_edge(quad[k], w);
                            h.add_edge(a, w).expect("valid edge");
                        }
                    }
                    let mut l = labels.to_vec();
                    for &q in [e, c, b].iter() {
                        h.remove_vertex(q);
                        l.remove(q);
                    }
                    if !is_tight(&h) {
                        continue;
                    }
                    let reassign = ext
                        .iter()
                        .enumerate()
                        .skip(1)
                        .flat_map(|(k, list)| list.iter().map(move |&w| (labels[w], k)))
                        .collect();
                    out.push((
                        LabelMove::VtoK4 { v0: labels[a], new: [labels[b], labels[c], labels[e]], reassign },
                        h,
                        l,
                    ));
                }
            }
        }
    }
    for &(p, q) in g.edges() {
        for (x, y) in [(p, q), (q, p)] {
            let common: Vec<usize> = adj[x].iter().copied().filter(|w| *w != y && adj[y].binary_search(w).is_ok()).collect();
            if common.len() != 1 {
                continue;
            }
            let z = common[0];
            let moved: Vec<usize> = adj[x].iter().copied().filter(|&w| w != y && w != z).collect();
            let mut h = g.clone();
            for &w in &moved {
                h.remove_edge(x, w);
                h.add_edge(y, w).expect("valid edge");
            }
            let (h, l) = without(&h, labels, x);
            if is_tight(&h) {
                out.push((
                    LabelMove::VSplit {
                        new: labels[x],
                        v1: labels[y],
                        v2: labels[z],
                        moved: moved.iter().map(|&w| labels[w]).collect(),
                    },
                    h,
                    l,
                ));
            }
        }
    }
    out
}

impl Reducer {
    fn run(&mut self, g: &Graph, labels: &[usize]) -> Option<Vec<LabelMove>> {
        if g.vertex_count() == 1 {
            return Some(Vec::new());
        }
        if self.failed.contains(g) {
            return None;
        }
        for (mv, h, l) in inverse_moves(g, labels) {
            if let Some(mut seq) = self.run(&h, &l) {
                seq.push(mv);
                return Some(seq);
            }
        }
        if self.stuck.as_ref().is_none_or(|s| g.vertex_count() < s.vertex_count()) {
            self.stuck = Some(g.clone());
        }
        self.failed.insert(g.clone());
        None
    }
}

/// Finds moves building `g` from K1; the graph must be (2,2)-tight.
pub fn reduce_to_k1(g: &Graph) -> Result<MoveSequence> {
    reduce_to_k1_with_cap(g, DEFAULT_VERTEX_CAP)
}

pub fn reduce_to_k1_with_cap(g: &Graph, cap: usize) -> Result<MoveSequence> {
    let verdict = maxwell_count(g, 2);
    if verdict != MaxwellVerdict::Tight {
        return Err(ConstructionError::NotTight(verdict));
    }
    if g.vertex_count() > cap {
        return Err(ConstructionError::TooLarge { n: g.vertex_count(), cap });
    }
    let labels: Vec<usize> = (0..g.vertex_count()).collect();
    let mut r = Reducer { failed: IsoSet::new(), stuck: None };
    let forward = r
        .run(g, &labels)
        .ok_or_else(|| ConstructionError::SearchExhausted { stuck: r.stuck.clone().unwrap_or_else(|| g.clone()) })?;
    let mut root = labels.clone();
    for mv in &forward {
        let new: Vec<usize> = match mv {
            LabelMove::H1 { new, .. } | LabelMove::H2 { new, .. } | LabelMove::VSplit { new, .. } => vec![*new],
            LabelMove::VtoK4 { new, .. } => new.to_vec(),
        };
        root.retain(|x| !new.contains(x));
    }
    let mut target_iso = vec![root[0]];
    let mut id = vec![usize::MAX; g.vertex_count()];
    id[root[0]] = 0;
    let mut moves = Vec::new();
    for mv in &forward {
        let m = match mv {
            LabelMove::H1 { new, v1, v2 } => {
                let m = Move::H1 { v1: id[*v1], v2: id[*v2], c1: None, c2: None };
                id[*new] = target_iso.len();
                target_iso.push(*new);
                m
            }
            LabelMove::H2 { new, v1, v2, v3 } => {
                let m = Move::H2 { v1: id[*v1], v2: id[*v2], v3: id[*v3], c2: None };
                id[*new] = target_iso.len();
                target_iso.push(*new);
                m
            }
            LabelMove::VSplit { new, v1, v2, moved } => {
                let m = Move::VSplit { v1: id[*v1], v2: id[*v2], moved: moved.iter().map(|w| id[*w]).collect(), c2: None };
                id[*new] = target_iso.len();
                target_iso.push(*new);
                m
            }
            LabelMove::VtoK4 { v0, new, reassign } => {
                let m = Move::VtoK4 { v0: id[*v0], reassign: reassign.iter().map(|&(w, k)| (id[w], k)).collect() };
                for x in new {
                    id[*x] = target_iso.len();
                    target_iso.push(*x);
                }
                m
            }
        };
        moves.push(m);
    }
    Ok(MoveSequence { moves, target_iso })
}

fn class_choices(k: usize, given: Option<usize>) -> Vec<usize> {
    match given {
        Some(c) => vec![c.saturating_sub(1)],
        None => (0..k).collect(),
    }
}

type StepResult<S> = std::result::Result<(Framework<S>, Move), Option<ConstructionError>>;

/// One geometric step; `Err(None)` means every colour choice lost rigidity.
fn replay_step<S: Scalar>(fw: &Framework<S>, mv: &Move, k: usize, salt: u64) -> StepResult<S> {
    let mut last_err = None;
    match mv {
        Move::H1 { v1, v2, c1, c2 } => {
            for a in class_choices(k, *c1) {
                for b in class_choices(k, *c2) {
                    if a == b {
                        continue;
                    }
                    match henneberg1(fw, *v1, *v2, a, b) {
                        Ok(out) if c1.is_some() || is_infinitesimally_rigid(&out) => {
                            return Ok((out, Move::H1 { v1: *v1, v2: *v2, c1: Some(a + 1), c2: Some(b + 1) }));
                        }
                        Ok(_) => {}
                        Err(e) => last_err = Some(e),
                    }
                }
            }
        }
        Move::H2 { v1, v2, v3, c2 } => {
            for b in class_choices(k, *c2) {
                if edge_colour(fw, *v1, *v2) == Some(b) {
                    continue;
                }
                match henneberg2(fw, *v1, *v2, *v3, b) {
                    Ok(out) if c2.is_some() || is_infinitesimally_rigid(&out) => {
                        return Ok((out, Move::H2 { v1: *v1, v2: *v2, v3: *v3, c2: Some(b + 1) }));
                    }
                    Ok(_) => {}
                    Err(e) => last_err = Some(e),
                }
            }
        }
        Move::VSplit { v1, v2, moved, c2 } => {
            for b in class_choices(k, *c2) {
                if edge_colour(fw, *v1, *v2) == Some(b) {
                    continue;
                }
                match vertex_split(fw, *v1, *v2, moved, b) {
                    Ok(out) if c2.is_some() || is_infinitesimally_rigid(&out) => {
                        return Ok((out, Move::VSplit { v1: *v1, v2: *v2, moved: moved.clone(), c2: Some(b + 1) }));
                    }
                    Ok(_) => {}
                    Err(e) => last_err = Some(e),
                }
            }
        }
        Move::VtoK4 { v0, reassign } => match vertex_to_k4(fw, *v0, reassign, salt) {
            Ok(out) => return Ok((out, mv.clone())),
            Err(e) => last_err = Some(e),
        },
    }
    Err(last_err)
}

/// Moves every joint by a small random offset while keeping the colouring,
/// well-positioning and rigidity. Used to escape placements where a move
/// has no admissible position; the offsets shrink until all three hold.
fn jitter<S: Scalar>(fw: &Framework<S>, seed: u64) -> Option<Framework<S>> {
    const GRID: i64 = 1 << 10;
    let n = fw.vertex_count();
    let minlen = (0..n)
        .filter(|&v| !fw.graph().neighbors(v).is_empty())
        .map(|v| min_incident_length(fw, v))
        .fold(None, |m: Option<S>, x| Some(match m { Some(y) if y < x => y, _ => x }))
        .unwrap_or_else(S::one);
    let mut amp = minlen / S::from_int(16);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let classes = |f: &Framework<S>| -> Vec<Vec<usize>> {
        f.colouring().edge_supports.iter().map(|s| s.iter().map(|x| x.class).collect()).collect()
    };
    let before = classes(fw);
    let rigid = is_infinitesimally_rigid(fw);
    for _ in 0..MAX_HALVINGS.min(24) {
        let placement: Vec<Point<S>> = fw
            .placement()
            .iter()
            .map(|p| p.iter().map(|x| x.clone() + amp.clone() * S::from_ratio(rng.gen_range(-GRID..=GRID), GRID)).collect())
            .collect();
        if let Ok(out) = fw.with_placement(placement) {
            if out.is_well_positioned().ok && classes(&out) == before && is_infinitesimally_rigid(&out) == rigid {
                return Some(out);
            }
        }
        amp = amp * S::half();
    }
    None
}

/// Jittered retries per step before giving up.
const STEP_RETRIES: u64 = 16;

/// Runs the moves geometrically from a single joint at the origin. Missing
/// colour choices are filled with the first choice that keeps the
/// framework rigid; the returned sequence records every choice. A step
/// with no admissible position is retried on jittered copies of the
/// current framework.
pub fn replay_framework<S: Scalar>(seq: &MoveSequence, p: &Arc<Polytope<S>>, seed: u64) -> Result<(Framework<S>, MoveSequence)> {
    if p.dim() != 2 {
        return Err(ConstructionError::NotPlanar(p.dim()));
    }
    let k = p.facet_classes().len();
    let mut fw = Framework::new(Graph::empty(1), vec![vec![S::zero(); 2]], p.clone())?;
    let mut done = Vec::new();
    for (step, mv) in seq.moves.iter().enumerate() {
        let salt = seed.wrapping_add(step as u64);
        let mut outcome = replay_step(&fw, mv, k, salt);
        let mut retry = 0;
        while outcome.is_err() && retry < STEP_RETRIES {
            let jseed = salt.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(retry);
            if let Some(j) = jitter(&fw, jseed) {
                outcome = replay_step(&j, mv, k, salt);
            }
            retry += 1;
        }
        match outcome {
            Ok((out, m)) => {
                fw = out;
                done.push(m);
            }
            Err(e) => {
                return Err(e.unwrap_or_else(|| ConstructionError::VerificationFailed(format!("no colour choice keeps step {step} rigid"))))
            }
        }
    }
    Ok((fw, MoveSequence { moves: done, target_iso: seq.target_iso.clone() }))
}

/// Reduction, geometric replay, and relabelling onto `g`'s vertex ids.
pub fn synthesize_rigid_placement<S: Scalar>(g: &Graph, p: &Arc<Polytope<S>>, seed: u64) -> Result<(Framework<S>, MoveSequence)> {
    if p.dim() != 2 {
        return Err(ConstructionError::NotPlanar(p.dim()));
    }
    let seq = reduce_to_k1(g)?;
    let (built, seq) = replay_framework(&seq, p, seed)?;
    let mut placement = vec![Vec::new(); g.vertex_count()];
    for (id, pt) in built.placement().iter().enumerate() {
        placement[seq.target_iso[id]] = pt.clone();
    }
    let fw = Framework::new(g.clone(), placement, p.clone())?;
    if !fw.is_well_positioned().ok {
        return Err(ConstructionError::VerificationFailed("result is not well-positioned".into()));
    }
    if !is_minimally_rigid(&fw).minimally_rigid {
        return Err(ConstructionError::VerificationFailed("result is not minimally rigid".into()));
    }
    Ok((fw, seq))
}
