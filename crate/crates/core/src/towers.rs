//! Finite truncations of countable frameworks: tower certificates built
//! from relative rigidity, and per-level rigidity probes.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::combinatorics::{vertex_colour_screen, ScreenOutcome};
use crate::framework::{Framework, FrameworkError};
use crate::gallery::ngon;
use crate::graph::{Graph, GraphError};
use crate::polytope::Polytope;
use crate::rigidity::{is_relatively_rigid, rank_and_kernel};
use crate::scalar::{points_equal, scale, Point, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TowerError {
    #[error("depth must be at least {min} (got {got})")]
    DepthTooSmall { min: usize, got: usize },
    #[error("family `{0}` needs a planar max-norm polytope")]
    WrongPolytope(String),
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error(transparent)]
    Framework(#[from] FrameworkError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

type Result<T> = std::result::Result<T, TowerError>;

/// Nested finite frameworks `(G_1, p) ⊆ (G_2, p) ⊆ ...` over one polytope.
/// Level `k` shares vertex ids and positions with every later level.
pub trait FrameworkFamily<S: Scalar> {
    fn name(&self) -> String;
    fn polytope(&self) -> &Arc<Polytope<S>>;
    /// The truncation at depth `k >= 1`.
    fn level(&self, k: usize) -> Result<Framework<S>>;
}

/// Two interleaved chains with rungs in the max-norm plane. Every
/// truncation is flexible, since its newest vertex meets only the
/// horizontal colour, yet each level is relatively rigid in the next.
///
/// With `b_0 = y_0 = 0`, `s_j = b_{j-1} + 1`, `y_j = y_{j-1} - s_j` and
/// `b_j = b_{j-1} + s_j + 1`, the joints are `v_0 = (0,0)`,
/// `v_{2j-1} = (0, y_j)`, `v_{2j} = (-b_j, y_j)`. Level `j` adds the right
/// chain edge `v_{2j-3} v_{2j-1}` (`v_0` for `j = 1`), the left chain edge
/// `v_{2j-2} v_{2j}`, the rung `v_{2j-1} v_{2j}` and, for `j >= 2`, the
/// cross edge `v_{2j-1} v_{2j-2}`.
pub struct Zigzag<S: Scalar> {
    polytope: Arc<Polytope<S>>,
}

impl<S: Scalar> Zigzag<S> {
    pub fn new(polytope: Arc<Polytope<S>>) -> Result<Self> {
        let square = polytope.dim() == 2
            && polytope.vertices().len() == 4
            && polytope.vertices().iter().all(|v| v.iter().all(|c| (c.to_f64().abs() - 1.0).abs() <= 1e-12));
        if !square {
            return Err(TowerError::WrongPolytope("zigzag".into()));
        }
        Ok(Zigzag { polytope })
    }
}

impl<S: Scalar> FrameworkFamily<S> for Zigzag<S> {
    fn name(&self) -> String {
        "zigzag".into()
    }

    fn polytope(&self) -> &Arc<Polytope<S>> {
        &self.polytope
    }

    fn level(&self, k: usize) -> Result<Framework<S>> {
        let mut placement: Vec<Point<S>> = vec![vec![S::zero(), S::zero()]];
        let mut edges = Vec::new();
        let (mut b, mut y) = (0i64, 0i64);
        for j in 1..=k {
            let s = b + 1;
            y -= s;
            b += s + 1;
            placement.push(vec![S::zero(), S::from_int(y)]);
            placement.push(vec![S::from_int(-b), S::from_int(y)]);
            let (odd, even) = (2 * j - 1, 2 * j);
            edges.push((if j == 1 { 0 } else { odd - 2 }, odd));
            edges.push((even - 2, even));
            edges.push((odd, even));
            if j >= 2 {
                edges.push((odd, even - 2));
            }
        }
        let g = Graph::new(placement.len(), edges)?;
        Ok(Framework::new(g, placement, self.polytope.clone())?)
    }
}

/// The same framework at every depth.
pub struct Constant<S: Scalar> {
    framework: Framework<S>,
}

impl<S: Scalar> Constant<S> {
    pub fn new(framework: Framework<S>) -> Self {
        Constant { framework }
    }
}

impl<S: Scalar> FrameworkFamily<S> for Constant<S> {
    fn name(&self) -> String {
        "constant".into()
    }

    fn polytope(&self) -> &Arc<Polytope<S>> {
        self.framework.polytope()
    }

    fn level(&self, _k: usize) -> Result<Framework<S>> {
        Ok(self.framework.clone())
    }
}

/// `k + 1` isolated joints on a line at depth `k`.
pub struct Disjoint<S: Scalar> {
    polytope: Arc<Polytope<S>>,
}

impl<S: Scalar> Disjoint<S> {
    pub fn new(polytope: Arc<Polytope<S>>) -> Self {
        Disjoint { polytope }
    }
}

impl<S: Scalar> FrameworkFamily<S> for Disjoint<S> {
    fn name(&self) -> String {
        "disjoint".into()
    }

    fn polytope(&self) -> &Arc<Polytope<S>> {
        &self.polytope
    }

    fn level(&self, k: usize) -> Result<Framework<S>> {
        let d = self.polytope.dim();
        let placement = (0..=k)
            .map(|i| {
                let mut p = vec![S::zero(); d];
                p[0] = S::from_int(i as i64);
                p
            })
            .collect();
        Ok(Framework::new(Graph::empty(k + 1), placement, self.polytope.clone())?)
    }
}

/// A star in the regular-octagon plane whose `8k` leaves sit on the rays
/// through the octagon's vertices, leaf `j` at radius `1 + (j-1) / 8`.
pub struct OctagonStar {
    polytope: Arc<Polytope<f64>>,
}

impl OctagonStar {
    pub fn new() -> Self {
        OctagonStar { polytope: Arc::new(ngon(8).expect("octagon")) }
    }
}

impl Default for OctagonStar {
    fn default() -> Self {
        Self::new()
    }
}

impl FrameworkFamily<f64> for OctagonStar {
    fn name(&self) -> String {
        "octagon-star".into()
    }

    fn polytope(&self) -> &Arc<Polytope<f64>> {
        &self.polytope
    }

    fn level(&self, k: usize) -> Result<Framework<f64>> {
        let mut placement = vec![vec![0.0, 0.0]];
        for j in 1..=8 * k {
            let r = 1.0 + ((j - 1) / 8) as f64;
            placement.push(scale(&self.polytope.vertices()[(j - 1) % 8], &r));
        }
        let g = Graph::new(8 * k + 1, (1..=8 * k).map(|j| (0, j)))?;
        Ok(Framework::new(g, placement, self.polytope.clone())?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TowerLevel {
    /// Checks `(G_k, p)` inside `(G_{k+1}, p)`.
    pub k: usize,
    pub vertices: usize,
    pub next_vertices: usize,
    pub nested: bool,
    pub relatively_rigid: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TowerReport {
    pub family: String,
    pub depth: usize,
    pub levels: Vec<TowerLevel>,
    pub all_relatively_rigid: bool,
    /// With more than `d` colours the tower test is evidence only.
    pub evidence_only: bool,
    pub note: String,
}

fn nested<S: Scalar>(small: &Framework<S>, big: &Framework<S>) -> bool {
    let tol = small.polytope().tolerance();
    small.vertex_count() <= big.vertex_count()
        && small.graph().edges().iter().all(|&(a, b)| big.graph().has_edge(a, b))
        && small.placement().iter().zip(big.placement()).all(|(p, q)| points_equal(p, q, tol))
}

/// Relative rigidity of each truncation inside the next, for
/// `k = 1..depth-1`.
pub fn tower_certificate<S: Scalar>(fam: &dyn FrameworkFamily<S>, depth: usize) -> Result<TowerReport> {
    if depth < 2 {
        return Err(TowerError::DepthTooSmall { min: 2, got: depth });
    }
    let frameworks: Vec<Framework<S>> = (1..=depth).map(|k| fam.level(k)).collect::<Result<_>>()?;
    let mut levels = Vec::new();
    let mut max_colours = 0;
    for k in 1..depth {
        let (small, big) = (&frameworks[k - 1], &frameworks[k]);
        max_colours = max_colours.max(big.colouring().colour_count());
        let is_nested = nested(small, big);
        let vertices: Vec<usize> = (0..small.vertex_count()).collect();
        let rel = is_nested && is_relatively_rigid(big, &vertices).unwrap_or(false);
        levels.push(TowerLevel {
            k,
            vertices: small.vertex_count(),
            next_vertices: big.vertex_count(),
            nested: is_nested,
            relatively_rigid: rel,
        });
    }
    let evidence_only = max_colours != fam.polytope().dim();
    let all = levels.iter().all(|l| l.relatively_rigid);
    let note = match (all, evidence_only) {
        (true, false) => "every probed level is relatively rigid in the next: evidence for rigidity of the union",
        (true, true) => "every probed level is relatively rigid in the next; colour count differs from d, so this is evidence only",
        (false, _) => "some level is not relatively rigid in the next",
    };
    Ok(TowerReport {
        family: fam.name(),
        depth,
        levels,
        all_relatively_rigid: all,
        evidence_only,
        note: note.into(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeLevel {
    pub k: usize,
    pub vertices: usize,
    pub edges: usize,
    pub well_positioned: bool,
    pub rank: usize,
    pub flex_dim: usize,
    pub rigid: bool,
    /// A vertex meeting fewer than `d` colours, if any.
    pub screen_vertex: Option<usize>,
    pub screen_verified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeReport {
    pub family: String,
    pub depth: usize,
    pub levels: Vec<ProbeLevel>,
    pub any_rigid: bool,
    pub all_rigid: bool,
}

/// Infinitesimal rigidity of each truncation `k = 1..=depth`.
pub fn sequential_rigidity_probe<S: Scalar>(fam: &dyn FrameworkFamily<S>, depth: usize) -> Result<ProbeReport> {
    if depth < 1 {
        return Err(TowerError::DepthTooSmall { min: 1, got: depth });
    }
    let mut levels = Vec::new();
    for k in 1..=depth {
        let fw = fam.level(k)?;
        let rk = rank_and_kernel(&fw);
        let (screen_vertex, screen_verified) = match vertex_colour_screen(&fw) {
            ScreenOutcome::Pass => (None, false),
            ScreenOutcome::Flexible(w) => (w.moving.first().copied(), w.verified),
        };
        levels.push(ProbeLevel {
            k,
            vertices: fw.vertex_count(),
            edges: fw.graph().edge_count(),
            well_positioned: fw.is_well_positioned().ok,
            rank: rk.rank,
            flex_dim: rk.flex.flex_dim,
            rigid: rk.flex.flex_dim == 0,
            screen_vertex,
            screen_verified,
        });
    }
    Ok(ProbeReport {
        family: fam.name(),
        depth,
        any_rigid: levels.iter().any(|l| l.rigid),
        all_rigid: levels.iter().all(|l| l.rigid),
        levels,
    })
}
