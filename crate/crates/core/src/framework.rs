//! Frameworks and their induced edge colourings.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Graph, GraphError};
use crate::polytope::{Polytope, PolytopeError, Support};
use crate::scalar::{add, format_point, sub, Point, Scalar};

/// Retry cap for the well-positioning jitter.
pub const MAX_PERTURB_ATTEMPTS: u32 = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrameworkError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("placement has {found} points for {expected} vertices")]
    PlacementCount { found: usize, expected: usize },
    #[error("joint {vertex} has {found} coordinates, expected {expected}")]
    WrongArity { vertex: usize, found: usize, expected: usize },
    #[error("edge ({0}, {1}) has coincident endpoints {2}")]
    CoincidentEndpoints(usize, usize, String),
    #[error("no well-positioned placement found after {0} attempts")]
    PerturbationFailed(u32),
    #[error("perturbation radius must be positive")]
    NonPositiveRadius,
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

/// Per-edge supports of `p_min - p_max`, ordered by class index.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeColouring {
    pub edge_supports: Vec<Vec<Support>>,
    pub vertex_colours: Vec<BTreeSet<usize>>,
    pub colours: BTreeSet<usize>,
}

impl EdgeColouring {
    /// Class indices of edge `e`.
    pub fn classes(&self, e: usize) -> Vec<usize> {
        self.edge_supports[e].iter().map(|s| s.class).collect()
    }

    pub fn colour_count(&self) -> usize {
        self.colours.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WellPositioned {
    pub ok: bool,
    /// First edge (index) without a unique interior colour, with its classes.
    pub witness: Option<(usize, Vec<usize>)>,
}

#[derive(Debug, Clone)]
pub struct Framework<S> {
    graph: Graph,
    placement: Vec<Point<S>>,
    polytope: Arc<Polytope<S>>,
    colouring: EdgeColouring,
}

impl<S: Scalar> Framework<S> {
    pub fn new(graph: Graph, placement: Vec<Point<S>>, polytope: Arc<Polytope<S>>) -> Result<Self, FrameworkError> {
        if placement.len() != graph.vertex_count() {
            return Err(FrameworkError::PlacementCount { found: placement.len(), expected: graph.vertex_count() });
        }
        let d = polytope.dim();
        for (vertex, p) in placement.iter().enumerate() {
            if p.len() != d {
                return Err(FrameworkError::WrongArity { vertex, found: p.len(), expected: d });
            }
        }
        let colouring = colour(&graph, &placement, &polytope)?;
        Ok(Framework { graph, placement, polytope, colouring })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn placement(&self) -> &[Point<S>] {
        &self.placement
    }

    pub fn point(&self, v: usize) -> &Point<S> {
        &self.placement[v]
    }

    pub fn polytope(&self) -> &Arc<Polytope<S>> {
        &self.polytope
    }

    pub fn dim(&self) -> usize {
        self.polytope.dim()
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn colouring(&self) -> &EdgeColouring {
        &self.colouring
    }

    /// The same placement on another graph with the same vertex set.
    pub fn with_graph(&self, graph: Graph) -> Result<Self, FrameworkError> {
        Framework::new(graph, self.placement.clone(), self.polytope.clone())
    }

    pub fn with_placement(&self, placement: Vec<Point<S>>) -> Result<Self, FrameworkError> {
        Framework::new(self.graph.clone(), placement, self.polytope.clone())
    }

    pub fn translated(&self, c: &[S]) -> Self {
        let placement = self.placement.iter().map(|p| add(p, c)).collect();
        self.with_placement(placement).expect("translation preserves validity")
    }

    pub fn is_well_positioned(&self) -> WellPositioned {
        let witness = self
            .colouring
            .edge_supports
            .iter()
            .enumerate()
            .find(|(_, s)| s.len() != 1 || !s[0].interior)
            .map(|(e, s)| (e, s.iter().map(|x| x.class).collect()));
        WellPositioned { ok: witness.is_none(), witness }
    }

    /// Jitters every joint by at most `radius` in the gauge norm until the
    /// framework is well-positioned. Deterministic in `seed`.
    pub fn perturb_well_positioned(&self, radius: &S, seed: u64) -> Result<Self, FrameworkError> {
        if !radius.is_positive() || radius.is_negligible(self.polytope.tolerance()) {
            return Err(FrameworkError::NonPositiveRadius);
        }
        if self.is_well_positioned().ok {
            return Ok(self.clone());
        }
        let d = self.dim();
        let unit_max = (0..d)
            .map(|i| {
                let mut e = vec![S::zero(); d];
                e[i] = S::one();
                self.polytope.gauge_norm(&e)
            })
            .fold(S::zero(), |m, v| if v > m { v } else { m });
        let mut amplitude = radius.clone() / (S::from_int(d as i64) * unit_max);
        const GRID: i64 = 1 << 20;
        for attempt in 0..MAX_PERTURB_ATTEMPTS {
            let mut placement = self.placement.clone();
            for (v, p) in placement.iter_mut().enumerate() {
                for (c, x) in p.iter_mut().enumerate() {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(attempt as u64);
                    rng.set_word_pos(((v * d + c) as u128) * 4);
                    let k: i64 = rng.gen_range(-GRID..=GRID);
                    *x = x.clone() + amplitude.clone() * S::from_ratio(k, GRID);
                }
            }
            if let Ok(fw) = self.with_placement(placement) {
                if fw.is_well_positioned().ok {
                    return Ok(fw);
                }
            }
            amplitude = amplitude * S::half();
        }
        Err(FrameworkError::PerturbationFailed(MAX_PERTURB_ATTEMPTS))
    }
}

fn colour<S: Scalar>(graph: &Graph, placement: &[Point<S>], polytope: &Polytope<S>) -> Result<EdgeColouring, FrameworkError> {
    let mut edge_supports = Vec::with_capacity(graph.edge_count());
    let mut vertex_colours = vec![BTreeSet::new(); graph.vertex_count()];
    let mut colours = BTreeSet::new();
    for &(v, w) in graph.edges() {
        let diff = sub(&placement[v], &placement[w]);
        let sup = polytope.supports(&diff).map_err(|e| match e {
            PolytopeError::ZeroVector => FrameworkError::CoincidentEndpoints(v, w, format_point(&placement[v])),
            other => FrameworkError::Polytope(other),
        })?;
        for s in &sup {
            vertex_colours[v].insert(s.class);
            vertex_colours[w].insert(s.class);
            colours.insert(s.class);
        }
        edge_supports.push(sup);
    }
    Ok(EdgeColouring { edge_supports, vertex_colours, colours })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{point_from_ints, Rational};

    type Q = Rational;

    pub(crate) fn l1() -> Arc<Polytope<Q>> {
        let v = [[1, 0], [-1, 0], [0, 1], [0, -1]];
        Arc::new(Polytope::new(v.iter().map(|p| point_from_ints(p)).collect(), 2, 0.0).unwrap())
    }

    #[test]
    fn axis_aligned_k2_is_not_well_positioned() {
        let g = Graph::complete(2);
        let fw = Framework::new(g, vec![point_from_ints(&[0, 0]), point_from_ints(&[1, 0])], l1()).unwrap();
        let wp = fw.is_well_positioned();
        assert!(!wp.ok);
        assert_eq!(wp.witness, Some((0, vec![0, 1])));
        let moved = fw.perturb_well_positioned(&Q::from_ratio(1, 8), 7).unwrap();
        assert!(moved.is_well_positioned().ok);
        for (p, q) in fw.placement().iter().zip(moved.placement()) {
            assert!(fw.polytope().gauge_norm(&sub(p, q)) <= Q::from_ratio(1, 8));
        }
        let again = fw.perturb_well_positioned(&Q::from_ratio(1, 8), 7).unwrap();
        assert_eq!(again.placement(), moved.placement());
    }

    #[test]
    fn coincident_endpoints_rejected() {
        let g = Graph::complete(2);
        let r = Framework::new(g, vec![point_from_ints(&[1, 1]), point_from_ints(&[1, 1])], l1());
        assert!(matches!(r, Err(FrameworkError::CoincidentEndpoints(0, 1, _))));
    }

    #[test]
    fn fast_path_keeps_placement() {
        let g = Graph::complete(2);
        let p = vec![point_from_ints(&[0, 0]), vec![Q::from_ratio(1, 2), Q::from_ratio(1, 2)]];
        let fw = Framework::new(g, p.clone(), l1()).unwrap();
        assert_eq!(fw.perturb_well_positioned(&Q::from_ratio(1, 100), 0).unwrap().placement(), &p[..]);
    }
}
