//! Monochrome subgraphs, colour screens, and the spanning-tree criteria.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::framework::Framework;
use crate::graph::Graph;
use crate::linalg;
use crate::rigidity::{is_minimally_rigid, RigidityMatrix};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CombinatoricsError {
    #[error("colour set leaves {remaining} colours outside; the screen needs fewer than {dim}")]
    BadColourSet { remaining: usize, dim: usize },
    #[error("class index {0} does not exist")]
    UnknownClass(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonochromeSubgraph {
    pub class: usize,
    pub edges: Vec<(usize, usize)>,
    /// Connected and touching every vertex.
    pub spanning_connected: bool,
    pub is_spanning_tree: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonochromeDecomposition {
    pub subgraphs: Vec<MonochromeSubgraph>,
    pub colour_count: usize,
}

impl MonochromeDecomposition {
    pub fn get(&self, class: usize) -> Option<&MonochromeSubgraph> {
        self.subgraphs.iter().find(|s| s.class == class)
    }
}

fn spans(n: usize, edges: &[(usize, usize)]) -> bool {
    let c = Graph::components_of(n, edges.iter().copied());
    c.iter().all(|&x| x == c[0])
}

pub fn monochrome_decomposition<S: Scalar>(fw: &Framework<S>) -> MonochromeDecomposition {
    let n = fw.vertex_count();
    let col = fw.colouring();
    let subgraphs = col
        .colours
        .iter()
        .map(|&class| {
            let edges: Vec<(usize, usize)> = fw
                .graph()
                .edges()
                .iter()
                .enumerate()
                .filter(|(e, _)| col.edge_supports[*e].iter().any(|s| s.class == class))
                .map(|(_, &edge)| edge)
                .collect();
            let spanning_connected = spans(n, &edges);
            MonochromeSubgraph {
                class,
                is_spanning_tree: spanning_connected && edges.len() + 1 == n,
                spanning_connected,
                edges,
            }
        })
        .collect();
    MonochromeDecomposition { subgraphs, colour_count: col.colour_count() }
}

/// A nontrivial infinitesimal flex found by a combinatorial screen,
/// checked against the rigidity matrix before it is returned.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlexWitness<S> {
    /// Vertices carrying the nonzero velocity `x`; all others are fixed.
    pub moving: Vec<usize>,
    #[serde(skip)]
    pub velocity: Vec<S>,
    #[serde(skip)]
    pub vector: Vec<S>,
    /// `R(G,p) u = 0` and `u` is not constant.
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict")]
pub enum ScreenOutcome<S> {
    Pass,
    Flexible(FlexWitness<S>),
}

fn common_kernel_vector<S: Scalar>(fw: &Framework<S>, classes: &BTreeSet<usize>) -> Option<Vec<S>> {
    let rows: Vec<Vec<S>> = classes.iter().map(|&c| fw.polytope().class(c).fhat.clone()).collect();
    linalg::kernel(&rows, fw.dim(), fw.polytope().tolerance()).into_iter().next()
}

fn witness<S: Scalar>(fw: &Framework<S>, moving: Vec<usize>, x: Vec<S>) -> FlexWitness<S> {
    let d = fw.dim();
    let mut vector = vec![S::zero(); d * fw.vertex_count()];
    for &v in &moving {
        vector[v * d..(v + 1) * d].clone_from_slice(&x);
    }
    let verified = verify_flex(fw, &vector);
    FlexWitness { moving, velocity: x, vector, verified }
}

/// Kernel membership and non-constancy of a candidate flex.
pub fn verify_flex<S: Scalar>(fw: &Framework<S>, u: &[S]) -> bool {
    let tol = fw.polytope().tolerance();
    let scale = crate::scalar::max_abs(u).max(1.0);
    let in_kernel = RigidityMatrix::build(fw).apply(u).iter().all(|r| r.is_negligible(tol * scale));
    let all: Vec<usize> = (0..fw.vertex_count()).collect();
    in_kernel && !crate::rigidity::restriction_is_trivial(&[u.to_vec()], &all, fw.dim(), tol)
}

/// A vertex meeting fewer than `d` colours moves freely along the common
/// kernel of its functionals.
pub fn vertex_colour_screen<S: Scalar>(fw: &Framework<S>) -> ScreenOutcome<S> {
    if fw.vertex_count() < 2 {
        return ScreenOutcome::Pass;
    }
    let col = fw.colouring();
    for v in 0..fw.vertex_count() {
        if col.vertex_colours[v].len() < fw.dim() {
            let x = common_kernel_vector(fw, &col.vertex_colours[v]).expect("rank below d leaves a kernel");
            return ScreenOutcome::Flexible(witness(fw, vec![v], x));
        }
    }
    ScreenOutcome::Pass
}

/// With fewer than `d` colours outside `colours`, the union of the
/// monochrome subgraphs in `colours` must connect the graph.
pub fn cut_screen<S: Scalar>(fw: &Framework<S>, colours: &BTreeSet<usize>) -> Result<ScreenOutcome<S>, CombinatoricsError> {
    if let Some(&c) = colours.iter().find(|&&c| c >= fw.polytope().facet_classes().len()) {
        return Err(CombinatoricsError::UnknownClass(c));
    }
    let col = fw.colouring();
    let rest: BTreeSet<usize> = col.colours.difference(colours).copied().collect();
    if rest.len() >= fw.dim() {
        return Err(CombinatoricsError::BadColourSet { remaining: rest.len(), dim: fw.dim() });
    }
    let n = fw.vertex_count();
    let edges: Vec<(usize, usize)> = fw
        .graph()
        .edges()
        .iter()
        .enumerate()
        .filter(|(e, _)| col.edge_supports[*e].iter().any(|s| colours.contains(&s.class)))
        .map(|(_, &e)| e)
        .collect();
    let comp = Graph::components_of(n, edges);
    if n == 0 || comp.iter().all(|&c| c == comp[0]) {
        return Ok(ScreenOutcome::Pass);
    }
    let moving: Vec<usize> = (0..n).filter(|&v| comp[v] != comp[0]).collect();
    let x = common_kernel_vector(fw, &rest).expect("fewer than d functionals leave a kernel");
    Ok(ScreenOutcome::Flexible(witness(fw, moving, x)))
}

/// Every colour subset `C` with `|Phi \ C| = d - 1`.
pub fn cut_screen_all<S: Scalar>(fw: &Framework<S>) -> Vec<(BTreeSet<usize>, ScreenOutcome<S>)> {
    let colours: Vec<usize> = fw.colouring().colours.iter().copied().collect();
    let k = fw.dim() - 1;
    if colours.len() < k {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut pick: Vec<usize> = (0..k).collect();
    loop {
        let removed: BTreeSet<usize> = pick.iter().map(|&i| colours[i]).collect();
        let keep: BTreeSet<usize> = colours.iter().copied().filter(|c| !removed.contains(c)).collect();
        if let Ok(r) = cut_screen(fw, &keep) {
            out.push((keep, r));
        }
        let Some(i) = (0..k).rev().find(|&i| pick[i] < colours.len() - k + i) else { break };
        pick[i] += 1;
        for j in (i + 1)..k {
            pick[j] = pick[j - 1] + 1;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TreeVerdict {
    Rigid,
    Flexible,
    NotApplicable,
}

/// Decides rigidity when exactly `d` colours occur: rigid iff every
/// monochrome subgraph connects all vertices.
pub fn tree_criterion<S: Scalar>(fw: &Framework<S>) -> TreeVerdict {
    let dec = monochrome_decomposition(fw);
    if dec.colour_count != fw.dim() {
        return TreeVerdict::NotApplicable;
    }
    if dec.subgraphs.iter().all(|s| s.spanning_connected) {
        TreeVerdict::Rigid
    } else {
        TreeVerdict::Flexible
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MinimalVerdict {
    MinimallyRigid,
    No,
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MinimalBasis {
    /// Well-positioned with `d` colours: spanning trees iff minimally rigid.
    TreeEquivalence,
    /// Every monochrome subgraph is a spanning tree.
    TreeSufficient,
    /// Deferred to the edge-deletion rank test.
    RankFallback,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MinimalTreeOutcome {
    pub verdict: MinimalVerdict,
    pub basis: MinimalBasis,
}

pub fn minimal_tree_criterion<S: Scalar>(fw: &Framework<S>) -> MinimalTreeOutcome {
    let dec = monochrome_decomposition(fw);
    if dec.colour_count != fw.dim() {
        return MinimalTreeOutcome { verdict: MinimalVerdict::NotApplicable, basis: MinimalBasis::None };
    }
    let all_trees = dec.subgraphs.iter().all(|s| s.is_spanning_tree);
    let verdict = |b: bool| if b { MinimalVerdict::MinimallyRigid } else { MinimalVerdict::No };
    if fw.is_well_positioned().ok {
        return MinimalTreeOutcome { verdict: verdict(all_trees), basis: MinimalBasis::TreeEquivalence };
    }
    if all_trees {
        return MinimalTreeOutcome { verdict: MinimalVerdict::MinimallyRigid, basis: MinimalBasis::TreeSufficient };
    }
    MinimalTreeOutcome {
        verdict: verdict(is_minimally_rigid(fw).minimally_rigid),
        basis: MinimalBasis::RankFallback,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use crate::polytope::Polytope;
    use crate::scalar::{point_from_ints, Rational};
    use std::sync::Arc;

    type Q = Rational;

    fn linf() -> Arc<Polytope<Q>> {
        let v = [[1, 1], [1, -1], [-1, 1], [-1, -1]];
        Arc::new(Polytope::new(v.iter().map(|p| point_from_ints(p)).collect(), 2, 0.0).unwrap())
    }

    #[test]
    fn triangle_vertex_screen_moves_apex_horizontally() {
        let p = vec![point_from_ints(&[-1, 0]), point_from_ints(&[1, 0]), point_from_ints(&[0, 2])];
        let fw = Framework::new(Graph::complete(3), p, linf()).unwrap();
        match vertex_colour_screen(&fw) {
            ScreenOutcome::Flexible(w) => {
                assert_eq!(w.moving, vec![2]);
                assert!(w.velocity[1].is_zero() && !w.velocity[0].is_zero());
            }
            ScreenOutcome::Pass => panic!("expected a witness"),
        }
        assert_eq!(tree_criterion(&fw), TreeVerdict::Flexible);
        let dec = monochrome_decomposition(&fw);
        assert_eq!(dec.get(1).unwrap().edges, vec![(0, 1)]);
        assert_eq!(dec.get(0).unwrap().edges, vec![(0, 2), (1, 2)]);
    }

    #[test]
    fn cut_screen_checks_precondition() {
        let p = vec![point_from_ints(&[-1, 0]), point_from_ints(&[1, 0]), point_from_ints(&[0, 2])];
        let fw = Framework::new(Graph::complete(3), p, linf()).unwrap();
        let empty = BTreeSet::new();
        assert!(matches!(cut_screen(&fw, &empty), Err(CombinatoricsError::BadColourSet { .. })));
        let horizontal: BTreeSet<usize> = [1].into();
        assert!(matches!(cut_screen(&fw, &horizontal), Ok(ScreenOutcome::Flexible(_))));
        let vertical: BTreeSet<usize> = [0].into();
        assert!(matches!(cut_screen(&fw, &vertical), Ok(ScreenOutcome::Pass)));
        assert_eq!(cut_screen_all(&fw).len(), 2);
    }
}
