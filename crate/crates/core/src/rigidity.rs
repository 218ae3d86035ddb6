//! The facet-labelled rigidity matrix and the rank-based rigidity tests.

use std::collections::VecDeque;

use serde_json::{json, Value};
use thiserror::Error;

use crate::framework::Framework;
use crate::linalg;
use crate::scalar::{approx_eq, max_abs, neg, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RigidityError {
    #[error("the subgraph has no vertices")]
    EmptySubgraph,
    #[error("vertex {0} is not in the framework")]
    UnknownVertex(usize),
    #[error("path endpoints must differ")]
    SameEndpoints,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RowLabel {
    pub edge: (usize, usize),
    pub edge_index: usize,
    pub class: usize,
    /// `true` when `p_v - p_w` lies in `cone(F)` rather than `cone(-F)`.
    pub positive: bool,
}

impl RowLabel {
    pub fn display(&self) -> String {
        format!("({}-{},F{})", self.edge.0, self.edge.1, self.class + 1)
    }
}

#[derive(Debug, Clone)]
pub struct RigidityMatrix<S> {
    pub dim: usize,
    pub vertex_count: usize,
    pub labels: Vec<RowLabel>,
    pub rows: Vec<Vec<S>>,
}

#[derive(Debug, Clone)]
pub struct FlexSpace<S> {
    pub kernel_basis: Vec<Vec<S>>,
    pub trivial_dim: usize,
    pub flex_dim: usize,
}

#[derive(Debug, Clone)]
pub struct RankKernel<S> {
    pub rank: usize,
    pub flex: FlexSpace<S>,
}

impl<S: Scalar> RigidityMatrix<S> {
    /// One row per (edge, colour): `+g` in the tail block, `-g` in the head
    /// block, with `g = ±fhat` signed by the cone containing `p_v - p_w`.
    pub fn build(fw: &Framework<S>) -> Self {
        let d = fw.dim();
        let n = fw.vertex_count();
        let mut labels = Vec::new();
        let mut rows = Vec::new();
        for (e, &(v, w)) in fw.graph().edges().iter().enumerate() {
            for s in &fw.colouring().edge_supports[e] {
                let f = &fw.polytope().class(s.class).fhat;
                let g = if s.positive { f.clone() } else { neg(f) };
                let mut row = vec![S::zero(); d * n];
                for i in 0..d {
                    row[v * d + i] = g[i].clone();
                    row[w * d + i] = -g[i].clone();
                }
                labels.push(RowLabel { edge: (v, w), edge_index: e, class: s.class, positive: s.positive });
                rows.push(row);
            }
        }
        RigidityMatrix { dim: d, vertex_count: n, labels, rows }
    }

    pub fn ncols(&self) -> usize {
        self.dim * self.vertex_count
    }

    /// Drops every row belonging to edge `edge_index`.
    pub fn without_edge(&self, edge_index: usize) -> Self {
        let (labels, rows) = self
            .labels
            .iter()
            .zip(&self.rows)
            .filter(|(l, _)| l.edge_index != edge_index)
            .map(|(l, r)| (*l, r.clone()))
            .unzip();
        RigidityMatrix { dim: self.dim, vertex_count: self.vertex_count, labels, rows }
    }

    pub fn apply(&self, u: &[S]) -> Vec<S> {
        self.rows.iter().map(|r| crate::scalar::dot(r, u)).collect()
    }

    pub fn rank(&self, tol: f64) -> usize {
        S::exact_rank(&self.rows, self.ncols()).unwrap_or_else(|| linalg::rank(&self.rows, self.ncols(), tol))
    }

    pub fn rank_and_kernel(&self, tol: f64) -> RankKernel<S> {
        let red = linalg::rref(&self.rows, self.ncols(), tol);
        let rank = red.rank();
        debug_assert!(S::exact_rank(&self.rows, self.ncols()).map_or(true, |r| r == rank));
        let kernel_basis = red.kernel();
        let nullity = kernel_basis.len();
        RankKernel {
            rank,
            flex: FlexSpace {
                kernel_basis,
                trivial_dim: self.dim,
                flex_dim: nullity.saturating_sub(self.dim),
            },
        }
    }

    pub fn column_names(&self) -> Vec<String> {
        (0..self.vertex_count)
            .flat_map(|v| (0..self.dim).map(move |i| format!("v{v}_{}", i + 1)))
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("row");
        for c in self.column_names() {
            out.push(',');
            out.push_str(&c);
        }
        out.push('\n');
        for (l, r) in self.labels.iter().zip(&self.rows) {
            out.push('"');
            out.push_str(&l.display());
            out.push('"');
            for x in r {
                out.push(',');
                out.push_str(&x.to_string());
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .labels
            .iter()
            .zip(&self.rows)
            .map(|(l, r)| {
                json!({
                    "label": l.display(),
                    "edge": [l.edge.0, l.edge.1],
                    "class": l.class + 1,
                    "sign": if l.positive { 1 } else { -1 },
                    "entries": r.iter().map(Scalar::to_json).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({
            "shape": [self.rows.len(), self.ncols()],
            "columns": self.column_names(),
            "rows": rows,
        })
    }
}

pub fn build_rigidity_matrix<S: Scalar>(fw: &Framework<S>) -> RigidityMatrix<S> {
    RigidityMatrix::build(fw)
}

pub fn rank_and_kernel<S: Scalar>(fw: &Framework<S>) -> RankKernel<S> {
    RigidityMatrix::build(fw).rank_and_kernel(fw.polytope().tolerance())
}

fn rigid_rank<S: Scalar>(fw: &Framework<S>) -> usize {
    let d = fw.dim();
    d * fw.vertex_count() - d
}

pub fn is_infinitesimally_rigid<S: Scalar>(fw: &Framework<S>) -> bool {
    if fw.vertex_count() <= 1 {
        return true;
    }
    RigidityMatrix::build(fw).rank(fw.polytope().tolerance()) == rigid_rank(fw)
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct CriticalEdge {
    pub edge: (usize, usize),
    pub rank_after_removal: usize,
    pub flex_dim_after_removal: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct MinimalRigidityReport {
    pub minimally_rigid: bool,
    pub rigid: bool,
    pub edges: Vec<CriticalEdge>,
}

/// Rigid, and every single-edge deletion (same placement) is flexible.
pub fn is_minimally_rigid<S: Scalar>(fw: &Framework<S>) -> MinimalRigidityReport {
    let tol = fw.polytope().tolerance();
    let m = RigidityMatrix::build(fw);
    let target = rigid_rank(fw);
    let rigid = fw.vertex_count() <= 1 || m.rank(tol) == target;
    let nullity_base = m.ncols();
    let edges: Vec<CriticalEdge> = fw
        .graph()
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &edge)| {
            let r = m.without_edge(e).rank(tol);
            CriticalEdge {
                edge,
                rank_after_removal: r,
                flex_dim_after_removal: (nullity_base - r).saturating_sub(fw.dim()),
            }
        })
        .collect();
    let minimally_rigid = rigid && edges.iter().all(|c| c.rank_after_removal < target);
    MinimalRigidityReport { minimally_rigid, rigid, edges }
}

/// True when every vector in `basis`, restricted to the blocks of
/// `vertices`, is constant across those blocks.
pub fn restriction_is_trivial<S: Scalar>(basis: &[Vec<S>], vertices: &[usize], d: usize, tol: f64) -> bool {
    basis.iter().all(|u| {
        let s = max_abs(u);
        vertices.windows(2).all(|w| {
            (0..d).all(|i| approx_eq(&u[w[0] * d + i], &u[w[1] * d + i], tol, s))
        })
    })
}

pub fn is_relatively_rigid<S: Scalar>(fw: &Framework<S>, vertices: &[usize]) -> Result<bool, RigidityError> {
    if vertices.is_empty() {
        return Err(RigidityError::EmptySubgraph);
    }
    if let Some(&v) = vertices.iter().find(|&&v| v >= fw.vertex_count()) {
        return Err(RigidityError::UnknownVertex(v));
    }
    let rk = rank_and_kernel(fw);
    Ok(restriction_is_trivial(&rk.flex.kernel_basis, vertices, fw.dim(), fw.polytope().tolerance()))
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CertificatePath {
    pub vertices: Vec<usize>,
    /// Shared colour class of the path; `None` for a direct edge whose
    /// own colours already pin the relative motion.
    pub colour: Option<usize>,
    /// Dimension of `X_gamma`.
    pub x_dim: usize,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
#[serde(tag = "outcome")]
pub enum PathCertificate {
    Certificate { paths: Vec<CertificatePath> },
    NoCertificate { paths: Vec<CertificatePath>, intersection_dim: usize },
}

fn edge_space<S: Scalar>(fw: &Framework<S>, e: usize) -> Vec<Vec<S>> {
    let d = fw.dim();
    let rows: Vec<Vec<S>> = fw.colouring().edge_supports[e]
        .iter()
        .map(|s| fw.polytope().class(s.class).fhat.clone())
        .collect();
    linalg::kernel(&rows, d, fw.polytope().tolerance())
}

/// Basis of `X_gamma`, the span of the edge spaces along a path.
fn path_space<S: Scalar>(fw: &Framework<S>, path: &[usize]) -> Vec<Vec<S>> {
    let d = fw.dim();
    let tol = fw.polytope().tolerance();
    let gens: Vec<Vec<S>> = path
        .windows(2)
        .flat_map(|w| edge_space(fw, fw.graph().edge_index(w[0], w[1]).expect("path edge")))
        .collect();
    linalg::rref(&gens, d, tol).rows
}

fn annihilator<S: Scalar>(basis: &[Vec<S>], d: usize, tol: f64) -> Vec<Vec<S>> {
    linalg::kernel(basis, d, tol)
}

fn shortest_monochrome_path<S: Scalar>(fw: &Framework<S>, colour: usize, from: usize, to: usize) -> Option<Vec<usize>> {
    let n = fw.vertex_count();
    let mut adj = vec![Vec::new(); n];
    for (e, &(a, b)) in fw.graph().edges().iter().enumerate() {
        if fw.colouring().edge_supports[e].iter().any(|s| s.class == colour) {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    for l in &mut adj {
        l.sort_unstable();
    }
    let mut parent = vec![usize::MAX; n];
    parent[from] = from;
    let mut queue = VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        if x == to {
            break;
        }
        for &y in &adj[x] {
            if parent[y] == usize::MAX {
                parent[y] = x;
                queue.push_back(y);
            }
        }
    }
    if parent[to] == usize::MAX {
        return None;
    }
    let mut path = vec![to];
    while *path.last().unwrap() != from {
        path.push(parent[*path.last().unwrap()]);
    }
    path.reverse();
    Some(path)
}

/// Searches for paths whose spaces `X_gamma` intersect in `{0}`; success
/// forces `u_v = u_w` for every infinitesimal flex. Failure proves nothing.
pub fn path_certificate<S: Scalar>(fw: &Framework<S>, v: usize, w: usize) -> Result<PathCertificate, RigidityError> {
    let n = fw.vertex_count();
    for x in [v, w] {
        if x >= n {
            return Err(RigidityError::UnknownVertex(x));
        }
    }
    if v == w {
        return Err(RigidityError::SameEndpoints);
    }
    let d = fw.dim();
    let tol = fw.polytope().tolerance();
    if let Some(e) = fw.graph().edge_index(v, w) {
        if edge_space(fw, e).is_empty() {
            return Ok(PathCertificate::Certificate {
                paths: vec![CertificatePath { vertices: vec![v, w], colour: None, x_dim: 0 }],
            });
        }
    }
    let mut paths: Vec<CertificatePath> = Vec::new();
    let mut ann: Vec<Vec<S>> = Vec::new();
    for &c in &fw.colouring().colours {
        let Some(path) = shortest_monochrome_path(fw, c, v, w) else { continue };
        if paths.iter().any(|p| p.vertices == path) {
            continue;
        }
        let x = path_space(fw, &path);
        ann.extend(annihilator(&x, d, tol));
        paths.push(CertificatePath { vertices: path, colour: Some(c), x_dim: x.len() });
    }
    let intersection_dim = if paths.is_empty() { d } else { d - linalg::rank(&ann, d, tol) };
    Ok(if intersection_dim == 0 {
        PathCertificate::Certificate { paths }
    } else {
        PathCertificate::NoCertificate { paths, intersection_dim }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use crate::graph::Graph;
    use crate::polytope::Polytope;
    use crate::scalar::{point_from_ints, Rational};
    use std::sync::Arc;

    type Q = Rational;

    fn linf() -> Arc<Polytope<Q>> {
        let v = [[1, 1], [1, -1], [-1, 1], [-1, -1]];
        Arc::new(Polytope::new(v.iter().map(|p| point_from_ints(p)).collect(), 2, 0.0).unwrap())
    }

    fn k3() -> Framework<Q> {
        let p = vec![point_from_ints(&[-1, 0]), point_from_ints(&[1, 0]), point_from_ints(&[0, 2])];
        Framework::new(Graph::complete(3), p, linf()).unwrap()
    }

    #[test]
    fn triangle_rank_and_flex() {
        let fw = k3();
        let rk = rank_and_kernel(&fw);
        assert_eq!(rk.rank, 3);
        assert_eq!(rk.flex.flex_dim, 1);
        assert!(!is_infinitesimally_rigid(&fw));
        let m = RigidityMatrix::build(&fw);
        for u in &rk.flex.kernel_basis {
            assert!(m.apply(u).iter().all(|x| x.is_zero()));
        }
        assert_eq!(is_relatively_rigid(&fw, &[0, 2]), Ok(false));
        assert_eq!(is_relatively_rigid(&fw, &[1]), Ok(true));
        assert_eq!(is_relatively_rigid(&fw, &[]), Err(RigidityError::EmptySubgraph));
    }

    #[test]
    fn labels_and_csv() {
        let m = RigidityMatrix::build(&k3());
        assert_eq!(m.labels[0].display(), "(0-1,F2)");
        let csv = m.to_csv();
        assert!(csv.starts_with("row,v0_1,v0_2"));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn edgeless_graphs() {
        let one = Framework::new(Graph::empty(1), vec![point_from_ints(&[0, 0])], linf()).unwrap();
        assert!(is_infinitesimally_rigid(&one));
        let two = Framework::new(Graph::empty(2), vec![point_from_ints(&[0, 0]), point_from_ints(&[1, 0])], linf()).unwrap();
        assert!(!is_infinitesimally_rigid(&two));
        let rk = rank_and_kernel(&two);
        assert_eq!((rk.rank, rk.flex.kernel_basis.len()), (0, 4));
        assert!(matches!(path_certificate(&two, 0, 1), Ok(PathCertificate::NoCertificate { .. })));
    }

    #[test]
    fn direct_edge_on_extreme_ray() {
        let fw = Framework::new(Graph::complete(2), vec![point_from_ints(&[0, 0]), point_from_ints(&[1, 1])], linf()).unwrap();
        match path_certificate(&fw, 0, 1).unwrap() {
            PathCertificate::Certificate { paths } => assert_eq!(paths[0].colour, None),
            other => panic!("unexpected {other:?}"),
        }
    }
}
