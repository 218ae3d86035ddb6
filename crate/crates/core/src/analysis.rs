//! The full analysis of one framework, as shared by the command line and
//! the acceptance suite.

use serde::Serialize;
use serde_json::Value;

use crate::combinatorics::{
    cut_screen_all, minimal_tree_criterion, monochrome_decomposition, tree_criterion, vertex_colour_screen, MinimalTreeOutcome,
    ScreenOutcome, TreeVerdict,
};
use crate::framework::Framework;
use crate::rigidity::{is_minimally_rigid, MinimalRigidityReport, RigidityMatrix};
use crate::scalar::{json_point, max_abs, Backend, Scalar};

#[derive(Debug, Clone, Serialize)]
pub struct ClassInfo {
    pub label: String,
    pub fhat: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct EdgeInfo {
    pub edge: (usize, usize),
    pub classes: Vec<String>,
    pub interior: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScreenInfo {
    /// Colour classes removed (empty for the vertex screen).
    pub removed: Vec<String>,
    pub flexible: bool,
    pub moving: Vec<usize>,
    pub velocity: Option<Value>,
    pub verified: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelSanity {
    pub constants_in_kernel: bool,
    pub basis_in_kernel: bool,
    pub witnesses_verified: bool,
    pub rank_bound_holds: bool,
}

impl KernelSanity {
    pub fn ok(&self) -> bool {
        self.constants_in_kernel && self.basis_in_kernel && self.witnesses_verified && self.rank_bound_holds
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub backend: Backend,
    pub tolerance: f64,
    pub dim: usize,
    pub vertices: usize,
    pub edges: usize,
    pub facet_classes: Vec<ClassInfo>,
    pub colouring: Vec<EdgeInfo>,
    pub colour_count: usize,
    pub well_positioned: bool,
    pub well_positioned_witness: Option<EdgeInfo>,
    pub matrix_rows: usize,
    pub rank: usize,
    pub flex_dim: usize,
    pub rigid: bool,
    pub minimal: MinimalRigidityReport,
    pub tree_criterion: TreeVerdict,
    pub minimal_tree_criterion: MinimalTreeOutcome,
    pub monochrome_spanning: Vec<(String, bool)>,
    pub vertex_screen: ScreenInfo,
    pub cut_screens: Vec<ScreenInfo>,
    pub kernel_sanity: KernelSanity,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Value>,
}

fn label(c: usize) -> String {
    format!("F{}", c + 1)
}

fn screen_info<S: Scalar>(removed: Vec<String>, s: &ScreenOutcome<S>) -> ScreenInfo {
    match s {
        ScreenOutcome::Pass => ScreenInfo { removed, flexible: false, moving: Vec::new(), velocity: None, verified: false },
        ScreenOutcome::Flexible(w) => ScreenInfo {
            removed,
            flexible: true,
            moving: w.moving.clone(),
            velocity: Some(json_point(&w.velocity)),
            verified: w.verified,
        },
    }
}

fn edge_info<S: Scalar>(fw: &Framework<S>, e: usize) -> EdgeInfo {
    let s = &fw.colouring().edge_supports[e];
    EdgeInfo {
        edge: fw.graph().edges()[e],
        classes: s.iter().map(|x| label(x.class)).collect(),
        interior: s.len() == 1 && s[0].interior,
    }
}

/// Runs every test on `fw`; `emit_matrix` attaches the labelled matrix.
pub fn analyze<S: Scalar>(fw: &Framework<S>, emit_matrix: bool) -> AnalysisReport {
    let p = fw.polytope();
    let tol = p.tolerance();
    let d = fw.dim();
    let n = fw.vertex_count();
    let m = RigidityMatrix::build(fw);
    let rk = m.rank_and_kernel(tol);
    let wp = fw.is_well_positioned();
    let vscreen = vertex_colour_screen(fw);
    let cuts = cut_screen_all(fw);
    let in_kernel = |u: &[S]| {
        let s = max_abs(u).max(1.0);
        m.apply(u).iter().all(|r| r.is_negligible(tol * s))
    };
    let constants_in_kernel = (0..d).all(|i| {
        let mut u = vec![S::zero(); d * n];
        for v in 0..n {
            u[v * d + i] = S::one();
        }
        in_kernel(&u)
    });
    let witness_ok = |s: &ScreenOutcome<S>| match s {
        ScreenOutcome::Pass => true,
        ScreenOutcome::Flexible(w) => w.verified,
    };
    let kernel_sanity = KernelSanity {
        constants_in_kernel,
        basis_in_kernel: rk.flex.kernel_basis.iter().all(|u| in_kernel(u)),
        witnesses_verified: witness_ok(&vscreen) && cuts.iter().all(|(_, s)| witness_ok(s)),
        rank_bound_holds: rk.rank <= (d * n).saturating_sub(d),
    };
    let dec = monochrome_decomposition(fw);
    AnalysisReport {
        backend: S::BACKEND,
        tolerance: tol,
        dim: d,
        vertices: n,
        edges: fw.graph().edge_count(),
        facet_classes: p.facet_classes().iter().map(|c| ClassInfo { label: c.label(), fhat: json_point(&c.fhat) }).collect(),
        colouring: (0..fw.graph().edge_count()).map(|e| edge_info(fw, e)).collect(),
        colour_count: fw.colouring().colour_count(),
        well_positioned: wp.ok,
        well_positioned_witness: wp.witness.map(|(e, _)| edge_info(fw, e)),
        matrix_rows: m.rows.len(),
        rank: rk.rank,
        flex_dim: rk.flex.flex_dim,
        rigid: n <= 1 || rk.flex.flex_dim == 0,
        minimal: is_minimally_rigid(fw),
        tree_criterion: tree_criterion(fw),
        minimal_tree_criterion: minimal_tree_criterion(fw),
        monochrome_spanning: dec.subgraphs.iter().map(|s| (label(s.class), s.spanning_connected)).collect(),
        vertex_screen: screen_info(Vec::new(), &vscreen),
        cut_screens: cuts
            .iter()
            .map(|(c, s)| screen_info(c.iter().map(|&x| label(x)).collect(), s))
            .collect(),
        kernel_sanity,
        matrix: emit_matrix.then(|| m.to_json()),
    }
}
