//! `polyrig`: batch analysis of bar-joint frameworks under polyhedral norms.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use polyrig::analysis::{analyze, AnalysisReport};
use polyrig::combinatorics::{minimal_tree_criterion, vertex_colour_screen, cut_screen_all, ScreenOutcome};
use polyrig::constructions::{replay, replay_framework, synthesize_rigid_placement, ConstructionError};
use polyrig::framework::Framework;
use polyrig::graph::Graph;
use polyrig::io::{parse_family, parse_framework, parse_graph_input, parse_json, parse_moves, parse_polytope, AnyFramework, AnyPolytope, InputError};
use polyrig::pebble::{maxwell_count, MaxwellVerdict};
use polyrig::rigidity::{is_minimally_rigid, RigidityMatrix};
use polyrig::scalar::{json_point, Backend, Scalar};
use polyrig::towers::{
    sequential_rigidity_probe, tower_certificate, Constant, Disjoint, FrameworkFamily, OctagonStar, TowerError, Zigzag,
};
use polyrig::Polytope;

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "polyrig", version, about = "Rigidity of bar-joint frameworks in polyhedral normed spaces")]
struct Cli {
    /// Scalar backend; defaults to exact whenever the input is rational.
    #[arg(long, global = true, value_enum)]
    backend: Option<BackendArg>,
    /// Float tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for placement jitter.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Attach the labelled rigidity matrix to the report.
    #[arg(long, global = true)]
    emit_matrix: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BackendArg {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Colouring, rigidity matrix, rank, rigidity verdicts and screens.
    Analyze { framework: PathBuf },
    /// Only the combinatorial flex screens.
    Screen { framework: PathBuf },
    /// Maxwell count and, for tight graphs, a minimally rigid placement.
    Construct {
        graph: PathBuf,
        /// Gallery name (`l1:2`, `linf:2`, `ngon:8`, ...) or polytope file.
        #[arg(long, default_value = "linf:2")]
        polytope: String,
        /// Where to write the synthesized framework.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tower certificate and per-level rigidity for a framework family.
    Tower {
        /// Family file `{"family": ..., "depth": ...}`; overrides `--family`.
        spec: Option<PathBuf>,
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Replays a move sequence on K1, optionally with placements.
    Replay {
        moves: PathBuf,
        #[arg(long)]
        polytope: Option<String>,
    },
}

enum Failure {
    Validation(String, Option<Value>),
    Computation(String, Option<Value>),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Validation(e.to_string(), None)
    }
}

impl From<TowerError> for Failure {
    fn from(e: TowerError) -> Self {
        match e {
            TowerError::DepthTooSmall { .. } | TowerError::WrongPolytope(_) | TowerError::UnknownFamily(_) => {
                Failure::Validation(e.to_string(), None)
            }
            other => Failure::Computation(other.to_string(), None),
        }
    }
}

impl From<ConstructionError> for Failure {
    fn from(e: ConstructionError) -> Self {
        match e {
            ConstructionError::NotTight(_)
            | ConstructionError::InvalidMove(_)
            | ConstructionError::NotPlanar(_)
            | ConstructionError::TooLarge { .. } => Failure::Validation(e.to_string(), None),
            other => Failure::Computation(other.to_string(), None),
        }
    }
}

struct Output {
    result: Value,
    csv: Option<String>,
}

struct Ctx {
    backend: Option<Backend>,
    tol: Option<f64>,
    seed: u64,
    emit_matrix: bool,
    inputs: Vec<Value>,
}

impl Ctx {
    fn read(&mut self, path: &Path) -> Result<Value, Failure> {
        let bytes = std::fs::read(path).map_err(|e| Failure::Validation(format!("cannot read {}: {e}", path.display()), None))?;
        self.inputs.push(json!({"path": path.display().to_string(), "sha256": hex::encode(Sha256::digest(&bytes))}));
        let text = String::from_utf8(bytes).map_err(|_| Failure::Validation(format!("{} is not UTF-8", path.display()), None))?;
        Ok(parse_json(&text)?)
    }

    /// A gallery name, or a path to a polytope file.
    fn polytope_arg(&mut self, arg: &str) -> Result<(Value, AnyPolytope), Failure> {
        let v = if Path::new(arg).is_file() { self.read(Path::new(arg))? } else { Value::String(arg.to_string()) };
        let p = parse_polytope(&v, "polytope", self.backend, self.tol)?;
        Ok((v, p))
    }
}

fn matrix_csv<S: Scalar>(fw: &Framework<S>) -> String {
    RigidityMatrix::build(fw).to_csv()
}

fn analyze_cmd(ctx: &mut Ctx, path: &Path) -> Result<Output, Failure> {
    let v = ctx.read(path)?;
    let (report, csv): (AnalysisReport, String) = match parse_framework(&v, ctx.backend, ctx.tol)? {
        AnyFramework::Exact(fw) => (analyze(&fw, ctx.emit_matrix), matrix_csv(&fw)),
        AnyFramework::Float(fw) => (analyze(&fw, ctx.emit_matrix), matrix_csv(&fw)),
    };
    let result = serde_json::to_value(&report).expect("report serializes");
    Ok(Output { result, csv: Some(csv) })
}

fn screen_json<S: Scalar>(fw: &Framework<S>) -> (Value, String) {
    let one = |removed: Vec<String>, s: &ScreenOutcome<S>| match s {
        ScreenOutcome::Pass => json!({"removed": removed, "flexible": false}),
        ScreenOutcome::Flexible(w) => json!({
            "removed": removed, "flexible": true, "moving": w.moving,
            "velocity": json_point(&w.velocity), "verified": w.verified,
        }),
    };
    let vs = vertex_colour_screen(fw);
    let cuts = cut_screen_all(fw);
    let mut csv = String::from("screen,removed,flexible,moving,verified\n");
    let mut row = |name: &str, removed: &[String], s: &ScreenOutcome<S>| {
        let (flex, moving, ver) = match s {
            ScreenOutcome::Pass => (false, String::new(), false),
            ScreenOutcome::Flexible(w) => {
                (true, w.moving.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "), w.verified)
            }
        };
        let _ = writeln!(csv, "{name},{},{flex},{moving},{ver}", removed.join(" "));
    };
    row("vertex", &[], &vs);
    let mut cut_json = Vec::new();
    for (c, s) in &cuts {
        let removed: Vec<String> = c.iter().map(|x| format!("F{}", x + 1)).collect();
        row("cut", &removed, s);
        cut_json.push(one(removed, s));
    }
    (json!({"vertex_screen": one(Vec::new(), &vs), "cut_screens": cut_json}), csv)
}

fn screen_cmd(ctx: &mut Ctx, path: &Path) -> Result<Output, Failure> {
    let v = ctx.read(path)?;
    let (result, csv) = match parse_framework(&v, ctx.backend, ctx.tol)? {
        AnyFramework::Exact(fw) => screen_json(&fw),
        AnyFramework::Float(fw) => screen_json(&fw),
    };
    Ok(Output { result, csv: Some(csv) })
}

fn framework_json<S: Scalar>(fw: &Framework<S>, polytope: &Value) -> Value {
    json!({
        "graph": {"n": fw.vertex_count(), "edges": fw.graph().edges()},
        "placement": fw.placement().iter().map(|p| json_point(p)).collect::<Vec<_>>(),
        "polytope": polytope,
    })
}

fn construct_in<S: Scalar>(ctx: &Ctx, g: &Graph, p: &Arc<Polytope<S>>, pv: &Value) -> Result<(Value, Value, String), Failure> {
    let (fw, seq) = synthesize_rigid_placement(g, p, ctx.seed)?;
    let minimal = is_minimally_rigid(&fw);
    let tree = minimal_tree_criterion(&fw);
    let framework = framework_json(&fw, pv);
    let mut csv = String::from("vertex");
    for i in 0..fw.dim() {
        let _ = write!(csv, ",x{}", i + 1);
    }
    csv.push('\n');
    for (v, pt) in fw.placement().iter().enumerate() {
        let coords: Vec<String> = pt.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(csv, "{v},{}", coords.join(","));
    }
    let evidence = json!({
        "well_positioned": fw.is_well_positioned().ok,
        "minimally_rigid": minimal.minimally_rigid,
        "critical_edges": minimal.edges,
        "minimal_tree_criterion": tree,
        "moves": seq,
    });
    Ok((framework, evidence, csv))
}

fn construct_cmd(ctx: &mut Ctx, graph: &Path, polytope: &str, out: Option<&Path>) -> Result<Output, Failure> {
    let gv = ctx.read(graph)?;
    let g = parse_graph_input(&gv)?;
    let (pv, p) = ctx.polytope_arg(polytope)?;
    let verdict = maxwell_count(&g, 2);
    let verdict_json = serde_json::to_value(&verdict).expect("verdict serializes");
    if verdict != MaxwellVerdict::Tight {
        let result = json!({"maxwell": verdict_json});
        return Err(Failure::Validation("graph is not (2,2)-tight".into(), Some(result)));
    }
    let (framework, evidence, csv) = match &p {
        AnyPolytope::Exact(p) => construct_in(ctx, &g, p, &pv)?,
        AnyPolytope::Float(p) => construct_in(ctx, &g, p, &pv)?,
    };
    if let Some(out) = out {
        let text = serde_json::to_string_pretty(&framework).expect("framework serializes");
        std::fs::write(out, text + "\n").map_err(|e| Failure::Computation(format!("cannot write {}: {e}", out.display()), None))?;
    }
    let result = json!({"maxwell": verdict_json, "framework": framework, "evidence": evidence});
    Ok(Output { result, csv: Some(csv) })
}

fn tower_report<S: Scalar>(fam: &dyn FrameworkFamily<S>, depth: usize) -> Result<(Value, String), Failure> {
    let tower = tower_certificate(fam, depth)?;
    let probe = sequential_rigidity_probe(fam, depth)?;
    let summary = match (tower.all_relatively_rigid, probe.any_rigid) {
        (true, false) => "rigid union evidence, no rigid truncation",
        (true, true) if probe.all_rigid => "all-rigid",
        (true, true) => "rigid union evidence, some rigid truncations",
        (false, _) => "no tower evidence",
    };
    let mut csv = String::from("k,vertices,edges,rigid,rank,flex_dim,relatively_rigid_in_next\n");
    for l in &probe.levels {
        let rel = tower.levels.iter().find(|t| t.k == l.k).map(|t| t.relatively_rigid.to_string()).unwrap_or_default();
        let _ = writeln!(csv, "{},{},{},{},{},{},{}", l.k, l.vertices, l.edges, l.rigid, l.rank, l.flex_dim, rel);
    }
    Ok((json!({"summary": summary, "tower": tower, "probe": probe}), csv))
}

fn family_cmd<S: Scalar>(name: &str, p: Option<Arc<Polytope<S>>>, fw: Option<Framework<S>>, depth: usize) -> Result<(Value, String), Failure> {
    match name {
        "zigzag" => tower_report(&Zigzag::new(p.expect("polytope"))?, depth),
        "disjoint" => tower_report(&Disjoint::new(p.expect("polytope")), depth),
        "constant" => match fw {
            Some(fw) => tower_report(&Constant::new(fw), depth),
            None => Err(Failure::Validation("family `constant` needs a `framework` field".into(), None)),
        },
        other => Err(TowerError::UnknownFamily(other.into()).into()),
    }
}

fn tower_cmd(ctx: &mut Ctx, spec: Option<&Path>, family: Option<&str>, depth: Option<usize>) -> Result<Output, Failure> {
    let spec = match spec {
        Some(path) => {
            let v = ctx.read(path)?;
            parse_family(&v)?
        }
        None => polyrig::io::FamilySpec {
            family: family.ok_or_else(|| Failure::Validation("give a family file or --family".into(), None))?.to_string(),
            depth: None,
            polytope: None,
            framework: None,
        },
    };
    let depth = depth.or(spec.depth).ok_or_else(|| Failure::Validation("missing depth".into(), None))?;
    if depth < 2 {
        return Err(TowerError::DepthTooSmall { min: 2, got: depth }.into());
    }
    let (result, csv) = if spec.family == "octagon-star" {
        tower_report(&OctagonStar::new(), depth)?
    } else if let Some(fv) = &spec.framework {
        match parse_framework(fv, ctx.backend, ctx.tol)? {
            AnyFramework::Exact(fw) => family_cmd(&spec.family, Some(fw.polytope().clone()), Some(fw), depth)?,
            AnyFramework::Float(fw) => family_cmd(&spec.family, Some(fw.polytope().clone()), Some(fw), depth)?,
        }
    } else {
        let pv = spec.polytope.clone().unwrap_or_else(|| Value::String("linf:2".into()));
        match parse_polytope(&pv, "polytope", ctx.backend, ctx.tol)? {
            AnyPolytope::Exact(p) => family_cmd(&spec.family, Some(p), None, depth)?,
            AnyPolytope::Float(p) => family_cmd(&spec.family, Some(p), None, depth)?,
        }
    };
    Ok(Output { result, csv: Some(csv) })
}

fn replay_geometric<S: Scalar>(ctx: &Ctx, seq: &polyrig::constructions::MoveSequence, p: &Arc<Polytope<S>>, pv: &Value) -> Result<Value, Failure> {
    let (fw, done) = replay_framework(seq, p, ctx.seed)?;
    let report = analyze(&fw, ctx.emit_matrix);
    Ok(json!({
        "framework": framework_json(&fw, pv),
        "moves": done,
        "rank": report.rank,
        "rigid": report.rigid,
        "minimally_rigid": report.minimal.minimally_rigid,
        "well_positioned": report.well_positioned,
    }))
}

fn replay_cmd(ctx: &mut Ctx, moves: &Path, polytope: Option<&str>) -> Result<Output, Failure> {
    let v = ctx.read(moves)?;
    let seq = parse_moves(&v)?;
    let g = replay(&seq)?;
    let mut csv = String::from("v,w\n");
    for (a, b) in g.edges() {
        let _ = writeln!(csv, "{a},{b}");
    }
    let mut result = json!({
        "graph": {"n": g.vertex_count(), "edges": g.edges()},
        "maxwell": maxwell_count(&g, 2),
    });
    if let Some(p) = polytope {
        let (pv, p) = ctx.polytope_arg(p)?;
        result["placement"] = match &p {
            AnyPolytope::Exact(p) => replay_geometric(ctx, &seq, p, &pv)?,
            AnyPolytope::Float(p) => replay_geometric(ctx, &seq, p, &pv)?,
        };
    }
    Ok(Output { result, csv: Some(csv) })
}

fn command_echo(c: &Cli) -> Value {
    let name = match &c.command {
        Command::Analyze { .. } => "analyze",
        Command::Screen { .. } => "screen",
        Command::Construct { .. } => "construct",
        Command::Tower { .. } => "tower",
        Command::Replay { .. } => "replay",
    };
    json!({
        "name": name,
        "backend": c.backend.map(|b| match b { BackendArg::Exact => "exact", BackendArg::Float => "float" }),
        "tol": c.tol,
        "seed": c.seed,
        "emit_matrix": c.emit_matrix,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut ctx = Ctx {
        backend: cli.backend.map(|b| match b {
            BackendArg::Exact => Backend::Exact,
            BackendArg::Float => Backend::Float,
        }),
        tol: cli.tol,
        seed: cli.seed,
        emit_matrix: cli.emit_matrix,
        inputs: Vec::new(),
    };
    if let Some(t) = cli.tol {
        if !(t > 0.0 && t.is_finite()) {
            eprintln!("error: --tol must be positive");
            return ExitCode::from(2);
        }
    }
    let outcome = match &cli.command {
        Command::Analyze { framework } => analyze_cmd(&mut ctx, framework),
        Command::Screen { framework } => screen_cmd(&mut ctx, framework),
        Command::Construct { graph, polytope, out } => construct_cmd(&mut ctx, graph, polytope, out.as_deref()),
        Command::Tower { spec, family, depth } => tower_cmd(&mut ctx, spec.as_deref(), family.as_deref(), *depth),
        Command::Replay { moves, polytope } => replay_cmd(&mut ctx, moves, polytope.as_deref()),
    };
    let mut report = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command_echo(&cli),
        "inputs": ctx.inputs,
    });
    match outcome {
        Ok(out) => {
            match (cli.format, out.csv) {
                (Format::Csv, Some(csv)) => emit(&csv),
                _ => {
                    report["status"] = json!("ok");
                    report["result"] = out.result;
                    emit(&pretty(&report));
                }
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Validation(msg, detail)) => fail(report, "validation", &msg, detail, 2),
        Err(Failure::Computation(msg, detail)) => fail(report, "computation", &msg, detail, 3),
    }
}

fn fail(mut report: Value, kind: &str, msg: &str, detail: Option<Value>, code: u8) -> ExitCode {
    eprintln!("error: {msg}");
    report["status"] = json!("error");
    report["error"] = json!({"kind": kind, "message": msg});
    if let Some(d) = detail {
        report["result"] = d;
    }
    emit(&pretty(&report));
    ExitCode::from(code)
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("report serializes") + "\n"
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}
