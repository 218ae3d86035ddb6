//! JSON input schemas with field-level error context and backend selection.

use std::sync::Arc;

use serde_json::Value;
use thiserror::Error;

use crate::constructions::{Move, MoveSequence};
use crate::framework::Framework;
use crate::gallery::{named_norm, NamedNorm};
use crate::graph::Graph;
use crate::polytope::Polytope;
use crate::scalar::{json_is_rational, scalar_from_json, Backend, Point, Rational, Scalar, DEFAULT_TOLERANCE};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InputError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid field `{field}`: {message}")]
    Field { field: String, message: String },
}

impl InputError {
    fn field(field: impl Into<String>, message: impl ToString) -> Self {
        InputError::Field { field: field.into(), message: message.to_string() }
    }
}

type Result<T> = std::result::Result<T, InputError>;

pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| InputError::Parse { line: e.line(), column: e.column(), message: e.to_string() })
}

fn get<'a>(v: &'a Value, ctx: &str, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| InputError::field(join(ctx, key), "missing"))
}

fn join(ctx: &str, key: &str) -> String {
    if ctx.is_empty() {
        key.to_string()
    } else {
        format!("{ctx}.{key}")
    }
}

fn as_usize(v: &Value, field: &str) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| InputError::field(field, "expected a non-negative integer"))
}

fn as_array<'a>(v: &'a Value, field: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| InputError::field(field, "expected an array"))
}

pub fn parse_points<S: Scalar>(v: &Value, field: &str) -> Result<Vec<Point<S>>> {
    as_array(v, field)?
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let f = format!("{field}[{i}]");
            as_array(row, &f)?
                .iter()
                .enumerate()
                .map(|(j, x)| scalar_from_json::<S>(x).map_err(|e| InputError::field(format!("{f}[{j}]"), e)))
                .collect()
        })
        .collect()
}

/// `{"n": int, "edges": [[v, w], ...]}`.
pub fn parse_graph(v: &Value, ctx: &str) -> Result<Graph> {
    let n = as_usize(get(v, ctx, "n")?, &join(ctx, "n"))?;
    let field = join(ctx, "edges");
    let edges = as_array(get(v, ctx, "edges")?, &field)?
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let f = format!("{field}[{i}]");
            let pair = as_array(e, &f)?;
            if pair.len() != 2 {
                return Err(InputError::field(f, "expected [v, w]"));
            }
            Ok((as_usize(&pair[0], &f)?, as_usize(&pair[1], &f)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Graph::new(n, edges).map_err(|e| InputError::field(field, e))
}

/// A polytope in whichever backend its data or the caller requires.
#[derive(Debug, Clone)]
pub enum AnyPolytope {
    Exact(Arc<Polytope<Rational>>),
    Float(Arc<Polytope<f64>>),
}

impl AnyPolytope {
    pub fn backend(&self) -> Backend {
        match self {
            AnyPolytope::Exact(_) => Backend::Exact,
            AnyPolytope::Float(_) => Backend::Float,
        }
    }
}

fn all_rational(v: Option<&Value>) -> bool {
    match v {
        None => true,
        Some(Value::Array(a)) => a.iter().all(|x| all_rational(Some(x))),
        Some(x) => json_is_rational(x),
    }
}

fn polytope_object<S: Scalar>(v: &Value, ctx: &str, tol: f64) -> Result<Polytope<S>> {
    let dim = as_usize(get(v, ctx, "dim")?, &join(ctx, "dim"))?;
    let vertices = parse_points::<S>(get(v, ctx, "vertices")?, &join(ctx, "vertices"))?;
    let built = match v.get("polar_override") {
        Some(p) => {
            let polar = parse_points::<S>(p, &join(ctx, "polar_override"))?;
            Polytope::with_polar_override(vertices, dim, polar, tol)
        }
        None => Polytope::new(vertices, dim, tol),
    };
    built.map_err(|e| InputError::field(ctx, e))
}

/// A gallery name string or `{"dim", "vertices", "polar_override"?,
/// "tolerance"?}`. Exact unless the norm is irrational, a tolerance is
/// given, or `backend` forces floats.
pub fn parse_polytope(v: &Value, ctx: &str, backend: Option<Backend>, tol: Option<f64>) -> Result<AnyPolytope> {
    let field = if ctx.is_empty() { "polytope".to_string() } else { ctx.to_string() };
    let tol_in = v.get("tolerance").and_then(Value::as_f64);
    let tol_value = tol.or(tol_in).unwrap_or(DEFAULT_TOLERANCE);
    if tol_value <= 0.0 || !tol_value.is_finite() {
        return Err(InputError::field(join(&field, "tolerance"), "must be positive"));
    }
    match v {
        Value::String(name) => {
            let named = named_norm(name, tol_value).map_err(|e| InputError::field(&field, e))?;
            match (named, backend) {
                (NamedNorm::Float(_), Some(Backend::Exact)) => {
                    Err(InputError::field(&field, format!("`{name}` is irrational; use the float backend")))
                }
                (NamedNorm::Float(p), _) => Ok(AnyPolytope::Float(Arc::new(p))),
                (NamedNorm::Exact(_), Some(Backend::Float)) => {
                    let p = crate::gallery::parse_gallery_name::<f64>(name).map_err(|e| InputError::field(&field, e))?;
                    Ok(AnyPolytope::Float(Arc::new(p.with_tolerance(tol_value))))
                }
                (NamedNorm::Exact(p), _) => Ok(AnyPolytope::Exact(Arc::new(p))),
            }
        }
        Value::Object(_) => {
            let rational = all_rational(v.get("vertices")) && all_rational(v.get("polar_override"));
            let use_exact = match backend {
                Some(Backend::Exact) if !rational => {
                    return Err(InputError::field(join(&field, "vertices"), "non-rational data needs the float backend"))
                }
                Some(b) => b == Backend::Exact,
                None => rational && tol_in.is_none(),
            };
            if use_exact {
                Ok(AnyPolytope::Exact(Arc::new(polytope_object(v, &field, 0.0)?)))
            } else {
                Ok(AnyPolytope::Float(Arc::new(polytope_object(v, &field, tol_value)?)))
            }
        }
        _ => Err(InputError::field(field, "expected a gallery name or a polytope object")),
    }
}

#[derive(Debug, Clone)]
pub enum AnyFramework {
    Exact(Framework<Rational>),
    Float(Framework<f64>),
}

fn framework_in<S: Scalar>(v: &Value, p: Arc<Polytope<S>>) -> Result<Framework<S>> {
    let g = parse_graph(get(v, "", "graph")?, "graph")?;
    let placement = parse_points::<S>(get(v, "", "placement")?, "placement")?;
    Framework::new(g, placement, p).map_err(|e| InputError::field("placement", e))
}

/// `{"graph": {...}, "placement": [[..], ..], "polytope": <name or object>}`.
pub fn parse_framework(v: &Value, backend: Option<Backend>, tol: Option<f64>) -> Result<AnyFramework> {
    let p = parse_polytope(get(v, "", "polytope")?, "polytope", backend, tol)?;
    Ok(match p {
        AnyPolytope::Exact(p) => AnyFramework::Exact(framework_in(v, p)?),
        AnyPolytope::Float(p) => AnyFramework::Float(framework_in(v, p)?),
    })
}

/// A graph object, or a framework object whose `graph` field is used.
pub fn parse_graph_input(v: &Value) -> Result<Graph> {
    match v.get("graph") {
        Some(g) => parse_graph(g, "graph"),
        None => parse_graph(v, ""),
    }
}

/// A bare list of moves (identity relabelling) or
/// `{"moves": [...], "target_iso": [...]}`.
pub fn parse_moves(v: &Value) -> Result<MoveSequence> {
    let (list, iso) = match v {
        Value::Array(_) => (v, None),
        _ => (get(v, "", "moves")?, v.get("target_iso")),
    };
    let moves: Vec<Move> = as_array(list, "moves")?
        .iter()
        .enumerate()
        .map(|(i, m)| serde_json::from_value(m.clone()).map_err(|e| InputError::field(format!("moves[{i}]"), e)))
        .collect::<Result<_>>()?;
    let n = moves
        .iter()
        .map(|m| match m {
            Move::VtoK4 { .. } => 3,
            _ => 1,
        })
        .sum::<usize>()
        + 1;
    let target_iso = match iso {
        Some(t) => as_array(t, "target_iso")?.iter().map(|x| as_usize(x, "target_iso")).collect::<Result<_>>()?,
        None => (0..n).collect(),
    };
    Ok(MoveSequence { moves, target_iso })
}

/// `{"family": "zigzag"|"disjoint"|"octagon-star"|"constant", "depth": k,
/// "polytope"?: ..., "framework"?: ...}`.
#[derive(Debug, Clone)]
pub struct FamilySpec {
    pub family: String,
    pub depth: Option<usize>,
    pub polytope: Option<Value>,
    pub framework: Option<Value>,
}

pub fn parse_family(v: &Value) -> Result<FamilySpec> {
    let family = get(v, "", "family")?
        .as_str()
        .ok_or_else(|| InputError::field("family", "expected a string"))?
        .to_string();
    let depth = v.get("depth").map(|d| as_usize(d, "depth")).transpose()?;
    Ok(FamilySpec { family, depth, polytope: v.get("polytope").cloned(), framework: v.get("framework").cloned() })
}
