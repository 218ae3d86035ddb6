//! Scalar backends.
//!
//! Every analysis runs over a single scalar type: exact rationals when all
//! input data is rational, `f64` with a polytope-level tolerance otherwise.
//! Generic code compares values through [`Scalar::is_negligible`], which is
//! an exact zero test for rationals and an absolute-threshold test for floats.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;
use thiserror::Error;

/// Exact rational scalar.
pub type Rational = BigRational;

/// A point (or vector) in R^d.
pub type Point<S> = Vec<S>;

/// Default tolerance for the float backend.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarParseError {
    #[error("cannot parse {0:?} as a number")]
    Invalid(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("value {0:?} is not representable in the exact backend")]
    NotRational(String),
}

/// Which arithmetic a polytope (and everything built on it) uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Float,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Exact => f.write_str("exact"),
            Backend::Float => f.write_str("float"),
        }
    }
}

pub trait Scalar:
    Signed + Clone + PartialOrd + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    const BACKEND: Backend;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    fn to_f64(&self) -> f64;

    /// Exact backend: `self == 0`. Float backend: `|self| <= tol`.
    fn is_negligible(&self, tol: f64) -> bool;

    /// Parses a decimal literal (`"0.4"`, `"-3"`, `"1e-3"`) or a `"p/q"` string.
    fn parse_literal(s: &str) -> Result<Self, ScalarParseError>;

    /// Converts an `f64` produced by a closed-form formula. The exact backend
    /// only accepts values whose shortest decimal form is exact.
    fn from_f64_value(x: f64) -> Result<Self, ScalarParseError> {
        Self::parse_literal(&format!("{x}"))
    }

    /// JSON form: `"p/q"` strings for rationals, plain numbers for floats.
    fn to_json(&self) -> Value;

    fn half() -> Self {
        Self::from_ratio(1, 2)
    }

    /// Fraction-free rank, available on the exact backend only.
    fn exact_rank(_matrix: &[Vec<Self>], _ncols: usize) -> Option<usize> {
        None
    }
}

impl Scalar for f64 {
    const BACKEND: Backend = Backend::Float;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_negligible(&self, tol: f64) -> bool {
        self.abs() <= tol
    }

    fn parse_literal(s: &str) -> Result<Self, ScalarParseError> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: f64 = p.trim().parse().map_err(|_| ScalarParseError::Invalid(s.into()))?;
            let q: f64 = q.trim().parse().map_err(|_| ScalarParseError::Invalid(s.into()))?;
            if q == 0.0 {
                return Err(ScalarParseError::ZeroDenominator(s.into()));
            }
            return Ok(p / q);
        }
        let v: f64 = s.parse().map_err(|_| ScalarParseError::Invalid(s.into()))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(ScalarParseError::Invalid(s.into()))
        }
    }

    fn from_f64_value(x: f64) -> Result<Self, ScalarParseError> {
        Ok(x)
    }

    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }
}

impl Scalar for Rational {
    const BACKEND: Backend = Backend::Exact;

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn parse_literal(s: &str) -> Result<Self, ScalarParseError> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p = BigInt::from_str(p.trim()).map_err(|_| ScalarParseError::Invalid(s.into()))?;
            let q = BigInt::from_str(q.trim()).map_err(|_| ScalarParseError::Invalid(s.into()))?;
            if q.is_zero() {
                return Err(ScalarParseError::ZeroDenominator(s.into()));
            }
            return Ok(Rational::new(p, q));
        }
        parse_decimal(s)
    }

    fn to_json(&self) -> Value {
        Value::String(format_rational(self))
    }

    fn exact_rank(matrix: &[Vec<Self>], ncols: usize) -> Option<usize> {
        Some(crate::linalg::bareiss_rank(matrix, ncols))
    }
}

/// `"p/q"`, or `"p"` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn parse_decimal(s: &str) -> Result<Rational, ScalarParseError> {
    let bad = || ScalarParseError::Invalid(s.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    let lower = s.to_ascii_lowercase();
    if lower.contains("inf") || lower.contains("nan") {
        return Err(ScalarParseError::NotRational(s.to_string()));
    }
    let (mantissa, exp) = match lower.split_once('e') {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (lower.as_str(), 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer = BigInt::from_str(&all_digits).map_err(|_| bad())?;
    if neg {
        numer = -numer;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    })
}

/// Parses a JSON value (number or string) into the requested backend.
pub fn scalar_from_json<S: Scalar>(v: &Value) -> Result<S, ScalarParseError> {
    match v {
        Value::Number(n) => S::parse_literal(&n.to_string()),
        Value::String(s) => S::parse_literal(s),
        other => Err(ScalarParseError::Invalid(other.to_string())),
    }
}

/// True when a JSON literal has an exact rational value (every finite JSON
/// number and every `"p/q"` string does).
pub fn json_is_rational(v: &Value) -> bool {
    scalar_from_json::<Rational>(v).is_ok()
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn sub<S: Scalar>(a: &[S], b: &[S]) -> Point<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub fn add<S: Scalar>(a: &[S], b: &[S]) -> Point<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn scale<S: Scalar>(a: &[S], k: &S) -> Point<S> {
    a.iter().map(|x| x.clone() * k.clone()).collect()
}

pub fn neg<S: Scalar>(a: &[S]) -> Point<S> {
    a.iter().map(|x| -x.clone()).collect()
}

pub fn max_abs<S: Scalar>(a: &[S]) -> f64 {
    a.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
}

pub fn is_zero_vec<S: Scalar>(a: &[S], tol: f64) -> bool {
    a.iter().all(|x| x.is_negligible(tol))
}

pub fn point_from_f64<S: Scalar>(coords: &[f64]) -> Result<Point<S>, ScalarParseError> {
    coords.iter().map(|&c| S::from_f64_value(c)).collect()
}

pub fn point_from_ints<S: Scalar>(coords: &[i64]) -> Point<S> {
    coords.iter().map(|&c| S::from_int(c)).collect()
}

/// Equality with the scale-aware rule `|a - b| <= tol * max(1, scale)`.
pub fn approx_eq<S: Scalar>(a: &S, b: &S, tol: f64, scale: f64) -> bool {
    (a.clone() - b.clone()).is_negligible(tol * scale.abs().max(1.0))
}

pub fn points_equal<S: Scalar>(a: &[S], b: &[S], tol: f64) -> bool {
    let s = max_abs(a).max(max_abs(b));
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| approx_eq(x, y, tol, s))
}

/// Human-readable `(a, b, ...)` form used in error messages.
pub fn format_point<S: Scalar>(p: &[S]) -> String {
    let parts: Vec<String> = p.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

pub fn json_point<S: Scalar>(p: &[S]) -> Value {
    Value::Array(p.iter().map(Scalar::to_json).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_literals_are_exact() {
        let r = Rational::parse_literal("0.4").unwrap();
        assert_eq!(r, Rational::from_ratio(2, 5));
        let r = Rational::parse_literal("-2.25e1").unwrap();
        assert_eq!(r, Rational::from_ratio(-45, 2));
        let r = Rational::parse_literal("1e-3").unwrap();
        assert_eq!(r, Rational::from_ratio(1, 1000));
        assert_eq!(Rational::parse_literal(" 7/14 ").unwrap(), Rational::from_ratio(1, 2));
    }

    #[test]
    fn rejects_garbage() {
        assert!(Rational::parse_literal("abc").is_err());
        assert!(Rational::parse_literal("1/0").is_err());
        assert!(f64::parse_literal("1/0").is_err());
        assert!(Rational::parse_literal("").is_err());
        assert!(Rational::parse_literal("NaN").is_err());
    }

    #[test]
    fn json_round_trip_for_rationals() {
        let r = Rational::from_ratio(-3, 8);
        let v = r.to_json();
        assert_eq!(v, Value::String("-3/8".into()));
        assert_eq!(scalar_from_json::<Rational>(&v).unwrap(), r);
        let n: Value = serde_json::from_str("0.1").unwrap();
        assert_eq!(scalar_from_json::<Rational>(&n).unwrap(), Rational::from_ratio(1, 10));
    }

    #[test]
    fn float_tolerance_is_scale_aware() {
        assert!(approx_eq(&1000.0, &(1000.0 + 5e-7), 1e-9, 1000.0));
        assert!(!approx_eq(&1.0, &(1.0 + 5e-7), 1e-9, 1.0));
    }
}
