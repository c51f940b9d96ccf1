//! JSON ingestion. Complex numbers are `[re, im]` pairs or plain numbers; matrices are
//! row-major nested arrays.

use serde_json::Value;
use thiserror::Error;

use crate::curve::{CurveConfig, CurveError, HyperellipticCurve};
use crate::C64;

/// Largest accepted polynomial degree in a curve spec.
pub const MAX_DEGREE: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("{path}: {message}")]
    Shape { path: String, message: String },
    #[error(transparent)]
    Curve(#[from] CurveError),
}

fn shape(path: &str, message: impl Into<String>) -> ParseError {
    ParseError::Shape {
        path: path.to_string(),
        message: message.into(),
    }
}

fn json(text: &str) -> Result<Value, ParseError> {
    serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))
}

fn finite(path: &str, v: &Value) -> Result<f64, ParseError> {
    let x = v.as_f64().ok_or_else(|| shape(path, "expected a number"))?;
    if !x.is_finite() {
        return Err(shape(path, "number is not finite"));
    }
    Ok(x)
}

/// A complex number from `[re, im]` or a plain real number.
pub fn complex_from_value(v: &Value, path: &str) -> Result<C64, ParseError> {
    match v {
        Value::Number(_) => Ok(C64::new(finite(path, v)?, 0.0)),
        Value::Array(a) if a.len() == 2 => Ok(C64::new(
            finite(&format!("{path}[0]"), &a[0])?,
            finite(&format!("{path}[1]"), &a[1])?,
        )),
        _ => Err(shape(path, "expected a number or an [re, im] pair")),
    }
}

pub fn vector_from_value(v: &Value, path: &str) -> Result<Vec<C64>, ParseError> {
    let a = v.as_array().ok_or_else(|| shape(path, "expected an array"))?;
    a.iter()
        .enumerate()
        .map(|(i, x)| complex_from_value(x, &format!("{path}[{i}]")))
        .collect()
}

pub fn matrix_from_value(v: &Value, path: &str) -> Result<Vec<Vec<C64>>, ParseError> {
    let rows = v.as_array().ok_or_else(|| shape(path, "expected an array of rows"))?;
    let out: Vec<Vec<C64>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| vector_from_value(r, &format!("{path}[{i}]")))
        .collect::<Result<_, _>>()?;
    if let Some(first) = out.first() {
        if let Some((i, _)) = out.iter().enumerate().find(|(_, r)| r.len() != first.len()) {
            return Err(shape(&format!("{path}[{i}]"), "rows have different lengths"));
        }
    }
    Ok(out)
}

pub fn parse_complex(text: &str) -> Result<C64, ParseError> {
    complex_from_value(&json(text)?, "$")
}

pub fn parse_vector(text: &str) -> Result<Vec<C64>, ParseError> {
    vector_from_value(&json(text)?, "$")
}

pub fn parse_matrix(text: &str) -> Result<Vec<Vec<C64>>, ParseError> {
    matrix_from_value(&json(text)?, "$")
}

/// Polynomial coefficients `f = [c0, c1, ...]`, constant term first.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSpec {
    pub f: Vec<C64>,
}

impl CurveSpec {
    pub fn build(&self, config: CurveConfig) -> Result<HyperellipticCurve, CurveError> {
        HyperellipticCurve::with_config(&self.f, config)
    }
}

/// `{"f": [c0, c1, ...]}`. Other keys are rejected so that typos surface.
pub fn parse_curve_spec(text: &str) -> Result<CurveSpec, ParseError> {
    let v = json(text)?;
    let obj = v.as_object().ok_or_else(|| shape("$", "expected an object with key \"f\""))?;
    if let Some(k) = obj.keys().find(|k| k.as_str() != "f") {
        return Err(shape("$", format!("unknown key \"{k}\"")));
    }
    let f = obj.get("f").ok_or_else(|| shape("$", "missing key \"f\""))?;
    let f = vector_from_value(f, "$.f")?;
    if f.len() > MAX_DEGREE + 1 {
        return Err(shape("$.f", format!("degree above {MAX_DEGREE}")));
    }
    Ok(CurveSpec { f })
}

pub fn parse_curve(text: &str, config: CurveConfig) -> Result<HyperellipticCurve, ParseError> {
    Ok(parse_curve_spec(text)?.build(config)?)
}

/// A point on the curve: `x` alone (sheet +1) or `{"x": x, "sheet": 1 | -1}`.
pub fn parse_point(text: &str) -> Result<(C64, i8), ParseError> {
    let v = json(text)?;
    match &v {
        Value::Object(obj) => {
            if let Some(k) = obj.keys().find(|k| !matches!(k.as_str(), "x" | "sheet")) {
                return Err(shape("$", format!("unknown key \"{k}\"")));
            }
            let x = complex_from_value(obj.get("x").ok_or_else(|| shape("$", "missing key \"x\""))?, "$.x")?;
            let sheet = match obj.get("sheet") {
                None => 1,
                Some(s) => match s.as_i64() {
                    Some(1) => 1,
                    Some(-1) => -1,
                    _ => return Err(shape("$.sheet", "expected 1 or -1")),
                },
            };
            Ok((x, sheet))
        }
        _ => Ok((complex_from_value(&v, "$")?, 1)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("[1.5, -2]").unwrap(), C64::new(1.5, -2.0));
        assert_eq!(parse_complex("3").unwrap(), C64::new(3.0, 0.0));
        assert!(parse_complex("[1, 2, 3]").is_err());
        assert!(parse_complex("\"1\"").is_err());
        assert!(parse_complex("[1e999, 0]").is_err());
    }

    #[test]
    fn vectors_and_matrices() {
        assert_eq!(parse_vector("[1, [0, 1]]").unwrap(), vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)]);
        let m = parse_matrix("[[[0, 1], 0.5], [0.5, [0, 2]]]").unwrap();
        assert_eq!(m[1][1], C64::new(0.0, 2.0));
        let err = parse_matrix("[[1, 2], [3]]").unwrap_err();
        assert_eq!(err.to_string(), "$[1]: rows have different lengths");
    }

    #[test]
    fn curve_specs() {
        let spec = parse_curve_spec(r#"{"f": [0, -1, 0, [1, 0]]}"#).unwrap();
        assert_eq!(spec.f.len(), 4);
        let curve = spec.build(CurveConfig::default()).unwrap();
        assert_eq!(curve.genus(), 1);
        assert!(matches!(parse_curve_spec("{\"f\": [0, 1"), Err(ParseError::Json(_))));
        assert!(parse_curve_spec(r#"{"g": [1]}"#).is_err());
        assert!(parse_curve_spec(r#"{"f": [1], "x": 2}"#).is_err());
        assert!(parse_curve_spec(r#"[0, 1]"#).is_err());
        assert!(matches!(
            parse_curve(r#"{"f": [0, 0, 0, 1]}"#, CurveConfig::default()),
            Err(ParseError::Curve(CurveError::NonSquarefree { .. }))
        ));
        let big = format!("{{\"f\": [{}]}}", vec!["1"; MAX_DEGREE + 2].join(","));
        assert!(parse_curve_spec(&big).is_err());
    }

    #[test]
    fn points() {
        assert_eq!(parse_point("[0.5, 0.7]").unwrap(), (C64::new(0.5, 0.7), 1));
        assert_eq!(parse_point(r#"{"x": 2, "sheet": -1}"#).unwrap(), (C64::new(2.0, 0.0), -1));
        assert!(parse_point(r#"{"x": 2, "sheet": 0}"#).is_err());
        assert!(parse_point(r#"{"sheet": 1}"#).is_err());
    }
}
