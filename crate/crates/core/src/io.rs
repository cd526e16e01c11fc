//! JSON state files and 12-significant-digit report output.
//!
//! A state file is either explicit,
//!
//! ```json
//! { "n": 1, "mean": [0.0, 0.0], "cov": [[0.5, 0.0], [0.0, 0.5]] }
//! ```
//!
//! or a builder shorthand, at top level or under `"builder"`:
//! `{"thermal": [0.69, "inf"]}`, `{"coherent": [[1.0, 0.0]]}`,
//! `{"squeezed_vacuum": 0.5}`. Infinity is written as the string `"inf"`.

use std::fmt;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::e2::E2Quadruple;
use crate::error::Error;
use crate::gaussian::{coherent_state, squeezed_vacuum, GaussianState};
use crate::renyi::EntropyReport;
use crate::williamson::WilliamsonForm;

/// Significant digits of every number written by the CLI.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Failure to obtain a value from a file.
#[derive(Debug)]
pub enum InputError {
    /// Unreadable file, invalid JSON or a schema mismatch.
    Malformed(String),
    /// Well-formed input describing something outside the mathematical domain.
    Domain(Error),
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputError::Malformed(m) => write!(f, "{m}"),
            InputError::Domain(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for InputError {}

impl From<Error> for InputError {
    fn from(e: Error) -> Self {
        InputError::Domain(e)
    }
}

fn malformed(msg: impl Into<String>) -> InputError {
    InputError::Malformed(msg.into())
}

pub fn read_json(path: &Path) -> Result<Value, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| malformed(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| malformed(format!("{}: invalid JSON: {e}", path.display())))
}

/// Number, or `"inf"`/`"-inf"`.
pub fn parse_number(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => match s.trim() {
            "inf" | "+inf" | "Infinity" => Some(f64::INFINITY),
            "-inf" | "-Infinity" => Some(f64::NEG_INFINITY),
            _ => None,
        },
        _ => None,
    }
}

fn number(v: &Value, what: &str) -> Result<f64, InputError> {
    parse_number(v).ok_or_else(|| malformed(format!("{what}: expected a number, got {v}")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>, InputError> {
    v.as_array().ok_or_else(|| malformed(format!("{what}: expected an array")))
}

fn complex(v: &Value, what: &str) -> Result<Complex64, InputError> {
    let pair = array(v, what)?;
    if pair.len() != 2 {
        return Err(malformed(format!("{what}: complex numbers are [re, im] pairs")));
    }
    Ok(Complex64::new(number(&pair[0], what)?, number(&pair[1], what)?))
}

fn real_matrix(v: &Value, dim: usize, what: &str) -> Result<DMatrix<f64>, InputError> {
    let rows = array(v, what)?;
    if rows.len() != dim {
        return Err(malformed(format!("{what}: expected {dim} rows, got {}", rows.len())));
    }
    let mut m = DMatrix::zeros(dim, dim);
    for (i, row) in rows.iter().enumerate() {
        let row = array(row, what)?;
        if row.len() != dim {
            return Err(malformed(format!("{what}: row {i} has {} entries, expected {dim}", row.len())));
        }
        for (j, x) in row.iter().enumerate() {
            m[(i, j)] = number(x, what)?;
        }
    }
    Ok(m)
}

fn complex_matrix(v: &Value, n: usize, what: &str) -> Result<DMatrix<Complex64>, InputError> {
    let rows = array(v, what)?;
    if rows.len() != n {
        return Err(malformed(format!("{what}: expected {n} rows, got {}", rows.len())));
    }
    let mut m = DMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        let row = array(row, what)?;
        if row.len() != n {
            return Err(malformed(format!("{what}: row {i} has {} entries, expected {n}", row.len())));
        }
        for (j, z) in row.iter().enumerate() {
            m[(i, j)] = complex(z, what)?;
        }
    }
    Ok(m)
}

fn builder_state(obj: &Map<String, Value>) -> Option<Result<GaussianState, InputError>> {
    if let Some(t) = obj.get("thermal") {
        return Some((|| {
            let t: Vec<f64> = array(t, "thermal")?
                .iter()
                .map(|x| number(x, "thermal"))
                .collect::<Result<_, _>>()?;
            Ok(GaussianState::thermal(&t)?)
        })());
    }
    if let Some(g) = obj.get("coherent") {
        return Some((|| {
            let gamma: Vec<Complex64> = array(g, "coherent")?
                .iter()
                .map(|z| complex(z, "coherent"))
                .collect::<Result<_, _>>()?;
            if gamma.is_empty() {
                return Err(malformed("coherent: need at least one mode"));
            }
            Ok(coherent_state(&gamma))
        })());
    }
    if let Some(r) = obj.get("squeezed_vacuum") {
        return Some((|| Ok(squeezed_vacuum(number(r, "squeezed_vacuum")?)?))());
    }
    None
}

/// Parses a state file's JSON value.
pub fn state_from_json(v: &Value) -> Result<GaussianState, InputError> {
    let obj = v
        .as_object()
        .ok_or_else(|| malformed("state file must be a JSON object"))?;
    if let Some(b) = obj.get("builder") {
        let inner = b
            .as_object()
            .ok_or_else(|| malformed("builder must be an object"))?;
        return builder_state(inner).unwrap_or_else(|| Err(malformed("unknown builder")));
    }
    if let Some(result) = builder_state(obj) {
        return result;
    }
    let mean = obj.get("mean").ok_or_else(|| malformed("state file needs \"mean\" and \"cov\""))?;
    let cov = obj.get("cov").ok_or_else(|| malformed("state file needs \"mean\" and \"cov\""))?;
    let mean: Vec<f64> = array(mean, "mean")?
        .iter()
        .map(|x| number(x, "mean"))
        .collect::<Result<_, _>>()?;
    if mean.is_empty() || mean.len() % 2 != 0 {
        return Err(malformed(format!("mean must have length 2n, got {}", mean.len())));
    }
    if let Some(n) = obj.get("n") {
        let n = n.as_u64().ok_or_else(|| malformed("n must be a positive integer"))?;
        if 2 * n as usize != mean.len() {
            return Err(malformed(format!("n = {n} but mean has length {}", mean.len())));
        }
    }
    let cov = real_matrix(cov, mean.len(), "cov")?;
    Ok(GaussianState::new(DVector::from_vec(mean), cov)?)
}

pub fn read_state(path: &Path) -> Result<GaussianState, InputError> {
    state_from_json(&read_json(path)?)
}

/// Parses `{"c" | "ln_c", "mu", "A", "Lambda"}`.
pub fn quadruple_from_json(v: &Value) -> Result<E2Quadruple, InputError> {
    let obj = v
        .as_object()
        .ok_or_else(|| malformed("quadruple must be a JSON object"))?;
    let mu_v = obj.get("mu").ok_or_else(|| malformed("quadruple needs \"mu\""))?;
    let mu: Vec<Complex64> = array(mu_v, "mu")?
        .iter()
        .map(|z| complex(z, "mu"))
        .collect::<Result<_, _>>()?;
    let n = mu.len();
    let a = complex_matrix(obj.get("A").ok_or_else(|| malformed("quadruple needs \"A\""))?, n, "A")?;
    let lambda = complex_matrix(
        obj.get("Lambda").ok_or_else(|| malformed("quadruple needs \"Lambda\""))?,
        n,
        "Lambda",
    )?;
    let mu = DVector::from_vec(mu);
    let q = match (obj.get("ln_c"), obj.get("c")) {
        (Some(l), _) => E2Quadruple::from_ln_c(number(l, "ln_c")?, mu, a, lambda)?,
        (None, Some(c)) => E2Quadruple::new(number(c, "c")?, mu, a, lambda)?,
        (None, None) => return Err(malformed("quadruple needs \"c\" or \"ln_c\"")),
    };
    Ok(q)
}

pub fn is_quadruple(v: &Value) -> bool {
    v.get("Lambda").is_some() && v.get("mu").is_some()
}

/// `x` rounded to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

/// A JSON number at 12 significant digits; infinities become `"inf"`/`"-inf"`.
pub fn num(x: f64) -> Value {
    if x.is_infinite() {
        return Value::String(if x > 0.0 { "inf" } else { "-inf" }.into());
    }
    serde_json::Number::from_f64(round_sig(x))
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

/// `[re, im]`.
pub fn complex_json(z: Complex64) -> Value {
    json!([num(z.re), num(z.im)])
}

fn real_vec(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| num(x)).collect())
}

fn real_mat(m: &DMatrix<f64>) -> Value {
    Value::Array((0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| num(m[(i, j)])).collect())).collect())
}

fn complex_mat(m: &DMatrix<Complex64>) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| complex_json(m[(i, j)])).collect()))
            .collect(),
    )
}

pub fn report_json(r: &EntropyReport) -> Value {
    json!({
        "alpha": num(r.alpha),
        "divergence": num(r.divergence),
        "T_alpha": num(r.t_alpha),
        "trace_Z": num(r.trace_z),
        "s": real_vec(&r.s),
        "t_Z": real_vec(&r.t_z),
        "p_s": num(r.p_s),
        "p_tZ": num(r.p_tz),
        "p_alpha_tZ": num(r.p_alpha_tz),
    })
}

pub fn williamson_json(w: &WilliamsonForm) -> Value {
    json!({
        "d": real_vec(&w.d),
        "t": real_vec(w.t.values()),
        "L": real_mat(w.l.matrix()),
    })
}

pub fn quadruple_json(q: &E2Quadruple) -> Value {
    json!({
        "c": num(q.c()),
        "ln_c": num(q.ln_c()),
        "mu": Value::Array(q.mu().iter().map(|&z| complex_json(z)).collect()),
        "A": complex_mat(q.a()),
        "Lambda": complex_mat(q.lambda()),
    })
}

pub fn state_json(s: &GaussianState) -> Value {
    json!({
        "n": s.modes(),
        "mean": real_vec(s.mean().as_slice()),
        "cov": real_mat(s.cov()),
    })
}

/// Fixed-width rendering of a number for table output.
pub fn fmt_num(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{}", round_sig(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn explicit_and_builder_states() {
        let v: Value = serde_json::from_str(r#"{"n":1,"mean":[0,0],"cov":[[0.5,0],[0,0.5]]}"#).unwrap();
        assert_eq!(state_from_json(&v).unwrap(), GaussianState::vacuum(1));
        let v: Value = serde_json::from_str(r#"{"thermal":[0.6931471805599453,"inf"]}"#).unwrap();
        let s = state_from_json(&v).unwrap();
        assert_abs_diff_eq!(s.cov()[(0, 0)], 1.5, epsilon = 1e-14);
        assert_eq!(s.cov()[(1, 1)], 0.5);
        let v: Value = serde_json::from_str(r#"{"builder":{"coherent":[[1,0],[0,1]]}}"#).unwrap();
        assert_eq!(state_from_json(&v).unwrap().mean().as_slice(), &[1.0, 0.0, 0.0, 1.0]);
        let v: Value = serde_json::from_str(r#"{"squeezed_vacuum":0.5}"#).unwrap();
        assert_eq!(state_from_json(&v).unwrap(), squeezed_vacuum(0.5).unwrap());
    }

    #[test]
    fn malformed_and_domain_errors_are_distinguished() {
        for text in [r#"{"mean":[0,0]}"#, r#"{"mean":[0],"cov":[[1]]}"#, r#"{"n":2,"mean":[0,0],"cov":[[1,0],[0,1]]}"#, r#"[1,2]"#, r#"{"thermal":"x"}"#] {
            let v: Value = serde_json::from_str(text).unwrap();
            assert!(matches!(state_from_json(&v), Err(InputError::Malformed(_))), "{text}");
        }
        let v: Value = serde_json::from_str(r#"{"thermal":[-1]}"#).unwrap();
        assert!(matches!(state_from_json(&v), Err(InputError::Domain(_))));
        let v: Value = serde_json::from_str(r#"{"squeezed_vacuum":9}"#).unwrap();
        assert!(matches!(state_from_json(&v), Err(InputError::Domain(_))));
    }

    #[test]
    fn rounding() {
        assert_eq!(round_sig(0.1234567890123456), 0.123456789012);
        assert_eq!(round_sig(123456.78901234567), 123456.789012);
        assert_eq!(num(f64::INFINITY), Value::String("inf".into()));
        assert_eq!(num(2.0).to_string(), "2.0");
    }

    #[test]
    fn quadruple_round_trip_through_json() {
        let q = crate::e2::state_to_e2(
            &squeezed_vacuum(0.3).unwrap().displaced(&[Complex64::new(0.2, -0.4)]).unwrap(),
        )
        .unwrap();
        let back = quadruple_from_json(&quadruple_json(&q)).unwrap();
        assert!(back.max_abs_diff(&q) < 1e-11);
    }
}
