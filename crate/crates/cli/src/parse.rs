//! Parsing of angle lists and shape tuples given on the command line.

use std::f64::consts::PI;

use polymod::combinatorics::{validate_weight_with, WeightVector};

use crate::error::CliError;

/// One angle. Accepts a plain number or a `*`-separated product of factors,
/// each a number, a fraction `a/b`, `pi`, `π` or a multiple such as `2pi`.
pub fn parse_angle(token: &str) -> Result<f64, String> {
    let token = token.trim();
    if token.is_empty() {
        return Err("empty angle".into());
    }
    token.split('*').map(parse_factor).product::<Result<f64, String>>()
}

fn parse_factor(f: &str) -> Result<f64, String> {
    let f = f.trim();
    let bad = || format!("cannot read {f:?} as an angle");
    for pi in ["pi", "π"] {
        if let Some(coef) = f.strip_suffix(pi) {
            let c = if coef.is_empty() { 1.0 } else { parse_factor(coef)? };
            return Ok(c * PI);
        }
    }
    if let Some((a, b)) = f.split_once('/') {
        let a: f64 = parse_factor(a)?;
        let b: f64 = parse_factor(b)?;
        return Ok(a / b);
    }
    let v: f64 = f.parse().map_err(|_| bad())?;
    if !v.is_finite() {
        return Err(bad());
    }
    Ok(v)
}

/// A weight vector from tokens; `["equal"]` gives the equal weight.
pub fn parse_theta_tokens<S: AsRef<str>>(tokens: &[S], n: usize, tol_sum: f64) -> Result<WeightVector, CliError> {
    if tokens.len() == 1 && tokens[0].as_ref().trim() == "equal" {
        return Ok(WeightVector::equal(n));
    }
    let angles = tokens
        .iter()
        .map(|t| parse_angle(t.as_ref()))
        .collect::<Result<Vec<f64>, String>>()
        .map_err(|m| CliError::input("ParseError", m))?;
    if angles.len() != n {
        return Err(CliError::input(
            "DimensionMismatch",
            format!("expected {n} angles, got {}", angles.len()),
        ));
    }
    Ok(validate_weight_with(&angles, tol_sum)?)
}

/// A weight vector from a comma-separated list.
pub fn parse_theta(text: &str, n: usize, tol_sum: f64) -> Result<WeightVector, CliError> {
    let tokens: Vec<&str> = text.split(',').collect();
    parse_theta_tokens(&tokens, n, tol_sum)
}

/// Exactly `count` comma-separated positive numbers.
pub fn parse_shape(text: &str, count: usize) -> Result<Vec<f64>, CliError> {
    let values = text
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("cannot read {t:?} as a number")))
        .collect::<Result<Vec<f64>, String>>()
        .map_err(|m| CliError::input("ParseError", m))?;
    if values.len() != count {
        return Err(CliError::input("DimensionMismatch", format!("expected {count} shape parameters, got {}", values.len())));
    }
    if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(CliError::input("InvalidShape", format!("shape parameters must be positive, got {v}")));
    }
    Ok(values)
}
