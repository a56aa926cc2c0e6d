//! Randomized and exhaustive checks of the whole pipeline, grouped into
//! suites. Every trial draws its weight vector from `trial_rng(seed, index)`,
//! so a report depends only on `(suite, n, samples, seed, tol)`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::combinatorics::{sample_weight, trial_rng, Marking, WeightVector};
use crate::complex::{build_complex, cusp_classes, euler_characteristic};
use crate::fiber::round_trip;
use crate::lorentz::{area_signature, build_model, right_angle_pairs};
use crate::moduli::{controlling_sums, psi6, route_gap, shape_routes};

pub const SCHEMA: &str = "polymod-verify/1";

/// Zero band on `|param − 1|` used by the sign-rule suite.
pub const SIGN_BAND_PARAM: f64 = 1e-6;
/// Zero band on `|sum − π|` used by the sign-rule suite.
pub const SIGN_BAND_SUM: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Roundtrip,
    Orthogonality,
    Signature,
    Crossroute,
    Signrule,
    Complex,
}

impl Suite {
    pub const ALL: [Suite; 6] =
        [Suite::Roundtrip, Suite::Orthogonality, Suite::Signature, Suite::Crossroute, Suite::Signrule, Suite::Complex];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Roundtrip => "roundtrip",
            Suite::Orthogonality => "orthogonality",
            Suite::Signature => "signature",
            Suite::Crossroute => "crossroute",
            Suite::Signrule => "signrule",
            Suite::Complex => "complex",
        }
    }

    /// Whether the suite makes sense for `n`.
    pub fn applies_to(&self, n: usize) -> bool {
        match self {
            Suite::Signrule => n == 6,
            _ => n == 5 || n == 6,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses a suite name; `"all"` yields every suite.
pub fn parse_suites(s: &str) -> Result<Vec<Suite>, String> {
    if s == "all" {
        return Ok(Suite::ALL.to_vec());
    }
    s.parse().map(|x| vec![x])
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub index: u64,
    pub theta: Vec<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
    pub tol: f64,
    /// Number of individual assertions evaluated.
    pub checks: u64,
    /// Largest deviation seen, in the suite's own units.
    pub max_error: f64,
    pub failures: Vec<Failure>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Outcome of one trial: checks done, worst deviation, failure detail.
type Outcome = (u64, f64, Option<String>);

fn per_sample(n: usize, samples: u64, seed: u64, trial: impl Fn(&WeightVector) -> Outcome + Sync) -> (u64, f64, Vec<Failure>) {
    let results: Vec<(u64, f64, Option<Failure>)> = (0..samples)
        .into_par_iter()
        .map(|index| match sample_weight(n, &mut trial_rng(seed, index)) {
            Ok(theta) => {
                let (checks, err, detail) = trial(&theta);
                (checks, err, detail.map(|detail| Failure { index, theta: theta.angles().to_vec(), detail }))
            }
            Err(e) => (1, 0.0, Some(Failure { index, theta: Vec::new(), detail: e.to_string() })),
        })
        .collect();
    let mut checks = 0;
    let mut max_error = 0.0f64;
    let mut failures = Vec::new();
    for (c, e, f) in results {
        checks += c;
        max_error = max_error.max(e);
        failures.extend(f);
    }
    (checks, max_error, failures)
}

fn roundtrip_trial(theta: &WeightVector, tol: f64) -> Outcome {
    match round_trip(theta) {
        Ok(err) if err <= tol => (1, err, None),
        Ok(err) => (1, err, Some(format!("round-trip error {err:e}"))),
        Err(e) => (1, 0.0, Some(format!("{}: {e}", e.kind()))),
    }
}

fn orthogonality_trial(theta: &WeightVector, tol: f64) -> Outcome {
    let n = theta.n();
    let model = match build_model(theta, &Marking::identity(n)) {
        Ok(m) => m,
        Err(e) => return (1, 0.0, Some(format!("{}: {e}", e.kind()))),
    };
    let mut worst = 0.0f64;
    let mut checks = 0;
    for (j, k) in right_angle_pairs(n) {
        checks += 1;
        match model.dihedral_angle(j, k) {
            Ok(a) => worst = worst.max((a - FRAC_PI_2).abs()),
            Err(e) => return (checks, worst, Some(format!("facets {j},{k}: {e}"))),
        }
    }
    let detail = (worst > tol).then(|| format!("dihedral angle off π/2 by {worst:e}"));
    (checks, worst, detail)
}

fn signature_trial(theta: &WeightVector) -> Outcome {
    let n = theta.n();
    let m = Marking::identity(n);
    match area_signature(theta, &m) {
        Ok(sig) if sig == (1, n - 3) => match build_model(theta, &m) {
            Ok(_) => (2, 0.0, None),
            Err(e) => (2, 0.0, Some(format!("{}: {e}", e.kind()))),
        },
        Ok(sig) => (1, 0.0, Some(format!("signature {sig:?}"))),
        Err(e) => (1, 0.0, Some(format!("{}: {e}", e.kind()))),
    }
}

fn crossroute_trial(theta: &WeightVector, tol: f64) -> Outcome {
    match shape_routes(theta, &Marking::identity(theta.n())) {
        Ok((planar, lorentz)) => {
            let gap = route_gap(&planar, &lorentz);
            let detail = (gap > tol).then(|| format!("routes differ by {gap:e}: {planar:?} vs {lorentz:?}"));
            (planar.len() as u64, gap, detail)
        }
        Err(e) => (1, 0.0, Some(format!("{}: {e}", e.kind()))),
    }
}

fn band_sign(x: f64, band: f64) -> i8 {
    if x.abs() < band {
        0
    } else if x > 0.0 {
        1
    } else {
        -1
    }
}

/// Signs of `P − 1, Q − 1, R − 1` against those of the controlling triple
/// sums minus `π`, each with its own zero band.
pub fn sign_rule_holds(theta: &WeightVector, marking: &Marking) -> Result<bool, String> {
    let shape = psi6(theta, marking).map_err(|e| format!("{}: {e}", e.kind()))?;
    let sums = controlling_sums(theta, marking);
    Ok(shape
        .params()
        .iter()
        .zip(sums)
        .all(|(p, s)| band_sign(p - 1.0, SIGN_BAND_PARAM) == band_sign(s - PI, SIGN_BAND_SUM)))
}

fn signrule_trial(theta: &WeightVector) -> Outcome {
    match sign_rule_holds(theta, &Marking::identity(6)) {
        Ok(true) => (3, 0.0, None),
        Ok(false) => (3, 0.0, Some("parameter signs differ from triple-sum signs".into())),
        Err(e) => (1, 0.0, Some(e)),
    }
}

fn complex_trial(theta: &WeightVector, tol: f64) -> Outcome {
    let n = theta.n();
    let c = match build_complex(n, theta) {
        Ok(c) => c,
        Err(e) => return (1, 0.0, Some(format!("{}: {e}", e.kind()))),
    };
    if n == 5 {
        match (euler_characteristic(&c), c.face_length_mismatch()) {
            (Ok(-3), Ok(gap)) if c.corner_classes().len() == 15 && gap <= tol => (3, gap, None),
            (chi, gap) => {
                let err = gap.as_ref().copied().unwrap_or(0.0);
                (3, err, Some(format!("χ = {chi:?}, glued side mismatch {gap:?}")))
            }
        }
    } else if c.pairings().len() == 180 && c.cells().len() == 60 {
        (2, 0.0, None)
    } else {
        (2, 0.0, Some(format!("{} cells, {} pairings", c.cells().len(), c.pairings().len())))
    }
}

/// Exact counts at the equal weight, checked once per complex suite run.
fn complex_exact(n: usize) -> Vec<String> {
    let mut out = Vec::new();
    let theta = WeightVector::equal(n);
    let c = match build_complex(n, &theta) {
        Ok(c) => c,
        Err(e) => return vec![e.to_string()],
    };
    if n == 5 {
        let counts = (c.corner_classes().len(), c.pairings().len(), c.cells().len());
        if counts != (15, 30, 12) {
            out.push(format!("(V, E, F) = {counts:?}"));
        }
        if c.corner_classes().iter().any(|k| k.corners.len() != 4) {
            out.push("vertex class of size other than 4".into());
        }
    } else {
        match cusp_classes(&c) {
            Ok(cusps) if cusps.len() == 10 && cusps.iter().all(|k| k.incidences.len() == 18) => {}
            Ok(cusps) => out.push(format!("{} cusp classes", cusps.len())),
            Err(e) => out.push(e.to_string()),
        }
        if c.surface_names().len() != 15 {
            out.push(format!("{} surfaces", c.surface_names().len()));
        }
    }
    out
}

/// Runs one suite.
pub fn run_suite(suite: Suite, n: usize, samples: u64, seed: u64, tol: f64) -> SuiteReport {
    let (checks, max_error, mut failures) = match suite {
        Suite::Roundtrip => per_sample(n, samples, seed, |t| roundtrip_trial(t, tol)),
        Suite::Orthogonality => per_sample(n, samples, seed, |t| orthogonality_trial(t, tol)),
        Suite::Signature => per_sample(n, samples, seed, signature_trial),
        Suite::Crossroute => per_sample(n, samples, seed, |t| crossroute_trial(t, tol)),
        Suite::Signrule => per_sample(n, samples, seed, signrule_trial),
        Suite::Complex => per_sample(n, samples, seed, |t| complex_trial(t, tol)),
    };
    let mut checks = checks;
    if suite == Suite::Complex {
        let exact = complex_exact(n);
        checks += 1;
        failures.extend(exact.into_iter().map(|detail| Failure { index: u64::MAX, theta: WeightVector::equal(n).angles().to_vec(), detail }));
    }
    SuiteReport { suite, n, samples, seed, tol, checks, max_error, failures }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub schema: &'static str,
    pub version: &'static str,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

/// Runs each suite for each `n` it applies to.
pub fn run_suites(suites: &[Suite], ns: &[usize], samples: u64, seed: u64, tol: f64) -> VerifyReport {
    let mut reports = Vec::new();
    for &suite in suites {
        for &n in ns {
            if suite.applies_to(n) {
                reports.push(run_suite(suite, n, samples, seed, tol));
            }
        }
    }
    VerifyReport {
        schema: SCHEMA,
        version: env!("CARGO_PKG_VERSION"),
        passed: reports.iter().all(SuiteReport::passed),
        suites: reports,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_runs_pass() {
        for suite in Suite::ALL {
            for n in [5, 6] {
                if suite.applies_to(n) {
                    let r = run_suite(suite, n, 8, 1, 1e-9);
                    assert!(r.passed(), "{suite} n={n}: {:?}", r.failures);
                    assert!(r.checks > 0);
                }
            }
        }
    }

    #[test]
    fn suite_names() {
        assert_eq!(parse_suites("all").unwrap().len(), 6);
        assert_eq!(parse_suites("crossroute").unwrap(), vec![Suite::Crossroute]);
        assert!(parse_suites("bogus").is_err());
    }
}
