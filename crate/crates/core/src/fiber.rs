//! Weight vectors with a prescribed shape, and recovery of the weight vector
//! from the shapes seen from two different labels.
//!
//! Fixing the shape leaves one free complex parameter `w`, the apex of the
//! completed triangle `T₀ = (0, 1, w)`. Given the shape and `w`, the polygon
//! is rebuilt from the marks on the sides of `T₀` and its turning angles are
//! read off.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combinatorics::{sample_weight, trial_rng, validate_weight, Marking, WeightError, WeightVector};
use crate::moduli::{psi5, psi6, HexahedronShape, ModuliError, PentagonShape};
use crate::planar::{complete_triangle, PlanarError};

/// Smallest admissible imaginary part of a point of the upper half plane.
pub const TOL_IM: f64 = 1e-12;

/// Tolerance on the circle-intersection conditions.
pub const TOL_CIRCLE: f64 = 1e-12;

/// Agreement required between the given shapes and the forward images of
/// the recovered weight vector.
pub const TOL_VERIFY: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FiberError {
    #[error("point {re} + {im}i is not in the upper half plane")]
    NotInUpperHalfPlane { re: f64, im: f64 },
    #[error("slid edges collide: turning angle {angle} before edge {edge}")]
    SlideCollision { edge: usize, angle: f64 },
    #[error("angles leave the weight domain: {0}")]
    NotInTheta(WeightError),
    #[error("circles of radii {r0} about 0 and {r1} about 1 do not meet in the upper half plane")]
    NoIntersection { r0: f64, r1: f64 },
    #[error("shape pair is not realized by a common weight vector (residual {residual:e})")]
    InconsistentPair { residual: f64 },
    #[error(transparent)]
    Moduli(#[from] ModuliError),
    #[error(transparent)]
    Planar(#[from] PlanarError),
}

impl FiberError {
    pub fn kind(&self) -> &'static str {
        match self {
            FiberError::NotInUpperHalfPlane { .. } => "NotInUpperHalfPlane",
            FiberError::SlideCollision { .. } => "SlideCollision",
            FiberError::NotInTheta(_) => "NotInTheta",
            FiberError::NoIntersection { .. } => "NoIntersection",
            FiberError::InconsistentPair { .. } => "InconsistentPair",
            FiberError::Moduli(e) => e.kind(),
            FiberError::Planar(_) => "PlanarError",
        }
    }
}

/// A point `w` with `Im w > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpperHalfPoint {
    re: f64,
    im: f64,
}

impl UpperHalfPoint {
    pub fn new(w: Complex64) -> Result<Self, FiberError> {
        if !(w.im > TOL_IM) || !w.re.is_finite() || !w.im.is_finite() {
            return Err(FiberError::NotInUpperHalfPlane { re: w.re, im: w.im });
        }
        Ok(UpperHalfPoint { re: w.re, im: w.im })
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

fn unit(z: Complex64) -> Complex64 {
    z / z.norm()
}

/// Turning angles of a polygon with the given edge directions. Angle `j` is
/// the turn from edge `j − 1` into edge `j`.
fn turning_angles(dirs: &[Complex64]) -> Result<WeightVector, FiberError> {
    let n = dirs.len();
    let mut angles = Vec::with_capacity(n);
    for j in 0..n {
        let angle = (dirs[j] / dirs[(j + n - 1) % n]).arg();
        if !(angle > 0.0) {
            return Err(FiberError::SlideCollision { edge: j, angle });
        }
        angles.push(angle);
    }
    validate_weight(&angles).map_err(FiberError::NotInTheta)
}

/// Reorders angles read along `marking` into the weight vector indexed by
/// point.
fn by_point(read: &WeightVector, marking: &Marking) -> Result<WeightVector, FiberError> {
    let mut theta = vec![0.0; marking.n()];
    for (j, &a) in read.angles().iter().enumerate() {
        theta[marking.point(j) as usize - 1] = a;
    }
    validate_weight(&theta).map_err(FiberError::NotInTheta)
}

/// The weight vector whose pentagon, read along `marking`, has shape `shape`
/// and whose completed triangle has apex `w`.
pub fn fiber_theta5(shape: &PentagonShape, w: &UpperHalfPoint, marking: &Marking) -> Result<WeightVector, FiberError> {
    let w = w.value();
    let f = 1.0 - shape.p * shape.p;
    let g = shape.q * shape.q;
    let one = Complex64::new(1.0, 0.0);
    let dirs = [unit(g - w), one, unit(w - f), unit(w - one), unit(-w)];
    by_point(&turning_angles(&dirs)?, marking)
}

/// The weight vector whose hexahedron, read along `marking`, has shape
/// `shape` and whose completed triangle has apex `w`.
pub fn fiber_theta6(shape: &HexahedronShape, w: &UpperHalfPoint, marking: &Marking) -> Result<WeightVector, FiberError> {
    let w = w.value();
    let one = Complex64::new(1.0, 0.0);
    let x = Complex64::new(shape.p * shape.p, 0.0);
    let y = one + (w - one) * (shape.q * shape.q);
    let z = w * (1.0 - shape.r * shape.r);
    let dirs = [unit(x - w), one, unit(y), unit(w - one), unit(z - one), unit(-w)];
    by_point(&turning_angles(&dirs)?, marking)
}

/// Apex of the completed triangle of `theta` read along `marking`.
pub fn apex_w(theta: &WeightVector, marking: &Marking) -> Result<UpperHalfPoint, FiberError> {
    UpperHalfPoint::new(complete_triangle(theta, marking)?.c)
}

/// The point of the upper half plane at distance `r0` from 0 and `r1`
/// from 1.
pub fn circle_apex(r0: f64, r1: f64) -> Result<UpperHalfPoint, FiberError> {
    let fail = FiberError::NoIntersection { r0, r1 };
    if !((r0 - r1).abs() < 1.0 - TOL_CIRCLE && r0 + r1 > 1.0 + TOL_CIRCLE) {
        return Err(fail);
    }
    let x = (1.0 + r0 * r0 - r1 * r1) / 2.0;
    // Heron's form of r0² − x², free of cancellation for flat triangles.
    let y2 = (r0 + r1 - 1.0) * (1.0 - r0 + r1) * (1.0 + r0 - r1) * (1.0 + r0 + r1) / 4.0;
    if !(y2 > 0.0) {
        return Err(fail);
    }
    UpperHalfPoint::new(Complex64::new(x, y2.sqrt())).map_err(|_| fail)
}

/// Label pair whose pentagon shapes determine the weight vector.
pub fn pentagon_pair() -> (Marking, Marking) {
    (Marking::identity(5), Marking::new(&[2, 1, 4, 3, 5]).expect("valid word"))
}

/// Label pair whose hexahedron shapes determine the weight vector.
pub fn hexahedron_pair() -> (Marking, Marking) {
    (Marking::identity(6), Marking::new(&[2, 1, 4, 3, 5, 6]).expect("valid word"))
}

/// Apex `w` from the shapes seen along `⟨12345⟩` and `⟨21435⟩`:
/// `|w| = Q₁Q₂` and `|w − 1| = P₁P₂`.
pub fn recover_w5(s1: &PentagonShape, s2: &PentagonShape) -> Result<UpperHalfPoint, FiberError> {
    circle_apex(s1.q * s2.q, s1.p * s2.p)
}

/// Apex `w` from the shapes seen along `⟨123456⟩` and `⟨214356⟩`:
/// `|w| = P₁P₂` and `|w − 1| = 1/(Q₁Q₂)`.
pub fn recover_w6(s1: &HexahedronShape, s2: &HexahedronShape) -> Result<UpperHalfPoint, FiberError> {
    circle_apex(s1.p * s2.p, 1.0 / (s1.q * s2.q))
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

fn inconsistent(residual: f64) -> FiberError {
    FiberError::InconsistentPair { residual }
}

/// The weight vector with pentagon shapes `s1` along `⟨12345⟩` and `s2`
/// along `⟨21435⟩`.
pub fn invert5(s1: &PentagonShape, s2: &PentagonShape) -> Result<WeightVector, FiberError> {
    let (m1, m2) = pentagon_pair();
    let w = recover_w5(s1, s2)?;
    let theta = match fiber_theta5(s1, &w, &m1) {
        Ok(t) => t,
        Err(FiberError::NotInTheta(_) | FiberError::SlideCollision { .. }) => return Err(inconsistent(f64::INFINITY)),
        Err(e) => return Err(e),
    };
    let f1 = psi5(&theta, &m1).map_err(|_| inconsistent(f64::INFINITY))?;
    let f2 = psi5(&theta, &m2).map_err(|_| inconsistent(f64::INFINITY))?;
    let residual = max_diff(&[f1.p, f1.q, f2.p, f2.q], &[s1.p, s1.q, s2.p, s2.q]);
    if !(residual <= TOL_VERIFY) {
        return Err(inconsistent(residual));
    }
    Ok(theta)
}

/// The weight vector with hexahedron shapes `s1` along `⟨123456⟩` and `s2`
/// along `⟨214356⟩`. All six parameters are checked, including `R₁` and `R₂`
/// which the recovery of `w` does not use.
pub fn invert6(s1: &HexahedronShape, s2: &HexahedronShape) -> Result<WeightVector, FiberError> {
    let (m1, m2) = hexahedron_pair();
    let w = recover_w6(s1, s2)?;
    let theta = match fiber_theta6(s1, &w, &m1) {
        Ok(t) => t,
        Err(FiberError::NotInTheta(_) | FiberError::SlideCollision { .. }) => return Err(inconsistent(f64::INFINITY)),
        Err(e) => return Err(e),
    };
    let f1 = psi6(&theta, &m1).map_err(|_| inconsistent(f64::INFINITY))?;
    let f2 = psi6(&theta, &m2).map_err(|_| inconsistent(f64::INFINITY))?;
    let given: Vec<f64> = s1.params().into_iter().chain(s2.params()).collect();
    let got: Vec<f64> = f1.params().into_iter().chain(f2.params()).collect();
    let residual = max_diff(&got, &given);
    if !(residual <= TOL_VERIFY) {
        return Err(inconsistent(residual));
    }
    Ok(theta)
}

/// Forward then inverse map of one weight vector; returns the max-norm
/// round-trip error.
pub fn round_trip(theta: &WeightVector) -> Result<f64, FiberError> {
    let back = match theta.n() {
        5 => {
            let (m1, m2) = pentagon_pair();
            invert5(&psi5(theta, &m1)?, &psi5(theta, &m2)?)?
        }
        _ => {
            let (m1, m2) = hexahedron_pair();
            invert6(&psi6(theta, &m1)?, &psi6(theta, &m2)?)?
        }
    };
    Ok(theta.distance_inf(&back))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub index: u64,
    pub theta: Vec<f64>,
    pub reason: String,
    pub error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectivityReport {
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
    pub tol: f64,
    pub max_error: f64,
    pub failures: Vec<TrialFailure>,
}

impl InjectivityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Samples `samples` weight vectors and checks that each is recovered from
/// its two shapes. Trial `i` draws from `trial_rng(seed, i)`, so the report
/// does not depend on how rayon schedules the trials.
pub fn verify_injectivity(n: usize, samples: u64, seed: u64, tol: f64) -> Result<InjectivityReport, WeightError> {
    if n != 5 && n != 6 {
        return Err(WeightError::TooFew(n));
    }
    let trials: Vec<Result<(f64, Option<TrialFailure>), WeightError>> = (0..samples)
        .into_par_iter()
        .map(|index| {
            let theta = sample_weight(n, &mut trial_rng(seed, index))?;
            let fail = |reason: String, error: Option<f64>| TrialFailure {
                index,
                theta: theta.angles().to_vec(),
                reason,
                error,
            };
            Ok(match round_trip(&theta) {
                Ok(err) if err <= tol => (err, None),
                Ok(err) => (err, Some(fail("round-trip error above tolerance".into(), Some(err)))),
                Err(e) => (0.0, Some(fail(format!("{}: {e}", e.kind()), None))),
            })
        })
        .collect();
    let mut max_error = 0.0f64;
    let mut failures = Vec::new();
    for t in trials {
        let (err, fail) = t?;
        max_error = max_error.max(err);
        failures.extend(fail);
    }
    Ok(InjectivityReport { n, samples, seed, tol, max_error, failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::sample_weight_seeded;
    use std::f64::consts::PI;

    #[test]
    fn equal_weight_pentagon_fiber() {
        let shape = psi5(&WeightVector::equal(5), &Marking::identity(5)).unwrap();
        let w = UpperHalfPoint::new(Complex64::new(0.5, (PI / 5.0).tan() / 2.0)).unwrap();
        let theta = fiber_theta5(&shape, &w, &Marking::identity(5)).unwrap();
        assert!(theta.distance_inf(&WeightVector::equal(5)) < 1e-12);
        let apex = apex_w(&WeightVector::equal(5), &Marking::identity(5)).unwrap();
        assert!((apex.value() - w.value()).norm() < 1e-14);
    }

    #[test]
    fn equal_weight_hexahedron_fiber() {
        let shape = HexahedronShape { p: 1.0, q: 1.0, r: 1.0 };
        let w = UpperHalfPoint::new(Complex64::from_polar(1.0, PI / 3.0)).unwrap();
        let theta = fiber_theta6(&shape, &w, &Marking::identity(6)).unwrap();
        assert!(theta.distance_inf(&WeightVector::equal(6)) < 1e-14);
    }

    #[test]
    fn fiber_inverts_forward_map() {
        for n in [5, 6] {
            for seed in 0..50 {
                let theta = sample_weight_seeded(n, seed).unwrap();
                let m = Marking::parse(if n == 5 { "13524" } else { "152634" }).unwrap();
                let w = apex_w(&theta, &m).unwrap();
                let back = if n == 5 {
                    fiber_theta5(&psi5(&theta, &m).unwrap(), &w, &m).unwrap()
                } else {
                    fiber_theta6(&psi6(&theta, &m).unwrap(), &w, &m).unwrap()
                };
                assert!(theta.distance_inf(&back) < 1e-9, "n={n} seed={seed}");
            }
        }
    }

    #[test]
    fn different_apex_different_weight() {
        let shape = psi5(&WeightVector::equal(5), &Marking::identity(5)).unwrap();
        let m = Marking::identity(5);
        let w1 = UpperHalfPoint::new(Complex64::new(0.5, 0.36)).unwrap();
        let w2 = UpperHalfPoint::new(Complex64::new(0.52, 0.37)).unwrap();
        let t1 = fiber_theta5(&shape, &w1, &m).unwrap();
        let t2 = fiber_theta5(&shape, &w2, &m).unwrap();
        assert!(t1.distance_inf(&t2) > 1e-3);
    }

    #[test]
    fn circles() {
        let w = circle_apex(1.0, 1.0).unwrap().value();
        assert!((w - Complex64::new(0.5, 3f64.sqrt() / 2.0)).norm() < 1e-15);
        let w = circle_apex(0.8, 0.9).unwrap().value();
        assert!((w.re - 0.415).abs() < 1e-15);
        assert!((w.im - 0.683941).abs() < 1e-6);
        assert!(matches!(circle_apex(0.3, 0.3), Err(FiberError::NoIntersection { .. })));
        assert!(matches!(circle_apex(0.1, 1.5), Err(FiberError::NoIntersection { .. })));
    }

    #[test]
    fn hexahedron_circles() {
        let s = |p: f64, q: f64| HexahedronShape { p, q, r: 1.0 };
        let w = recover_w6(&s(1.0, 1.0), &s(1.0, 1.0)).unwrap().value();
        assert!((w - Complex64::new(0.5, 3f64.sqrt() / 2.0)).norm() < 1e-15);
        let w = recover_w6(&s(0.9, 2.0), &s(1.0, 1.0)).unwrap().value();
        assert!((w.re - 0.78).abs() < 1e-15);
        assert!((w.im - 0.2016f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn both_labels_share_the_apex() {
        for seed in 0..20 {
            let theta = sample_weight_seeded(5, seed).unwrap();
            let (m1, m2) = pentagon_pair();
            let w1 = apex_w(&theta, &m1).unwrap();
            let w2 = recover_w5(&psi5(&theta, &m1).unwrap(), &psi5(&theta, &m2).unwrap()).unwrap();
            assert!((w1.value() - w2.value()).norm() < 1e-9);
        }
    }

    #[test]
    fn equal_weight_inversion() {
        let (m1, m2) = pentagon_pair();
        let e = WeightVector::equal(5);
        let t = invert5(&psi5(&e, &m1).unwrap(), &psi5(&e, &m2).unwrap()).unwrap();
        assert!(t.distance_inf(&e) < 1e-12);
        let (m1, m2) = hexahedron_pair();
        let e = WeightVector::equal(6);
        let t = invert6(&psi6(&e, &m1).unwrap(), &psi6(&e, &m2).unwrap()).unwrap();
        assert!(t.distance_inf(&e) < 1e-12);
    }

    #[test]
    fn corrupted_r_is_detected() {
        let theta = sample_weight_seeded(6, 4).unwrap();
        let (m1, m2) = hexahedron_pair();
        let mut s1 = psi6(&theta, &m1).unwrap();
        let s2 = psi6(&theta, &m2).unwrap();
        s1.r += 1e-3;
        assert!(matches!(invert6(&s1, &s2), Err(FiberError::InconsistentPair { .. })));
    }

    #[test]
    fn upper_half_plane_only() {
        assert!(UpperHalfPoint::new(Complex64::new(0.3, 0.0)).is_err());
        assert!(UpperHalfPoint::new(Complex64::new(0.3, -1.0)).is_err());
    }

    #[test]
    fn injectivity_report_is_deterministic() {
        let a = verify_injectivity(5, 64, 11, 1e-9).unwrap();
        let b = verify_injectivity(5, 64, 11, 1e-9).unwrap();
        assert_eq!(a, b);
        assert!(a.passed(), "{:?}", a.failures);
        let c = verify_injectivity(6, 64, 11, 1e-9).unwrap();
        assert!(c.passed(), "{:?}", c.failures);
    }
}
