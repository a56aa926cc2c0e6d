//! Shape parameters of the polyhedra: `(P, Q)` for pentagons and `(P, Q, R)`
//! for hexahedra.
//!
//! Both are computed twice, once from the completed Euclidean triangle and
//! once from the Klein chart of the Lorentz model, and the two must agree.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combinatorics::{Marking, WeightVector};
use crate::lorentz::{build_model, LorentzError, TOL_IDEAL};
use crate::planar::{complete_triangle, pentagon_feet, PlanarError};

/// Relative tolerance for the planar and Lorentzian routes to agree.
pub const TOL_ROUTE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModuliError {
    #[error(transparent)]
    Planar(#[from] PlanarError),
    #[error(transparent)]
    Lorentz(#[from] LorentzError),
    #[error("planar value {planar} and Lorentzian value {lorentz} of parameter {index} disagree")]
    RouteDisagreement { index: usize, planar: f64, lorentz: f64 },
    #[error("foot ratio {ratio} of parameter {index} is not positive")]
    NegativeRatio { index: usize, ratio: f64 },
}

impl ModuliError {
    pub fn kind(&self) -> &'static str {
        match self {
            ModuliError::Planar(_) => "PlanarError",
            ModuliError::Lorentz(e) => e.kind(),
            ModuliError::RouteDisagreement { .. } => "RouteDisagreement",
            ModuliError::NegativeRatio { .. } => "NegativeRatio",
        }
    }
}

/// A right-angled pentagon, up to isometry, by its two axis parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PentagonShape {
    pub p: f64,
    pub q: f64,
}

impl PentagonShape {
    /// `0 < P, Q < 1` and `P² + Q² > 1`.
    pub fn is_admissible(&self) -> bool {
        0.0 < self.p && self.p < 1.0 && 0.0 < self.q && self.q < 1.0 && self.p * self.p + self.q * self.q > 1.0
    }
}

/// A hexahedron by its three axis parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HexahedronShape {
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl HexahedronShape {
    pub fn params(&self) -> [f64; 3] {
        [self.p, self.q, self.r]
    }

    /// `min{X, 1/X}` for each parameter.
    pub fn folded(&self) -> [f64; 3] {
        self.params().map(|x| x.min(1.0 / x))
    }

    /// `sgn(X − 1)` with a zero band of half-width `tol`.
    pub fn signs(&self, tol: f64) -> [i8; 3] {
        self.params().map(|x| sign_with_band(x - 1.0, tol))
    }
}

fn sign_with_band(x: f64, tol: f64) -> i8 {
    if x.abs() <= tol {
        0
    } else if x > 0.0 {
        1
    } else {
        -1
    }
}

/// The shape parameters of `theta` read along `marking`, computed by the
/// planar route (feet of the cevians of `T₀`) and by the Lorentzian route
/// (axis intercepts in the Klein chart), without comparing them.
pub fn shape_routes(theta: &WeightVector, marking: &Marking) -> Result<(Vec<f64>, Vec<f64>), ModuliError> {
    let planar = match marking.n() {
        5 => {
            let (f1, f2) = pentagon_feet(theta, marking)?;
            vec![(1.0 - f1).sqrt(), f2.sqrt()]
        }
        _ => {
            let tri = complete_triangle(theta, marking)?;
            let feet = tri.feet.ok_or(PlanarError::UnsupportedSize(marking.n()))?;
            if let Some((index, &ratio)) = feet.iter().enumerate().find(|(_, r)| !(**r > 0.0)) {
                return Err(ModuliError::NegativeRatio { index, ratio });
            }
            feet.iter().map(|f| f.sqrt()).collect()
        }
    };
    let lorentz = build_model(theta, marking)?.axis_intercepts()?;
    Ok((planar, lorentz))
}

/// Largest relative difference between the two routes.
pub fn route_gap(planar: &[f64], lorentz: &[f64]) -> f64 {
    planar
        .iter()
        .zip(lorentz)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs() / a.abs().max(b.abs()).max(1.0)))
}

fn agreed(theta: &WeightVector, marking: &Marking) -> Result<Vec<f64>, ModuliError> {
    let (planar, lorentz) = shape_routes(theta, marking)?;
    for (index, (&a, &b)) in planar.iter().zip(&lorentz).enumerate() {
        if route_gap(&[a], &[b]) > TOL_ROUTE {
            return Err(ModuliError::RouteDisagreement { index, planar: a, lorentz: b });
        }
    }
    Ok(planar)
}

/// The pentagon of `theta` read from `marking`.
pub fn psi5(theta: &WeightVector, marking: &Marking) -> Result<PentagonShape, ModuliError> {
    if marking.n() != 5 {
        return Err(PlanarError::UnsupportedSize(marking.n()).into());
    }
    let v = agreed(theta, marking)?;
    Ok(PentagonShape { p: v[0], q: v[1] })
}

/// The hexahedron of `theta` read from `marking`.
pub fn psi6(theta: &WeightVector, marking: &Marking) -> Result<HexahedronShape, ModuliError> {
    if marking.n() != 6 {
        return Err(PlanarError::UnsupportedSize(marking.n()).into());
    }
    let v = agreed(theta, marking)?;
    Ok(HexahedronShape { p: v[0], q: v[1], r: v[2] })
}

/// The three consecutive-triple angle sums whose position relative to `π`
/// decides `sgn(P − 1)`, `sgn(Q − 1)`, `sgn(R − 1)`: the angles at positions
/// `(5, 6, 1)`, `(1, 2, 3)` and `(3, 4, 5)` of the marking.
pub fn controlling_sums(theta: &WeightVector, marking: &Marking) -> [f64; 3] {
    [marking.run_sum(theta, 4, 3), marking.run_sum(theta, 0, 3), marking.run_sum(theta, 2, 3)]
}

/// Parameter deciding whether adjacent facets `j` and `j + 1` of a
/// hexahedron meet, as an index into `[P, Q, R]`.
pub fn pair_parameter(j: usize) -> usize {
    [1, 0, 2][j % 3]
}

/// How adjacent facets `j` and `j + 1` of a hexahedron sit: `-1` disjoint,
/// `0` tangent at an ideal vertex, `1` meeting along an edge.
pub fn adjacent_pair_state(shape: &HexahedronShape, j: usize, tol: f64) -> i8 {
    let s = shape.signs(tol)[pair_parameter(j)];
    if j.is_multiple_of(2) {
        -s
    } else {
        s
    }
}

/// One face of a hexahedron.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceShape {
    /// Facet index, 0-based.
    pub facet: usize,
    /// `"(12)"` style name relative to `⟨123456⟩`.
    pub name: String,
    /// Number of sides, counting ideal vertices as zero-length sides' ends.
    pub sides: usize,
    pub ideal_vertices: usize,
}

impl FaceShape {
    pub fn kind(&self) -> &'static str {
        match self.sides {
            3 => "right triangle",
            4 => "tri-right quadrilateral",
            _ => "right pentagon",
        }
    }
}

/// Combinatorial type of a hexahedron.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HexahedronType {
    /// `(sgn(P−1), sgn(Q−1), sgn(R−1))` with a zero band.
    pub signs: [i8; 3],
    /// `'a'` when no parameter exceeds 1, then `'b'`, `'c'`, `'d'` by the
    /// number that do. Ideal parameters count as not exceeding.
    pub letter: char,
    /// Parameters within the band of 1, in `[P, Q, R]` order.
    pub ideal: [bool; 3],
    pub faces: Vec<FaceShape>,
}

/// Face inventory and sign type of a hexahedron.
pub fn classify_hexahedron(shape: &HexahedronShape) -> HexahedronType {
    classify_hexahedron_with(shape, TOL_IDEAL)
}

pub fn classify_hexahedron_with(shape: &HexahedronShape, tol: f64) -> HexahedronType {
    let signs = shape.signs(tol);
    let above = signs.iter().filter(|&&s| s > 0).count();
    let states: Vec<i8> = (0..6).map(|j| adjacent_pair_state(shape, j, tol)).collect();
    let faces = (0..6)
        .map(|j| {
            let around = [states[(j + 5) % 6], states[j]];
            FaceShape {
                facet: j,
                name: format!("({}{})", j + 1, (j + 1) % 6 + 1),
                sides: 3 + around.iter().filter(|&&s| s > 0).count(),
                ideal_vertices: around.iter().filter(|&&s| s == 0).count(),
            }
        })
        .collect();
    HexahedronType {
        signs,
        letter: (b'a' + above as u8) as char,
        ideal: signs.map(|s| s == 0),
        faces,
    }
}

impl fmt::Display for HexahedronType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "type ({}) signs {:?}:", self.letter, self.signs)?;
        for face in &self.faces {
            write!(f, " {} {}", face.name, face.kind())?;
            if face.ideal_vertices > 0 {
                write!(f, " [{} ideal]", face.ideal_vertices)?;
            }
        }
        Ok(())
    }
}

/// Position of facet `j` in the list returned by [`pentagon_side_lengths`].
pub const PENTAGON_SIDE_SLOT: [usize; 5] = [0, 3, 1, 4, 2];

/// Klein-model distance between two points of the unit disk.
pub fn klein_distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    // sinh²d = (|a − b|² − (a × b)²) / ((1 − |a|²)(1 − |b|²)); unlike the
    // cosh form this keeps full relative precision for short segments.
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let cross = a[0] * b[1] - a[1] * b[0];
    let num = dx * dx + dy * dy - cross * cross;
    let den = (1.0 - a[0] * a[0] - a[1] * a[1]) * (1.0 - b[0] * b[0] - b[1] * b[1]);
    (num.max(0.0) / den).sqrt().asinh()
}

/// The five side lengths of a right pentagon, ordered as the sides in the
/// facets `x_{i₁}, x_{i₃}, x_{i₅}, x_{i₂}, x_{i₄}`. The first two are the
/// axis sides, of lengths `artanh P` and `artanh Q`.
///
/// In the Klein disk the pentagon has vertices `O = (0, 0)`, `A = (P, 0)`,
/// `B = (0, Q)`, `C = (P, (1 − P²)/Q)` and `D = ((1 − Q²)/P, Q)`; the list is
/// `OA, OB, BD, DC, CA`. The last three come from closed forms in `P² + Q² − 1`,
/// which stay accurate when the pentagon is close to having an ideal vertex.
pub fn pentagon_side_lengths(shape: &PentagonShape) -> [f64; 5] {
    let (p, q) = (shape.p, shape.q);
    let cp = (1.0 - p) * (1.0 + p);
    let cq = (1.0 - q) * (1.0 + q);
    let excess = p.mul_add(p, q.mul_add(q, -1.0));
    [
        p.atanh(),
        q.atanh(),
        (cq / excess).sqrt().asinh(),
        (excess / (cp * cq)).sqrt().asinh(),
        (cp / excess).sqrt().asinh(),
    ]
}

/// Side length of facet `j` (0-based) of a right pentagon.
pub fn pentagon_side(shape: &PentagonShape, j: usize) -> f64 {
    pentagon_side_lengths(shape)[PENTAGON_SIDE_SLOT[j % 5]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{sample_weight_seeded, validate_weight};
    use std::f64::consts::PI;

    const PHI: f64 = 1.618_033_988_749_895;

    #[test]
    fn equal_weight_pentagon() {
        let s = psi5(&WeightVector::equal(5), &Marking::identity(5)).unwrap();
        let expected = PHI.powf(-0.5);
        assert!((s.p - expected).abs() < 1e-12);
        assert!((s.q - expected).abs() < 1e-12);
        assert!((s.p - 0.786151).abs() < 1e-6);
        for l in pentagon_side_lengths(&s) {
            assert!((l - PHI.acosh()).abs() < 1e-12);
        }
    }

    #[test]
    fn pentagon_shapes_are_admissible() {
        for seed in 0..200 {
            let theta = sample_weight_seeded(5, seed).unwrap();
            let s = psi5(&theta, &Marking::identity(5)).unwrap();
            assert!(s.is_admissible(), "{s:?}");
            let l = pentagon_side_lengths(&s);
            assert!((l[0] - s.p.atanh()).abs() < 1e-12);
            assert!((l[1] - s.q.atanh()).abs() < 1e-12);
            assert!(l.iter().all(|x| x.is_finite() && *x > 0.0));
        }
    }

    #[test]
    fn equal_weight_hexahedron() {
        let s = psi6(&WeightVector::equal(6), &Marking::identity(6)).unwrap();
        for x in s.params() {
            assert!((x - 1.0).abs() < 1e-12);
        }
        let t = classify_hexahedron(&s);
        assert_eq!(t.ideal, [true; 3]);
        assert!(t.faces.iter().all(|f| f.sides == 3 && f.ideal_vertices == 2));
    }

    #[test]
    fn tilted_hexahedron_signs() {
        let (a, b) = (PI / 3.0 - 0.05, PI / 3.0 + 0.05);
        let theta = validate_weight(&[a, a, a, b, b, b]).unwrap();
        let s = psi6(&theta, &Marking::identity(6)).unwrap();
        assert!(s.q < 1.0);
        assert!(s.r > 1.0);
    }

    #[test]
    fn type_a() {
        let t = classify_hexahedron(&HexahedronShape { p: 0.9, q: 0.9, r: 0.9 });
        assert_eq!(t.letter, 'a');
        assert!(t.faces.iter().all(|f| f.sides == 4 && f.ideal_vertices == 0));
    }

    #[test]
    fn type_b() {
        let t = classify_hexahedron(&HexahedronShape { p: 1.2, q: 0.9, r: 0.9 });
        assert_eq!(t.letter, 'b');
        let sides = |name: &str| t.faces.iter().find(|f| f.name == name).unwrap().sides;
        assert_eq!(sides("(34)"), 5);
        assert_eq!(sides("(23)"), 5);
        assert_eq!(sides("(12)"), 4);
        assert_eq!(sides("(45)"), 4);
        assert_eq!(sides("(56)"), 3);
        assert_eq!(sides("(61)"), 3);
    }

    #[test]
    fn pair_states_match_dihedral_angles() {
        for seed in 0..30 {
            let theta = sample_weight_seeded(6, seed).unwrap();
            let m = Marking::identity(6);
            let s = psi6(&theta, &m).unwrap();
            let model = build_model(&theta, &m).unwrap();
            for j in 0..6 {
                let meets = model.dihedral_angle(j, (j + 1) % 6).is_ok();
                assert_eq!(meets, adjacent_pair_state(&s, j, 1e-9) > 0, "seed {seed} pair {j}");
            }
        }
    }

    #[test]
    fn side_lengths_match_klein_vertices() {
        for seed in 0..100 {
            let theta = sample_weight_seeded(5, seed).unwrap();
            let s = psi5(&theta, &Marking::identity(5)).unwrap();
            let (p, q) = (s.p, s.q);
            let o = [0.0, 0.0];
            let a = [p, 0.0];
            let b = [0.0, q];
            let c = [p, (1.0 - p * p) / q];
            let d = [(1.0 - q * q) / p, q];
            let klein = [klein_distance(o, a), klein_distance(o, b), klein_distance(b, d), klein_distance(d, c), klein_distance(c, a)];
            for (x, y) in pentagon_side_lengths(&s).iter().zip(klein) {
                assert!((x - y).abs() < 1e-9 * y.max(1.0), "seed {seed}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn side_slots_cover_all_facets() {
        let mut seen = PENTAGON_SIDE_SLOT;
        seen.sort();
        assert_eq!(seen, [0, 1, 2, 3, 4]);
    }
}
