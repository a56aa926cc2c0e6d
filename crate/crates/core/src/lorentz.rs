//! The space of closed polygons with fixed external angles as a Minkowski
//! space, and the hyperbolic polyhedron cut out by the edge-length facets.
//!
//! Closed polygons with external angles `θ_{i₁}, …, θ_{iₙ}` form an
//! `(n−2)`-dimensional space `E`; signed area is a quadratic form of
//! signature `(1, n−3)` on it. The positive cone `{all x_{i_j} > 0}`
//! projectivized is a hyperbolic polyhedron with `n` facets.
//!
//! Internally a polygon is stored by its coordinates in a fixed basis of `E`.
//! The basis comes from complete pivoting on the two real closing equations:
//! the pivot pair `(p, q)` maximizes `|dir_p × dir_q|` (lowest indices on
//! ties) and every remaining edge is a free coordinate. The basis vector for a
//! free edge `f` has `x_f = 1`, the other free lengths zero, and the pivot
//! lengths forced by closure. The coordinates of a polygon are therefore just
//! its free edge lengths.
//!
//! The affine chart used for the Klein model comes from the triangle areas
//! `x = √Area T₀`, `u = √Area T₁`, `v = √Area T₂` (and `w = √Area T₃` for
//! hexagons). Each of these is the square of a linear functional; the
//! functionals are extracted from the polarized triangle areas and signed to
//! be positive on the polygon circumscribed about the unit circle.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use thiserror::Error;

use crate::combinatorics::{Marking, WeightVector};
use crate::planar::{edge_frame, EdgeFrame, PlanarError};

/// Band around tangency used to classify ideal vertices and tangent facets.
pub const TOL_IDEAL: f64 = 1e-9;

/// Relative tolerance of the internal consistency checks run by
/// [`build_model`].
const TOL_MODEL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LorentzError {
    #[error(transparent)]
    Planar(#[from] PlanarError),
    #[error("area form has signature ({positive}, {negative}), expected (1, {expected})")]
    SignatureMismatch { positive: usize, negative: usize, expected: usize },
    #[error("area of triangle T{triangle} is not a square of a linear form (residual {residual:e})")]
    NotPerfectSquare { triangle: usize, residual: f64 },
    #[error("area form does not split as x² − Σ (residual {residual:e})")]
    AreaDecomposition { residual: f64 },
    #[error("edge vector does not close up (residual {residual:e})")]
    NotClosed { residual: f64 },
    #[error("edge vector has {got} entries, expected {expected}")]
    WrongLength { got: usize, expected: usize },
    #[error("vector is not timelike (area {area:e})")]
    NotTimelike { area: f64 },
    #[error("vector lies on the negative sheet (x = {x:e})")]
    WrongSheet { x: f64 },
    #[error("facet plane does not meet axis {axis}")]
    NoIntersection { axis: usize },
    #[error("facets {j} and {k} are disjoint (cosh-value {value})")]
    FacetsDisjoint { j: usize, k: usize, value: f64 },
    #[error("facet index {index} out of range for n = {n}")]
    BadFacet { index: usize, n: usize },
    #[error("facet conditions {0:?} do not cut out a single ray")]
    Degenerate(Vec<usize>),
}

impl LorentzError {
    pub fn kind(&self) -> &'static str {
        match self {
            LorentzError::Planar(_) => "PlanarError",
            LorentzError::SignatureMismatch { .. } => "SignatureMismatch",
            LorentzError::NotPerfectSquare { .. } => "NotPerfectSquare",
            LorentzError::AreaDecomposition { .. } => "AreaDecomposition",
            LorentzError::NotClosed { .. } => "NotClosed",
            LorentzError::WrongLength { .. } => "WrongLength",
            LorentzError::NotTimelike { .. } => "NotTimelike",
            LorentzError::WrongSheet { .. } => "WrongSheet",
            LorentzError::NoIntersection { .. } => "NoIntersection",
            LorentzError::FacetsDisjoint { .. } => "FacetsDisjoint",
            LorentzError::BadFacet { .. } => "BadFacet",
            LorentzError::Degenerate(_) => "Degenerate",
        }
    }
}

/// A point of the Klein model: `(u/x, v/x)` or `(u/x, v/x, w/x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KleinPoint {
    pub coords: Vec<f64>,
}

impl KleinPoint {
    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn is_ideal(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }
}

/// How two facet planes sit relative to each other.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FacetRelation {
    Intersecting { angle: f64 },
    Tangent,
    Disjoint { distance: f64 },
}

/// Basis of `E` by complete pivoting on the closing equations.
fn closed_basis(frame: &EdgeFrame) -> ([usize; 2], Vec<usize>, DMatrix<f64>) {
    let d = frame.dirs();
    let n = d.len();
    let cross = |a: usize, b: usize| d[a].re * d[b].im - d[a].im * d[b].re;
    let mut pivots = [0, 1];
    let mut best = -1.0;
    for p in 0..n {
        for q in p + 1..n {
            let c = cross(p, q).abs();
            if c > best {
                best = c;
                pivots = [p, q];
            }
        }
    }
    let [p, q] = pivots;
    let free: Vec<usize> = (0..n).filter(|&j| j != p && j != q).collect();
    let det = cross(p, q);
    let mut basis = DMatrix::zeros(n, n - 2);
    for (col, &f) in free.iter().enumerate() {
        // α·d_p + β·d_q = −d_f by Cramer's rule.
        let alpha = -(d[f].re * d[q].im - d[f].im * d[q].re) / det;
        let beta = -(d[p].re * d[f].im - d[p].im * d[f].re) / det;
        basis[(f, col)] = 1.0;
        basis[(p, col)] = alpha;
        basis[(q, col)] = beta;
    }
    (pivots, free, basis)
}

/// Gram matrix of the quadratic form `q` restricted to the columns of
/// `basis`, by polarization.
fn polarize(basis: &DMatrix<f64>, q: impl Fn(&[f64]) -> f64) -> DMatrix<f64> {
    let m = basis.ncols();
    let col = |a: usize| basis.column(a).iter().copied().collect::<Vec<_>>();
    let diag: Vec<f64> = (0..m).map(|a| q(&col(a))).collect();
    let mut g = DMatrix::zeros(m, m);
    for a in 0..m {
        g[(a, a)] = diag[a];
        for b in a + 1..m {
            let sum: Vec<f64> = col(a).iter().zip(col(b)).map(|(x, y)| x + y).collect();
            let v = (q(&sum) - diag[a] - diag[b]) / 2.0;
            g[(a, b)] = v;
            g[(b, a)] = v;
        }
    }
    g
}

fn signature_of(gram: &DMatrix<f64>) -> (Vec<f64>, usize, usize) {
    let eig = SymmetricEigen::new(gram.clone());
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cut = scale * 1e-12;
    let pos = values.iter().filter(|&&v| v > cut).count();
    let neg = values.iter().filter(|&&v| v < -cut).count();
    (values, pos, neg)
}

/// Signature `(positive, negative)` of the area form for any `n ≥ 4`.
pub fn area_signature(theta: &WeightVector, marking: &Marking) -> Result<(usize, usize), LorentzError> {
    let frame = edge_frame(theta, marking)?;
    let (_, _, basis) = closed_basis(&frame);
    let gram = polarize(&basis, |x| frame.area(x));
    let (_, pos, neg) = signature_of(&gram);
    Ok((pos, neg))
}

/// Triangles whose areas give the chart `(x, u, v[, w])`, as edge triples
/// for [`EdgeFrame::extension_triangle`], each listed counterclockwise.
fn chart_triangles(n: usize) -> Vec<[usize; 3]> {
    match n {
        5 => vec![[1, 3, 4], [1, 0, 4], [3, 2, 1]],
        6 => vec![[1, 3, 5], [1, 0, 5], [3, 2, 1], [5, 4, 3]],
        _ => Vec::new(),
    }
}

/// `E_{p,θ}` with its area form and Klein chart. Immutable once built.
#[derive(Debug, Clone)]
pub struct LorentzModel {
    frame: EdgeFrame,
    pivots: [usize; 2],
    free: Vec<usize>,
    basis: DMatrix<f64>,
    gram: DMatrix<f64>,
    gram_inv: DMatrix<f64>,
    chart: DMatrix<f64>,
    eigenvalues: Vec<f64>,
}

/// Builds the model for a pentagon or hexagon label and checks its
/// signature, the perfect-square property of the chart triangles and the
/// identity `Area = x² − u² − v² (− w²)`.
pub fn build_model(theta: &WeightVector, marking: &Marking) -> Result<LorentzModel, LorentzError> {
    let frame = edge_frame(theta, marking)?;
    let n = frame.n();
    if n != 5 && n != 6 {
        return Err(PlanarError::UnsupportedSize(n).into());
    }
    let (pivots, free, basis) = closed_basis(&frame);
    let m = n - 2;
    let gram = polarize(&basis, |x| frame.area(x));
    let (eigenvalues, pos, neg) = signature_of(&gram);
    if pos != 1 || neg != n - 3 {
        return Err(LorentzError::SignatureMismatch { positive: pos, negative: neg, expected: n - 3 });
    }

    // Circumscribed polygon: edge j has length tan(θ_{i_j}/2) + tan(θ_{i_{j+1}}/2).
    let half_tan = |j: usize| (marking.angle(theta, j) / 2.0).tan();
    let reference: DVector<f64> = DVector::from_iterator(m, free.iter().map(|&j| half_tan(j) + half_tan(j + 1)));

    let mut chart = DMatrix::zeros(m, m);
    let mut split = gram.clone();
    for (t, edges) in chart_triangles(n).into_iter().enumerate() {
        let qt = polarize(&basis, |x| {
            frame
                .extension_triangle(x, edges)
                .map(|tri| crate::planar::polygon_area(&tri))
                .unwrap_or(f64::NAN)
        });
        let (row, residual) = rank_one_factor(&qt);
        let scale = qt.amax().max(f64::MIN_POSITIVE);
        if !(residual <= TOL_MODEL * scale) {
            return Err(LorentzError::NotPerfectSquare { triangle: t, residual });
        }
        let sign = if row.dot(&reference) < 0.0 { -1.0 } else { 1.0 };
        let row = row * sign;
        let outer = &row * row.transpose();
        if t == 0 {
            split -= outer;
        } else {
            split += outer;
        }
        chart.set_row(t, &row.transpose());
    }
    let residual = split.amax();
    if residual > TOL_MODEL * gram.amax() {
        return Err(LorentzError::AreaDecomposition { residual });
    }
    let gram_inv = gram.clone().try_inverse().ok_or(LorentzError::SignatureMismatch {
        positive: pos,
        negative: neg,
        expected: n - 3,
    })?;
    Ok(LorentzModel { frame, pivots, free, basis, gram, gram_inv, chart, eigenvalues })
}

/// Factors a positive semidefinite rank-one matrix as `g·gᵀ`; returns `g`
/// and the max-entry residual.
fn rank_one_factor(q: &DMatrix<f64>) -> (DVector<f64>, f64) {
    let m = q.nrows();
    let k = (0..m).max_by(|&a, &b| q[(a, a)].total_cmp(&q[(b, b)])).unwrap_or(0);
    let pivot = q[(k, k)];
    if !(pivot > 0.0) {
        return (DVector::zeros(m), f64::INFINITY);
    }
    let g: DVector<f64> = q.column(k) / pivot.sqrt();
    let residual = (q - &g * g.transpose()).amax();
    (g, residual)
}

/// Null vector of `m − 1` covectors in dimension `m` by signed minors.
fn null_vector(rows: &[DVector<f64>], m: usize) -> DVector<f64> {
    let k = rows.len();
    debug_assert_eq!(k + 1, m);
    let a = DMatrix::from_fn(k, m, |r, c| rows[r][c]);
    DVector::from_fn(m, |i, _| {
        let minor = a.clone().remove_column(i);
        let det = if k == 0 { 1.0 } else { minor.determinant() };
        if i % 2 == 0 { det } else { -det }
    })
}

impl LorentzModel {
    pub fn n(&self) -> usize {
        self.frame.n()
    }

    pub fn dim(&self) -> usize {
        self.n() - 2
    }

    pub fn frame(&self) -> &EdgeFrame {
        &self.frame
    }

    pub fn marking(&self) -> &Marking {
        self.frame.marking()
    }

    pub fn theta(&self) -> &WeightVector {
        self.frame.theta()
    }

    /// Pivot edges solved for by the closing equations.
    pub fn pivots(&self) -> [usize; 2] {
        self.pivots
    }

    /// `n × (n−2)` matrix whose columns are closed edge-length vectors.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Gram matrix of the area form in the basis.
    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// Eigenvalues of the Gram matrix, largest first.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Rows are the chart functionals `x, u, v[, w]` on basis coordinates.
    pub fn chart(&self) -> &DMatrix<f64> {
        &self.chart
    }

    /// Basis coordinates of a closed edge-length vector.
    pub fn coordinates(&self, lengths: &[f64]) -> Result<DVector<f64>, LorentzError> {
        let n = self.n();
        if lengths.len() != n {
            return Err(LorentzError::WrongLength { got: lengths.len(), expected: n });
        }
        let residual = self.frame.closure(lengths).norm();
        let scale = lengths.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        if residual > 1e-9 * scale {
            return Err(LorentzError::NotClosed { residual });
        }
        Ok(DVector::from_iterator(self.dim(), self.free.iter().map(|&j| lengths[j])))
    }

    /// Edge lengths of the polygon with basis coordinates `c`.
    pub fn lengths(&self, c: &DVector<f64>) -> Vec<f64> {
        (&self.basis * c).iter().copied().collect()
    }

    pub fn inner(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        a.dot(&(&self.gram * b))
    }

    /// Area of the polygon with edge lengths `lengths`.
    pub fn area(&self, lengths: &[f64]) -> Result<f64, LorentzError> {
        let c = self.coordinates(lengths)?;
        Ok(self.inner(&c, &c))
    }

    /// Chart values `(x, u, v[, w])` of basis coordinates `c`.
    pub fn chart_values(&self, c: &DVector<f64>) -> DVector<f64> {
        &self.chart * c
    }

    /// Klein-model image of a polygon with positive area.
    pub fn klein_point(&self, lengths: &[f64]) -> Result<KleinPoint, LorentzError> {
        let c = self.coordinates(lengths)?;
        self.klein_of(&c)
    }

    pub fn klein_of(&self, c: &DVector<f64>) -> Result<KleinPoint, LorentzError> {
        let area = self.inner(c, c);
        if !(area > 0.0) {
            return Err(LorentzError::NotTimelike { area });
        }
        let vals = self.chart_values(c);
        if !(vals[0] > 0.0) {
            return Err(LorentzError::WrongSheet { x: vals[0] });
        }
        Ok(KleinPoint { coords: vals.iter().skip(1).map(|v| v / vals[0]).collect() })
    }

    /// Covector of the facet functional `x_{i_{j+1}}` on basis coordinates.
    pub fn facet_covector(&self, j: usize) -> Result<DVector<f64>, LorentzError> {
        if j >= self.n() {
            return Err(LorentzError::BadFacet { index: j, n: self.n() });
        }
        Ok(self.basis.row(j).transpose())
    }

    /// Generator of the ray where the listed facet functionals vanish,
    /// oriented so that `x > 0`. Needs `n − 3` facets.
    pub fn facet_ray(&self, facets: &[usize]) -> Result<DVector<f64>, LorentzError> {
        let m = self.dim();
        if facets.len() + 1 != m {
            return Err(LorentzError::Degenerate(facets.to_vec()));
        }
        let rows = facets.iter().map(|&j| self.facet_covector(j)).collect::<Result<Vec<_>, _>>()?;
        let v = null_vector(&rows, m);
        let norm = v.amax();
        if !(norm > 0.0) {
            return Err(LorentzError::Degenerate(facets.to_vec()));
        }
        let v = v / norm;
        let x = self.chart_values(&v)[0];
        if x.abs() < 1e-14 {
            return Err(LorentzError::Degenerate(facets.to_vec()));
        }
        Ok(if x < 0.0 { -v } else { v })
    }

    /// Vertex of the polyhedron where the listed facets meet, normalized to
    /// area one.
    pub fn vertex(&self, facets: &[usize]) -> Result<DVector<f64>, LorentzError> {
        let v = self.facet_ray(facets)?;
        let area = self.inner(&v, &v);
        if !(area > 0.0) {
            return Err(LorentzError::NotTimelike { area });
        }
        Ok(v / area.sqrt())
    }

    /// Euclidean position of the facet-ray in the affine chart `x = 1`; may
    /// lie outside the unit ball.
    pub fn chart_point(&self, facets: &[usize]) -> Result<Vec<f64>, LorentzError> {
        let v = self.facet_ray(facets)?;
        let vals = self.chart_values(&v);
        Ok(vals.iter().skip(1).map(|c| c / vals[0]).collect())
    }

    /// The shape parameters read off the axes of the Klein chart.
    ///
    /// Pentagons: `P` is the height of the vertex `x_{i₁} = x_{i₄} = 0` on the
    /// `v` axis, `Q` the position of `x_{i₃} = x_{i₅} = 0` on the `u` axis.
    /// Hexahedra: `P, Q, R` are the intercepts of the facet planes `x_{i₆} = 0`,
    /// `x_{i₂} = 0`, `x_{i₄} = 0` with the `u, v, w` axes; they may exceed 1.
    pub fn axis_intercepts(&self) -> Result<Vec<f64>, LorentzError> {
        let specs: &[(&[usize], usize)] = match self.n() {
            5 => &[(&[0, 3], 1), (&[2, 4], 0)],
            _ => &[(&[2, 4, 5], 0), (&[0, 1, 4], 1), (&[0, 2, 3], 2)],
        };
        specs
            .iter()
            .enumerate()
            .map(|(axis, (facets, coord))| {
                let p = self.chart_point(facets).map_err(|_| LorentzError::NoIntersection { axis })?;
                let off_axis = p.iter().enumerate().filter(|&(k, _)| k != *coord).fold(0.0f64, |m, (_, v)| m.max(v.abs()));
                let value = p[*coord];
                if !(value > 0.0) || off_axis > 1e-9 * value.max(1.0) {
                    return Err(LorentzError::NoIntersection { axis });
                }
                Ok(value)
            })
            .collect()
    }

    /// Hyperbolic distance between two polygons of positive area.
    pub fn hyperbolic_distance(&self, e1: &[f64], e2: &[f64]) -> Result<f64, LorentzError> {
        let a = self.coordinates(e1)?;
        let b = self.coordinates(e2)?;
        self.distance_of(&a, &b)
    }

    pub fn distance_of(&self, a: &DVector<f64>, b: &DVector<f64>) -> Result<f64, LorentzError> {
        let aa = self.inner(a, a);
        let bb = self.inner(b, b);
        for area in [aa, bb] {
            if !(area > 0.0) {
                return Err(LorentzError::NotTimelike { area });
            }
        }
        let xa = self.chart_values(a)[0];
        let xb = self.chart_values(b)[0];
        if xa * xb <= 0.0 {
            return Err(LorentzError::WrongSheet { x: xa.min(xb) });
        }
        let c = self.inner(a, b) / (aa * bb).sqrt();
        Ok(c.max(1.0).acosh())
    }

    /// `⟨N_j, N_k⟩ / √(⟨N_j,N_j⟩⟨N_k,N_k⟩)` for the inward facet normals
    /// `N_j = G⁻¹ ℓ_j`. In `(−1, 1)` the facets meet at the angle whose
    /// cosine this is; above 1 they are ultraparallel.
    pub fn facet_cosine(&self, j: usize, k: usize) -> Result<f64, LorentzError> {
        let lj = self.facet_covector(j)?;
        let lk = self.facet_covector(k)?;
        let nj = &self.gram_inv * &lj;
        let nk = &self.gram_inv * &lk;
        let jj = lj.dot(&nj);
        let kk = lk.dot(&nk);
        Ok(lj.dot(&nk) / (jj * kk).sqrt())
    }

    pub fn facet_relation(&self, j: usize, k: usize, tol_ideal: f64) -> Result<FacetRelation, LorentzError> {
        let c = self.facet_cosine(j, k)?;
        Ok(if (c - 1.0).abs() <= tol_ideal {
            FacetRelation::Tangent
        } else if c > 1.0 {
            FacetRelation::Disjoint { distance: c.acosh() }
        } else if c < -1.0 - tol_ideal {
            FacetRelation::Disjoint { distance: (-c).acosh() }
        } else {
            FacetRelation::Intersecting { angle: c.clamp(-1.0, 1.0).acos() }
        })
    }

    /// Interior dihedral angle between facets `j` and `k`; `0` for tangent
    /// facets.
    pub fn dihedral_angle(&self, j: usize, k: usize) -> Result<f64, LorentzError> {
        match self.facet_relation(j, k, TOL_IDEAL)? {
            FacetRelation::Intersecting { angle } => Ok(angle),
            FacetRelation::Tangent => Ok(0.0),
            FacetRelation::Disjoint { .. } => {
                Err(LorentzError::FacetsDisjoint { j, k, value: self.facet_cosine(j, k)? })
            }
        }
    }
}

/// Facet pairs that the geometry forces to meet at right angles: all
/// non-adjacent pairs. For pentagons these are the five vertices; for
/// hexahedra the three opposite pairs and the six pairs at the two finite
/// vertices.
pub fn right_angle_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for j in 0..n {
        for k in j + 2..n {
            if !(j == 0 && k == n - 1) {
                out.push((j, k));
            }
        }
    }
    out
}
