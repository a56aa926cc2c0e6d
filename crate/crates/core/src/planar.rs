//! Euclidean constructions in the complex plane.
//!
//! Everything here is normalized the same way: the edge `x_{i₂}` points along
//! `+1`, and the completed triangle `T₀` has its base on `[0, 1]` with the
//! apex in the upper half plane.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::combinatorics::{Marking, WeightVector};

/// Margin used to reject degenerate external angles.
pub const ANGLE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanarError {
    #[error("weight vector has {theta} angles but the label has {label} points")]
    DimensionMismatch { theta: usize, label: usize },
    #[error("construction needs n = 5 or n = 6, got {0}")]
    UnsupportedSize(usize),
    #[error("external angle {angle} at vertex {vertex} is outside (0, π)")]
    DegenerateTriangle { vertex: usize, angle: f64 },
    #[error("feet {f1} and {f2} do not satisfy 0 < f1 < f2 < 1")]
    FootOutsideBase { f1: f64, f2: f64 },
    #[error("lines are parallel")]
    Parallel,
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Intersection of the lines `p + s·d` and `q + t·e`.
pub fn intersect_lines(p: Complex64, d: Complex64, q: Complex64, e: Complex64) -> Option<Complex64> {
    let den = cross(d, e);
    if den.abs() < 1e-300 {
        return None;
    }
    let s = cross(q - p, e) / den;
    Some(p + d * s)
}

/// Signed shoelace area, positive for counterclockwise vertex order.
pub fn polygon_area(vertices: &[Complex64]) -> f64 {
    let m = vertices.len();
    (0..m).map(|k| cross(vertices[k], vertices[(k + 1) % m])).sum::<f64>() / 2.0
}

/// Unit edge directions of polygons with the prescribed external angles.
#[derive(Debug, Clone)]
pub struct EdgeFrame {
    marking: Marking,
    theta: WeightVector,
    dirs: Vec<Complex64>,
}

impl EdgeFrame {
    pub fn marking(&self) -> &Marking {
        &self.marking
    }

    pub fn theta(&self) -> &WeightVector {
        &self.theta
    }

    pub fn n(&self) -> usize {
        self.dirs.len()
    }

    /// `dirs()[j]` is the direction of edge `x_{i_{j+1}}`.
    pub fn dirs(&self) -> &[Complex64] {
        &self.dirs
    }

    /// `Σ x_j·dirs[j]`; zero exactly for closed polygons.
    pub fn closure(&self, lengths: &[f64]) -> Complex64 {
        lengths.iter().zip(&self.dirs).map(|(x, d)| d * *x).sum()
    }

    /// Vertices of the polygon with edge lengths `lengths`, starting with the
    /// origin at the tail of edge 0.
    pub fn vertices(&self, lengths: &[f64]) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.n());
        let mut at = Complex64::new(0.0, 0.0);
        for (x, d) in lengths.iter().zip(&self.dirs) {
            out.push(at);
            at += d * *x;
        }
        out
    }

    /// Signed area of the polygon with edge lengths `lengths`.
    pub fn area(&self, lengths: &[f64]) -> f64 {
        polygon_area(&self.vertices(lengths))
    }

    /// Triangle cut out by the lines carrying edges `edges[0..3]`, listed as
    /// `(L₀∩L₁, L₁∩L₂, L₂∩L₀)`.
    pub fn extension_triangle(&self, lengths: &[f64], edges: [usize; 3]) -> Result<[Complex64; 3], PlanarError> {
        let v = self.vertices(lengths);
        let line = |j: usize| (v[j], self.dirs[j]);
        let meet = |a: usize, b: usize| {
            let (p, d) = line(a);
            let (q, e) = line(b);
            intersect_lines(p, d, q, e).ok_or(PlanarError::Parallel)
        };
        Ok([meet(edges[0], edges[1])?, meet(edges[1], edges[2])?, meet(edges[2], edges[0])?])
    }
}

/// Builds the edge frame of `marking` under `theta`. Direction `j` is
/// `exp(i·Σ_{k≤j} θ_{i_k})`, rotated so that edge `x_{i₂}` points along `+1`.
pub fn edge_frame(theta: &WeightVector, marking: &Marking) -> Result<EdgeFrame, PlanarError> {
    let n = marking.n();
    if theta.n() != n {
        return Err(PlanarError::DimensionMismatch { theta: theta.n(), label: n });
    }
    let offset = marking.angle(theta, 0) + marking.angle(theta, 1);
    let mut acc = 0.0;
    let dirs = (0..n)
        .map(|j| {
            acc += marking.angle(theta, j);
            Complex64::from_polar(1.0, acc - offset)
        })
        .collect();
    Ok(EdgeFrame { marking: marking.clone(), theta: theta.clone(), dirs })
}

/// The triangle `T₀` completing the polygon, normalized to `a = 0`, `b = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleCompletion {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    /// External angles at `a`, `b`, `c`.
    pub external: [f64; 3],
    /// For hexagons: signed ratios `ac′/ab`, `ba′/bc`, `cb′/ca` of the feet of
    /// the parallels to `x_{i₁}` through `c`, to `x_{i₃}` through `a` and to
    /// `x_{i₅}` through `b`.
    pub feet: Option<[f64; 3]>,
}

/// Completes the pentagon or hexagon to `T₀` by extending the even edges
/// (`x_{i₂}, x_{i₄}, x_{i₅}` for pentagons, `x_{i₂}, x_{i₄}, x_{i₆}` for
/// hexagons).
pub fn complete_triangle(theta: &WeightVector, marking: &Marking) -> Result<TriangleCompletion, PlanarError> {
    let frame = edge_frame(theta, marking)?;
    let n = frame.n();
    let ang = |j: usize| marking.angle(theta, j);
    let external = match n {
        5 => [ang(0) + ang(1), ang(2) + ang(3), ang(4)],
        6 => [ang(0) + ang(1), ang(2) + ang(3), ang(4) + ang(5)],
        _ => return Err(PlanarError::UnsupportedSize(n)),
    };
    for (vertex, &angle) in external.iter().enumerate() {
        if !(ANGLE_EPS..PI - ANGLE_EPS).contains(&angle) {
            return Err(PlanarError::DegenerateTriangle { vertex, angle });
        }
    }
    let alpha = PI - external[0];
    let beta = PI - external[1];
    let a = Complex64::new(0.0, 0.0);
    let b = Complex64::new(1.0, 0.0);
    // Law of sines: |ac| = |ab|·sin β / sin γ with γ = π − α − β.
    let c = Complex64::from_polar(beta.sin() / (alpha + beta).sin(), alpha);
    let feet = if n == 6 {
        let d = frame.dirs();
        let meet = |p, dp, q, dq| intersect_lines(p, dp, q, dq).ok_or(PlanarError::Parallel);
        let c1 = meet(c, d[0], a, b - a)?;
        let a1 = meet(a, d[2], b, c - b)?;
        let b1 = meet(b, d[4], c, a - c)?;
        Some([
            ((c1 - a) / (b - a)).re,
            ((a1 - b) / (c - b)).re,
            ((b1 - c) / (a - c)).re,
        ])
    } else {
        None
    };
    Ok(TriangleCompletion { a, b, c, external, feet })
}

/// Base coordinates of the two pentagon cevians from the apex of `T₀`: `f1`
/// runs parallel to `x_{i₃}` and equals `1 − P²`; `f2` runs parallel to
/// `x_{i₁}` and equals `Q²`.
pub fn pentagon_feet(theta: &WeightVector, marking: &Marking) -> Result<(f64, f64), PlanarError> {
    if marking.n() != 5 {
        return Err(PlanarError::UnsupportedSize(marking.n()));
    }
    let tri = complete_triangle(theta, marking)?;
    let frame = edge_frame(theta, marking)?;
    let d = frame.dirs();
    let base = tri.b - tri.a;
    let foot = |dir| intersect_lines(tri.c, dir, tri.a, base).map(|p| p.re).ok_or(PlanarError::Parallel);
    let f1 = foot(d[2])?;
    let f2 = foot(d[0])?;
    if !(0.0 < f1 && f1 < f2 && f2 < 1.0) {
        return Err(PlanarError::FootOutsideBase { f1, f2 });
    }
    Ok((f1, f2))
}
