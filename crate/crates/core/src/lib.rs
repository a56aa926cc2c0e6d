//! Hyperbolic polyhedra built from weighted points on a circle.
//!
//! A weight vector `θ` of `n` angles and a cyclic labelling of the points
//! determine a space of closed polygons. Its area form is Lorentzian, and the
//! polygons with positive edges form a hyperbolic polyhedron: a right
//! pentagon for five points, a hexahedron for six.
//!
//! - [`combinatorics`]: weight vectors, labels, degenerate configurations.
//! - [`planar`]: polygons with prescribed external angles.
//! - [`lorentz`]: the area form and the Klein model of the polyhedron.
//! - [`moduli`]: shape parameters and classification.
//! - [`fiber`]: weights with a given shape, and inversion from two shapes.
//! - [`complex`]: one polyhedron per label, glued along matching facets.
//! - [`verify`]: randomized checks of the whole pipeline.
//!
//! ```
//! use polymod::combinatorics::sample_weight_seeded;
//! use polymod::fiber::{invert6, hexahedron_pair};
//! use polymod::moduli::psi6;
//!
//! let theta = sample_weight_seeded(6, 1).unwrap();
//! let (m1, m2) = hexahedron_pair();
//! let back = invert6(&psi6(&theta, &m1).unwrap(), &psi6(&theta, &m2).unwrap()).unwrap();
//! assert!(back.distance_inf(&theta) < 1e-9);
//! ```

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod combinatorics;
pub mod complex;
pub mod fiber;
pub mod json;
pub mod lorentz;
pub mod moduli;
pub mod planar;
pub mod verify;

// The guide's code blocks run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/weights.md")]
    mod weights {}
    #[doc = include_str!("../../../book/src/area-form.md")]
    mod area_form {}
    #[doc = include_str!("../../../book/src/shapes.md")]
    mod shapes {}
    #[doc = include_str!("../../../book/src/inversion.md")]
    mod inversion {}
    #[doc = include_str!("../../../book/src/complex.md")]
    mod complex {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
