//! Complex dense linear algebra and one-dimensional quadrature primitives.

pub mod contour;
pub mod matrix;
pub mod quadrature;
pub mod sum;

pub use num_complex::Complex64 as C64;

pub use contour::{contour_integral, contour_integral_reduced, ContourPath};
pub use matrix::{det_from_fn, ComplexMatrix};
pub use quadrature::{build_rule, gated, gated_escalating, gated_integral, gauss_rule, relative_gap, Gated, QuadratureKind, QuadratureRule, GATE_TOL};

/// Scalar type used throughout the toolkit.
pub type ComplexScalar = C64;

/// Relative closeness of two complex points, `|a - b| / max(|a|, |b|, 1)`.
pub fn relative_separation(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

/// `|a - b| / max(|b|, floor)`.
pub fn rel_err(a: C64, b: C64, floor: f64) -> f64 {
    (a - b).norm() / b.norm().max(floor)
}
