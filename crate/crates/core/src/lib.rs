//! Expectation values of products and ratios of characteristic polynomials,
//! Schur-polynomial averages and correlation kernels for polynomial
//! ensembles of random matrices, with brute-force oracles to check them.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod ensemble;
pub mod invertible;
pub mod numerics;
pub mod oracle;
pub mod specfun;
pub mod vandermonde;

pub use error::{Error, Result};
pub use numerics::{ComplexMatrix, ComplexScalar, ContourPath, QuadratureKind, QuadratureRule, C64};
pub use ensemble::{Domain, FrobeniusCoords, PolynomialEnsemble, YoungDiagram};
pub use invertible::{InvertibleEnsemble, RatioQuery, SIntegration, UContour};
pub use oracle::{McEstimate, SampleBatch};
pub use specfun::Nu;
