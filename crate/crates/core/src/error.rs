use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Variants split into two families: precondition violations (bad inputs)
/// and numerical failures (a quadrature or series that did not settle).
/// [`Error::is_numerical`] tells them apart.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is singular")]
    Singular,

    #[error("matrix is ill-conditioned (condition estimate {0:.3e})")]
    IllConditioned(f64),

    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("points are not pairwise distinct: {0}")]
    Coincident(String),

    #[error("point {0} lies on the real axis")]
    OnRealAxis(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} did not converge (gap {gap:.3e}, tolerance {tol:.1e})")]
    NonConvergence { what: String, gap: f64, tol: f64 },

    #[error("series for {0} did not converge within the term cap")]
    SeriesNonConvergence(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::SeriesNonConvergence(_)
                | Error::NonFinite(_)
                | Error::IllConditioned(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
