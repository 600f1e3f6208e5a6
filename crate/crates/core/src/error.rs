use thiserror::Error;

/// Errors produced by matrix kernels, solvers, certificate checkers and the
/// benchmark harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A pivot fell below the singularity threshold during factorization.
    #[error("matrix is numerically singular")]
    SingularMatrix,

    /// An iterate left the representable range; the iteration is diverging.
    #[error("iterate became non-finite at iteration {iteration}")]
    NonFinite { iteration: usize },

    #[error("right-hand side has zero norm; relative residual is undefined")]
    ZeroRhs,

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("matrix is not symmetric positive definite (mu_min = {mu_min})")]
    NotSpd { mu_min: f64 },

    #[error("matrix is not an H+-matrix")]
    NotHPlus,

    #[error("sweep grid contains no points")]
    EmptyGrid,

    #[error("no sweep grid point converged")]
    AllDiverged,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
