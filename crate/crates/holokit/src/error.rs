use thiserror::Error;

/// Errors produced by the holonomy estimation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// An overlap (or other matrix requiring a well-defined polar factor)
    /// has a smallest singular value below the configured tolerance.
    #[error("singular overlap at step {index:?}: sigma_min = {sigma_min:e} < tol = {tol:e}")]
    SingularOverlap {
        /// Step index within a sequence, when applicable.
        index: Option<usize>,
        sigma_min: f64,
        tol: f64,
    },

    #[error("rank-deficient columns at step {index:?}")]
    RankDeficient { index: Option<usize> },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    #[error("frame path claims a closed subspace but projector closure residual is {residual:e}")]
    NotClosed { residual: f64 },

    #[error("effective-gate convention mismatch: expected {expected}, got {got}")]
    ConventionMismatch { expected: String, got: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error in {location}: {message}")]
    Parse { location: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
