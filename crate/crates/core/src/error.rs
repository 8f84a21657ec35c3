use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("non-finite value at flat index {0}")]
    NonFinite(usize),

    #[error("spectrum is not Hermitian: imaginary residual {residual:e} exceeds tolerance {tolerance:e}")]
    SymmetryViolation { residual: f64, tolerance: f64 },

    #[error("tensor file format error at byte {offset}: {reason}")]
    Format { offset: usize, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("scorer unavailable: {0}")]
    ScorerUnavailable(String),

    #[error("scorer protocol error: {0}")]
    Protocol(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
