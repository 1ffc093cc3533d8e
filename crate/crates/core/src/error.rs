use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("unsupported dimension {0} (only 2 and 3 are supported)")]
    UnsupportedDimension(usize),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("nonlinear expression: product of two unknown-dependent terms")]
    Nonlinear,

    #[error("singular point: negative power of r evaluated at r = 0")]
    Singular,

    #[error("cannot combine coefficients from different quadratic fields")]
    MixedRadicands,

    #[error("potential is not of the supported form: {0}")]
    PotentialForm(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("invalid JSON: {0}")]
    Json(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
