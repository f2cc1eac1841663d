use thiserror::Error;

/// Errors produced by construction and field operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid signature: {0}")]
    Signature(String),

    #[error("signature mismatch between operands")]
    SignatureMismatch,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("lattice mismatch: {0}")]
    LatticeMismatch(String),

    #[error("invalid chart: {0}")]
    Chart(String),

    #[error("input rejected: {0}")]
    InvalidInput(String),

    #[error("form degree {0} out of range 0..={1}")]
    DegreeOutOfRange(usize, usize),

    #[error("probe system ill-conditioned at site {site}: |det| = {det:.3e}")]
    IllConditionedProbe { site: usize, det: f64 },

    #[error("configuration rejected: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
