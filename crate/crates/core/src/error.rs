use thiserror::Error;

/// Errors raised by the samplers and diagnostics.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HsError {
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("Cholesky factorization failed after jitter levels {jitter:?}")]
    Cholesky { jitter: Vec<f64> },

    #[error("numerical failure in block {block}: {detail}")]
    Numerical { block: &'static str, detail: String },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("insufficient chain length: {0}")]
    InsufficientLength(String),
}

pub type Result<T> = std::result::Result<T, HsError>;
