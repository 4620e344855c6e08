use thiserror::Error;

/// Errors raised by the algebraic and numeric kernels.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A structural identity failed; the message names the equation.
    #[error("invariant violated: {0}")]
    Invariant(String),
    /// Floating-point stage failure (non-SPD input, singular matrix, ...).
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_mismatch(what: &str, expected: usize, got: usize) -> Error {
    Error::DimensionMismatch(format!("{what}: expected {expected}, got {got}"))
}
