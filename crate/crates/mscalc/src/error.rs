use thiserror::Error;

/// Errors raised by the engine. `Malformed` maps to CLI exit code 2.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("argument error: {0}")]
    Argument(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("unsolvable: {0}")]
    Unsolvable(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("arity {0} exceeds declared maximum {1}")]
    ArityBound(usize, usize),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
