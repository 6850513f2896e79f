use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("requested bound {requested} exceeds sieve capacity {limit}")]
    CapacityExceeded { requested: u64, limit: u64 },

    #[error("alphabet mismatch: {0} vs {1}")]
    AlphabetMismatch(String, String),

    #[error("basis index {index} needs cylinders of length {needed}, only depth {depth} is stored")]
    DepthExceeded {
        index: usize,
        needed: usize,
        depth: usize,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
