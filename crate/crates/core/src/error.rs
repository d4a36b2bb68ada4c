use thiserror::Error;

/// Errors raised by every module of the crate.
///
/// Variants are split into input validation failures and capacity failures so
/// front ends can map them to distinct exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("index subset is empty")]
    EmptySubset,

    #[error("index {index} out of range for {len} exponents")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("arity mismatch: expected {expected}, got {actual}")]
    ArityMismatch { expected: usize, actual: usize },

    #[error("operation requires a {expected} tensor")]
    FieldMismatch { expected: &'static str },

    #[error("non-finite result in {0}")]
    NonFinite(&'static str),

    #[error("capacity exceeded: {what} needs {required}, budget is {budget}")]
    Capacity {
        what: &'static str,
        required: u128,
        budget: u128,
    },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::Capacity { .. })
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Invalid(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
