use thiserror::Error;

/// Errors raised by the stacks, the runner and the input layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("pop on empty stack")]
    EmptyStack,

    #[error("top({requested}) out of range: stack holds {len} entries")]
    OutOfRange { requested: usize, len: usize },

    #[error("top({requested}) exceeds declared access depth k = {depth}")]
    AccessDepth { requested: usize, depth: usize },

    #[error("non-monotone push: index {index} after {previous}")]
    NonMonotoneIndex { index: u64, previous: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("determinism violation while rebuilding block {first}..={last}: {reason}")]
    DeterminismViolation {
        first: u64,
        last: u64,
        reason: String,
    },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("input error: {0}")]
    Input(String),

    #[error("byte accounting underflow: freeing {freeing} with {live} live")]
    Accounting { freeing: u64, live: u64 },

    #[error("space cap exceeded: {resident} resident records, bound {bound}")]
    SpaceCap { resident: u64, bound: u64 },

    #[error("contract violation: {0}")]
    Contract(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Input(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
