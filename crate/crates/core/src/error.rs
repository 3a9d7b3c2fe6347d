use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("{what}: size {n} exceeds cap {cap}")]
    Capacity {
        what: &'static str,
        n: usize,
        cap: usize,
    },

    #[error("grid error: {0}")]
    Grid(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("search budget of {budget} nodes exceeded")]
    Budget { budget: u64 },

    #[error(transparent)]
    Format(#[from] FormatError),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}

/// Failures decoding the binary instance format.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("corrupt header: {0}")]
    CorruptHeader(String),

    #[error("unsupported format version {found} (expected {expected})")]
    VersionMismatch { found: u16, expected: u16 },

    #[error("type mismatch: expected {expected}, found {found}")]
    TypeMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("truncated payload: needed {needed} more bytes at offset {offset}")]
    Truncated { offset: usize, needed: usize },

    #[error("invalid payload: {0}")]
    InvalidPayload(String),
}
