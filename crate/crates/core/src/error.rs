use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("matrix has {rows} rows and {cols} columns; factorize the transpose instead (rows must not exceed columns)")]
    Orientation { rows: usize, cols: usize },

    #[error("degenerate basis: every column of the left factor is zero")]
    DegenerateBasis,

    #[error(transparent)]
    Format(#[from] FormatError),
}

/// Errors specific to reading and writing PO2F files.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormatError {
    #[error("truncated input: {0}")]
    Truncated(String),

    #[error("bad magic: expected \"PO2F\", found {0:?}")]
    BadMagic(Vec<u8>),

    #[error("unsupported format version {0}")]
    UnsupportedVersion(u8),

    #[error("unknown encoding flag {0:#04x}")]
    UnknownEncoding(u8),

    #[error("index out of range: {what} = {index} but bound is {bound}")]
    IndexOutOfRange {
        what: &'static str,
        index: u64,
        bound: u64,
    },

    #[error("malformed content: {0}")]
    Malformed(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn mismatch(expected: impl ToString, found: impl ToString) -> Error {
    Error::DimensionMismatch {
        expected: expected.to_string(),
        found: found.to_string(),
    }
}
