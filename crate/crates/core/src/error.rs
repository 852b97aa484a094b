use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An exponent left the supported single-word range.
    #[error("exponent out of range")]
    ExponentOverflow,

    #[error("dimension mismatch: {left_rows}x{left_cols} times {right_rows}x{right_cols}")]
    DimensionMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("strided view out of bounds")]
    StrideOutOfBounds,
}

pub type Result<T> = std::result::Result<T, Error>;
