use thiserror::Error;

/// Errors raised by the imputation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("schema line {line}: {message}")]
    Schema { line: usize, message: String },

    #[error("data row {row}, column {column}: {message}")]
    Data { row: usize, column: usize, message: String },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("column `{0}` has no observed values")]
    EmptyColumn(String),

    #[error("index {index} out of range for {len} objects")]
    OutOfRange { index: usize, len: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("infeasible request: {0}")]
    Infeasible(String),

    /// An internal consistency check failed. Never expected on valid input.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
