use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A target Gram matrix has an eigenvalue below the PSD tolerance.
    #[error("gram matrix is not realizable: eigenvalue {eigenvalue:e} is negative")]
    NotRealizable { eigenvalue: f64 },

    #[error("only {available} orthogonal directions available, {requested} requested")]
    Capacity { requested: usize, available: usize },

    #[error("scenario generation failed after {attempts} attempts; binding constraint: {constraint}")]
    GenerationFailed { attempts: usize, constraint: String },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("validation error at `{field}`: {message}")]
    Validation { field: String, message: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }
}
