use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown domain `{0}`")]
    UnknownDomain(String),

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("matrix is structurally singular (column {column})")]
    StructurallySingular { column: usize },

    #[error("zero pivot encountered at row {row}")]
    SingularPivot { row: usize },

    #[error("linear solve residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    Inaccurate { residual: f64, tolerance: f64 },

    #[error("malformed input at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
