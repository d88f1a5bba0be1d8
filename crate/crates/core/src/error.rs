use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not Hermitian: defect {defect:.3e} exceeds {limit:.3e}")]
    NotHermitian { defect: f64, limit: f64 },
    #[error("matrix is not positive semidefinite: eigenvalue {min_eig:.3e} below {limit:.3e}")]
    NotPsd { min_eig: f64, limit: f64 },
    #[error("state has zero trace")]
    ZeroTrace,
    #[error("zero vector")]
    ZeroVector,
    #[error("block {index} is singular and cannot be normalized")]
    SingularBlock { index: usize },
    #[error("invalid tolerance: {0}")]
    Tolerance(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("search budget exhausted: {0}")]
    SearchExhausted(String),
    #[error("numerical inconsistency: {0}")]
    Numerical(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
