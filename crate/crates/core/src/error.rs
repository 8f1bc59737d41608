use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("parse error at line {line}: {msg}")]
    ParseLine { line: usize, msg: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degree bound violated: {0}")]
    DegreeBound(String),

    #[error("operation needs a univariate polynomial, got {0} variables")]
    NotUnivariate(usize),

    #[error("zero polynomial has no isolated roots")]
    ZeroPolynomial,

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("malformed SDPA data at line {line}: {msg}")]
    Sdpa { line: usize, msg: String },

    #[error("extraction failed: {0}")]
    Extraction(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
