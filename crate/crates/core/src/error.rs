use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} requires degree >= {min}, got {degree}")]
    InvalidDegree {
        degree: usize,
        min: usize,
        what: &'static str,
    },
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("matrix is singular at pivot {pivot}")]
    Singular { pivot: usize },
    #[error("non-finite matrix or right-hand side entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("coefficient {name} violates positivity at x = {x}: value {value}")]
    CoefficientNotPositive {
        name: &'static str,
        x: f64,
        value: f64,
    },
    #[error("point {0} lies outside the domain")]
    OutOfDomain(f64),
    #[error("unknown problem `{0}`")]
    UnknownProblem(String),
    #[error("problem has no exact solution decomposition")]
    MissingDecomposition,
    #[error("{0}")]
    Unsupported(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
