use thiserror::Error;

/// Errors raised by the library. Indices are 0-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("column {0} has (near) zero norm")]
    ZeroColumn(usize),
    #[error("column {0} is not unit-normalized")]
    NotNormalized(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite entry at position {0}")]
    NonFinite(usize),
    #[error("iteration cap reached in {0}")]
    MaxIterations(&'static str),
    #[error("cone is not pointed")]
    NotPointed,
    #[error("shifted ray {0} is (near) zero")]
    DegenerateRay(usize),
    #[error("base direction is not strictly positive on ray {0}")]
    InvalidBase(usize),
    #[error("matrix is singular or not positive definite")]
    SingularA,
    #[error("invalid loss specification: {0}")]
    InvalidSpec(String),
    #[error("gamma must lie in [0, 1]")]
    InvalidGamma,
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("points do not affinely span the ambient space")]
    DegenerateDimension,
    #[error("point is not in the conic hull of the polytope")]
    NotInPos,
    #[error("condition violated: {0}")]
    ConditionViolated(String),
    #[error("solver did not converge")]
    NotConverged,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
