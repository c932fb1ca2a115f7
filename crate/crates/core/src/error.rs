use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("point set is not full-dimensional")]
    NotFullDimensional,
    #[error("point is not in the interior")]
    NotInterior,
    #[error("start point is not an interior sublattice point")]
    StartNotInterior,
    #[error("no interior sublattice point")]
    EmptyInterior,
    #[error("constraint system is unbounded")]
    Unbounded,
    #[error("no approximation exists within the search ceiling")]
    NoApproximation,
    #[error("coordinates are not sorted ascending")]
    InputNotSorted,
    #[error("coordinates do not sum to one")]
    SumNotOne,
    #[error("jump vector has no run starts")]
    NoRunStarts,
    #[error("dimension {0} is too small for this family")]
    DimensionTooSmall(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid number `{0}`")]
    InvalidNumber(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported format version `{0}`")]
    VersionMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
