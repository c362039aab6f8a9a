use thiserror::Error;

/// Every failure the toolkit reports.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("grid too small: {0}")]
    GridTooSmall(String),
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("crack leaves the body: {0}")]
    CrackOutsideBody(String),
    #[error("radius {radius} is below the resolution limit {limit}")]
    BelowResolution { radius: f64, limit: f64 },
    #[error("ball of radius {0} leaves the grid")]
    BallOutsideGrid(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("field exceeds its bound: {0}")]
    UnboundedField(String),
    #[error("incompatible boundary data: {0}")]
    Compatibility(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("empty set: {0}")]
    EmptySet(String),
    #[error("linear solver failed: {0}")]
    Solver(String),
    #[error("malformed field file: {0}")]
    Format(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by the caller's input rather than a broken invariant.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Compatibility(_) | Error::Solver(_))
    }
}
