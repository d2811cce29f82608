use thiserror::Error;

/// Errors raised by the relay DMT library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is singular or not positive definite")]
    SingularMatrix,

    #[error("subset size {m} is outside [1, {max}]")]
    InvalidSubsetSize { m: usize, max: usize },

    #[error("candidate path count {count} exceeds cap {cap}")]
    TooManyPaths { count: u128, cap: u128 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("antenna selection needs Mt >= Mr (got Mt={mt}, Mr={mr})")]
    RequiresMtGeMr { mt: usize, mr: usize },

    #[error("no feasible compression noise within the inflation cap")]
    NoFeasibleNoise,

    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
