use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("angle denominator must be positive")]
    ZeroDenominator,

    #[error("invalid decimal integer `{0}`")]
    ParseInt(String),

    #[error("partial sum of order {requested} exceeds the stored truncation bound {available}")]
    TruncationExceeded { requested: u64, available: u64 },

    #[error("coefficient series is not even: coefficient at {degree} differs from its mirror")]
    AsymmetricSeries { degree: i64 },

    #[error("level index n = {0} is below the minimum of 50")]
    LevelTooSmall(u64),

    #[error("level invariant violated: {0}")]
    LevelInvariant(String),

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("chain rejected: {0}")]
    ChainInvalid(String),

    #[error("partial sum needs {needed} contributing terms, above the cap of {cap}")]
    TooManyTerms { needed: String, cap: u64 },

    #[error("matrix is not positive definite: leading minor of order {0} is not positive")]
    NotPositiveDefinite(usize),

    #[error("invalid simulation configuration: {0}")]
    InvalidConfig(String),

    #[error("requested size {requested} exceeds the limit {limit}")]
    SizeLimit { requested: usize, limit: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
