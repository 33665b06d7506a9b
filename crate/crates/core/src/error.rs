use thiserror::Error;

/// Errors shared across the crate.
#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{0} is not invertible modulo {1}")]
    NonInvertible(i64, u64),

    #[error("series has no invertible leading coefficient")]
    NonInvertibleSeries,

    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),

    #[error("truncation too small: need grid index {needed}, have {have}")]
    InsufficientPrecision { needed: i64, have: i64 },

    #[error("fewer than {needed} nonzero terms available ({have})")]
    InsufficientData { needed: usize, have: usize },

    #[error("cusp space of weight {0} is empty")]
    EmptySpace(u32),

    #[error("inconsistent input: {0}")]
    InconsistentInput(String),

    #[error("excluded case: {0}")]
    ExcludedCase(String),

    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),

    #[error("series mismatch at grid index {0}")]
    MismatchAt(i64),

    #[error("cache file corrupt: {0}")]
    CacheCorrupt(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
