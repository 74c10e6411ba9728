use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid base {0}: not a prime")]
    NotPrime(u64),

    #[error("base {0} exceeds the supported prime range (p <= {max})", max = crate::digits::MAX_PRIME)]
    PrimeTooLarge(u64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("arithmetic overflow while computing {0}")]
    Overflow(&'static str),

    #[error("run index {alpha} out of range (decomposition has {runs} runs)")]
    RunIndex { alpha: usize, runs: usize },

    #[error("k = {k} is below the first table bracket 2l+2 = {min}")]
    Bracket { k: u64, min: u64 },

    #[error("inconsistent data in degree {degree}: {left} versus {right}")]
    Inconsistent {
        degree: u64,
        left: String,
        right: String,
    },

    #[error("cannot merge graded groups: {0}")]
    Incompatible(String),

    #[error("malformed graded group json: {0}")]
    Parse(String),
}
