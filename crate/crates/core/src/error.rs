use thiserror::Error;

/// Errors raised by constructors and checkers in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty vector")]
    Empty,

    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },

    #[error("invalid probability vector: {0}")]
    InvalidProbability(String),

    #[error("exponent {0} is not in [1, inf]")]
    InvalidExponent(f64),

    #[error("1/{r} != 1/{p} + 1/{q}")]
    InvalidHolderTriple { r: f64, p: f64, q: f64 },

    #[error("Holder triples disagree on r: {0} vs {1}")]
    MismatchedR(f64, f64),

    #[error("invalid weight vector: {0}")]
    InvalidWeights(String),

    #[error("rank k = {k} out of range 1..={n}")]
    RankOutOfRange { k: usize, n: usize },

    #[error("n = {n} exceeds the enumeration cap {cap}")]
    EnumerationCap { n: usize, cap: usize },

    #[error("points {i} and {j} are too close for divided differences (gap {gap:e})")]
    DegenerateNodes { i: usize, j: usize, gap: f64 },

    #[error("vector is not mean-zero (coordinate sum {0:e})")]
    NotMeanZero(f64),

    #[error("not a Laplacian: {0}")]
    NotLaplacian(String),

    #[error("entry {index} = {value:e} is too close to zero to invert")]
    NotInvertible { index: usize, value: f64 },

    #[error("replication length {m} exceeds cap {cap}")]
    ReplicationCap { m: u64, cap: u64 },

    #[error("cannot rationalize: {0}")]
    Rationalize(String),

    #[error("invalid piecewise-linear function: {0}")]
    InvalidPiecewise(String),

    #[error("invalid search config: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, LabError>;

pub(crate) fn ensure_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(LabError::DimensionMismatch { expected, found });
    }
    Ok(())
}
