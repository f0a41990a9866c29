use alloc::string::String;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("state spaces must be non-empty (got s1={s1}, s2={s2})")]
    EmptyStateSpace { s1: usize, s2: usize },
    #[error("state spaces differ: ({0}, {1}) vs ({2}, {3})")]
    SpaceMismatch(usize, usize, usize, usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid shape ({p},{q}): {reason}")]
    InvalidShape { p: usize, q: usize, reason: &'static str },
    #[error("data length {got} does not match expected length {expected}")]
    DataLength { expected: usize, got: usize },
    #[error("tensor with {entries} entries exceeds the memory cap of {cap} entries")]
    MemoryCap { entries: u128, cap: usize },
    #[error("enumeration over {edges} edges exceeds the bound of {bound} edges")]
    EnumerationBound { edges: usize, bound: usize },
    #[error("weight entries must be finite and non-negative")]
    NegativeWeight,
    #[error("weight is identically zero")]
    ZeroWeight,
    #[error("partition function vanishes")]
    ZeroPartition,
    #[error("matrix is reducible (positivity pattern is not strongly connected)")]
    Reducible,
    #[error("matrix must be square and non-negative")]
    NotNonNegativeSquare,
    #[error("power iteration did not converge after {0} iterations (spectral shift already applied)")]
    NoConvergence(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("emission law for side {side} does not sum to one (sum = {sum})")]
    NonStochastic { side: char, sum: f64 },
    #[error("gauge values must be strictly positive")]
    NonPositiveGauge,
    #[error("diagonal transpose requires s1 == s2")]
    TransposeNeedsEqualSpaces,
    #[error("offsets ({n1},{n2},{m1},{m2}) leave no inner rectangle in a ({p},{q}) rectangle")]
    InvalidOffsets { n1: usize, n2: usize, m1: usize, m2: usize, p: usize, q: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = core::result::Result<T, Error>;
