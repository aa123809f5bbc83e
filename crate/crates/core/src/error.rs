use thiserror::Error;

/// Domain and precondition failures raised by the core routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite argument to {0}")]
    NonFinite(&'static str),
    #[error("chirp deviation parameter must be positive, got {0}")]
    BadDeviation(f64),
    #[error("lag {lag} out of range for sequence of length {len}")]
    LagOutOfRange { lag: i64, len: usize },
    #[error("sequence lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("empty sequence")]
    Empty,
    #[error("all-zero sequence has no defined PMEPR")]
    ZeroSequence,
    #[error("coefficient {0} is not unimodular")]
    NotUnimodular(&'static str),
    #[error("oversampling factor {got} below the minimum {min}")]
    Oversampling { got: usize, min: usize },
    #[error("band [{ld}, {lu}] is invalid (need ld < 0 < lu)")]
    BadBand { ld: i64, lu: i64 },
    #[error("fraction {0} must lie in (0, 1]")]
    BadFraction(f64),
    #[error("rank {rank} out of range for C({m}, {l})")]
    RankOutOfRange { rank: u128, m: usize, l: usize },
    #[error("invalid index set: {0}")]
    BadIndices(&'static str),
    #[error("invalid payload layout: {0}")]
    BadLayout(&'static str),
    #[error("bit vector has length {got}, expected {expected}")]
    BitLength { got: usize, expected: usize },
    #[error("FFT size {n} is smaller than the occupied band {m}")]
    GridTooSmall { n: usize, m: usize },
    #[error("noise variance must be non-negative, got {0}")]
    NegativeVariance(f64),
    #[error("invalid channel profile: {0}")]
    BadProfile(&'static str),
    #[error("length {got} does not match expected {expected}")]
    BadLength { got: usize, expected: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
