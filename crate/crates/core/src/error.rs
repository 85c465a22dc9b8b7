use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("negative valuation: {0} has p in its denominator")]
    NegativeValuation(String),
    #[error("mismatched modulus: {0}^{1} vs {2}^{3}")]
    MismatchedModulus(u64, u32, u64, u32),
    #[error("{value} is not invertible modulo {p}^{precision}")]
    NonInvertible { value: u64, p: u64, precision: u32 },
    #[error("{0} is not p-integral")]
    NotPIntegral(String),
    #[error("argument {n} out of range [1, {bound}]")]
    OutOfRange { n: u64, bound: u64 },
    #[error("precision {p}^{precision} exceeds the supported residue range")]
    PrecisionTooLarge { p: u64, precision: u32 },
    #[error("precision loss: cancellation consumed {lost} of {available} guard digits")]
    PrecisionLoss { lost: u32, available: u32 },
    #[error("degenerate denominator at (n, k) = ({0}, {1})")]
    DegenerateDenominator(i64, i64),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
