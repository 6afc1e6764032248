use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("bit length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid bit string: {0}")]
    InvalidBits(String),

    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),

    #[error("degree {degree} outside supported range {min}..={max}")]
    UnsupportedDegree { degree: u32, min: u32, max: u32 },

    #[error("factorization of 2^{0}-1 exceeded the iteration budget")]
    FactorBudget(u32),

    #[error("invalid key generator configuration: {0}")]
    InvalidConfig(String),

    #[error("bit source exhausted: needed {needed} more bits")]
    Underrun { needed: usize },

    #[error("weak key part: all-zero seed in reset cycle {cycle}")]
    ZeroSeed { cycle: usize },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("empty key list")]
    NoKeys,

    #[error("schedule space {required} exceeds search budget {budget}")]
    BudgetExceeded { required: String, budget: u64 },

    #[error("infeasible design point: {0}")]
    Infeasible(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
