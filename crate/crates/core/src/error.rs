use thiserror::Error;

/// Errors raised by field, matrix, code and construction operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field order {0} exceeds the supported maximum")]
    FieldTooLarge(u64),
    #[error("modulus is reducible over its base field")]
    Reducible,
    #[error("basis elements are linearly dependent")]
    DependentBasis,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("shape violation: {0}")]
    Shape(String),
    #[error("enumeration of {needed} items exceeds budget {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("field of order {q} too small: need at least {needed}")]
    FieldTooSmall { q: u32, needed: u32 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
