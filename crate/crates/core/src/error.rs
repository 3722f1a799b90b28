use thiserror::Error;

/// Errors raised by the arithmetic and class-group routines.
///
/// `Internal` marks a broken invariant that should be impossible for valid
/// input; callers (the CLI in particular) treat it differently from bad input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("negative input: {0}")]
    Negative(String),
    #[error("zero input not allowed")]
    Zero,
    #[error("{0} is not a quadratic discriminant")]
    NotDiscriminant(String),
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(String),
    #[error("not a discriminant-{0} irrational")]
    NotIrrational(String),
    #[error("imprimitive")]
    Imprimitive,
    #[error("arguments are not coprime: gcd({0}, {1}) != 1")]
    NotCoprime(String, String),
    #[error("size guard exceeded: {0}")]
    GuardExceeded(String),
    #[error("matrix has zero lower-left entry")]
    ZeroLowerLeft,
    #[error("matrix determinant is {0}, expected 1")]
    NotUnimodular(String),
    #[error("fundamental unit of discriminant {0} has norm -1")]
    NormMinusOne(String),
    #[error("discriminant mismatch: {0} vs {1}")]
    DiscriminantMismatch(String, String),
    #[error("expected a positive leading coefficient, got {0}")]
    NotPositive(String),
    #[error("leading coefficient {0} is even")]
    EvenLeading(String),
    #[error("{0} is not a prime congruent to 3 mod 4")]
    BadPrime(String),
    #[error("character undefined on representative")]
    CharacterUndefined,
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
