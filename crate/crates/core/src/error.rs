use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid recurrence: {0}")]
    InvalidRecurrence(String),
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("could not certify enclosures at the maximum precision of {max_bits} bits")]
    PrecisionExhausted { max_bits: u32 },
    #[error("characteristic polynomial has repeated roots")]
    RepeatedRoots,
    #[error("no dominant root")]
    NoDominantRoot,
    #[error("dominant Binet coefficient vanishes")]
    DegenerateDominantCoefficient,
    #[error("quotient by the zero number")]
    DivisionByZeroSymbol,
    #[error("gamma is not a positive real number")]
    NonPositiveGamma,
    #[error("linear form has neither computable gammas nor replay A-values")]
    MissingAValues,
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
    #[error("basis is singular")]
    SingularBasis,
    #[error("reduction inconclusive at the maximum scale for subproblem {subproblem}")]
    ScaleCapExceeded { subproblem: String },
    #[error("fixed-point iteration did not converge")]
    Divergence,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
