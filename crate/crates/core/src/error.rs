use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole in denominator: ({param})_{index} vanishes")]
    PoleInDenominator { param: f64, index: usize },

    #[error("series did not converge after {terms} terms (last relative term {last_ratio:e})")]
    NoConvergence { terms: usize, last_ratio: f64 },

    #[error("Pochhammer product overflowed: ({a})_{k}")]
    Overflow { a: f64, k: usize },

    #[error("negative exponent evaluated at the origin")]
    PoleAtZero,

    #[error("matrix does not have the quaternion pattern (deviation {deviation:e})")]
    NotAQuaternionMatrix { deviation: f64 },

    #[error("quadrature under-resolved: {0}")]
    QuadratureUnderResolved(String),

    #[error("tridiagonal eigensolver failed to converge at index {0}")]
    EigenFailure(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
