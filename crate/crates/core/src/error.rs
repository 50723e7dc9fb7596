use thiserror::Error;

/// Every fallible operation in the crate reports one of these.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DswError {
    #[error("pole: argument {re} + {im}i is a non-positive integer")]
    Pole { re: f64, im: f64 },
    #[error("series did not converge after {terms} terms")]
    NonConvergence { terms: usize },
    #[error("result overflows double precision: {0}")]
    Overflow(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported mass: m^2 = {m2} must exceed 1/4")]
    UnsupportedMass { m2: f64 },
    #[error("evanescent mode: mu = {mu} must exceed 1 for a propagating wave")]
    EvanescentMode { mu: f64 },
    #[error(
        "regime violated: epsilon^2 - m^2 = {lhs} is not >> j^2 (needs > {rhs}); \
         the far-field recipe requires epsilon*R >> j"
    )]
    Regime { lhs: f64, rhs: f64 },
    #[error("validity error: {0}")]
    Validity(String),
    #[error("integration step failure at {at}: {reason}")]
    StepFailure { at: f64, reason: String },
    #[error("unfactored input: {0}")]
    UnfactoredInput(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, DswError>;

impl DswError {
    pub(crate) fn pole(z: num_complex::Complex64) -> Self {
        DswError::Pole { re: z.re, im: z.im }
    }
}
