//! Crate-wide error type.
//!
//! Operations distinguish three failure classes:
//! * invalid inputs (`NonPrimeModulus`, `WidthOutOfRange`, ...),
//! * resource guards (`TooLarge`, `OrderTooLarge`), which keep every
//!   enumeration within desk scale instead of silently truncating,
//! * verification failures (`Internal`), raised when two independent
//!   evaluation routes disagree. These indicate a bug, never bad data.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CoreError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoreError {
    #[error("modulus {0} is not prime")]
    NonPrimeModulus(u64),
    #[error("vector group needs dimension >= 1")]
    DimensionZero,
    #[error("group order {0} exceeds the cap {1}")]
    OrderTooLarge(u64, u64),
    #[error("operands live on different groups")]
    GroupMismatch,
    #[error("function has empty support")]
    EmptyFunction,
    #[error("{what} out of range: {value}")]
    OutOfRange { what: &'static str, value: f64 },
    #[error("{what} too large for exact evaluation: {size} > {cap}")]
    TooLarge {
        what: &'static str,
        size: u64,
        cap: u64,
    },
    #[error("element {0} repeated or out of range")]
    BadElement(u64),
    #[error("weight support must lie inside the large spectrum (offender {0})")]
    SupportViolation(u64),
    #[error("frequency set is not symmetric (missing -{0})")]
    NotSymmetric(u64),
    #[error("Bohr width {0} outside [0, 2]")]
    WidthOutOfRange(f64),
    #[error("coefficient {0} is not invertible in this group")]
    CoefficientNotUnit(i64),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("search exhausted after {tries} attempts: {what}")]
    Exhausted { what: &'static str, tries: u32 },
    #[error("no regular dilate found in [{lo}, {hi}]")]
    NoRegularDilate { lo: f64, hi: f64 },
    #[error("dichotomy inconclusive: {0}")]
    Inconclusive(String),
    #[error("iteration step failed: {0}")]
    StepFailure(String),
    #[error("internal disagreement: {0}")]
    Internal(String),
}
