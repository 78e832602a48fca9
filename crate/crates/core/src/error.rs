//! Error type shared by every module of the crate.
//!
//! All fallible public operations return [`Result<T>`]. Errors are exact
//! statements about why a computation cannot proceed; nothing in this crate
//! silently approximates or falls back to a weaker notion of equality.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter was outside the domain of the operation.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Division by zero in an exact ring or field.
    #[error("division by zero: {0}")]
    DivisionByZero(String),

    /// A cyclotomic element was used with an incompatible order and no
    /// common field was requested.
    #[error("incompatible cyclotomic orders: {0}")]
    IncompatibleOrders(String),

    /// The requested finite field is too large for the table-based kernels.
    #[error("field too large: {0}")]
    FieldTooLarge(String),

    /// A polynomial that was required to be irreducible (or squarefree,
    /// monic, nonzero, ...) failed the requirement.
    #[error("bad polynomial: {0}")]
    BadPolynomial(String),

    /// Parsing of an expression (sheaf grammar, rational function,
    /// cyclotomic literal) failed.
    #[error("parse error: {0}")]
    Parse(String),

    /// The sheaf has wild ramification at a point where only the tame
    /// theory is implemented.
    #[error("unsupported wild point: {0}")]
    UnsupportedWildPoint(String),

    /// A p-adic computation ran out of precision even after the automatic
    /// precision-doubling retries.
    #[error("p-adic precision exhausted: {0}")]
    PrecisionExhausted(String),

    /// A class-group operation received an element that is zero (classes
    /// are only defined for nonzero values).
    #[error("nonzero value required: {0}")]
    ZeroClass(String),

    /// An internal consistency check failed. This indicates a bug, not a
    /// user error, and is never used to mask a wrong answer.
    #[error("internal consistency check failed: {0}")]
    Inconsistency(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Shorthand used by parsers.
    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    /// Shorthand for invalid-argument errors.
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
