//! Crate-wide error type.

use thiserror::Error;

/// Errors produced while validating inputs or running estimators.
///
/// Degenerate but well-defined outcomes (an infeasible program, a tracking
/// window on which every candidate has infinite cost) are not errors; they are
/// reported through dedicated result types.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A constructor was handed data that violates its documented invariant.
    #[error("invalid {what}: {why}")]
    Invalid { what: &'static str, why: String },

    /// A probability parameter lies outside its admissible range.
    #[error("probability {value} out of range for {what}")]
    ProbabilityRange { what: &'static str, value: f64 },

    /// An operation was asked to pair incompatible observation and cost kinds.
    #[error("incompatible observation window: {0}")]
    WindowMismatch(String),

    /// A state does not belong to the system it was used with.
    #[error("state does not belong to the reference system: {0}")]
    StateMismatch(String),

    /// An operation needs more data than the caller supplied.
    #[error("window of length {have} is too short: {why}")]
    WindowTooShort { have: usize, why: String },

    /// An enumeration would exceed the configured size cap.
    #[error("{what} needs {needed} items, cap is {cap}")]
    CapExceeded {
        what: &'static str,
        needed: usize,
        cap: usize,
    },

    /// A schedule of window lengths must be nonempty and strictly increasing.
    #[error("schedule must be nonempty and strictly increasing")]
    BadSchedule,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(what: &'static str, why: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            why: why.into(),
        }
    }
}
