use thiserror::Error;

/// Errors produced by the numerical and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid interval [{lo}, {hi}]: lower bound must be strictly below upper bound")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("expected {expected} samples, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("index {index} out of range for degree {degree}")]
    IndexOutOfRange { index: usize, degree: usize },

    #[error("duplicate interpolation node {0}")]
    DuplicateNode(f64),

    #[error("unknown {kind} `{value}`")]
    UnknownTag { kind: &'static str, value: String },

    #[error("invalid value for `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("empty query set")]
    EmptyQuerySet,

    #[error("systolic schedule violated: {0}")]
    ScheduleViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
