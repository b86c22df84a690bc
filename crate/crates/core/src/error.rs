use thiserror::Error;

/// Errors raised by the deployment library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid workspace: {0}")]
    InvalidWorkspace(String),

    #[error("point {point} lies outside the workspace")]
    OutsideWorkspace { point: String },

    #[error("operation requires a {expected}-D workspace, got {actual}-D")]
    UnsupportedDimension { expected: usize, actual: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("rejection sampling gave up after {attempts} attempts (distribution has no mass in the workspace?)")]
    DegenerateDistribution { attempts: u64 },

    #[error("no agent observed the event (all consensus inputs are infinite)")]
    NoObserver,

    #[error("communication graph is disconnected")]
    Disconnected,

    #[error("diameter bound {bound} is smaller than the true graph diameter {actual}")]
    DiameterTooSmall { bound: usize, actual: usize },

    #[error("positions {first} and {second} coincide; the objective is not differentiable there")]
    CoincidentPositions { first: usize, second: usize },

    #[error("generators {first} and {second} coincide")]
    DuplicateGenerators { first: usize, second: usize },

    #[error("invalid value for `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },
}

impl Error {
    pub(crate) fn param(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
