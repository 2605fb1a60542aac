use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A composite dimension would exceed the configured maximum.
    #[error("capacity exceeded: dimension {requested} is above the limit of {limit}")]
    Capacity { requested: usize, limit: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A quantity that must be real (or otherwise consistent) is not, beyond tolerance.
    #[error("numerical consistency violated: {0}")]
    NumericalConsistency(String),

    /// A pointer shift does not land on the grid.
    #[error("eigenvalue {eigenvalue} gives pointer shift {shift}, which is not an integer grid step")]
    Commensurability { eigenvalue: f64, shift: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate outcome distribution: every outcome probability is below {floor:e}")]
    DegenerateDistribution { floor: f64 },

    #[error("outside domain: {0}")]
    Domain(String),

    /// The step-IV entangler changed the state of the measured system.
    #[error("scheme constraint violated: {what} (deviation {deviation:e}, tolerance {tolerance:e})")]
    SchemeConstraint {
        what: String,
        deviation: f64,
        tolerance: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}
