use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point is not feasible for the setup: {0}")]
    Infeasible(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),

    #[error("unsupported set: {0}")]
    UnsupportedSet(&'static str),

    #[error("solver mode does not match the requested method")]
    ModeMismatch,

    #[error("oracle failure: {0}")]
    Oracle(&'static str),

    #[error("line search exhausted its attempt budget after {attempts} attempts")]
    AttemptBudget {
        attempts: u64,
        /// Last trial constant that was rejected.
        last_l: f64,
        last_delta: f64,
    },
}
