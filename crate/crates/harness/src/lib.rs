//! Experiment runner for `mpai-core`: instance files, seeded multi-mode
//! comparisons with CSV output, and an invariant checker for saved runs.

pub mod experiment;
pub mod instance;
pub mod verify;

mod error;
mod modes;

pub use error::{HarnessError, Result};
pub use experiment::{
    run_experiment, ComparisonRow, ExperimentOutput, ExperimentSpec, RunSummary, SavedRun,
    StartPoint,
};
pub use instance::{Instance, InstanceDocument, ProblemKind};
pub use modes::parse_mode;
