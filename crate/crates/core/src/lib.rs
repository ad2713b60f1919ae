//! Mirror Prox with adaptation to inexactness for monotone variational
//! inequalities.
//!
//! The crate is `no_std` and only needs `alloc`. It provides
//!
//! - [`prox`]: feasible sets bundled with a distance-generating function,
//!   Bregman divergences and closed-form prox-mappings (Euclidean ball,
//!   entropy simplex, and products of those),
//! - [`solvers`]: the inexactness-adaptive Mirror Prox method (MPAI), the
//!   L-adaptive and fixed-step Mirror Prox baselines, the bounded-operator
//!   variant, and the certificates computed from a run,
//! - [`problems`]: matrix games, Fermat–Torricelli–Steiner saddle problems,
//!   a bounded-noise oracle wrapper and seeded instance generators.
//!
//! Points are flat `[f64]` slices; for product setups the blocks are laid out
//! back to back in factor order.

#![no_std]
#![warn(missing_debug_implementations)]
// `!(x > 0.0)` rejects NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub(crate) mod linalg;
pub mod oracle;
pub mod problems;
pub mod prox;
pub mod solvers;

pub use error::{Error, Result};
pub use oracle::{FnOracle, Oracle};
pub use prox::ProxSetup;
pub use solvers::{IterationRecord, Mode, RunReport, SolverConfig, StepPoints, StopReason};
