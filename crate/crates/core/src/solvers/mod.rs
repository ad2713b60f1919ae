//! Mirror Prox solvers.
//!
//! All four methods share one outer loop: at iteration `k` a pair
//! `(y^{k+1}, x^{k+1})` is produced by two prox steps from `x^k` with a
//! constant `L^{k+1}`, the weighted average `ỹ = Σ y^{k+1}/L^{k+1} / S_N` is
//! accumulated, and the run stops once `S_N = Σ 1/L^{k+1}` reaches
//! `R²/ε` (or `2R²/ε` for the bounded-operator procedure).
//!
//! | mode                  | `L` per iteration                  | `δ` per iteration        |
//! |-----------------------|------------------------------------|--------------------------|
//! | [`Mode::Mpai`]        | halve, then double until accepted  | halved/doubled with `L`  |
//! | [`Mode::AdaptiveL`]   | halve, then double until accepted  | fixed at `delta0`        |
//! | [`Mode::FixedStep`]   | fixed at `l0`, no test             | fixed at `delta0`        |
//! | [`Mode::BoundedOperator`] | MPAI step, then extra doublings of `L` | frozen during doublings |

mod certificates;
mod driver;
mod line_search;

use alloc::vec::Vec;

pub use certificates::{
    acceptance_residuals, attempt_bound, attempt_bound_check, bounded_doubling_bound,
    c_l_diagnostic, general_estimate, theoretical_iterations, weighted_inequality_residual,
};
pub use driver::{
    adaptive_mp_solve, fixed_step_mp_solve, mpai_solve, solve, solve_bounded_operator,
    solve_with_observer, Observer, Progress,
};
pub use line_search::{mpai_line_search, LineSearchOutcome};

use crate::{Error, Result};

/// Which method a [`SolverConfig`] drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Mode {
    /// Adaptation to both `L` and `δ`.
    Mpai,
    /// Adaptation to `L` only; `delta0` is the known fixed `δ`.
    AdaptiveL,
    /// Constant step `1/L` with `L = l0`.
    FixedStep,
    /// MPAI plus extra doublings of `L` for bounded (non-smooth) operators.
    BoundedOperator,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Mpai => "mpai",
            Mode::AdaptiveL => "adaptive",
            Mode::FixedStep => "fixed",
            Mode::BoundedOperator => "bounded",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolverConfig {
    /// Target accuracy `ε`.
    pub epsilon: f64,
    pub l0: f64,
    pub delta0: f64,
    pub max_outer_iterations: u64,
    pub max_total_attempts: u64,
    pub mode: Mode,
    /// Starting point; the d.g.f. minimizer when `None`. `R²` is always
    /// measured from the point actually used.
    pub initial_point: Option<Vec<f64>>,
    /// Keep `x^k, y^{k+1}, x^{k+1}` and the operator values in every record.
    pub keep_trajectory: bool,
}

pub const DEFAULT_MAX_OUTER_ITERATIONS: u64 = 100_000;
pub const DEFAULT_MAX_TOTAL_ATTEMPTS: u64 = 400_000 + 64;

impl SolverConfig {
    pub fn new(mode: Mode, epsilon: f64, l0: f64, delta0: f64) -> Self {
        SolverConfig {
            epsilon,
            l0,
            delta0,
            max_outer_iterations: DEFAULT_MAX_OUTER_ITERATIONS,
            max_total_attempts: DEFAULT_MAX_TOTAL_ATTEMPTS,
            mode,
            initial_point: None,
            keep_trajectory: true,
        }
    }

    pub fn mpai(epsilon: f64, l0: f64, delta0: f64) -> Self {
        Self::new(Mode::Mpai, epsilon, l0, delta0)
    }

    pub fn with_budgets(mut self, max_outer_iterations: u64, max_total_attempts: u64) -> Self {
        self.max_outer_iterations = max_outer_iterations;
        self.max_total_attempts = max_total_attempts;
        self
    }

    pub fn with_initial_point(mut self, x0: Vec<f64>) -> Self {
        self.initial_point = Some(x0);
        self
    }

    pub fn with_trajectory(mut self, keep: bool) -> Self {
        self.keep_trajectory = keep;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::InvalidArgument("epsilon must be positive"));
        }
        if !(self.l0 > 0.0) || !self.l0.is_finite() {
            return Err(Error::InvalidArgument("l0 must be positive"));
        }
        if !(self.delta0 >= 0.0) || !self.delta0.is_finite() {
            return Err(Error::InvalidArgument("delta0 must be nonnegative"));
        }
        if self.max_outer_iterations == 0 || self.max_total_attempts == 0 {
            return Err(Error::InvalidArgument("budgets must be at least 1"));
        }
        Ok(())
    }
}

/// Points and operator values of one iteration.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StepPoints {
    pub x_k: Vec<f64>,
    pub y_next: Vec<f64>,
    pub x_next: Vec<f64>,
    /// `g(x^k)` as seen by the solver.
    pub g_x_k: Vec<f64>,
    /// `g(y^{k+1})` as seen by the solver.
    pub g_y_next: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IterationRecord {
    /// Zero-based iteration index `k`.
    pub index: u64,
    /// `L^{k+1}`, the constant of both prox steps.
    pub l: f64,
    /// `δ^{k+1}` entering the certificate. For the bounded-operator mode it is
    /// 0 when the step was closed by the quadratic test.
    pub delta: f64,
    /// `(L, δ)` accepted by the line search, before any extra doublings.
    pub accepted_l: f64,
    pub accepted_delta: f64,
    /// Prox-pair evaluations spent on this iteration.
    pub attempts: u64,
    /// Extra doublings of `L` in the bounded-operator mode.
    pub inner_doublings: u32,
    /// `‖y^{k+1} − x^{k+1}‖`.
    pub step_norm: f64,
    /// `δ^{k+1}/L^{k+1}·‖y^{k+1} − x^{k+1}‖`.
    pub step_error_term: f64,
    pub points: Option<StepPoints>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum StopReason {
    StoppingRuleMet,
    IterationBudget,
    AttemptBudget,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunReport {
    pub mode: Mode,
    pub config: SolverConfig,
    pub records: Vec<IterationRecord>,
    /// `S_N = Σ 1/L^{k+1}`.
    pub s_n: f64,
    /// `ỹ = (1/S_N) Σ y^{k+1}/L^{k+1}`.
    pub y_tilde: Vec<f64>,
    pub r_squared: f64,
    /// `R²/S_N + accumulated_error_term/S_N`.
    pub general_estimate: f64,
    /// `Σ δ^{k+1}/L^{k+1}·‖y^{k+1} − x^{k+1}‖` (not normalized).
    pub accumulated_error_term: f64,
    pub total_attempts: u64,
    pub stop_reason: StopReason,
    pub x0: Vec<f64>,
    /// `x^N`.
    pub x_last: Vec<f64>,
}

impl RunReport {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    /// The error part of the certificate, `accumulated_error_term / S_N`.
    pub fn normalized_error_term(&self) -> f64 {
        self.accumulated_error_term / self.s_n
    }

    pub fn max_accepted_l(&self) -> f64 {
        self.records.iter().fold(0.0, |m, r| m.max(r.accepted_l))
    }

    pub fn max_accepted_delta(&self) -> f64 {
        self.records
            .iter()
            .fold(0.0, |m, r| m.max(r.accepted_delta))
    }
}
