use alloc::vec;
use alloc::vec::Vec;

use super::line_search::{acceptance_sides, prox_pair, search};
use super::{IterationRecord, Mode, RunReport, SolverConfig, StepPoints, StopReason};
use crate::linalg::dot;
use crate::{Error, Oracle, ProxSetup, Result};

/// Running state handed to an [`Observer`] after every iteration.
#[derive(Debug)]
pub struct Progress<'a> {
    pub record: &'a IterationRecord,
    pub s_n: f64,
    pub accumulated_error_term: f64,
    pub r_squared: f64,
    pub total_attempts: u64,
    weighted_sum: &'a [f64],
}

impl Progress<'_> {
    pub fn iteration(&self) -> u64 {
        self.record.index + 1
    }

    pub fn general_estimate(&self) -> f64 {
        (self.r_squared + self.accumulated_error_term) / self.s_n
    }

    pub fn normalized_error_term(&self) -> f64 {
        self.accumulated_error_term / self.s_n
    }

    /// The current weighted average `ỹ`.
    pub fn y_tilde(&self) -> Vec<f64> {
        self.weighted_sum.iter().map(|v| v / self.s_n).collect()
    }
}

pub trait Observer {
    fn on_iteration(&mut self, progress: &Progress<'_>);
}

impl<F: FnMut(&Progress<'_>)> Observer for F {
    fn on_iteration(&mut self, progress: &Progress<'_>) {
        self(progress)
    }
}

struct Step {
    y: Vec<f64>,
    x: Vec<f64>,
    g_y: Vec<f64>,
    l: f64,
    delta: f64,
    accepted_l: f64,
    accepted_delta: f64,
    attempts: u64,
    inner_doublings: u32,
}

/// Runs the method selected by `config.mode`.
pub fn solve<O: Oracle + ?Sized>(
    setup: &ProxSetup,
    oracle: &mut O,
    config: &SolverConfig,
) -> Result<RunReport> {
    solve_with_observer(setup, oracle, config, &mut |_: &Progress<'_>| {})
}

fn solve_mode<O: Oracle + ?Sized>(
    mode: Mode,
    setup: &ProxSetup,
    oracle: &mut O,
    config: &SolverConfig,
) -> Result<RunReport> {
    if config.mode != mode {
        return Err(Error::ModeMismatch);
    }
    solve(setup, oracle, config)
}

/// Mirror Prox with adaptation to inexactness.
pub fn mpai_solve<O: Oracle + ?Sized>(
    setup: &ProxSetup,
    oracle: &mut O,
    config: &SolverConfig,
) -> Result<RunReport> {
    solve_mode(Mode::Mpai, setup, oracle, config)
}

/// L-adaptive Mirror Prox with the fixed known `δ = config.delta0`.
pub fn adaptive_mp_solve<O: Oracle + ?Sized>(
    setup: &ProxSetup,
    oracle: &mut O,
    config: &SolverConfig,
) -> Result<RunReport> {
    solve_mode(Mode::AdaptiveL, setup, oracle, config)
}

/// Mirror Prox with constant step `1/L`, `L = config.l0`.
pub fn fixed_step_mp_solve<O: Oracle + ?Sized>(
    setup: &ProxSetup,
    oracle: &mut O,
    config: &SolverConfig,
) -> Result<RunReport> {
    solve_mode(Mode::FixedStep, setup, oracle, config)
}

/// MPAI with extra doublings of `L^{k+1}` (δ frozen) after each accepted
/// step, until either `δ^{k+1}‖y^{k+1} − x^{k+1}‖ ≤ ε/2` or
/// `⟨g(y^{k+1}) − g(x^k), y^{k+1} − x^{k+1}⟩ ≤ L^{k+1}/2·(‖y^{k+1} − x^k‖² + ‖y^{k+1} − x^{k+1}‖²)`.
/// Stops at `S_N ≥ 2R²/ε`.
pub fn solve_bounded_operator<O: Oracle + ?Sized>(
    setup: &ProxSetup,
    oracle: &mut O,
    config: &SolverConfig,
) -> Result<RunReport> {
    solve_mode(Mode::BoundedOperator, setup, oracle, config)
}

pub fn solve_with_observer<O, B>(
    setup: &ProxSetup,
    oracle: &mut O,
    config: &SolverConfig,
    observer: &mut B,
) -> Result<RunReport>
where
    O: Oracle + ?Sized,
    B: Observer + ?Sized,
{
    config.validate()?;
    let n = setup.dim();
    if oracle.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: oracle.dim(),
        });
    }
    let (x0, r_squared) = match &config.initial_point {
        Some(x0) => (x0.clone(), setup.omega_radius_squared_from(x0)?),
        None => (setup.initial_point(), setup.omega_radius_squared()?),
    };
    let threshold = match config.mode {
        Mode::BoundedOperator => 2.0 * r_squared / config.epsilon,
        _ => r_squared / config.epsilon,
    };

    let mut records: Vec<IterationRecord> = Vec::new();
    let mut weighted_sum = vec![0.0; n];
    let (mut s_n, mut accumulated, mut total_attempts) = (0.0, 0.0, 0u64);
    let (mut base_l, mut base_delta) = (config.l0, config.delta0);
    let mut x_k = x0.clone();
    let mut g_x_k = vec![0.0; n];
    oracle.eval(&x_k, &mut g_x_k)?;

    let stop_reason = loop {
        if records.len() as u64 >= config.max_outer_iterations {
            break StopReason::IterationBudget;
        }
        let remaining = config.max_total_attempts.saturating_sub(total_attempts);
        if remaining == 0 {
            break StopReason::AttemptBudget;
        }
        let step = match config.mode {
            Mode::Mpai => search(
                setup,
                oracle,
                &x_k,
                &g_x_k,
                base_l / 2.0,
                base_delta / 2.0,
                true,
                remaining,
            )
            .map(Step::from_search),
            Mode::AdaptiveL => search(
                setup,
                oracle,
                &x_k,
                &g_x_k,
                base_l / 2.0,
                config.delta0,
                false,
                remaining,
            )
            .map(Step::from_search),
            Mode::FixedStep => fixed_step(setup, oracle, &x_k, &g_x_k, config.l0, config.delta0),
            Mode::BoundedOperator => bounded_step(
                setup,
                oracle,
                &x_k,
                &g_x_k,
                base_l / 2.0,
                base_delta / 2.0,
                config.epsilon,
                remaining,
            ),
        };
        let step = match step {
            Ok(step) => step,
            Err(Error::AttemptBudget { attempts, .. }) => {
                total_attempts += attempts;
                break StopReason::AttemptBudget;
            }
            Err(e) => return Err(e),
        };
        base_l = step.accepted_l;
        base_delta = step.accepted_delta;
        total_attempts += step.attempts;

        let step_norm = setup.distance(&step.y, &step.x);
        let step_error_term = step.delta / step.l * step_norm;
        s_n += 1.0 / step.l;
        accumulated += step_error_term;
        for (w, y) in weighted_sum.iter_mut().zip(&step.y) {
            *w += y / step.l;
        }
        let points = config.keep_trajectory.then(|| StepPoints {
            x_k: x_k.clone(),
            y_next: step.y.clone(),
            x_next: step.x.clone(),
            g_x_k: g_x_k.clone(),
            g_y_next: step.g_y.clone(),
        });
        records.push(IterationRecord {
            index: records.len() as u64,
            l: step.l,
            delta: step.delta,
            accepted_l: step.accepted_l,
            accepted_delta: step.accepted_delta,
            attempts: step.attempts,
            inner_doublings: step.inner_doublings,
            step_norm,
            step_error_term,
            points,
        });
        observer.on_iteration(&Progress {
            record: records.last().expect("just pushed"),
            s_n,
            accumulated_error_term: accumulated,
            r_squared,
            total_attempts,
            weighted_sum: &weighted_sum,
        });

        x_k = step.x;
        if s_n >= threshold {
            break StopReason::StoppingRuleMet;
        }
        oracle.eval(&x_k, &mut g_x_k)?;
    };

    let (y_tilde, general_estimate) = if records.is_empty() {
        (x0.clone(), f64::INFINITY)
    } else {
        (
            weighted_sum.iter().map(|w| w / s_n).collect(),
            (r_squared + accumulated) / s_n,
        )
    };
    Ok(RunReport {
        mode: config.mode,
        config: config.clone(),
        records,
        s_n,
        y_tilde,
        r_squared,
        general_estimate,
        accumulated_error_term: accumulated,
        total_attempts,
        stop_reason,
        x0,
        x_last: x_k,
    })
}

impl Step {
    fn from_search(out: super::LineSearchOutcome) -> Self {
        Step {
            y: out.y_next,
            x: out.x_next,
            g_y: out.g_y_next,
            l: out.l,
            delta: out.delta,
            accepted_l: out.l,
            accepted_delta: out.delta,
            attempts: out.attempts,
            inner_doublings: 0,
        }
    }
}

fn fixed_step<O: Oracle + ?Sized>(
    setup: &ProxSetup,
    oracle: &mut O,
    x_k: &[f64],
    g_x_k: &[f64],
    l: f64,
    delta: f64,
) -> Result<Step> {
    let n = setup.dim();
    let (mut y, mut g_y, mut x) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    prox_pair(setup, oracle, x_k, g_x_k, l, &mut y, &mut g_y, &mut x)?;
    Ok(Step {
        y,
        x,
        g_y,
        l,
        delta,
        accepted_l: l,
        accepted_delta: delta,
        attempts: 1,
        inner_doublings: 0,
    })
}

fn bounded_step<O: Oracle + ?Sized>(
    setup: &ProxSetup,
    oracle: &mut O,
    x_k: &[f64],
    g_x_k: &[f64],
    l_try: f64,
    delta_try: f64,
    epsilon: f64,
    max_attempts: u64,
) -> Result<Step> {
    let found = search(
        setup,
        oracle,
        x_k,
        g_x_k,
        l_try,
        delta_try,
        true,
        max_attempts,
    )?;
    let (accepted_l, frozen_delta) = (found.l, found.delta);
    let mut attempts = found.attempts;
    let (mut y, mut x, mut g_y) = (found.y_next, found.x_next, found.g_y_next);
    let mut l = accepted_l;
    let mut doublings = 0u32;
    let delta = loop {
        let step_norm = setup.distance(&y, &x);
        let lead = setup.distance(&y, x_k);
        let lhs = dot(&g_y, &y) - dot(&g_y, &x) - dot(g_x_k, &y) + dot(g_x_k, &x);
        if lhs <= 0.5 * l * (lead * lead + step_norm * step_norm) {
            // The quadratic test implies the acceptance test with δ = 0.
            break 0.0;
        }
        if frozen_delta * step_norm <= 0.5 * epsilon {
            let (lhs, rhs) = acceptance_sides(setup, x_k, g_x_k, &y, &g_y, &x, l, frozen_delta);
            if rhs.is_finite() && lhs <= rhs {
                break frozen_delta;
            }
        }
        if attempts >= max_attempts {
            return Err(Error::AttemptBudget {
                attempts,
                last_l: l,
                last_delta: frozen_delta,
            });
        }
        attempts += 1;
        doublings += 1;
        l *= 2.0;
        prox_pair(setup, oracle, x_k, g_x_k, l, &mut y, &mut g_y, &mut x)?;
    };
    Ok(Step {
        y,
        x,
        g_y,
        l,
        delta,
        accepted_l,
        accepted_delta: frozen_delta,
        attempts,
        inner_doublings: doublings,
    })
}
