//! Quantities certified by a finished run, and checks of the inequalities a
//! run is supposed to satisfy.

use alloc::vec::Vec;

use super::line_search::acceptance_sides;
use super::{IterationRecord, RunReport};
use crate::linalg::dot;
use crate::{Error, ProxSetup, Result};

/// `R²/S_N + (1/S_N)·Σ δ^{k+1}/L^{k+1}·‖y^{k+1} − x^{k+1}‖`, recomputed
/// from the records. An upper bound on `max_{x∈Q} ⟨g(x), ỹ − x⟩` for
/// monotone `g`. Infinite for an empty run.
pub fn general_estimate(report: &RunReport) -> f64 {
    if report.records.is_empty() {
        return f64::INFINITY;
    }
    let (s, err) = report.records.iter().fold((0.0, 0.0), |(s, e), r| {
        (s + 1.0 / r.l, e + r.delta / r.l * r.step_norm)
    });
    (report.r_squared + err) / s
}

fn points(record: &IterationRecord) -> Result<&super::StepPoints> {
    record.points.as_ref().ok_or(Error::InvalidArgument(
        "report was produced without a trajectory",
    ))
}

/// `RHS − LHS` of the per-run inequality
/// `Σ (1/L^{k+1})⟨g(y^{k+1}), y^{k+1} − probe⟩ ≤ V(probe, x⁰) − V(probe, x^N) + Σ (δ^{k+1}/L^{k+1})‖y^{k+1} − x^{k+1}‖`,
/// evaluated with the operator values logged during the run.
/// A correct run gives a residual `≥ −1e−8·max(1, |RHS|)`.
pub fn weighted_inequality_residual(
    setup: &ProxSetup,
    report: &RunReport,
    probe: &[f64],
) -> Result<f64> {
    setup.check_point(probe)?;
    let mut lhs = 0.0;
    let mut err = 0.0;
    for record in &report.records {
        let p = points(record)?;
        lhs += (dot(&p.g_y_next, &p.y_next) - dot(&p.g_y_next, probe)) / record.l;
        err += record.delta / record.l * record.step_norm;
    }
    let rhs = setup.divergence(probe, &report.x0) - setup.divergence(probe, &report.x_last) + err;
    Ok(rhs - lhs)
}

/// `RHS − LHS` of the acceptance test at each record's `(L^{k+1}, δ^{k+1})`.
pub fn acceptance_residuals(setup: &ProxSetup, report: &RunReport) -> Result<Vec<f64>> {
    report
        .records
        .iter()
        .map(|r| {
            let p = points(r)?;
            let (lhs, rhs) = acceptance_sides(
                setup,
                &p.x_k,
                &p.g_x_k,
                &p.y_next,
                &p.g_y_next,
                &p.x_next,
                r.l,
                r.delta,
            );
            Ok(rhs - lhs)
        })
        .collect()
}

/// `4N + max{log₂(2·L_max/L⁰), log₂(2·δ_max/δ⁰)}` with the largest accepted
/// constants standing in for the unknown true ones. The `δ` term is dropped
/// when `δ⁰ = 0`.
pub fn attempt_bound(report: &RunReport) -> f64 {
    let n = report.records.len() as f64;
    let l_term = libm::log2(2.0 * report.max_accepted_l() / report.config.l0);
    let d_max = report.max_accepted_delta();
    let d_term = if report.config.delta0 > 0.0 && d_max > 0.0 {
        libm::log2(2.0 * d_max / report.config.delta0)
    } else {
        f64::NEG_INFINITY
    };
    4.0 * n + l_term.max(d_term)
}

pub fn attempt_bound_check(report: &RunReport) -> bool {
    report.total_attempts as f64 <= attempt_bound(report)
}

/// `2·(1 + 16δ²/(L·ε))`, the cap on `2^p` for the extra doublings of one
/// bounded-operator iteration, from that iteration's accepted `(L, δ)`.
pub fn bounded_doubling_bound(record: &IterationRecord, epsilon: f64) -> f64 {
    let d = record.accepted_delta;
    2.0 * (1.0 + 16.0 * d * d / (record.accepted_l * epsilon))
}

/// `max{1, 2·L_max/L⁰}`, computed from accepted constants.
pub fn c_l_diagnostic(report: &RunReport) -> f64 {
    (2.0 * report.max_accepted_l() / report.config.l0).max(1.0)
}

/// `⌈2·L·R²/ε⌉`.
pub fn theoretical_iterations(l: f64, r_squared: f64, epsilon: f64) -> u64 {
    libm::ceil(2.0 * l * r_squared / epsilon) as u64
}
