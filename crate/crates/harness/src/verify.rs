//! Invariant checks on a saved run.

use mpai_core::problems::rng::{stream_rng, STREAM_AUX};
use mpai_core::solvers::{
    acceptance_residuals, attempt_bound_check, general_estimate, weighted_inequality_residual,
};
use mpai_core::{Mode, StopReason};

use crate::experiment::SavedRun;
use crate::instance::Instance;
use crate::{HarnessError, Result};

pub const INEQUALITY_PROBES: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Check {
            name,
            passed,
            detail,
        }
    }

    fn skipped(name: &'static str, why: &str) -> Self {
        Check {
            name,
            passed: true,
            detail: format!("not applicable: {why}"),
        }
    }
}

fn min(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::INFINITY, f64::min)
}

pub fn verify_saved_run(saved: &SavedRun) -> Result<Vec<Check>> {
    let report = &saved.report;
    if report.records.iter().any(|r| r.points.is_none()) {
        return Err(HarnessError::Invalid(
            "the report has no trajectory; rerun with trajectories kept".into(),
        ));
    }
    let instance = Instance::from_document(&saved.instance)?;
    let setup = instance.setup();
    let config = &report.config;
    let mut checks = Vec::new();

    let feasible = report.records.iter().all(|r| {
        let p = r.points.as_ref().expect("checked above");
        setup.is_feasible(&p.x_k) && setup.is_feasible(&p.y_next) && setup.is_feasible(&p.x_next)
    });
    checks.push(Check::new(
        "feasibility",
        feasible && setup.is_feasible(&report.y_tilde),
        String::new(),
    ));

    let recomputed = general_estimate(report);
    let tol = 1e-12 * recomputed.abs().max(1.0);
    checks.push(Check::new(
        "estimate_recomputed",
        report.records.is_empty() || (recomputed - report.general_estimate).abs() <= tol,
        format!("logged {} recomputed {recomputed}", report.general_estimate),
    ));

    let threshold = match report.mode {
        Mode::BoundedOperator => 2.0 * report.r_squared / config.epsilon,
        _ => report.r_squared / config.epsilon,
    };
    checks.push(match report.stop_reason {
        StopReason::StoppingRuleMet => Check::new(
            "stopping_rule",
            report.s_n >= threshold,
            format!("S_N = {} threshold {threshold}", report.s_n),
        ),
        other => Check::skipped("stopping_rule", &format!("run stopped on {other:?}")),
    });

    checks.push(if report.mode == Mode::FixedStep {
        Check::skipped("acceptance_test", "fixed-step runs do not test acceptance")
    } else {
        let worst = min(acceptance_residuals(&setup, report)?);
        Check::new(
            "acceptance_test",
            worst >= -1e-12,
            format!("min residual {worst:e}"),
        )
    });

    let mut rng = stream_rng(saved.noise_seed, STREAM_AUX);
    let mut probes: Vec<Vec<f64>> = (0..INEQUALITY_PROBES)
        .map(|_| setup.sample_point(&mut rng))
        .collect();
    probes.push(report.y_tilde.clone());
    probes.push(report.x0.clone());
    let scale = (report.r_squared + report.accumulated_error_term).max(1.0);
    let mut worst = f64::INFINITY;
    for probe in &probes {
        worst = worst.min(weighted_inequality_residual(&setup, report, probe)?);
    }
    checks.push(Check::new(
        "inequality_residual",
        worst >= -1e-8 * scale,
        format!("min residual {worst:e}"),
    ));

    checks.push(if report.mode == Mode::Mpai {
        Check::new(
            "attempt_bound",
            attempt_bound_check(report),
            format!("{} attempts", report.total_attempts),
        )
    } else {
        Check::skipped("attempt_bound", "stated for MPAI runs")
    });

    checks.push(if report.mode == Mode::Mpai && config.delta0 > 0.0 {
        let ratio = config.delta0 / config.l0;
        let drift = report
            .records
            .iter()
            .map(|r| (r.delta / r.l - ratio).abs() / ratio)
            .fold(0.0, f64::max);
        Check::new(
            "delta_over_l",
            drift <= 1e-12,
            format!("max relative drift {drift:e}"),
        )
    } else {
        Check::skipped("delta_over_l", "needs an MPAI run with δ⁰ > 0")
    });

    checks.push(
        match (instance.exact_gap(&report.y_tilde), saved.noise > 0.0) {
            (Some(gap), false) => Check::new(
                "gap_certificate",
                gap <= report.general_estimate + 1e-9,
                format!("gap {gap} estimate {}", report.general_estimate),
            ),
            (Some(_), true) => Check::skipped("gap_certificate", "the oracle was noisy"),
            (None, _) => Check::skipped("gap_certificate", "no exact gap for this problem"),
        },
    );
    Ok(checks)
}
