//! Seeded multi-mode experiments and their CSV / JSON artifacts.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use mpai_core::problems::noisy_wrap;
use mpai_core::solvers::{attempt_bound_check, theoretical_iterations};
use mpai_core::solvers::{solve_with_observer, Progress};
use mpai_core::solvers::{DEFAULT_MAX_OUTER_ITERATIONS, DEFAULT_MAX_TOTAL_ATTEMPTS};
use mpai_core::{Mode, RunReport, SolverConfig, StopReason};
use serde::{Deserialize, Serialize};

use crate::instance::{Instance, InstanceDocument, ProblemKind};
use crate::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum StartPoint {
    /// The minimizer of the distance-generating function.
    Center,
    /// `(1/√(n+m), …)` on the unit sphere; FTS only.
    Sphere,
}

/// A flat experiment description, also the format of `--config` files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSpec {
    pub problem: ProblemKind,
    pub n: usize,
    pub m: usize,
    pub centers: usize,
    /// Instance file; replaces the generated instance in every repetition.
    pub instance: Option<PathBuf>,
    #[serde(alias = "solver_modes", with = "crate::modes")]
    pub modes: Vec<Mode>,
    #[serde(alias = "epsilon")]
    pub eps: f64,
    /// `L⁰`. Defaults to `max|A_ij|` for the fixed-step mode on games and to
    /// 1 otherwise.
    pub l0: Option<f64>,
    /// `δ⁰`. Defaults to the noise bound.
    pub delta0: Option<f64>,
    /// Bound `δ` on the oracle noise; 0 runs the exact oracle.
    pub noise: f64,
    /// Repetition `r` uses seed `seed + r` for both the instance and the noise.
    #[serde(alias = "seed_base")]
    pub seed: u64,
    #[serde(alias = "repetitions")]
    pub reps: usize,
    pub start: StartPoint,
    pub max_iters: u64,
    pub max_attempts: u64,
    /// Keep full trajectories and return a [`SavedRun`] per run.
    pub keep_reports: bool,
    #[serde(alias = "output_path")]
    pub out: Option<PathBuf>,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            problem: ProblemKind::Game,
            n: 10,
            m: 10,
            centers: 5,
            instance: None,
            modes: vec![Mode::Mpai],
            eps: 1e-2,
            l0: None,
            delta0: None,
            noise: 0.0,
            seed: 0,
            reps: 1,
            start: StartPoint::Center,
            max_iters: DEFAULT_MAX_OUTER_ITERATIONS,
            max_attempts: DEFAULT_MAX_TOTAL_ATTEMPTS,
            keep_reports: false,
            out: None,
        }
    }
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(HarnessError::Invalid(msg.to_string()));
        if self.reps == 0 {
            return bad("reps must be at least 1");
        }
        if self.modes.is_empty() {
            return bad("no solver modes given");
        }
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return bad("eps must be positive");
        }
        if !(self.noise.is_finite() && self.noise >= 0.0) {
            return bad("noise must be nonnegative");
        }
        if self.instance.is_none() && (self.n == 0 || self.m == 0) {
            return bad("n and m must be positive");
        }
        if self.instance.is_none() && self.problem != ProblemKind::Game && self.centers == 0 {
            return bad("centers must be positive");
        }
        Ok(())
    }

    fn config_for(&self, instance: &Instance, mode: Mode) -> Result<SolverConfig> {
        let l0 = match (self.l0, mode, instance.payoff_scale()) {
            (Some(l0), _, _) => l0,
            (None, Mode::FixedStep, Some(scale)) => scale,
            _ => 1.0,
        };
        let mut config = SolverConfig::new(mode, self.eps, l0, self.delta0.unwrap_or(self.noise))
            .with_budgets(self.max_iters, self.max_attempts)
            .with_trajectory(self.keep_reports);
        if self.start == StartPoint::Sphere {
            let x0 = instance.sphere_start().ok_or_else(|| {
                HarnessError::Invalid("the sphere start is only defined for FTS".into())
            })?;
            config = config.with_initial_point(x0);
        }
        config.validate()?;
        Ok(config)
    }
}

/// One logged checkpoint; the CSV row format.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    #[serde(skip)]
    pub rep: usize,
    pub iteration: u64,
    pub mode: &'static str,
    pub general_estimate: f64,
    /// `(1/S_N)·Σ δ^{k+1}/L^{k+1}·‖y^{k+1} − x^{k+1}‖`.
    pub error_term: f64,
    pub exact_gap: Option<f64>,
    pub attempts_cum: u64,
    #[serde(rename = "L_accepted")]
    pub l_accepted: f64,
    pub delta_accepted: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub rep: usize,
    pub seed: u64,
    pub mode: String,
    pub iterations: usize,
    pub stop_reason: StopReason,
    pub general_estimate: f64,
    pub error_term: f64,
    pub exact_gap: Option<f64>,
    pub total_attempts: u64,
    pub max_accepted_l: f64,
    pub r_squared: f64,
    /// `⌈2·L_run·R²/ε⌉` with `L_run` the largest accepted `L`.
    pub n_theory: u64,
    pub attempt_bound_ok: bool,
    pub seconds: f64,
}

/// A run with everything needed to re-check it later.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SavedRun {
    pub instance: InstanceDocument,
    pub noise: f64,
    pub noise_seed: u64,
    pub report: RunReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeAggregate {
    pub mode: String,
    pub runs: usize,
    pub stopping_rule_met: usize,
    pub mean_iterations: f64,
    pub max_iterations: usize,
    pub mean_general_estimate: f64,
    pub max_general_estimate: f64,
    pub mean_error_term: f64,
    pub max_error_term: f64,
    pub mean_n_theory: f64,
    pub max_n_theory: u64,
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentOutput {
    pub rows: Vec<ComparisonRow>,
    pub runs: Vec<RunSummary>,
    pub reports: Vec<SavedRun>,
}

/// Iterations up to this count are all logged; later ones geometrically.
pub const DENSE_CHECKPOINTS: u64 = 1000;
pub const CHECKPOINT_GROWTH: f64 = 1.1;

struct Checkpoints {
    next: u64,
}

impl Checkpoints {
    fn take(&mut self, iteration: u64) -> bool {
        if iteration <= DENSE_CHECKPOINTS {
            return true;
        }
        if iteration < self.next {
            return false;
        }
        self.next = (iteration as f64 * CHECKPOINT_GROWTH).ceil() as u64;
        true
    }
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    spec.validate()?;
    let loaded = match &spec.instance {
        Some(path) => Some(Instance::from_document(&InstanceDocument::from_json(
            &std::fs::read_to_string(path)?,
        )?)?),
        None => None,
    };
    let mut output = ExperimentOutput::default();
    for rep in 0..spec.reps {
        let seed = spec.seed.wrapping_add(rep as u64);
        let instance = match &loaded {
            Some(inst) => inst.clone(),
            None => Instance::generate(spec.problem, spec.n, spec.m, spec.centers, seed)?,
        };
        for &mode in &spec.modes {
            run_one(spec, &instance, mode, rep, seed, &mut output)?;
        }
    }
    Ok(output)
}

fn run_one(
    spec: &ExperimentSpec,
    instance: &Instance,
    mode: Mode,
    rep: usize,
    seed: u64,
    output: &mut ExperimentOutput,
) -> Result<()> {
    let config = spec.config_for(instance, mode)?;
    let setup = instance.setup();
    let mut oracle = noisy_wrap(instance.oracle(), &setup, spec.noise, seed)?;
    let mut checkpoints = Checkpoints { next: 0 };
    let mut rows = Vec::new();
    let mut observer_time = Duration::ZERO;
    let start = Instant::now();
    let mut observe = |p: &Progress<'_>| {
        let entered = Instant::now();
        if checkpoints.take(p.iteration()) {
            rows.push(ComparisonRow {
                rep,
                iteration: p.iteration(),
                mode: mode.name(),
                general_estimate: p.general_estimate(),
                error_term: p.normalized_error_term(),
                exact_gap: instance.exact_gap(&p.y_tilde()),
                attempts_cum: p.total_attempts,
                l_accepted: p.record.l,
                delta_accepted: p.record.delta,
                seconds: (entered - start - observer_time).as_secs_f64(),
            });
        }
        observer_time += entered.elapsed();
    };
    let report = solve_with_observer(&setup, &mut oracle, &config, &mut observe)?;
    let seconds = (start.elapsed() - observer_time).as_secs_f64();

    let exact_gap = instance.exact_gap(&report.y_tilde);
    if let Some(last) = report.records.last() {
        let iteration = report.iterations() as u64;
        if rows.last().map(|r| r.iteration) != Some(iteration) {
            rows.push(ComparisonRow {
                rep,
                iteration,
                mode: mode.name(),
                general_estimate: report.general_estimate,
                error_term: report.normalized_error_term(),
                exact_gap,
                attempts_cum: report.records.iter().map(|r| r.attempts).sum(),
                l_accepted: last.l,
                delta_accepted: last.delta,
                seconds,
            });
        }
    }
    output.rows.extend(rows);
    output.runs.push(RunSummary {
        rep,
        seed,
        mode: mode.name().to_string(),
        iterations: report.iterations(),
        stop_reason: report.stop_reason,
        general_estimate: report.general_estimate,
        error_term: report.normalized_error_term(),
        exact_gap,
        total_attempts: report.total_attempts,
        max_accepted_l: report.max_accepted_l(),
        r_squared: report.r_squared,
        n_theory: theoretical_iterations(report.max_accepted_l(), report.r_squared, spec.eps),
        attempt_bound_ok: attempt_bound_check(&report),
        seconds,
    });
    if spec.keep_reports {
        output.reports.push(SavedRun {
            instance: instance.to_document(true),
            noise: spec.noise,
            noise_seed: seed,
            report,
        });
    }
    Ok(())
}

impl ExperimentOutput {
    pub fn aggregates(&self, modes: &[Mode]) -> Vec<ModeAggregate> {
        modes
            .iter()
            .map(|mode| {
                let runs: Vec<&RunSummary> =
                    self.runs.iter().filter(|r| r.mode == mode.name()).collect();
                let k = runs.len().max(1) as f64;
                let mean =
                    |f: &dyn Fn(&RunSummary) -> f64| runs.iter().map(|r| f(r)).sum::<f64>() / k;
                let max = |f: &dyn Fn(&RunSummary) -> f64| {
                    runs.iter().map(|r| f(r)).fold(f64::NEG_INFINITY, f64::max)
                };
                ModeAggregate {
                    mode: mode.name().to_string(),
                    runs: runs.len(),
                    stopping_rule_met: runs
                        .iter()
                        .filter(|r| r.stop_reason == StopReason::StoppingRuleMet)
                        .count(),
                    mean_iterations: mean(&|r| r.iterations as f64),
                    max_iterations: runs.iter().map(|r| r.iterations).max().unwrap_or(0),
                    mean_general_estimate: mean(&|r| r.general_estimate),
                    max_general_estimate: max(&|r| r.general_estimate),
                    mean_error_term: mean(&|r| r.error_term),
                    max_error_term: max(&|r| r.error_term),
                    mean_n_theory: mean(&|r| r.n_theory as f64),
                    max_n_theory: runs.iter().map(|r| r.n_theory).max().unwrap_or(0),
                }
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut csv = csv::Writer::from_writer(writer);
        if self.rows.is_empty() {
            csv.write_record([
                "iteration",
                "mode",
                "general_estimate",
                "error_term",
                "exact_gap",
                "attempts_cum",
                "L_accepted",
                "delta_accepted",
                "seconds",
            ])?;
        }
        for row in &self.rows {
            csv.serialize(row)?;
        }
        csv.flush()?;
        Ok(())
    }

    pub fn summary_json(&self, spec: &ExperimentSpec) -> Result<String> {
        #[derive(Serialize)]
        struct Summary<'a> {
            spec: &'a ExperimentSpec,
            aggregates: Vec<ModeAggregate>,
            runs: &'a [RunSummary],
        }
        Ok(serde_json::to_string_pretty(&Summary {
            spec,
            aggregates: self.aggregates(&spec.modes),
            runs: &self.runs,
        })?)
    }

    /// Writes the CSV to `path` and the summary next to it as
    /// `<path>.summary.json`.
    pub fn write_artifacts(&self, spec: &ExperimentSpec, path: &Path) -> Result<PathBuf> {
        self.write_csv(std::io::BufWriter::new(std::fs::File::create(path)?))?;
        let mut summary = path.as_os_str().to_owned();
        summary.push(".summary.json");
        let summary = PathBuf::from(summary);
        std::fs::write(&summary, self.summary_json(spec)?)?;
        Ok(summary)
    }
}
