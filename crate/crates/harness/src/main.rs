use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use mpai_core::Mode;
use mpai_harness::experiment::SavedRun;
use mpai_harness::verify::verify_saved_run;
use mpai_harness::{parse_mode, run_experiment, ExperimentSpec, Instance, ProblemKind, StartPoint};

/// Mirror Prox experiments for monotone variational inequalities.
#[derive(Parser)]
#[command(name = "mpai", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one solver mode.
    Solve(RunArgs),
    /// Run several modes on the same instances and noise.
    Compare(RunArgs),
    /// Write an instance file.
    Generate(GenerateArgs),
    /// Re-check the invariants of a run saved with `solve --report`.
    Verify { report: PathBuf },
}

#[derive(Args)]
struct ProblemArgs {
    #[arg(long, value_enum)]
    problem: Option<ProblemKind>,
    /// Game rows, or FTS variables.
    #[arg(long)]
    n: Option<usize>,
    /// Game columns, or FTS constraints.
    #[arg(long)]
    m: Option<usize>,
    /// Number of FTS distance terms.
    #[arg(long)]
    centers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Flat JSON experiment file; flags given on the command line win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Instance file from `generate`.
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    l0: Option<f64>,
    #[arg(long)]
    delta0: Option<f64>,
    /// Noise bound δ added to every oracle answer.
    #[arg(long)]
    noise: Option<f64>,
    /// mpai, adaptive, fixed or bounded; comma-separated for `compare`.
    #[arg(long, alias = "modes", value_delimiter = ',', value_parser = parse_mode)]
    mode: Vec<Mode>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long, value_enum)]
    start: Option<StartPoint>,
    #[arg(long)]
    max_iters: Option<u64>,
    #[arg(long)]
    max_attempts: Option<u64>,
    /// CSV destination; a `.summary.json` is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Save the full run for `verify` (solve only).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Store the matrices, not just the seed.
    #[arg(long)]
    materialize: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn spec(&self, default_modes: &[Mode]) -> anyhow::Result<ExperimentSpec> {
        let mut spec = match &self.config {
            Some(path) => ExperimentSpec::from_json(
                &std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?,
            )?,
            None => ExperimentSpec {
                modes: default_modes.to_vec(),
                ..Default::default()
            },
        };
        let p = &self.problem;
        macro_rules! set {
            ($field:ident, $value:expr) => {
                if let Some(v) = $value {
                    spec.$field = v;
                }
            };
        }
        set!(problem, p.problem);
        set!(n, p.n);
        set!(m, p.m);
        set!(centers, p.centers);
        set!(seed, p.seed);
        set!(eps, self.eps);
        set!(noise, self.noise);
        set!(reps, self.reps);
        set!(start, self.start);
        set!(max_iters, self.max_iters);
        set!(max_attempts, self.max_attempts);
        if self.l0.is_some() {
            spec.l0 = self.l0;
        }
        if self.delta0.is_some() {
            spec.delta0 = self.delta0;
        }
        if self.instance.is_some() {
            spec.instance = self.instance.clone();
        }
        if self.out.is_some() {
            spec.out = self.out.clone();
        }
        if !self.mode.is_empty() {
            spec.modes = self.mode.clone();
        }
        spec.keep_reports = self.report.is_some();
        Ok(spec)
    }
}

fn run(args: RunArgs, single: bool) -> anyhow::Result<()> {
    let default_modes: &[Mode] = if single {
        &[Mode::Mpai]
    } else {
        &[Mode::Mpai, Mode::AdaptiveL, Mode::FixedStep]
    };
    let spec = args.spec(default_modes)?;
    if single && spec.modes.len() != 1 {
        bail!("solve runs exactly one mode; use compare for several");
    }
    if args.report.is_some() && (!single || spec.reps != 1) {
        bail!("--report needs solve with a single repetition");
    }
    let output = run_experiment(&spec)?;
    match &spec.out {
        Some(path) => {
            let summary = output.write_artifacts(&spec, path)?;
            eprintln!("wrote {} and {}", path.display(), summary.display());
        }
        None => output.write_csv(std::io::stdout().lock())?,
    }
    if let (Some(path), Some(saved)) = (&args.report, output.reports.first()) {
        std::fs::write(path, serde_json::to_string(saved)?)?;
    }
    let mut err = std::io::stderr().lock();
    for run in &output.runs {
        writeln!(
            err,
            "rep {} {:<8} N = {:<7} estimate = {:.6e} error term = {:.3e} attempts = {} ({:?})",
            run.rep,
            run.mode,
            run.iterations,
            run.general_estimate,
            run.error_term,
            run.total_attempts,
            run.stop_reason
        )?;
    }
    Ok(())
}

fn generate(args: GenerateArgs) -> anyhow::Result<()> {
    let d = ExperimentSpec::default();
    let p = args.problem;
    let instance = Instance::generate(
        p.problem.unwrap_or(d.problem),
        p.n.unwrap_or(d.n),
        p.m.unwrap_or(d.m),
        p.centers.unwrap_or(d.centers),
        p.seed.unwrap_or(d.seed),
    )?;
    let json = instance.to_document(args.materialize).to_json()?;
    match args.out {
        Some(path) => std::fs::write(path, json)?,
        None => println!("{json}"),
    }
    Ok(())
}

fn verify(path: PathBuf) -> anyhow::Result<bool> {
    let text =
        std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let saved: SavedRun = serde_json::from_str(&text)?;
    let checks = verify_saved_run(&saved)?;
    for c in &checks {
        println!(
            "{} {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    Ok(checks.iter().all(|c| c.passed))
}

fn main() -> ExitCode {
    let result = match Cli::parse().command {
        Command::Solve(args) => run(args, true).map(|_| true),
        Command::Compare(args) => run(args, false).map(|_| true),
        Command::Generate(args) => generate(args).map(|_| true),
        Command::Verify { report } => verify(report),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
