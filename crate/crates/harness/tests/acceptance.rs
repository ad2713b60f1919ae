//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::sync::OnceLock;
use std::time::Instant;

use mpai_core::problems::rng::{stream_rng, STREAM_AUX};
use mpai_core::problems::{FtsProblem, FtsVariant, MatrixGame, PayoffDistribution};
use mpai_core::solvers::{
    attempt_bound_check, bounded_doubling_bound, solve, solve_bounded_operator,
    solve_with_observer, weighted_inequality_residual, Progress,
};
use mpai_core::{FnOracle, Mode, ProxSetup, RunReport, SolverConfig, StopReason};
use mpai_harness::{run_experiment, ExperimentSpec, ProblemKind};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

// Prox-mapping by maximizing the concave one-dimensional dual with golden
// section search. Shares nothing with the closed forms in the library.

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (hi - phi * (hi - lo), lo + phi * (hi - lo));
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..400 {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + phi * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - phi * (hi - lo);
            fa = f(a);
        }
    }
    0.5 * (lo + hi)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn ball_by_dual(center: &[f64], r: f64, a: &[f64], s: &[f64], l: f64) -> Vec<f64> {
    let x_of = |mu: f64| -> Vec<f64> {
        a.iter()
            .zip(s)
            .zip(center)
            .map(|((ai, si), ci)| (l * ai + mu * ci - si) / (l + mu))
            .collect()
    };
    let lagrangian = |mu: f64| {
        let x = x_of(mu);
        let d2 = |p: &[f64]| x.iter().zip(p).map(|(u, v)| (u - v) * (u - v)).sum::<f64>();
        dot(s, &x) + 0.5 * l * d2(a) + 0.5 * mu * (d2(center) - r * r)
    };
    let free = x_of(0.0);
    if free
        .iter()
        .zip(center)
        .map(|(u, v)| (u - v) * (u - v))
        .sum::<f64>()
        <= r * r
    {
        return free;
    }
    let mut hi = 1.0;
    while lagrangian(hi) < lagrangian(2.0 * hi) {
        hi *= 2.0;
    }
    x_of(golden_max(lagrangian, 0.0, 2.0 * hi))
}

fn simplex_by_dual(a: &[f64], s: &[f64], l: f64) -> Vec<f64> {
    // Shifting s by a constant leaves the minimizer on the simplex unchanged.
    let shift = s.iter().copied().fold(f64::INFINITY, f64::min);
    let s: Vec<f64> = s.iter().map(|v| v - shift).collect();
    let x_of = |nu: f64| -> Vec<f64> {
        a.iter()
            .zip(&s)
            .map(|(ai, si)| ai * (-(si + nu) / l).exp())
            .collect()
    };
    let lagrangian = |nu: f64| {
        let x = x_of(nu);
        let kl: f64 = x
            .iter()
            .zip(a)
            .map(|(xi, ai)| {
                if *xi > 0.0 {
                    xi * (xi / ai).ln() - xi + ai
                } else {
                    *ai
                }
            })
            .sum();
        dot(&s, &x) + l * kl + nu * (x.iter().sum::<f64>() - 1.0)
    };
    let (mut lo, mut hi) = (-1.0, 1.0);
    while x_of(lo).iter().sum::<f64>() < 1.0 {
        lo *= 2.0;
    }
    while x_of(hi).iter().sum::<f64>() > 1.0 {
        hi *= 2.0;
    }
    x_of(golden_max(lagrangian, lo, hi))
}

fn prox_by_dual(setup: &ProxSetup, a: &[f64], s: &[f64], l: f64) -> Vec<f64> {
    match setup {
        ProxSetup::EuclideanBall { center, radius } => ball_by_dual(center, *radius, a, s, l),
        ProxSetup::Simplex { .. } => simplex_by_dual(a, s, l),
        ProxSetup::Product(factors) => {
            let mut out = Vec::with_capacity(a.len());
            let mut at = 0;
            for f in factors {
                let k = f.dim();
                out.extend(prox_by_dual(f, &a[at..at + k], &s[at..at + k], l));
                at += k;
            }
            out
        }
    }
}

fn prox_equivalence() -> Outcome {
    let kinds = [
        (
            "ball",
            ProxSetup::euclidean_ball(vec![0.4, -0.3, 0.2, 0.0, 1.0], 1.3).unwrap(),
        ),
        ("simplex", ProxSetup::simplex(7).unwrap()),
        (
            "product",
            ProxSetup::product(vec![
                ProxSetup::simplex(4).unwrap(),
                ProxSetup::unit_ball(3).unwrap(),
                ProxSetup::simplex(3).unwrap(),
            ])
            .unwrap(),
        ),
    ];
    let mut rng = stream_rng(2024, STREAM_AUX);
    let mut worst = Vec::new();
    for (name, setup) in &kinds {
        let mut max_dist: f64 = 0.0;
        for _ in 0..1000 {
            let a = setup.sample_point(&mut rng);
            let scale = [0.1, 1.0, 10.0][rng.random_range(0..3)];
            let s: Vec<f64> = (0..setup.dim())
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    scale * z
                })
                .collect();
            let l = rng.random_range(0.1..10.0);
            let p = setup.prox_map(&a, &s, l).unwrap();
            max_dist = max_dist.max(setup.distance(&p, &prox_by_dual(setup, &a, &s, l)));
        }
        worst.push(format!("{name} {max_dist:.1e}"));
        if max_dist.is_nan() || max_dist > 1e-6 {
            return outcome(false, format!("max distance {}", worst.join(", ")));
        }
    }
    outcome(true, format!("max distance {}", worst.join(", ")))
}

struct GameRun {
    game: MatrixGame,
    report: RunReport,
}

const GAME_SEEDS: u64 = 20;
const GAME_EPS: f64 = 1e-2;

fn certificate_runs() -> &'static [GameRun] {
    static RUNS: OnceLock<Vec<GameRun>> = OnceLock::new();
    RUNS.get_or_init(|| {
        (0..GAME_SEEDS)
            .map(|seed| {
                let game =
                    MatrixGame::generate(10, 10, PayoffDistribution::StandardNormal, seed).unwrap();
                let report = solve(
                    &game.setup(),
                    &mut game.oracle(),
                    &SolverConfig::mpai(GAME_EPS, 1.0, 1e-9),
                )
                .unwrap();
                GameRun { game, report }
            })
            .collect()
    })
}

fn iteration_runs() -> &'static [GameRun] {
    static RUNS: OnceLock<Vec<GameRun>> = OnceLock::new();
    RUNS.get_or_init(|| {
        (0..GAME_SEEDS)
            .map(|seed| {
                let game =
                    MatrixGame::generate(10, 10, PayoffDistribution::StandardNormal, seed).unwrap();
                let config = SolverConfig::mpai(GAME_EPS, game.max_abs_entry(), 1e-12);
                let report = solve(&game.setup(), &mut game.oracle(), &config).unwrap();
                GameRun { game, report }
            })
            .collect()
    })
}

fn certificate_soundness() -> Outcome {
    let mut worst_slack = f64::INFINITY;
    for run in certificate_runs() {
        let r = &run.report;
        if r.stop_reason != StopReason::StoppingRuleMet {
            return outcome(false, format!("run stopped on {:?}", r.stop_reason));
        }
        let gap = run.game.exact_gap_stacked(&r.y_tilde);
        if gap > r.general_estimate + 1e-9 {
            return outcome(
                false,
                format!("gap {gap} above estimate {}", r.general_estimate),
            );
        }
        let cap = GAME_EPS + r.accumulated_error_term / r.s_n;
        if r.general_estimate > cap * (1.0 + 1e-12) {
            return outcome(
                false,
                format!("estimate {} above ε + error term {cap}", r.general_estimate),
            );
        }
        worst_slack = worst_slack.min(r.general_estimate - gap);
    }
    outcome(
        true,
        format!("{GAME_SEEDS} games, min(estimate − gap) = {worst_slack:.3e}"),
    )
}

fn iteration_bound() -> Outcome {
    let r2 = 2.0 * 10f64.ln();
    let mut worst = 0.0f64;
    let mut total = 0;
    for run in iteration_runs() {
        let r = &run.report;
        if r.stop_reason != StopReason::StoppingRuleMet {
            return outcome(false, format!("run stopped on {:?}", r.stop_reason));
        }
        if (r.r_squared - r2).abs() > 1e-12 {
            return outcome(
                false,
                format!("R² = {} instead of ln n + ln m", r.r_squared),
            );
        }
        let bound = (2.0 * 2.0 * run.game.max_abs_entry() * r2 / GAME_EPS).ceil();
        worst = worst.max(r.iterations() as f64 / bound);
        total += r.iterations();
        if r.iterations() as f64 > bound {
            return outcome(false, format!("N = {} above {bound}", r.iterations()));
        }
    }
    outcome(
        true,
        format!(
            "mean N = {}, max N/bound = {worst:.3}",
            total as f64 / GAME_SEEDS as f64
        ),
    )
}

fn attempt_bound() -> Outcome {
    let runs = certificate_runs().iter().chain(iteration_runs());
    let mut count = 0;
    for run in runs {
        count += 1;
        if !attempt_bound_check(&run.report) {
            return outcome(
                false,
                format!(
                    "{} attempts over {} iterations",
                    run.report.total_attempts,
                    run.report.iterations()
                ),
            );
        }
    }
    outcome(true, format!("{count} runs"))
}

fn inequality_residual() -> Outcome {
    let mut rng = stream_rng(5, STREAM_AUX);
    let mut worst = f64::INFINITY;
    for run in certificate_runs().iter().chain(iteration_runs()) {
        let setup = run.game.setup();
        let r = &run.report;
        for _ in 0..20 {
            let probe = setup.sample_point(&mut rng);
            let residual = weighted_inequality_residual(&setup, r, &probe).unwrap();
            let rhs = setup.divergence(&probe, &r.x0) - setup.divergence(&probe, &r.x_last)
                + r.accumulated_error_term;
            let scaled = residual / rhs.abs().max(1.0);
            worst = worst.min(scaled);
            if scaled < -1e-8 {
                return outcome(false, format!("residual {residual:e} with RHS {rhs:e}"));
            }
        }
    }
    outcome(true, format!("min scaled residual {worst:.3e}"))
}

fn noise_ordering() -> Outcome {
    let spec = ExperimentSpec {
        problem: ProblemKind::Game,
        n: 100,
        m: 100,
        modes: vec![Mode::Mpai, Mode::AdaptiveL, Mode::FixedStep],
        eps: 1.0 / 100.0,
        noise: 1.0 / 300.0,
        reps: 20,
        seed: 0,
        ..Default::default()
    };
    let out = run_experiment(&spec).unwrap();
    let agg = out.aggregates(&spec.modes);
    let (mpai, adaptive, fixed) = (
        agg[0].mean_error_term,
        agg[1].mean_error_term,
        agg[2].mean_error_term,
    );
    let detail =
        format!("mean error terms: mpai {mpai:.3e}, adaptive {adaptive:.3e}, fixed {fixed:.3e}");
    outcome(mpai <= fixed && mpai <= 1.05 * adaptive, detail)
}

fn theory_overlay() -> Outcome {
    let mut parts = Vec::new();
    let mut passed = true;
    for k in [10.0, 20.0, 40.0, 80.0] {
        let spec = ExperimentSpec {
            n: 10,
            m: 10,
            eps: 1.0 / k,
            reps: 50,
            seed: 1000,
            ..Default::default()
        };
        let out = run_experiment(&spec).unwrap();
        let a = &out.aggregates(&spec.modes)[0];
        passed &= a.stopping_rule_met == 50 && a.mean_iterations <= a.mean_n_theory;
        parts.push(format!(
            "1/{k}: {:.1} ≤ {:.1}",
            a.mean_iterations, a.mean_n_theory
        ));
    }
    outcome(passed, parts.join(", "))
}

/// First iteration whose estimate is at most `target`, within `budget` iterations.
fn first_below(
    setup: &ProxSetup,
    fts: &FtsProblem,
    config: &SolverConfig,
    target: f64,
) -> (Option<u64>, Vec<f64>) {
    let mut estimates = Vec::new();
    let mut first = None;
    let mut observe = |p: &Progress<'_>| {
        let e = p.general_estimate();
        if first.is_none() && e <= target {
            first = Some(p.iteration());
        }
        estimates.push(e);
    };
    solve_with_observer(setup, &mut fts.oracle(), config, &mut observe).unwrap();
    (first, estimates)
}

fn fts_reproduction() -> Outcome {
    let mut hits = Vec::new();
    let mut misses = Vec::new();
    for seed in 0..20 {
        let fts = FtsProblem::generate(FtsVariant::BallDistances, 100, 20, 5, seed).unwrap();
        let config = SolverConfig::mpai(1e-3, 1.0, 1.0 / 20.0)
            .with_budgets(200, 400_064)
            .with_trajectory(false);
        match first_below(&fts.setup(), &fts, &config, 0.01).0 {
            Some(k) if k <= 200 => hits.push(k),
            _ => misses.push(seed),
        }
    }
    hits.sort_unstable();
    let median = hits.get(hits.len() / 2).copied().unwrap_or(0);
    outcome(
        hits.len() >= 18,
        format!(
            "{}/20 seeds below 0.01 within 200 iterations (median {median}), misses {misses:?}",
            hits.len()
        ),
    )
}

fn bounded_regime() -> Outcome {
    let mut parts = Vec::new();
    let mut passed = true;
    for seed in 0..3 {
        let fts = FtsProblem::generate(FtsVariant::UnitBallPoints, 100, 50, 25, seed).unwrap();
        let config = SolverConfig::new(Mode::BoundedOperator, 1e-2, 1.0, 1.0 / 20.0)
            .with_budgets(1000, 400_064)
            .with_trajectory(false);
        let (first, estimates) = first_below(&fts.setup(), &fts, &config, 0.26);
        let monotone = estimates.windows(2).all(|w| w[1] <= w[0]);
        passed &= monotone && first.is_some();
        parts.push(format!(
            "seed {seed}: ≤ 0.26 at {first:?}, nonincreasing {monotone}, last {:.4}",
            estimates.last().copied().unwrap_or(f64::NAN)
        ));
    }
    outcome(passed, parts.join("; "))
}

fn doubling_within_bound(report: &RunReport, eps: f64) -> Result<(), String> {
    for r in &report.records {
        let bound = bounded_doubling_bound(r, eps);
        if 2f64.powi(r.inner_doublings as i32) > bound {
            return Err(format!(
                "iteration {}: 2^{} > {bound}",
                r.index, r.inner_doublings
            ));
        }
    }
    Ok(())
}

fn bounded_procedure() -> Outcome {
    let eps = 0.1;
    let sign_setup = ProxSetup::unit_ball(1).unwrap();
    let mut sign = FnOracle::new(1, |x: &[f64], out: &mut [f64]| {
        out[0] = if x[0] > 0.0 {
            1.0
        } else if x[0] < 0.0 {
            -1.0
        } else {
            0.0
        };
    });
    let config =
        SolverConfig::new(Mode::BoundedOperator, eps, 1.0, 0.5).with_initial_point(vec![0.7]);
    let sign_run = solve_bounded_operator(&sign_setup, &mut sign, &config).unwrap();

    let fts = FtsProblem::generate(FtsVariant::UnitBallPoints, 100, 50, 25, 0).unwrap();
    let config =
        SolverConfig::new(Mode::BoundedOperator, eps, 1.0, 1.0 / 20.0).with_trajectory(false);
    let fts_run = solve_bounded_operator(&fts.setup(), &mut fts.oracle(), &config).unwrap();

    let mut parts = Vec::new();
    let mut passed = true;
    for (name, run) in [("sign", &sign_run), ("fts", &fts_run)] {
        let max_p = run
            .records
            .iter()
            .map(|r| r.inner_doublings)
            .max()
            .unwrap_or(0);
        let ok = run.stop_reason == StopReason::StoppingRuleMet && run.general_estimate <= eps;
        let bound = doubling_within_bound(run, eps);
        passed &= ok && bound.is_ok();
        parts.push(format!(
            "{name}: N = {}, estimate {:.4}, max p = {max_p}{}",
            run.iterations(),
            run.general_estimate,
            bound.err().map(|e| format!(", {e}")).unwrap_or_default()
        ));
    }
    outcome(passed, parts.join("; "))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| -> String {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_mpai"))
            .args([
                "compare",
                "--problem",
                "game",
                "--n",
                "20",
                "--m",
                "15",
                "--eps",
                "0.05",
                "--noise",
                "0.01",
            ])
            .args([
                "--modes",
                "mpai,adaptive,fixed,bounded",
                "--seed",
                "42",
                "--reps",
                "3",
                "--out",
            ])
            .arg(&out)
            .output()
            .unwrap();
        assert!(
            status.status.success(),
            "{}",
            String::from_utf8_lossy(&status.stderr)
        );
        std::fs::read_to_string(out)
            .unwrap()
            .lines()
            .map(|line| line.rsplit_once(',').unwrap().0.to_string())
            .collect::<Vec<_>>()
            .join("\n")
    };
    let (a, b) = (run("a.csv"), run("b.csv"));
    let rows = a.lines().count().saturating_sub(1);
    outcome(a == b && rows > 0, format!("{rows} rows compared"))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("prox-mapping matches dual brute force", prox_equivalence),
        ("game certificate soundness", certificate_soundness),
        ("iteration bound", iteration_bound),
        ("attempt bound", attempt_bound),
        ("per-run inequality residual", inequality_residual),
        ("noisy game error-term ordering", noise_ordering),
        ("iterations below theoretical overlay", theory_overlay),
        ("FTS ball-distance reproduction", fts_reproduction),
        ("FTS unit-ball bounded regime", bounded_regime),
        ("bounded-operator procedure", bounded_procedure),
        ("compare determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            outcome(false, format!("panicked: {:?}", e.downcast_ref::<String>()))
        });
        let tag = if result.passed { "PASS" } else { "FAIL" };
        println!(
            "{tag} criterion {:>2} {name}: {} [{:.1}s]",
            i + 1,
            result.detail,
            start.elapsed().as_secs_f64()
        );
        if !result.passed {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", criteria.len());
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
