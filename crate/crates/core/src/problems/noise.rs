//! Bounded additive noise on top of an exact oracle.

use alloc::vec;
use alloc::vec::Vec;

use super::rng::stream_rng;
use crate::{Error, Oracle, ProxSetup, Result};

/// Samples stay strictly inside the `δ/2` ball so that `(g + ξ) − g` still
/// respects the bound after rounding.
const ROUND_OFF_MARGIN: f64 = 1.0 - 1e-9;

/// `g̃(x) = g(x) + ξ` with `‖ξ‖_* ≤ δ/2` in the setup's dual norm.
///
/// A fresh `ξ` is drawn for every query, from the random stream numbered by
/// the query index; two wrappers with the same seed therefore see the same
/// noise at the same query index regardless of where they evaluate.
#[derive(Debug, Clone)]
pub struct NoisyOracle<O> {
    base: O,
    setup: ProxSetup,
    delta: f64,
    seed: u64,
    queries: u64,
    noise: Vec<f64>,
}

pub fn noisy_wrap<O: Oracle>(
    base: O,
    setup: &ProxSetup,
    delta: f64,
    seed: u64,
) -> Result<NoisyOracle<O>> {
    NoisyOracle::new(base, setup, delta, seed)
}

impl<O: Oracle> NoisyOracle<O> {
    pub fn new(base: O, setup: &ProxSetup, delta: f64, seed: u64) -> Result<Self> {
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(Error::InvalidArgument("noise bound must be nonnegative"));
        }
        if base.dim() != setup.dim() {
            return Err(Error::DimensionMismatch {
                expected: setup.dim(),
                got: base.dim(),
            });
        }
        Ok(NoisyOracle {
            noise: vec![0.0; setup.dim()],
            base,
            setup: setup.clone(),
            delta,
            seed,
            queries: 0,
        })
    }

    pub fn noise_bound(&self) -> f64 {
        self.delta
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }

    pub fn base_mut(&mut self) -> &mut O {
        &mut self.base
    }

    pub fn into_inner(self) -> O {
        self.base
    }
}

impl<O: Oracle> Oracle for NoisyOracle<O> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn eval(&mut self, u: &[f64], out: &mut [f64]) -> Result<()> {
        self.base.eval(u, out)?;
        let query = self.queries;
        self.queries += 1;
        if self.delta == 0.0 {
            return Ok(());
        }
        let mut rng = stream_rng(self.seed, query);
        self.setup.sample_dual_ball(
            &mut rng,
            0.5 * self.delta * ROUND_OFF_MARGIN,
            &mut self.noise,
        );
        for (o, xi) in out.iter_mut().zip(&self.noise) {
            *o += xi;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::rng::STREAM_AUX;
    use crate::problems::{MatrixGame, PayoffDistribution};

    #[test]
    fn zero_bound_is_exact() {
        let game = MatrixGame::generate(3, 4, PayoffDistribution::StandardNormal, 1).unwrap();
        let setup = game.setup();
        let mut noisy = noisy_wrap(game.oracle(), &setup, 0.0, 5).unwrap();
        let u = setup.initial_point();
        let mut out = vec![0.0; 7];
        noisy.eval(&u, &mut out).unwrap();
        assert_eq!(out, game.operator(&u).unwrap());
    }

    #[test]
    fn deviation_never_exceeds_half_the_bound() {
        let game = MatrixGame::generate(20, 20, PayoffDistribution::StandardNormal, 2).unwrap();
        let setup = game.setup();
        let delta = 1.0 / 300.0;
        let mut noisy = noisy_wrap(game.oracle(), &setup, delta, 9).unwrap();
        let mut rng = stream_rng(4, STREAM_AUX);
        let mut worst: f64 = 0.0;
        let mut out = vec![0.0; 40];
        for _ in 0..10_000 {
            let u = setup.sample_point(&mut rng);
            noisy.eval(&u, &mut out).unwrap();
            let exact = game.operator(&u).unwrap();
            let diff: Vec<f64> = out.iter().zip(&exact).map(|(a, b)| a - b).collect();
            worst = worst.max(setup.dual_norm(&diff).unwrap());
        }
        assert!(worst <= delta / 2.0, "{worst}");
        assert!(
            worst > 0.25 * delta,
            "noise should use most of its budget: {worst}"
        );
    }

    #[test]
    fn euclidean_noise_respects_the_l2_ball() {
        let setup = ProxSetup::unit_ball(5).unwrap();
        let base = crate::FnOracle::new(5, |_: &[f64], out: &mut [f64]| out.fill(0.25));
        let mut noisy = noisy_wrap(base, &setup, 0.2, 3).unwrap();
        let mut out = vec![0.0; 5];
        for _ in 0..2000 {
            noisy.eval(&[0.0; 5], &mut out).unwrap();
            let diff: Vec<f64> = out.iter().map(|v| v - 0.25).collect();
            assert!(setup.dual_norm(&diff).unwrap() <= 0.1);
        }
    }

    #[test]
    fn same_seed_same_queries_same_output() {
        let game = MatrixGame::generate(5, 5, PayoffDistribution::StandardNormal, 8).unwrap();
        let setup = game.setup();
        let mut rng = stream_rng(0, STREAM_AUX);
        let queries: Vec<Vec<f64>> = (0..100).map(|_| setup.sample_point(&mut rng)).collect();
        let run = || {
            let mut noisy = noisy_wrap(game.oracle(), &setup, 0.1, 77).unwrap();
            queries
                .iter()
                .map(|u| {
                    let mut out = vec![0.0; 10];
                    noisy.eval(u, &mut out).unwrap();
                    out
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn negative_bound_is_rejected() {
        let game = MatrixGame::new(1, 1, vec![1.0]).unwrap();
        assert!(noisy_wrap(game.oracle(), &game.setup(), -1.0, 0).is_err());
    }
}
