//! Zero-sum matrix games `min_{x∈Δₙ} max_{y∈Δₘ} xᵀAy`.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::rng::{stream_rng, STREAM_PAYOFF};
use crate::linalg::dot;
use crate::{Error, Oracle, ProxSetup, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PayoffDistribution {
    StandardNormal,
    /// Uniform on `[−1, 1]`.
    UniformSym,
}

/// Payoff matrix `A ∈ ℝ^{n×m}`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixGame {
    rows: usize,
    cols: usize,
    payoff: Vec<f64>,
    seed: Option<u64>,
}

impl MatrixGame {
    pub fn new(rows: usize, cols: usize, payoff: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument("game dimensions must be positive"));
        }
        if payoff.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: payoff.len(),
            });
        }
        if payoff.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("payoff entries must be finite"));
        }
        Ok(MatrixGame {
            rows,
            cols,
            payoff,
            seed: None,
        })
    }

    /// Reproducible zero-mean random game.
    pub fn generate(
        rows: usize,
        cols: usize,
        distribution: PayoffDistribution,
        seed: u64,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument("game dimensions must be positive"));
        }
        let mut rng = stream_rng(seed, STREAM_PAYOFF);
        let payoff = (0..rows * cols)
            .map(|_| match distribution {
                PayoffDistribution::StandardNormal => StandardNormal.sample(&mut rng),
                PayoffDistribution::UniformSym => rng.random_range(-1.0..=1.0),
            })
            .collect();
        Ok(MatrixGame {
            rows,
            cols,
            payoff,
            seed: Some(seed),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn payoff(&self) -> &[f64] {
        &self.payoff
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.payoff[i * self.cols + j]
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.payoff[i * self.cols..(i + 1) * self.cols]
    }

    /// `max |A_ij|`, the ℓ1 → ℓ∞ operator norm used as the game's `L`.
    pub fn max_abs_entry(&self) -> f64 {
        self.payoff.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `Δₙ × Δₘ` with the entropy d.g.f.
    pub fn setup(&self) -> ProxSetup {
        ProxSetup::simplex_pair(self.rows, self.cols).expect("dimensions checked at construction")
    }

    /// `A·y`.
    pub fn row_payoffs(&self, y: &[f64]) -> Vec<f64> {
        (0..self.rows).map(|i| dot(self.row(i), y)).collect()
    }

    /// `Aᵀ·x`.
    pub fn col_payoffs(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += xi * a;
            }
        }
        out
    }

    /// `g(x, y) = (A·y, −Aᵀ·x)`, the gradient field of `xᵀAy` with the
    /// maximizing block negated.
    pub fn operator(&self, u: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.rows + self.cols];
        self.apply(u, &mut out)?;
        Ok(out)
    }

    pub fn apply(&self, u: &[f64], out: &mut [f64]) -> Result<()> {
        let n = self.rows + self.cols;
        if u.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: u.len(),
            });
        }
        if out.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: out.len(),
            });
        }
        let (x, y) = u.split_at(self.rows);
        let (top, bottom) = out.split_at_mut(self.rows);
        for (i, t) in top.iter_mut().enumerate() {
            *t = dot(self.row(i), y);
        }
        bottom.fill(0.0);
        for (i, &xi) in x.iter().enumerate() {
            for (b, a) in bottom.iter_mut().zip(self.row(i)) {
                *b -= xi * a;
            }
        }
        Ok(())
    }

    /// Duality gap `max_j (Aᵀx̃)_j − min_i (Aỹ)_i`; zero exactly at an
    /// equilibrium.
    pub fn exact_gap(&self, x: &[f64], y: &[f64]) -> f64 {
        let best_response_y = self
            .col_payoffs(x)
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        let best_response_x = self
            .row_payoffs(y)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        best_response_y - best_response_x
    }

    /// Gap at a stacked point `u = (x, y)`.
    pub fn exact_gap_stacked(&self, u: &[f64]) -> f64 {
        let (x, y) = u.split_at(self.rows);
        self.exact_gap(x, y)
    }

    pub fn oracle(&self) -> GameOracle<'_> {
        GameOracle(self)
    }
}

/// [`Oracle`] view of a [`MatrixGame`].
#[derive(Debug, Clone, Copy)]
pub struct GameOracle<'a>(pub &'a MatrixGame);

impl Oracle for GameOracle<'_> {
    fn dim(&self) -> usize {
        self.0.rows + self.0.cols
    }

    fn eval(&mut self, u: &[f64], out: &mut [f64]) -> Result<()> {
        self.0.apply(u, out)
    }
}
