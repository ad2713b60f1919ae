//! Fermat–Torricelli–Steiner problems with quadratic functional constraints,
//! posed as a variational inequality on the unit ball of `ℝ^{n+m}`.
//!
//! Objective `f(x) = Σ_k max(‖x − A_k‖₂ − r_k, 0)` (distance to balls; point
//! distances are the case `r_k = 0`), constraints
//! `φ_p(x) = Σ_j α_pj x_j² − 1`, and the Lagrangian operator
//! `G(x, λ) = (∂f(x) + Σ_p λ_p ∇φ_p(x), −φ_1(x), …, −φ_m(x))`.
//!
//! The multipliers are not sign-constrained: `(x, λ)` ranges over the whole
//! unit ball, so `G` is monotone only where `λ ≥ 0`.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::rng::{stream_rng, STREAM_FTS_CENTERS, STREAM_FTS_CONSTRAINTS};
use crate::linalg::{dist2, norm2};
use crate::prox::FEASIBILITY_TOL;
use crate::{Error, Oracle, ProxSetup, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FtsVariant {
    /// Distances to unit-radius balls with `‖A_k‖₂ ∈ [1, 2]`.
    BallDistances,
    /// Distances to points with integer coordinates in `[−10, 10]`.
    PointDistances,
    /// Distances to points drawn uniformly from the unit ball.
    UnitBallPoints,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FtsProblem {
    variant: FtsVariant,
    dim: usize,
    /// `N × n`, row-major.
    centers: Vec<f64>,
    /// Zero for the point variants.
    radii: Vec<f64>,
    /// `m × n`, row-major.
    alpha: Vec<f64>,
    seed: Option<u64>,
}

impl FtsProblem {
    pub fn new(
        variant: FtsVariant,
        dim: usize,
        centers: Vec<f64>,
        radii: Vec<f64>,
        alpha: Vec<f64>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive"));
        }
        if !centers.len().is_multiple_of(dim) || !alpha.len().is_multiple_of(dim) {
            return Err(Error::InvalidArgument(
                "center and constraint rows must have length n",
            ));
        }
        if radii.len() != centers.len() / dim {
            return Err(Error::DimensionMismatch {
                expected: centers.len() / dim,
                got: radii.len(),
            });
        }
        if radii.iter().any(|r| !(*r >= 0.0)) {
            return Err(Error::InvalidArgument("radii must be nonnegative"));
        }
        Ok(FtsProblem {
            variant,
            dim,
            centers,
            radii,
            alpha,
            seed: None,
        })
    }

    /// Random instance with `n` variables, `m` constraints and `centers` terms.
    ///
    /// Each constraint row is all ones except one position holding an integer
    /// drawn from `{2, …, 9}`.
    pub fn generate(
        variant: FtsVariant,
        n: usize,
        m: usize,
        centers: usize,
        seed: u64,
    ) -> Result<Self> {
        if n == 0 || m == 0 || centers == 0 {
            return Err(Error::InvalidArgument("dimensions must be positive"));
        }
        let mut rng = stream_rng(seed, STREAM_FTS_CENTERS);
        let mut points = Vec::with_capacity(centers * n);
        for _ in 0..centers {
            match variant {
                FtsVariant::BallDistances => {
                    let dir = normal_vector(&mut rng, n);
                    let scale = rng.random_range(1.0..=2.0) / norm2(&dir);
                    points.extend(dir.iter().map(|v| v * scale));
                }
                FtsVariant::PointDistances => {
                    points.extend((0..n).map(|_| rng.random_range(-10i32..=10) as f64));
                }
                FtsVariant::UnitBallPoints => {
                    let dir = normal_vector(&mut rng, n);
                    let scale = libm::pow(rng.random::<f64>(), 1.0 / n as f64) / norm2(&dir);
                    points.extend(dir.iter().map(|v| v * scale));
                }
            }
        }
        let radius = if variant == FtsVariant::BallDistances {
            1.0
        } else {
            0.0
        };

        let mut rng = stream_rng(seed, STREAM_FTS_CONSTRAINTS);
        let mut alpha = vec![1.0; m * n];
        for p in 0..m {
            let j = rng.random_range(0..n);
            alpha[p * n + j] = rng.random_range(2i32..=9) as f64;
        }
        let mut problem = FtsProblem::new(variant, n, points, vec![radius; centers], alpha)?;
        problem.seed = Some(seed);
        Ok(problem)
    }

    pub fn variant(&self) -> FtsVariant {
        self.variant
    }

    /// `n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `m`.
    pub fn num_constraints(&self) -> usize {
        self.alpha.len() / self.dim
    }

    pub fn num_centers(&self) -> usize {
        self.radii.len()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// All centers, `N × n` row-major.
    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn center(&self, k: usize) -> &[f64] {
        &self.centers[k * self.dim..(k + 1) * self.dim]
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// The coefficients `α`, `m × n` row-major.
    pub fn constraint_matrix(&self) -> &[f64] {
        &self.alpha
    }

    pub fn constraint_row(&self, p: usize) -> &[f64] {
        &self.alpha[p * self.dim..(p + 1) * self.dim]
    }

    /// The unit ball of `ℝ^{n+m}`.
    pub fn setup(&self) -> ProxSetup {
        ProxSetup::unit_ball(self.dim + self.num_constraints()).expect("positive dimension")
    }

    /// `(1/√(n+m), …, 1/√(n+m))`, a point on the unit sphere.
    pub fn sphere_start(&self) -> Vec<f64> {
        let k = self.dim + self.num_constraints();
        vec![1.0 / libm::sqrt(k as f64); k]
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        (0..self.num_centers())
            .map(|k| (dist2(x, self.center(k)) - self.radii[k]).max(0.0))
            .sum()
    }

    /// Subgradient of the objective; a term contributes zero on its ball
    /// (boundary included) and at its center.
    pub fn subgradient(&self, x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for k in 0..self.num_centers() {
            let c = self.center(k);
            let d = dist2(x, c);
            if d > self.radii[k] && d > 0.0 {
                for ((o, xi), ci) in out.iter_mut().zip(x).zip(c) {
                    *o += (xi - ci) / d;
                }
            }
        }
    }

    /// `φ_p(x) = Σ_j α_pj x_j² − 1`.
    pub fn constraint(&self, p: usize, x: &[f64]) -> f64 {
        self.constraint_row(p)
            .iter()
            .zip(x)
            .map(|(a, v)| a * v * v)
            .sum::<f64>()
            - 1.0
    }

    /// The Lagrangian operator at a feasible `u = (x, λ)`.
    pub fn vi_operator(&self, u: &[f64]) -> Result<Vec<f64>> {
        let setup = self.setup();
        setup.check_point(u)?;
        let mut out = vec![0.0; u.len()];
        self.apply(u, &mut out);
        Ok(out)
    }

    fn apply(&self, u: &[f64], out: &mut [f64]) {
        let (x, lambda) = u.split_at(self.dim);
        let (top, bottom) = out.split_at_mut(self.dim);
        self.subgradient(x, top);
        for (p, (&lp, b)) in lambda.iter().zip(bottom.iter_mut()).enumerate() {
            let row = self.constraint_row(p);
            for ((t, a), xi) in top.iter_mut().zip(row).zip(x) {
                *t += lp * 2.0 * a * xi;
            }
            *b = -self.constraint(p, x);
        }
    }

    pub fn oracle(&self) -> FtsOracle<'_> {
        FtsOracle(self)
    }
}

fn normal_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        if norm2(&v) > 0.0 {
            return v;
        }
    }
}

/// [`Oracle`] view of an [`FtsProblem`].
#[derive(Debug, Clone, Copy)]
pub struct FtsOracle<'a>(pub &'a FtsProblem);

impl Oracle for FtsOracle<'_> {
    fn dim(&self) -> usize {
        self.0.dim + self.0.num_constraints()
    }

    fn eval(&mut self, u: &[f64], out: &mut [f64]) -> Result<()> {
        let n = self.dim();
        if u.len() != n || out.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: u.len(),
            });
        }
        if norm2(u) > 1.0 + FEASIBILITY_TOL {
            return Err(Error::Infeasible(
                "FTS operator evaluated outside the unit ball",
            ));
        }
        self.0.apply(u, out);
        Ok(())
    }
}
