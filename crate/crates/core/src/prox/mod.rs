//! Proximal setups: a feasible set, its distance-generating function (d.g.f.),
//! the primal/dual norm pair, the Bregman divergence, and the exact
//! prox-mapping `argmin_{x∈Q} ⟨s, x⟩ + L·V(x, anchor)`.
//!
//! | set            | d.g.f.        | primal / dual norm       | prox            |
//! |----------------|---------------|--------------------------|-----------------|
//! | Euclidean ball | ½‖x − c‖₂²    | ℓ2 / ℓ2                  | projection      |
//! | simplex        | Σ xᵢ ln xᵢ    | ℓ1 / ℓ∞                  | softmax update  |
//! | product        | Σ of factors  | √Σ‖·‖ᵢ² / √Σ‖·‖ᵢ,*²      | blockwise       |

mod entropy;
mod euclidean;

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::linalg::{norm1, norm2, norm_inf};
use crate::{Error, Result};

pub use entropy::ENTROPY_FLOOR;

/// Absolute feasibility tolerance for points.
pub const FEASIBILITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum ProxSetup {
    EuclideanBall { center: Vec<f64>, radius: f64 },
    Simplex { dim: usize },
    Product(Vec<ProxSetup>),
}

impl ProxSetup {
    pub fn euclidean_ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::InvalidArgument("ball dimension must be positive"));
        }
        if !(radius > 0.0) {
            return Err(Error::InvalidArgument("ball radius must be positive"));
        }
        if !radius.is_finite() {
            return Err(Error::UnsupportedSet("unbounded ball"));
        }
        Ok(ProxSetup::EuclideanBall { center, radius })
    }

    pub fn unit_ball(dim: usize) -> Result<Self> {
        Self::euclidean_ball(vec![0.0; dim], 1.0)
    }

    pub fn simplex(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("simplex dimension must be positive"));
        }
        Ok(ProxSetup::Simplex { dim })
    }

    pub fn product(factors: Vec<ProxSetup>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidArgument("product needs at least one factor"));
        }
        Ok(ProxSetup::Product(factors))
    }

    /// Δₙ × Δₘ with the summed entropy d.g.f.
    pub fn simplex_pair(n: usize, m: usize) -> Result<Self> {
        Self::product(vec![Self::simplex(n)?, Self::simplex(m)?])
    }

    pub fn dim(&self) -> usize {
        match self {
            ProxSetup::EuclideanBall { center, .. } => center.len(),
            ProxSetup::Simplex { dim } => *dim,
            ProxSetup::Product(fs) => fs.iter().map(ProxSetup::dim).sum(),
        }
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        let expected = self.dim();
        if expected != len {
            return Err(Error::DimensionMismatch { expected, got: len });
        }
        Ok(())
    }

    pub fn is_feasible(&self, x: &[f64]) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        match self {
            ProxSetup::EuclideanBall { center, radius } => {
                euclidean::is_feasible(center, *radius, x, FEASIBILITY_TOL)
            }
            ProxSetup::Simplex { .. } => entropy::is_feasible(x, FEASIBILITY_TOL),
            ProxSetup::Product(fs) => blocks(fs, x).all(|(f, b)| f.is_feasible(b)),
        }
    }

    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        self.check_dim(x.len())?;
        if !self.is_feasible(x) {
            return Err(Error::Infeasible("point lies outside the feasible set"));
        }
        Ok(())
    }

    /// The minimizer of the d.g.f. over the set.
    pub fn initial_point(&self) -> Vec<f64> {
        match self {
            ProxSetup::EuclideanBall { center, .. } => center.clone(),
            ProxSetup::Simplex { dim } => vec![1.0 / *dim as f64; *dim],
            ProxSetup::Product(fs) => fs.iter().flat_map(|f| f.initial_point()).collect(),
        }
    }

    /// Value of the distance-generating function.
    pub fn dgf(&self, x: &[f64]) -> f64 {
        match self {
            ProxSetup::EuclideanBall { center, .. } => euclidean::dgf(center, x),
            ProxSetup::Simplex { .. } => entropy::dgf(x),
            ProxSetup::Product(fs) => blocks(fs, x).map(|(f, b)| f.dgf(b)).sum(),
        }
    }

    pub fn dgf_gradient(&self, x: &[f64], out: &mut [f64]) {
        match self {
            ProxSetup::EuclideanBall { center, .. } => euclidean::dgf_gradient(center, x, out),
            ProxSetup::Simplex { .. } => entropy::dgf_gradient(x, out),
            ProxSetup::Product(fs) => {
                let mut offset = 0;
                for f in fs {
                    let k = f.dim();
                    f.dgf_gradient(&x[offset..offset + k], &mut out[offset..offset + k]);
                    offset += k;
                }
            }
        }
    }

    /// `V(x, y) = d(x) − d(y) − ⟨∇d(y), x − y⟩`.
    ///
    /// For the entropy setup the value is `f64::INFINITY` when some `yᵢ = 0`
    /// while `xᵢ > 0`.
    pub fn bregman_divergence(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        self.check_point(y)?;
        Ok(self.divergence(x, y))
    }

    /// Unchecked variant of [`bregman_divergence`](Self::bregman_divergence).
    pub fn divergence(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            ProxSetup::EuclideanBall { .. } => euclidean::divergence(x, y),
            ProxSetup::Simplex { .. } => entropy::divergence(x, y),
            ProxSetup::Product(fs) => {
                let mut offset = 0;
                let mut total = 0.0;
                for f in fs {
                    let k = f.dim();
                    total += f.divergence(&x[offset..offset + k], &y[offset..offset + k]);
                    offset += k;
                }
                total
            }
        }
    }

    /// `argmin_{x∈Q} ⟨s, x⟩ + l·V(x, anchor)`.
    pub fn prox_map(&self, anchor: &[f64], s: &[f64], l: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim()];
        self.prox_map_into(anchor, s, l, &mut out)?;
        Ok(out)
    }

    pub fn prox_map_into(&self, anchor: &[f64], s: &[f64], l: f64, out: &mut [f64]) -> Result<()> {
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::InvalidArgument(
                "prox constant must be positive and finite",
            ));
        }
        self.check_dim(anchor.len())?;
        self.check_dim(s.len())?;
        self.check_dim(out.len())?;
        if s.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("dual vector has non-finite entries"));
        }
        self.prox_unchecked(anchor, s, l, out);
        Ok(())
    }

    pub(crate) fn prox_unchecked(&self, anchor: &[f64], s: &[f64], l: f64, out: &mut [f64]) {
        match self {
            ProxSetup::EuclideanBall { center, radius } => {
                euclidean::prox(center, *radius, anchor, s, l, out)
            }
            ProxSetup::Simplex { .. } => entropy::prox(anchor, s, l, out),
            ProxSetup::Product(fs) => {
                let mut offset = 0;
                for f in fs {
                    let r = offset..offset + f.dim();
                    f.prox_unchecked(&anchor[r.clone()], &s[r.clone()], l, &mut out[r.clone()]);
                    offset = r.end;
                }
            }
        }
    }

    /// `R² = max_{x∈Q} V(x, x⁰)` for the d.g.f. minimizer `x⁰`.
    ///
    /// Uses the closed forms r²/2 (ball) and ln n (simplex); for the simplex
    /// this is a supremum that is not attained on the relative interior.
    pub fn omega_radius_squared(&self) -> Result<f64> {
        match self {
            ProxSetup::EuclideanBall { radius, .. } => {
                if !radius.is_finite() {
                    return Err(Error::UnsupportedSet("unbounded ball"));
                }
                Ok(0.5 * radius * radius)
            }
            ProxSetup::Simplex { dim } => Ok(libm::log(*dim as f64)),
            ProxSetup::Product(fs) => fs.iter().map(ProxSetup::omega_radius_squared).sum(),
        }
    }

    /// `max_{x∈Q} V(x, start)` for an arbitrary feasible start.
    pub fn omega_radius_squared_from(&self, start: &[f64]) -> Result<f64> {
        self.check_point(start)?;
        let r2 = self.radius_from_unchecked(start);
        if !r2.is_finite() {
            return Err(Error::UnsupportedSet(
                "divergence from this start point is unbounded over the set",
            ));
        }
        Ok(r2)
    }

    fn radius_from_unchecked(&self, start: &[f64]) -> f64 {
        match self {
            ProxSetup::EuclideanBall { center, radius } => {
                euclidean::radius_squared_from(center, *radius, start)
            }
            ProxSetup::Simplex { .. } => entropy::radius_squared_from(start),
            ProxSetup::Product(fs) => blocks(fs, start)
                .map(|(f, b)| f.radius_from_unchecked(b))
                .sum(),
        }
    }

    pub fn primal_norm(&self, v: &[f64]) -> Result<f64> {
        self.check_dim(v.len())?;
        Ok(self.primal_norm_unchecked(v))
    }

    pub fn dual_norm(&self, s: &[f64]) -> Result<f64> {
        self.check_dim(s.len())?;
        Ok(self.dual_norm_unchecked(s))
    }

    pub fn primal_norm_unchecked(&self, v: &[f64]) -> f64 {
        match self {
            ProxSetup::EuclideanBall { .. } => norm2(v),
            ProxSetup::Simplex { .. } => norm1(v),
            ProxSetup::Product(fs) => libm::sqrt(
                blocks(fs, v)
                    .map(|(f, b)| {
                        let n = f.primal_norm_unchecked(b);
                        n * n
                    })
                    .sum(),
            ),
        }
    }

    pub fn dual_norm_unchecked(&self, s: &[f64]) -> f64 {
        match self {
            ProxSetup::EuclideanBall { .. } => norm2(s),
            ProxSetup::Simplex { .. } => norm_inf(s),
            ProxSetup::Product(fs) => libm::sqrt(
                blocks(fs, s)
                    .map(|(f, b)| {
                        let n = f.dual_norm_unchecked(b);
                        n * n
                    })
                    .sum(),
            ),
        }
    }

    /// Primal norm of `x − y`.
    pub fn distance(&self, x: &[f64], y: &[f64]) -> f64 {
        let diff = crate::linalg::sub(x, y);
        self.primal_norm_unchecked(&diff)
    }

    /// Draws a random feasible point: uniform in a ball, flat Dirichlet on a
    /// simplex, blockwise for products.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            ProxSetup::EuclideanBall { center, radius } => {
                let dir = uniform_in_l2_ball(rng, center.len(), *radius);
                dir.iter().zip(center).map(|(d, c)| c + d).collect()
            }
            ProxSetup::Simplex { dim } => {
                let mut w: Vec<f64> = (0..*dim).map(|_| Exp1.sample(rng)).collect();
                let total: f64 = w.iter().sum();
                for v in &mut w {
                    *v /= total;
                }
                w
            }
            ProxSetup::Product(fs) => fs.iter().flat_map(|f| f.sample_point(rng)).collect(),
        }
    }

    /// Draws a random vector whose dual norm is at most `radius`.
    ///
    /// ℓ2 blocks are uniform in the ball (normal direction, radius scaled by
    /// `U^{1/dim}`); ℓ∞ blocks have independent uniform components. A product
    /// with `k` factors gives each block the radius `radius/√k`.
    pub fn sample_dual_ball<R: Rng + ?Sized>(&self, rng: &mut R, radius: f64, out: &mut [f64]) {
        match self {
            ProxSetup::EuclideanBall { center, .. } => {
                let v = uniform_in_l2_ball(rng, center.len(), radius);
                out.copy_from_slice(&v);
            }
            ProxSetup::Simplex { .. } => {
                for o in out.iter_mut() {
                    *o = radius * (2.0 * rng.random::<f64>() - 1.0);
                }
            }
            ProxSetup::Product(fs) => {
                let share = radius / libm::sqrt(fs.len() as f64);
                let mut offset = 0;
                for f in fs {
                    let k = f.dim();
                    f.sample_dual_ball(rng, share, &mut out[offset..offset + k]);
                    offset += k;
                }
            }
        }
    }
}

fn uniform_in_l2_ball<R: Rng + ?Sized>(rng: &mut R, dim: usize, radius: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
    let n = norm2(&v);
    let u: f64 = rng.random();
    let scale = if n > 0.0 {
        radius * libm::pow(u, 1.0 / dim as f64) / n
    } else {
        0.0
    };
    for x in &mut v {
        *x *= scale;
    }
    v
}

fn blocks<'a>(
    factors: &'a [ProxSetup],
    x: &'a [f64],
) -> impl Iterator<Item = (&'a ProxSetup, &'a [f64])> + 'a {
    let mut offset = 0;
    factors.iter().map(move |f| {
        let k = f.dim();
        let b = &x[offset..offset + k];
        offset += k;
        (f, b)
    })
}
