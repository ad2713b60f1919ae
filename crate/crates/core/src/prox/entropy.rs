//! Probability simplex with the negative entropy d(x) = Σ xᵢ ln xᵢ.
//!
//! Logarithms are taken of `max(xᵢ, ENTROPY_FLOOR)`; the multiplicative
//! prox update is evaluated in the log domain with max-subtraction.

use libm::{exp, log};

/// Lower clamp applied before every logarithm.
pub const ENTROPY_FLOOR: f64 = 1e-16;

#[inline]
fn ln_clamped(v: f64) -> f64 {
    log(v.max(ENTROPY_FLOOR))
}

#[inline]
fn xlogx(v: f64) -> f64 {
    if v <= 0.0 {
        0.0
    } else {
        v * ln_clamped(v)
    }
}

pub(super) fn is_feasible(x: &[f64], tol: f64) -> bool {
    let mut sum = 0.0;
    for &v in x {
        if !v.is_finite() || v < -tol {
            return false;
        }
        sum += v;
    }
    (sum - 1.0).abs() <= tol
}

pub(super) fn dgf(x: &[f64]) -> f64 {
    x.iter().map(|&v| xlogx(v)).sum()
}

pub(super) fn dgf_gradient(x: &[f64], out: &mut [f64]) {
    for (o, &v) in out.iter_mut().zip(x) {
        *o = 1.0 + ln_clamped(v);
    }
}

/// Σ xᵢ ln(xᵢ/yᵢ) − xᵢ + yᵢ, or `+∞` when some yᵢ = 0 < xᵢ.
pub(super) fn divergence(x: &[f64], y: &[f64]) -> f64 {
    let mut total = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        if yi <= 0.0 && xi > 0.0 {
            return f64::INFINITY;
        }
        total += xlogx(xi) - xi.max(0.0) * ln_clamped(yi) - xi + yi;
    }
    total.max(0.0)
}

/// uᵢ ∝ anchorᵢ·exp(−sᵢ/l), renormalized.
pub(super) fn prox(anchor: &[f64], s: &[f64], l: f64, out: &mut [f64]) {
    let mut top = f64::NEG_INFINITY;
    for ((o, &a), &si) in out.iter_mut().zip(anchor).zip(s) {
        *o = ln_clamped(a) - si / l;
        top = top.max(*o);
    }
    let mut total = 0.0;
    for o in out.iter_mut() {
        *o = exp(*o - top);
        total += *o;
    }
    for o in out.iter_mut() {
        *o /= total;
    }
}

/// max over vertices of KL(eᵢ ‖ start) = −ln minᵢ startᵢ.
pub(super) fn radius_squared_from(start: &[f64]) -> f64 {
    let smallest = start.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    if smallest <= 0.0 {
        f64::INFINITY
    } else {
        -log(smallest)
    }
}
