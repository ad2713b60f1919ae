//! Euclidean ball with d(x) = ½‖x − c‖₂².

use crate::linalg::{dist2, norm2};

pub(super) fn is_feasible(center: &[f64], radius: f64, x: &[f64], tol: f64) -> bool {
    x.iter().all(|v| v.is_finite()) && dist2(x, center) <= radius + tol
}

pub(super) fn dgf(center: &[f64], x: &[f64]) -> f64 {
    let d = dist2(x, center);
    0.5 * d * d
}

pub(super) fn dgf_gradient(center: &[f64], x: &[f64], out: &mut [f64]) {
    for ((o, xi), ci) in out.iter_mut().zip(x).zip(center) {
        *o = xi - ci;
    }
}

pub(super) fn divergence(x: &[f64], y: &[f64]) -> f64 {
    let d = dist2(x, y);
    0.5 * d * d
}

/// Projection of `anchor − s/l` onto the ball.
pub(super) fn prox(
    center: &[f64],
    radius: f64,
    anchor: &[f64],
    s: &[f64],
    l: f64,
    out: &mut [f64],
) {
    for (((o, a), si), ci) in out.iter_mut().zip(anchor).zip(s).zip(center) {
        *o = a - si / l - ci;
    }
    let n = norm2(out);
    let scale = if n > radius { radius / n } else { 1.0 };
    for (o, ci) in out.iter_mut().zip(center) {
        *o = ci + *o * scale;
    }
}

/// max over the ball of ½‖x − start‖².
pub(super) fn radius_squared_from(center: &[f64], radius: f64, start: &[f64]) -> f64 {
    let far = radius + dist2(start, center);
    0.5 * far * far
}
