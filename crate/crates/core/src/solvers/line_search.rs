use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::dot;
use crate::{Error, Oracle, ProxSetup, Result};

/// Doublings of `L` alone (with `δ = 0`) after which `δ` is seeded.
const ZERO_DELTA_DOUBLINGS: u32 = 60;
const ZERO_DELTA_SEED_SCALE: f64 = 1e-15;
const ZERO_DELTA_SEED_FLOOR: f64 = 1e-300;

/// Attempt cap used by the standalone [`mpai_line_search`].
pub const DEFAULT_LINE_SEARCH_ATTEMPTS: u64 = 2_000;

#[derive(Debug, Clone, PartialEq)]
pub struct LineSearchOutcome {
    pub y_next: Vec<f64>,
    pub x_next: Vec<f64>,
    pub g_y_next: Vec<f64>,
    pub l: f64,
    pub delta: f64,
    pub attempts: u64,
}

/// Both prox steps from `x_k` with constant `l`; fills `y`, `g(y)` and `x`.
pub(crate) fn prox_pair<O: Oracle + ?Sized>(
    setup: &ProxSetup,
    oracle: &mut O,
    x_k: &[f64],
    g_x_k: &[f64],
    l: f64,
    y: &mut [f64],
    g_y: &mut [f64],
    x: &mut [f64],
) -> Result<()> {
    setup.prox_map_into(x_k, g_x_k, l, y)?;
    oracle.eval(y, g_y)?;
    if g_y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Oracle("operator returned a non-finite value"));
    }
    setup.prox_map_into(x_k, g_y, l, x)?;
    Ok(())
}

/// Left and right sides of the acceptance test
/// `⟨g(y) − g(x_k), y − x⟩ ≤ L·V(y, x_k) + L·V(x, y) + δ·‖y − x‖`.
pub(crate) fn acceptance_sides(
    setup: &ProxSetup,
    x_k: &[f64],
    g_x_k: &[f64],
    y: &[f64],
    g_y: &[f64],
    x: &[f64],
    l: f64,
    delta: f64,
) -> (f64, f64) {
    let lhs = dot(g_y, y) - dot(g_y, x) - dot(g_x_k, y) + dot(g_x_k, x);
    let rhs =
        l * setup.divergence(y, x_k) + l * setup.divergence(x, y) + delta * setup.distance(y, x);
    (lhs, rhs)
}

pub(crate) fn search<O: Oracle + ?Sized>(
    setup: &ProxSetup,
    oracle: &mut O,
    x_k: &[f64],
    g_x_k: &[f64],
    l_try: f64,
    delta_try: f64,
    doubles_delta: bool,
    max_attempts: u64,
) -> Result<LineSearchOutcome> {
    if !(l_try > 0.0) || !l_try.is_finite() {
        return Err(Error::InvalidArgument("trial L must be positive"));
    }
    if !(delta_try >= 0.0) {
        return Err(Error::InvalidArgument("trial delta must be nonnegative"));
    }
    let n = setup.dim();
    let (mut y, mut g_y, mut x) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let (mut l, mut delta) = (l_try, delta_try);
    let mut attempts = 0u64;
    let mut zero_delta_doublings = 0u32;
    let mut seeded = false;
    loop {
        if attempts >= max_attempts {
            return Err(Error::AttemptBudget {
                attempts,
                last_l: l,
                last_delta: delta,
            });
        }
        attempts += 1;
        prox_pair(setup, oracle, x_k, g_x_k, l, &mut y, &mut g_y, &mut x)?;
        let (lhs, rhs) = acceptance_sides(setup, x_k, g_x_k, &y, &g_y, &x, l, delta);
        // An infinite right side (entropy support loss) is not accepted.
        if rhs.is_finite() && lhs <= rhs {
            return Ok(LineSearchOutcome {
                y_next: y,
                x_next: x,
                g_y_next: g_y,
                l,
                delta,
                attempts,
            });
        }
        l *= 2.0;
        if doubles_delta {
            delta *= 2.0;
            if delta == 0.0 && !seeded {
                zero_delta_doublings += 1;
                if zero_delta_doublings > ZERO_DELTA_DOUBLINGS {
                    seeded = true;
                    delta = ZERO_DELTA_SEED_SCALE * setup.dual_norm_unchecked(g_x_k)
                        + ZERO_DELTA_SEED_FLOOR;
                    l = l_try;
                }
            }
        }
    }
}

/// One MPAI step from `x_k`: starting at `(l_try, delta_try)`, doubles both
/// constants until the acceptance test holds, and returns the first accepted
/// pair `(y^{k+1}, x^{k+1})` with its constants and the number of attempts.
pub fn mpai_line_search<O: Oracle + ?Sized>(
    setup: &ProxSetup,
    oracle: &mut O,
    x_k: &[f64],
    l_try: f64,
    delta_try: f64,
) -> Result<LineSearchOutcome> {
    setup.check_point(x_k)?;
    let mut g_x_k = vec![0.0; setup.dim()];
    oracle.eval(x_k, &mut g_x_k)?;
    search(
        setup,
        oracle,
        x_k,
        &g_x_k,
        l_try,
        delta_try,
        true,
        DEFAULT_LINE_SEARCH_ATTEMPTS,
    )
}
