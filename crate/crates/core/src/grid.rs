//! Shared probe-grid policy and small grid utilities.
//!
//! Every numeric certificate in the crate (log-shape of a generator, shape of
//! a model in its parameter, curve dominance) is evaluated on a finite grid.
//! [`GridPolicy`] carries the ranges, point counts and tolerances so that the
//! verifiers and the CLI agree on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridPolicy {
    /// Points on a survival-curve grid.
    pub curve_points: usize,
    /// Points on the x-grid used by model shape checks.
    pub shape_x_points: usize,
    /// Points on a parameter grid (θ or log θ).
    pub param_points: usize,
    /// Lower/upper quantile levels bounding default x-grids.
    pub quantile_lo: f64,
    pub quantile_hi: f64,
    /// Upper end of the generator log-shape probe grid.
    pub log_shape_t_max: f64,
    pub log_shape_points: usize,
    /// Absolute tolerance on a curve gap to call dominance.
    pub dominance_tol: f64,
    /// Magnitude a gap must exceed on both sides to call a crossing.
    pub crossing_tol: f64,
    /// Tolerance on shape-check violations.
    pub shape_tol: f64,
    /// Sign tolerance for generator log-shape second differences.
    pub classification_tol: f64,
    /// Relative central-difference step for the Schur probe.
    pub fd_step: f64,
}

impl Default for GridPolicy {
    fn default() -> Self {
        Self {
            curve_points: 1000,
            shape_x_points: 200,
            param_points: 100,
            quantile_lo: 0.001,
            quantile_hi: 0.999,
            log_shape_t_max: 50.0,
            log_shape_points: 200,
            dominance_tol: 1e-10,
            crossing_tol: 1e-8,
            shape_tol: 1e-9,
            classification_tol: 1e-9,
            fd_step: 1e-5,
        }
    }
}

/// Evenly spaced points on `[lo, hi]`, endpoints included.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (points - 1) as f64;
            let mut out: Vec<f64> = (0..points).map(|i| lo + step * i as f64).collect();
            out[points - 1] = hi;
            out
        }
    }
}

/// Log-spaced points on `[lo, hi]` with `0 < lo < hi`.
pub fn logspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let mut out: Vec<f64> = linspace(lo.ln(), hi.ln(), points).into_iter().map(f64::exp).collect();
    if let Some(first) = out.first_mut() {
        *first = lo;
    }
    if let Some(last) = out.last_mut() {
        *last = hi;
    }
    out
}

/// Checks that a grid is finite and strictly increasing.
pub fn validate_increasing(xs: &[f64]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::Grid("empty grid".into()));
    }
    if let Some(i) = xs.iter().position(|x| !x.is_finite()) {
        return Err(Error::Grid(format!("non-finite grid point at index {i}")));
    }
    if let Some(i) = xs.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::Grid(format!("grid not strictly increasing at index {}", i + 1)));
    }
    Ok(())
}

/// Finds `x` in `[lo, ∞)` with `f(x) = target` for a nonincreasing `f`,
/// expanding the upper bracket geometrically. `rel_tol` is the relative
/// x-resolution at termination.
pub(crate) fn invert_decreasing<F>(f: F, target: f64, lo: f64, rel_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if f(lo) <= target {
        return Ok(lo);
    }
    let mut step = 1.0_f64.max(lo.abs());
    let mut hi = lo + step;
    let mut expansions = 0;
    while f(hi) > target {
        step *= 2.0;
        hi = lo + step;
        expansions += 1;
        if expansions > 1100 || !hi.is_finite() {
            return Err(Error::Numerical(format!(
                "bracket failure: survival does not fall to {target:e} above {lo}"
            )));
        }
    }
    let mut a = lo;
    let mut b = hi;
    for _ in 0..400 {
        let mid = 0.5 * (a + b);
        if f(mid) > target {
            a = mid;
        } else {
            b = mid;
        }
        if b - a <= rel_tol * b.abs().max(1.0) {
            break;
        }
    }
    Ok(0.5 * (a + b))
}
