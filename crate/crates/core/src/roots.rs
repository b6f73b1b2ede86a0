//! Bracketing root finders shared by the fixed-point solvers.

use crate::error::{Error, Result};

/// Settings for every bisection in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Bisection stops once the bracket is no wider than this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_iterations: 200,
        }
    }
}

/// Root of a nonincreasing function with `f(lo) >= 0 >= f(hi)`.
pub(crate) fn bisect_decreasing<F>(
    what: &'static str,
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    opts: SolverOptions,
) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (f_lo, f_hi) = (f(lo), f(hi));
    if !(f_lo >= 0.0 && f_hi <= 0.0) {
        return Err(Error::Bracketing {
            at_lo: f_lo,
            at_hi: f_hi,
        });
    }
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    for _ in 0..opts.max_iterations {
        if hi - lo <= opts.tolerance {
            return Ok(0.5 * (lo + hi));
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // bracket is down to adjacent floats
            return Ok(mid);
        }
        let v = f(mid);
        if v == 0.0 {
            return Ok(mid);
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if hi - lo <= opts.tolerance {
        Ok(0.5 * (lo + hi))
    } else {
        Err(Error::NoConvergence {
            what,
            iterations: opts.max_iterations,
        })
    }
}

/// Supremum of `{x in [lo, hi] : pred(x)}` for a predicate that holds on an
/// initial segment of the interval. `pred(lo)` is assumed true.
pub(crate) fn bisect_sup<P>(mut pred: P, mut lo: f64, mut hi: f64, opts: SolverOptions) -> f64
where
    P: FnMut(f64) -> bool,
{
    if pred(hi) {
        return hi;
    }
    for _ in 0..opts.max_iterations {
        if hi - lo <= opts.tolerance {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}
