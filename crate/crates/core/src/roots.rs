//! Safeguarded Newton iteration for increasing scalar functions.

use crate::error::{Error, Result};

/// Solves `f(x) = target` for an increasing `f` known to have its root in
/// `[lo, hi]`.
///
/// `f` returns the value and derivative. Newton steps that leave the current
/// bracket, or meet a non-positive derivative, fall back to bisection. When
/// `max_iter` safeguarded steps do not reach `tol`, pure bisection takes over.
pub fn solve_increasing<F>(
    mut f: F,
    target: f64,
    mut lo: f64,
    mut hi: f64,
    x0: f64,
    tol: f64,
    max_iter: usize,
) -> Result<f64>
where
    F: FnMut(f64) -> (f64, f64),
{
    let mut x = x0.clamp(lo, hi);
    for _ in 0..max_iter {
        let (v, dv) = f(x);
        let r = v - target;
        if r.abs() <= tol {
            return Ok(polish(x, r, dv, lo, hi));
        }
        if r > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let newton = x - r / dv;
        x = if dv > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    for _ in 0..200 {
        let (v, dv) = f(x);
        let r = v - target;
        if r.abs() <= tol {
            return Ok(polish(x, r, dv, lo, hi));
        }
        if r > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        if hi - lo <= f64::EPSILON * (1.0 + x.abs()) {
            break;
        }
        x = 0.5 * (lo + hi);
    }
    Err(Error::ConvergenceFailure { target })
}

// One last Newton correction once inside tolerance.
fn polish(x: f64, r: f64, dv: f64, lo: f64, hi: f64) -> f64 {
    if r == 0.0 || dv <= 0.0 {
        return x;
    }
    let y = x - r / dv;
    if y >= lo && y <= hi {
        y
    } else {
        x
    }
}
