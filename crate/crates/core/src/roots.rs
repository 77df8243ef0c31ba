//! Bracketing root finder for monotone scalar functions.

use crate::error::{Error, Result};

/// A located root together with the bracket it was found in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
}

/// Find `x` in `[lo, hi]` with `f(x) = 0`, given `f(lo)` and `f(hi)` of
/// opposite sign.
///
/// Hybrid of the Illinois secant step and bisection: a secant step is taken
/// whenever it lands inside the current bracket and the bracket shrank by at
/// least half on the previous step, otherwise the bracket is bisected.
/// Terminates when `|f(x)| <= ftol` or the bracket is narrower than
/// `xtol * max(1, |x|)`.
pub fn bracketed<F>(mut f: F, lo: f64, hi: f64, xtol: f64, ftol: f64) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    let bracket = (a, b);
    if fa == 0.0 {
        return Ok(Root { x: a, residual: 0.0, bracket, iterations: 0 });
    }
    if fb == 0.0 {
        return Ok(Root { x: b, residual: 0.0, bracket, iterations: 0 });
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NonConvergence(format!(
            "root not bracketed: f({a}) = {fa}, f({b}) = {fb}"
        )));
    }

    let mut side = 0i8;
    let mut last_width = f64::INFINITY;
    let mut best = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
    for iter in 1..=200 {
        let width = b - a;
        let secant = (a * fb - b * fa) / (fb - fa);
        let secant_ok = secant > a && secant < b && width <= 0.5 * last_width;
        last_width = if secant_ok { width } else { f64::INFINITY };
        let x = if secant_ok { secant } else { 0.5 * (a + b) };
        let fx = f(x)?;
        if fx.abs() < best.1.abs() {
            best = (x, fx);
        }
        if fx.abs() <= ftol {
            return Ok(Root { x, residual: fx, bracket, iterations: iter });
        }
        if fx.signum() == fb.signum() {
            b = x;
            fb = fx;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = x;
            fa = fx;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
        if (b - a) <= xtol * best.0.abs().max(1.0) {
            return Ok(Root { x: best.0, residual: best.1, bracket, iterations: iter });
        }
    }
    Err(Error::NonConvergence(format!(
        "bracketing solver did not converge; best residual {} at {}",
        best.1, best.0
    )))
}
