//! Decoherence exponents and the decoherence time.
//!
//! For two pointer branches whose path difference is linear in time,
//! `d(tau) = a - b tau` with `a = x' - x` and `b = eps (s' - s)`, the
//! decoherence exponent is the quadratic form
//!
//! ```text
//! D_t = int_0^t dt1 int_0^t1 dt2 Re h(t1 - t2) d(t1) d(t2)
//!     = a^2 Q_aa(t) + a b Q_ab(t) + b^2 Q_bb(t)
//! ```
//!
//! Changing to the lag `u = t1 - t2` turns each coefficient into a single
//! integral `int_0^t Re h(u) w(u, t) du` with a polynomial weight:
//!
//! * `w_aa = (t - u)`
//! * `w_ab = -t (t - u)`
//! * `w_bb = (t - u)^2 (2t + u) / 6`
//!
//! `Q_bb` is the peak kernel `K(t) = int int tau1 tau2 Re h(tau1 - tau2)`.

use crate::bathmodel::BathCorrelator;
use crate::error::{Error, Result};
use crate::quad::Quadrature;
use crate::roots;

/// Target residual `|D(t_dec) - 1|` of [`decoherence_time`].
pub const TDEC_RESIDUAL: f64 = 1e-10;

/// Coefficients of the decoherence exponent at a fixed time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherenceForm {
    pub t: f64,
    pub aa: f64,
    pub ab: f64,
    pub bb: f64,
    /// Summed error estimate of the three coefficients.
    pub abs_err: f64,
}

impl DecoherenceForm {
    pub fn zero(t: f64) -> Self {
        Self { t, aa: 0.0, ab: 0.0, bb: 0.0, abs_err: 0.0 }
    }

    /// `D` for displacement `a = x' - x` and velocity `b = eps (s' - s)`.
    pub fn exponent(&self, a: f64, b: f64) -> f64 {
        a * a * self.aa + a * b * self.ab + b * b * self.bb
    }
}

fn weight_bb(u: f64, t: f64) -> f64 {
    let v = t - u;
    v * v * (2.0 * t + u) / 6.0
}

/// The three coefficients of the decoherence exponent at time `t`.
pub fn decoherence_form(corr: &BathCorrelator, t: f64) -> Result<DecoherenceForm> {
    if t == 0.0 {
        return Ok(DecoherenceForm::zero(0.0));
    }
    let aa = corr.integrate_re_weighted(t, |u| t - u)?;
    let bb = corr.integrate_re_weighted(t, |u| weight_bb(u, t))?;
    Ok(DecoherenceForm {
        t,
        aa: aa.value,
        ab: -t * aa.value,
        bb: bb.value,
        abs_err: aa.abs_err * (1.0 + t) + bb.abs_err,
    })
}

/// `K(t) = int_0^t dt1 int_0^t1 dt2 t1 t2 Re h(t1 - t2)` with its error
/// estimate.
pub fn kernel_k(corr: &BathCorrelator, t: f64) -> Result<Quadrature> {
    if t < 0.0 {
        return Err(Error::InvalidInput(format!("kernel time must be >= 0, got {t}")));
    }
    corr.integrate_re_weighted(t, |u| weight_bb(u, t))
}

/// Coupling `eps |s - s'|` together with the bath correlator.
#[derive(Debug, Clone, Copy)]
pub struct DecoherenceParams<'a> {
    pub eps_ds: f64,
    pub corr: &'a BathCorrelator,
}

impl<'a> DecoherenceParams<'a> {
    pub fn new(eps_ds: f64, corr: &'a BathCorrelator) -> Result<Self> {
        if !(eps_ds >= 0.0 && eps_ds.is_finite()) {
            return Err(Error::InvalidInput(format!("eps_ds must be >= 0, got {eps_ds}")));
        }
        Ok(Self { eps_ds, corr })
    }
}

/// Peak decoherence exponent `(eps ds)^2 K(t)`.
pub fn d_peak(p: &DecoherenceParams<'_>, t: f64) -> Result<f64> {
    if p.eps_ds == 0.0 {
        return Ok(0.0);
    }
    Ok(p.eps_ds * p.eps_ds * kernel_k(p.corr, t)?.value)
}

/// Decoherence exponent of the joint element `<s, x| rho(t) |s', x'>` in
/// terms of the unshifted positions `x`, `x'`.
pub fn d_general(
    corr: &BathCorrelator,
    eps: f64,
    s: f64,
    s_prime: f64,
    x: f64,
    x_prime: f64,
    t: f64,
) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::InvalidInput(format!("time must be >= 0, got {t}")));
    }
    let a = x_prime - x;
    let b = eps * (s_prime - s);
    if a == 0.0 && b == 0.0 {
        return Ok(0.0);
    }
    Ok(decoherence_form(corr, t)?.exponent(a, b))
}

/// A solved decoherence time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherenceTime {
    pub t_dec: f64,
    /// `D(t_dec) - 1`.
    pub residual: f64,
    /// Bracket `[lo, hi]` with `D(lo) < 1 <= D(hi)` handed to the solver.
    pub bracket: (f64, f64),
}

/// Solve `D^peak(t_dec) = 1`.
///
/// The bracket is grown by doubling from the small-time estimate
/// `(8 / eps_ds^2)^{1/4}` until `D >= 10` (or the correlator range ends),
/// and shrunk by halving until `D <= 0.1`; the root is then polished by the
/// bisection/secant hybrid in [`roots::bracketed`].
pub fn decoherence_time(p: &DecoherenceParams<'_>) -> Result<DecoherenceTime> {
    if !(p.eps_ds > 0.0) {
        return Err(Error::InvalidInput(format!(
            "decoherence time needs eps_ds > 0, got {}",
            p.eps_ds
        )));
    }
    let tau_max = p.corr.tau_max();
    let d = |t: f64| d_peak(p, t);

    let guess = (8.0 / (p.eps_ds * p.eps_ds)).powf(0.25).min(tau_max);
    let mut hi = guess;
    let mut d_hi = d(hi)?;
    let mut lo = 0.0;
    while d_hi < 10.0 && hi < tau_max {
        if d_hi < 1.0 {
            lo = hi;
        }
        hi = (2.0 * hi).min(tau_max);
        d_hi = d(hi)?;
    }
    if d_hi < 1.0 {
        return Err(Error::NonConvergence(format!(
            "D^peak reaches only {d_hi} at the end of the correlator range tau_max = {tau_max}; increase tau_max"
        )));
    }
    if lo == 0.0 {
        lo = hi;
        while d(lo)? > 0.1 {
            lo *= 0.5;
        }
    }
    let root = roots::bracketed(|t| Ok(d(t)? - 1.0), lo, hi, 1e-15, TDEC_RESIDUAL)?;
    Ok(DecoherenceTime {
        t_dec: root.x,
        residual: root.residual,
        bracket: root.bracket,
    })
}
