//! The macroscopic pointer: potentials, length scales and the initial state.
//!
//! The bare potential is the quartic hilltop `V(x) = M W^2 x^2 / 2 - k x^4 / 4`.
//! Coupling to the bath lowers the curvature by `2 gamma0`, giving
//! `V_eff(x) = V(x) - gamma0 x^2`. For `k > 0` the effective well ends at the
//! barriers `x = +-W_eff`; the initial pointer state is the local thermal
//! state inside that well.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::diagnostics::Warning;
use crate::error::{Error, Result};
use crate::quad::{self, QuadOptions};

/// Largest bare frequency accepted, `0.2 * 2 pi`: the pointer period must
/// stay at least ten thermal times long.
pub const MAX_OMEGA: f64 = 0.4 * PI;

/// Factor used for the `<<` orderings between length scales.
pub const ORDERING_FACTOR: f64 = 3.0;

/// Minimum barrier height, in units of the thermal energy.
pub const MIN_BARRIER: f64 = 3.0;

/// Bare pointer parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointerModel {
    pub mass: f64,
    pub omega: f64,
    pub kappa: f64,
    pub delta_class: f64,
}

impl PointerModel {
    pub fn new(mass: f64, omega: f64, kappa: f64, delta_class: f64) -> Result<Self> {
        let pm = Self { mass, omega, kappa, delta_class };
        pm.validate()?;
        Ok(pm)
    }

    /// Checks the parameter ranges; needed after deserialization.
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidModel(format!("pointer {name} must be positive, got {v}")))
            }
        };
        positive("mass", self.mass)?;
        positive("omega", self.omega)?;
        positive("delta_class", self.delta_class)?;
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return Err(Error::InvalidModel(format!("pointer kappa must be >= 0, got {}", self.kappa)));
        }
        if self.omega > MAX_OMEGA {
            return Err(Error::InvalidModel(format!(
                "pointer omega = {} exceeds {MAX_OMEGA}: the period must be >> the thermal time",
                self.omega
            )));
        }
        Ok(())
    }

    /// `V''(0) = M W^2`.
    pub fn curvature(&self) -> f64 {
        self.mass * self.omega * self.omega
    }

    /// Pointer period `T_P = 2 pi / W`.
    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }

    pub fn bare_potential(&self, x: f64) -> f64 {
        let x2 = x * x;
        0.5 * self.curvature() * x2 - 0.25 * self.kappa * x2 * x2
    }
}

/// `V_eff(x) = (M W^2 - 2 gamma0) x^2 / 2 - k x^4 / 4`.
pub fn effective_potential(pm: &PointerModel, gamma0: f64, x: f64) -> f64 {
    let x2 = x * x;
    0.5 * (pm.curvature() - 2.0 * gamma0) * x2 - 0.25 * pm.kappa * x2 * x2
}

/// Outcome of the stability test `gamma0 < V''(0) / 4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stability {
    pub pass: bool,
    /// `V''(0) / 4 - gamma0`.
    pub margin: f64,
}

pub fn stability_check(pm: &PointerModel, gamma0: f64) -> Stability {
    let margin = 0.25 * pm.curvature() - gamma0;
    Stability { pass: margin > 0.0, margin }
}

/// Characteristic lengths of the pointer, plus ordering diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointerScales {
    pub lambda_th: f64,
    pub delta_th: f64,
    pub delta_eff: f64,
    /// Barrier position of `V_eff`; `None` when `kappa = 0`.
    pub w_eff: Option<f64>,
    /// Barrier height of `V_eff`; `None` when `kappa = 0`.
    pub v0_eff: Option<f64>,
    pub delta_class: f64,
    pub warnings: Vec<Warning>,
}

fn scales(pm: &PointerModel, gamma0: f64) -> PointerScales {
    let k_eff = pm.curvature() - 2.0 * gamma0;
    let lambda_th = 2.0 * PI / pm.mass.sqrt();
    let delta_th = pm.curvature().sqrt().recip();
    let delta_eff = k_eff.sqrt().recip();
    let (w_eff, v0_eff) = if pm.kappa > 0.0 {
        (Some((k_eff / pm.kappa).sqrt()), Some(k_eff * k_eff / (4.0 * pm.kappa)))
    } else {
        (None, None)
    };

    let mut warnings = Vec::new();
    let mut order = |relation: &str, lhs: f64, rhs: f64| {
        if !(lhs < rhs) {
            warnings.push(Warning::LengthOrdering { relation: relation.to_string(), lhs, rhs });
        }
    };
    order("lambda_th < delta_th / 3", lambda_th, delta_th / ORDERING_FACTOR);
    order("delta_eff < 2 delta_th", delta_eff, 2.0 * delta_th);
    match (w_eff, v0_eff) {
        (Some(w), Some(v0)) => {
            order("3 delta_eff < w_eff", ORDERING_FACTOR * delta_eff, w);
            order("3 w_eff < delta_class", ORDERING_FACTOR * w, pm.delta_class);
            if !(v0 > MIN_BARRIER) {
                warnings.push(Warning::BarrierTooLow { v0_eff: v0, threshold: MIN_BARRIER });
            }
        }
        _ => warnings.push(Warning::BarrierUndefined),
    }
    PointerScales { lambda_th, delta_th, delta_eff, w_eff, v0_eff, delta_class: pm.delta_class, warnings }
}

/// The pointer together with the bath-induced shift `gamma0` and the
/// normalized initial density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PointerState {
    model: PointerModel,
    gamma0: f64,
    scales: PointerScales,
    norm: f64,
}

impl PointerState {
    /// Fails with [`Error::Stability`] unless `gamma0 < V''(0) / 4`.
    pub fn new(model: PointerModel, gamma0: f64) -> Result<Self> {
        model.validate()?;
        if !gamma0.is_finite() {
            return Err(Error::InvalidInput(format!("gamma0 must be finite, got {gamma0}")));
        }
        if !stability_check(&model, gamma0).pass {
            return Err(Error::Stability { gamma0, bound: 0.25 * model.curvature() });
        }
        let scales = scales(&model, gamma0);
        let norm = match scales.w_eff {
            None => (2.0 * PI).sqrt() * scales.delta_eff,
            Some(w) => {
                let q = quad::integrate(
                    |x| (-effective_potential(&model, gamma0, x)).exp(),
                    -w,
                    w,
                    &QuadOptions::default().with_tolerances(0.0, 1e-13).with_initial_panels(8),
                )?;
                q.value
            }
        };
        Ok(Self { model, gamma0, scales, norm })
    }

    pub fn model(&self) -> &PointerModel {
        &self.model
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn scales(&self) -> &PointerScales {
        &self.scales
    }

    pub fn effective_potential(&self, x: f64) -> f64 {
        effective_potential(&self.model, self.gamma0, x)
    }

    /// Region carrying the initial state: the well `[-W_eff, W_eff]`, or the
    /// whole line when there is no barrier.
    pub fn support(&self) -> (f64, f64) {
        match self.scales.w_eff {
            Some(w) => (-w, w),
            None => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    fn in_support(&self, x: f64) -> bool {
        let (lo, hi) = self.support();
        x >= lo && x <= hi
    }

    /// `<x| rho_P(0) |x'>`, proportional to
    /// `exp(-(V_eff(x) + V_eff(x'))/2) exp(-2 pi^2 (x - x')^2 / lambda_th^2)`
    /// inside the well and zero outside it.
    pub fn initial_density(&self, x: f64, x_prime: f64) -> f64 {
        if !self.in_support(x) || !self.in_support(x_prime) {
            return 0.0;
        }
        let d = (x - x_prime) / self.scales.lambda_th;
        let v = 0.5 * (self.effective_potential(x) + self.effective_potential(x_prime));
        (-v - 2.0 * PI * PI * d * d).exp() / self.norm
    }
}

/// Length scales for `pm` at coupling shift `gamma0`, with ordering
/// violations reported as warnings.
pub fn length_scales(pm: &PointerModel, gamma0: f64) -> Result<PointerScales> {
    if !stability_check(pm, gamma0).pass {
        return Err(Error::Stability { gamma0, bound: 0.25 * pm.curvature() });
    }
    Ok(scales(pm, gamma0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit() -> PointerModel {
        PointerModel::new(1.0, 1.0, 0.002, 1000.0).unwrap()
    }

    #[test]
    fn potential_basics() {
        let pm = unit();
        assert_eq!(effective_potential(&pm, 0.1, 0.0), 0.0);
        assert_eq!(effective_potential(&pm, 0.0, 1.7), pm.bare_potential(1.7));
    }

    #[test]
    fn barrier_from_numeric_maximization() {
        let pm = unit();
        let s = length_scales(&pm, 0.1).unwrap();
        assert!((s.w_eff.unwrap() - 20.0).abs() < 1e-12);
        assert!((s.v0_eff.unwrap() - 80.0).abs() < 1e-12);
        // golden-section search for the maximum of V_eff on (0, 40)
        let f = |x: f64| effective_potential(&pm, 0.1, x);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let (mut a, mut b) = (0.0, 40.0);
        for _ in 0..200 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if f(c) > f(d) {
                b = d;
            } else {
                a = c;
            }
        }
        let x = 0.5 * (a + b);
        assert!((x - 20.0).abs() < 1e-6);
        assert!((f(x) - 80.0).abs() < 1e-9);
    }

    #[test]
    fn stability_boundary() {
        let pm = unit();
        let k = pm.curvature();
        let s0 = stability_check(&pm, 0.0);
        assert!(s0.pass);
        assert_eq!(s0.margin, k / 4.0);
        assert!(!stability_check(&pm, k / 4.0).pass);
        let s = stability_check(&pm, k / 8.0);
        assert!(s.pass);
        assert_eq!(s.margin, k / 8.0);
        let sc = length_scales(&pm, k / 8.0).unwrap();
        assert!((sc.delta_eff / sc.delta_th - (0.75f64).powf(-0.5)).abs() < 1e-14);
        assert!(matches!(PointerState::new(pm, k / 4.0), Err(Error::Stability { .. })));
    }

    #[test]
    fn ordering_violation_is_reported() {
        let pm = PointerModel::new(1e4, 0.1, 1e-6, 1e6).unwrap();
        let s = length_scales(&pm, 0.0).unwrap();
        assert!((s.lambda_th - 2.0 * PI / 100.0).abs() < 1e-15);
        assert!((s.delta_th - 0.1).abs() < 1e-15);
        assert!(s
            .warnings
            .iter()
            .any(|w| matches!(w, Warning::LengthOrdering { relation, .. } if relation.starts_with("lambda_th"))));
    }

    #[test]
    fn harmonic_pointer_has_no_barrier() {
        let pm = PointerModel::new(1e4, 0.02, 0.0, 100.0).unwrap();
        let s = length_scales(&pm, 0.3).unwrap();
        assert_eq!(s.w_eff, None);
        assert!(s.warnings.contains(&Warning::BarrierUndefined));
    }

    #[test]
    fn rejects_fast_pointer() {
        assert!(PointerModel::new(1.0, 0.41 * PI, 0.0, 1.0).is_err());
        assert!(PointerModel::new(1.0, 0.4 * PI, 0.0, 1.0).is_ok());
        assert!(PointerModel::new(-1.0, 0.1, 0.0, 1.0).is_err());
    }

    #[test]
    fn initial_density_is_normalized_in_the_well() {
        let pm = PointerModel::new(1e4, 0.02, 0.01, 100.0).unwrap();
        let st = PointerState::new(pm, 0.4).unwrap();
        let w = st.scales().w_eff.unwrap();
        let q = quad::integrate(|x| st.initial_density(x, x), -w, w, &QuadOptions::default()).unwrap();
        assert!((q.value - 1.0).abs() < 1e-10);
        assert!(st.initial_density(0.0, 0.0) > st.initial_density(0.1, 0.1));
        assert_eq!(st.initial_density(w * 1.01, 0.0), 0.0);
    }

    #[test]
    fn harmonic_diagonal_is_gaussian() {
        let pm = PointerModel::new(1e4, 0.02, 0.0, 100.0).unwrap();
        let st = PointerState::new(pm, 0.5).unwrap();
        let d = st.scales().delta_eff;
        assert!((d - (4.0f64 - 1.0).powf(-0.5)).abs() < 1e-15);
        let o = QuadOptions::default();
        let mass = quad::integrate(|x| st.initial_density(x, x), -20.0 * d, 20.0 * d, &o).unwrap();
        let second = quad::integrate(|x| x * x * st.initial_density(x, x), -20.0 * d, 20.0 * d, &o).unwrap();
        assert!((mass.value - 1.0).abs() < 1e-10);
        assert!((second.value / (d * d) - 1.0).abs() < 1e-4);
    }

    proptest! {
        #[test]
        fn density_is_symmetric(x in -10.0..10.0f64, y in -10.0..10.0f64) {
            let pm = PointerModel::new(1e4, 0.02, 0.01, 100.0).unwrap();
            let st = PointerState::new(pm, 0.4).unwrap();
            prop_assert_eq!(st.initial_density(x, y), st.initial_density(y, x));
            prop_assert!(st.initial_density(x, x) >= 0.0);
        }

        #[test]
        fn off_diagonal_gaussian_suppression(d in 0.001..0.2f64) {
            let pm = PointerModel::new(1e4, 0.02, 0.01, 100.0).unwrap();
            let st = PointerState::new(pm, 0.4).unwrap();
            // V_eff is even, so x = -d/2 and x + d see the same potential
            let x = -0.5 * d;
            let ratio = st.initial_density(x, x + d) / st.initial_density(x, x);
            let lam = st.scales().lambda_th;
            let expected = (-2.0 * PI * PI * d * d / (lam * lam)).exp();
            prop_assert!((ratio - expected).abs() <= 1e-12 * expected.max(1e-300));
        }

        #[test]
        fn delta_ratio_continuous_at_zero_coupling(g in 0.0..1e-6f64) {
            let s = length_scales(&unit(), g).unwrap();
            prop_assert!((s.delta_eff / s.delta_th - 1.0).abs() < 2e-6);
        }
    }
}
