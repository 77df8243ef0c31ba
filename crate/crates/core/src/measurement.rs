//! The joint object-pointer state during a measurement.
//!
//! The object observable `S` has a non-degenerate spectrum `{s_k}` and
//! couples to the pointer through `eps S P`. The modulus of a joint matrix
//! element at time `t` factorizes as
//!
//! ```text
//! |<s,x| rho(t) |s',x'>| = |<s| rho_S^0(t) |s'>|
//!                          * <x - eps s t| rho_P(0) |x' - eps s' t>
//!                          * exp(-D_t(x, x'; s, s'))
//! ```
//!
//! where `rho_S^0(t)` is the freely evolved object state. The phase of the
//! element is not computed.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bathmodel::{gamma0, BathCorrelator};
use crate::decoherence::{decoherence_form, decoherence_time, DecoherenceForm, DecoherenceParams};
use crate::diagnostics::Warning;
use crate::error::{Error, Result};
use crate::pointer::{PointerModel, PointerState};
use crate::quad::{self, QuadOptions};
use crate::regimes::{classify_regime, entanglement_time, interaction_time, Regime};
use crate::roots;

/// Ratios above this value are reported as regime violations.
pub const REGIME_THRESHOLD: f64 = 0.1;

const HERMITIAN_TOL: f64 = 1e-12;

/// Dense object matrices as given in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectSpec {
    pub eigenvalues: Vec<f64>,
    pub rho0_re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho0_im: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hs_re: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hs_im: Option<Vec<Vec<f64>>>,
    /// Overrides the object time scale derived from `H_S`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_s: Option<f64>,
}

fn dense(name: &str, n: usize, re: &[Vec<f64>], im: Option<&Vec<Vec<f64>>>) -> Result<DMatrix<Complex64>> {
    let shape_ok = |rows: &[Vec<f64>]| rows.len() == n && rows.iter().all(|r| r.len() == n);
    if !shape_ok(re) || im.is_some_and(|im| !shape_ok(im)) {
        return Err(Error::InvalidInput(format!("{name} must be a {n}x{n} matrix")));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| {
        Complex64::new(re[i][j], im.map_or(0.0, |im| im[i][j]))
    }))
}

impl ObjectSpec {
    pub fn matrices(&self) -> Result<(DMatrix<Complex64>, Option<DMatrix<Complex64>>)> {
        let n = self.eigenvalues.len();
        let rho = dense("rho0", n, &self.rho0_re, self.rho0_im.as_ref())?;
        let hs = match (&self.hs_re, &self.hs_im) {
            (Some(re), im) => Some(dense("hs", n, re, im.as_ref())?),
            (None, Some(_)) => return Err(Error::InvalidInput("hs_im given without hs_re".into())),
            (None, None) => None,
        };
        Ok((rho, hs))
    }
}

fn check_hermitian(name: &str, m: &DMatrix<Complex64>) -> Result<()> {
    let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let asym = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if !m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) || asym > HERMITIAN_TOL * scale {
        return Err(Error::InvalidInput(format!("{name} is not Hermitian (deviation {asym:e})")));
    }
    Ok(())
}

/// Object, pointer and bath of one measurement.
#[derive(Debug, Clone)]
pub struct MeasurementSetup {
    eigenvalues: Vec<f64>,
    rho0: DMatrix<Complex64>,
    hs: Option<SymmetricEigen<Complex64, nalgebra::Dyn>>,
    eps: f64,
    pointer: PointerState,
    corr: BathCorrelator,
    t_s: f64,
    delta_s: f64,
    warnings: Vec<Warning>,
}

impl MeasurementSetup {
    /// Validates the object data and builds the pointer state for the bath's
    /// `gamma0`; an unstable pointer gives [`Error::Stability`].
    pub fn new(
        eigenvalues: Vec<f64>,
        rho0: DMatrix<Complex64>,
        hs: Option<DMatrix<Complex64>>,
        eps: f64,
        pointer: PointerModel,
        corr: BathCorrelator,
    ) -> Result<Self> {
        let n = eigenvalues.len();
        if n < 2 {
            return Err(Error::InvalidInput("the object needs at least two eigenvalues".into()));
        }
        if eigenvalues.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidInput("eigenvalues must be finite".into()));
        }
        let mut sorted = eigenvalues.clone();
        sorted.sort_by(f64::total_cmp);
        let delta_s = sorted.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        if !(delta_s > 0.0) {
            return Err(Error::InvalidInput("eigenvalues of S must be distinct".into()));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidInput(format!("coupling eps must be positive, got {eps}")));
        }
        if rho0.shape() != (n, n) {
            return Err(Error::InvalidInput(format!("rho0 must be {n}x{n}")));
        }
        check_hermitian("rho0", &rho0)?;
        let trace = rho0.trace();
        if (trace.re - 1.0).abs() > 1e-10 || trace.im.abs() > 1e-10 {
            return Err(Error::InvalidInput(format!("rho0 must have unit trace, got {trace}")));
        }
        let lowest = rho0.clone().symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        if lowest < -1e-10 {
            return Err(Error::InvalidInput(format!("rho0 is not positive (eigenvalue {lowest})")));
        }

        let mut t_s = f64::INFINITY;
        let hs = match hs {
            None => None,
            Some(h) => {
                if h.shape() != (n, n) {
                    return Err(Error::InvalidInput(format!("hs must be {n}x{n}")));
                }
                check_hermitian("hs", &h)?;
                let commutes = (0..n).all(|i| (0..n).all(|j| i == j || h[(i, j)].norm() == 0.0));
                let eig = h.symmetric_eigen();
                if !commutes {
                    let (lo, hi) = eig.eigenvalues.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &e| {
                        (lo.min(e), hi.max(e))
                    });
                    t_s = 2.0 * PI / (hi - lo);
                }
                Some(eig)
            }
        };

        let g = gamma0(&corr);
        let pointer = PointerState::new(pointer, g.value)?;
        let mut warnings: Vec<Warning> = g.warning.into_iter().collect();
        warnings.extend(pointer.scales().warnings.iter().cloned());
        Ok(Self { eigenvalues, rho0, hs, eps, pointer, corr, t_s, delta_s, warnings })
    }

    pub fn from_spec(spec: &ObjectSpec, eps: f64, pointer: PointerModel, corr: BathCorrelator) -> Result<Self> {
        let (rho, hs) = spec.matrices()?;
        let setup = Self::new(spec.eigenvalues.clone(), rho, hs, eps, pointer, corr)?;
        match spec.t_s {
            Some(t) => setup.with_object_time(t),
            None => Ok(setup),
        }
    }

    /// Replace the object time scale `T_S` used by the validity checks.
    pub fn with_object_time(mut self, t_s: f64) -> Result<Self> {
        if !(t_s > 0.0) {
            return Err(Error::InvalidInput(format!("T_S must be positive, got {t_s}")));
        }
        self.t_s = t_s;
        Ok(self)
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn pointer(&self) -> &PointerState {
        &self.pointer
    }

    pub fn correlator(&self) -> &BathCorrelator {
        &self.corr
    }

    /// Smallest eigenvalue spacing.
    pub fn delta_s(&self) -> f64 {
        self.delta_s
    }

    /// Object time scale; infinite when `H_S` commutes with `S`.
    pub fn t_s(&self) -> f64 {
        self.t_s
    }

    /// Pointer period.
    pub fn t_p(&self) -> f64 {
        self.pointer.model().period()
    }

    /// Construction-time warnings (missing gamma0, length orderings).
    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    pub fn rho0(&self) -> &DMatrix<Complex64> {
        &self.rho0
    }

    fn index(&self, s: f64) -> Result<usize> {
        self.eigenvalues.iter().position(|&e| e == s).ok_or_else(|| Error::Domain {
            value: s,
            reason: "not an eigenvalue of S".into(),
        })
    }

    /// `rho_S^0(t) = exp(-i H_S t) rho_S(0) exp(i H_S t)`.
    pub fn object_free_evolution(&self, t: f64) -> Result<DMatrix<Complex64>> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidInput(format!("time must be >= 0, got {t}")));
        }
        let Some(eig) = &self.hs else {
            return Ok(self.rho0.clone());
        };
        if t == 0.0 {
            return Ok(self.rho0.clone());
        }
        let v = &eig.eigenvectors;
        let mut u = v.clone();
        for (j, &e) in eig.eigenvalues.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, -e * t);
            for i in 0..u.nrows() {
                u[(i, j)] *= phase;
            }
        }
        let u = u * v.adjoint();
        Ok(&u * &self.rho0 * u.adjoint())
    }

    fn object_element(&self, s: f64, s_prime: f64, t: f64) -> Result<Complex64> {
        let (i, j) = (self.index(s)?, self.index(s_prime)?);
        Ok(self.object_free_evolution(t)?[(i, j)])
    }

    /// `|<s,x| rho(t) |s',x'>|`.
    pub fn joint_matrix_element(&self, s: f64, x: f64, s_prime: f64, x_prime: f64, t: f64) -> Result<f64> {
        let obj = self.object_element(s, s_prime, t)?.norm();
        let form = decoherence_form(&self.corr, t)?;
        Ok(self.element_with(obj, &form, s, x, s_prime, x_prime))
    }

    fn element_with(&self, obj: f64, form: &DecoherenceForm, s: f64, x: f64, sp: f64, xp: f64) -> f64 {
        let t = form.t;
        let pointer = self.pointer.initial_density(x - self.eps * s * t, xp - self.eps * sp * t);
        if obj == 0.0 || pointer == 0.0 {
            return 0.0;
        }
        let d = form.exponent(xp - x, self.eps * (sp - s));
        obj * pointer * (-d).exp()
    }

    /// Born weight `p_s(t) = <s| rho_S^0(t) |s>`.
    pub fn born_weight(&self, s: f64, t: f64) -> Result<f64> {
        Ok(self.object_element(s, s, t)?.re)
    }

    /// Pointer density for outcome `s`: `p_s <x - eps s t| rho_P(0) |x - eps s t>`.
    pub fn pointer_marginal(&self, s: f64, x: f64, t: f64) -> Result<f64> {
        let p = self.born_weight(s, t)?;
        let y = x - self.eps * s * t;
        Ok(p * self.pointer.initial_density(y, y))
    }

    /// Interval carrying `rho_P(x - eps s t, x - eps s' t)`.
    fn overlap_region(&self, s: f64, s_prime: f64, t: f64) -> Option<(f64, f64)> {
        let (hi_shift, lo_shift) = (self.eps * s.max(s_prime) * t, self.eps * s.min(s_prime) * t);
        match self.pointer.scales().w_eff {
            Some(w) => {
                let (a, b) = (-w + hi_shift, w + lo_shift);
                (a < b).then_some((a, b))
            }
            None => {
                let half = 12.0 * self.pointer.scales().delta_eff + 0.5 * (hi_shift - lo_shift);
                let mid = 0.5 * (hi_shift + lo_shift);
                Some((mid - half, mid + half))
            }
        }
    }

    /// `int dx <x| rho_P^{ss}(t) |x>` over the shifted well; equals the Born
    /// weight up to quadrature error.
    pub fn marginal_mass(&self, s: f64, t: f64) -> Result<f64> {
        let p = self.born_weight(s, t)?;
        let (a, b) = self.overlap_region(s, s, t).expect("a well overlaps itself");
        let q = quad::integrate(
            |x| {
                let y = x - self.eps * s * t;
                self.pointer.initial_density(y, y)
            },
            a,
            b,
            &QuadOptions::default().with_tolerances(0.0, 1e-12).with_initial_panels(8),
        )?;
        Ok(p * q.value)
    }

    /// Suppression `|<s| tr_P rho(t) |s'>| / |<s| rho_S^0(t) |s'>|` of an
    /// object coherence, in `[0, 1]`.
    pub fn reduced_object_coherence(&self, s: f64, s_prime: f64, t: f64) -> Result<f64> {
        self.index(s)?;
        self.index(s_prime)?;
        if s == s_prime {
            return Err(Error::InvalidInput("reduced coherence needs s != s'".into()));
        }
        if !(t >= 0.0) {
            return Err(Error::InvalidInput(format!("time must be >= 0, got {t}")));
        }
        let Some((a, b)) = self.overlap_region(s, s_prime, t) else {
            return Ok(0.0);
        };
        let (es, esp) = (self.eps * s * t, self.eps * s_prime * t);
        let overlap = quad::integrate(
            |x| self.pointer.initial_density(x - es, x - esp),
            a,
            b,
            &QuadOptions::default().with_tolerances(1e-300, 1e-10).with_initial_panels(8),
        )?;
        let d = decoherence_form(&self.corr, t)?.exponent(0.0, self.eps * (s_prime - s));
        Ok((overlap.value * (-d).exp()).clamp(0.0, 1.0))
    }

    /// Time at which the reduced coherence between `s` and `s'` falls to
    /// `1/e`.
    pub fn coherence_decay_time(&self, s: f64, s_prime: f64) -> Result<f64> {
        let target = (-1.0f64).exp();
        let f = |t: f64| Ok(self.reduced_object_coherence(s, s_prime, t)? - target);
        let lambda = self.pointer.scales().lambda_th;
        let mut hi = lambda / (self.eps * (s - s_prime).abs());
        while f(hi)? > 0.0 {
            hi *= 2.0;
            if hi > self.corr.tau_max() {
                return Err(Error::NonConvergence("coherence does not decay within the correlator range".into()));
            }
        }
        Ok(roots::bracketed(f, 0.0, hi, 1e-12, 1e-12)?.x)
    }

    /// Decoherence time for the pair `(s, s')`.
    pub fn decoherence_time(&self, s: f64, s_prime: f64) -> Result<f64> {
        let p = DecoherenceParams::new(self.eps * (s - s_prime).abs(), &self.corr)?;
        Ok(decoherence_time(&p)?.t_dec)
    }

    /// Largest decoherence time, over pairs of adjacent eigenvalues.
    pub fn max_decoherence_time(&self) -> Result<f64> {
        let mut sorted = self.eigenvalues.clone();
        sorted.sort_by(f64::total_cmp);
        let mut best: f64 = 0.0;
        for w in sorted.windows(2) {
            best = best.max(self.decoherence_time(w[0], w[1])?);
        }
        Ok(best)
    }

    pub fn entanglement_time(&self) -> Result<f64> {
        entanglement_time(self.pointer.scales().delta_eff, self.eps, self.delta_s)
    }

    /// `None` when the pointer has no barrier.
    pub fn interaction_time(&self) -> Result<Option<f64>> {
        self.pointer
            .scales()
            .w_eff
            .map(|w| interaction_time(w, self.eps, self.delta_s))
            .transpose()
    }

    /// Checks `t_dec, t_int, t << T_S` and `t_dec, t_int, 1, t << T_P`.
    pub fn validate_timescales(&self, t: f64) -> TimescaleReport {
        let mut warnings = Vec::new();
        let t_dec = match self.max_decoherence_time() {
            Ok(v) => Some(v),
            Err(e) => {
                warnings.push(Warning::Unavailable { quantity: "t_dec".into(), reason: e.to_string() });
                None
            }
        };
        let t_ent = self.entanglement_time().ok();
        let t_int = self.interaction_time().ok().flatten();
        if t_int.is_none() {
            warnings.push(Warning::Unavailable { quantity: "t_int".into(), reason: "pointer has no barrier".into() });
        }
        let (t_s, t_p) = (self.t_s, self.t_p());
        let mut ratios = Vec::new();
        let mut check = |name: &str, num: Option<f64>, den: f64| {
            if let Some(n) = num {
                let value = n / den;
                if value > REGIME_THRESHOLD {
                    warnings.push(Warning::RegimeViolation {
                        ratio: name.to_string(),
                        value,
                        threshold: REGIME_THRESHOLD,
                    });
                }
                ratios.push(Ratio { name: name.to_string(), value });
            }
        };
        check("t_dec/T_S", t_dec, t_s);
        check("t_int/T_S", t_int, t_s);
        check("t/T_S", Some(t), t_s);
        check("t_dec/T_P", t_dec, t_p);
        check("t_int/T_P", t_int, t_p);
        check("1/T_P", Some(1.0), t_p);
        check("t/T_P", Some(t), t_p);
        TimescaleReport {
            t,
            t_dec,
            t_ent,
            t_int,
            t_s,
            t_p,
            regime: t_dec.map(classify_regime),
            ratios,
            warnings,
        }
    }

    /// Uniform grid over the union of the shifted wells with at least 16
    /// points per `Delta_eff`, plus the peak positions `eps s t`.
    pub fn position_grid(&self, t: f64) -> Vec<f64> {
        let sc = self.pointer.scales();
        let half = sc.w_eff.unwrap_or(8.0 * sc.delta_eff);
        let (smin, smax) = self.eigenvalues.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &s| {
            (a.min(s), b.max(s))
        });
        let (a, b) = (-half + self.eps * smin * t, half + self.eps * smax * t);
        let cells = ((b - a) / (sc.delta_eff / 16.0)).ceil() as usize;
        let mut grid: Vec<f64> = (0..=cells).map(|i| a + (b - a) * i as f64 / cells as f64).collect();
        grid.extend(self.eigenvalues.iter().map(|s| self.eps * s * t));
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        grid
    }

    /// Pointer marginals, Born weights and coherence measures at time `t`.
    pub fn snapshot(&self, t: f64) -> Result<Snapshot> {
        let grid = self.position_grid(t);
        let rho_t = self.object_free_evolution(t)?;
        let form = decoherence_form(&self.corr, t)?;
        let n = self.eigenvalues.len();
        let marginals = (0..n)
            .map(|i| {
                let s = self.eigenvalues[i];
                let p = rho_t[(i, i)].re;
                grid.iter()
                    .map(|&x| {
                        let y = x - self.eps * s * t;
                        p * self.pointer.initial_density(y, y)
                    })
                    .collect()
            })
            .collect();
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let (s, sp) = (self.eigenvalues[i], self.eigenvalues[j]);
                let obj = rho_t[(i, j)].norm();
                let max_element = grid
                    .iter()
                    .flat_map(|&x| grid.iter().map(move |&xp| (x, xp)))
                    .map(|(x, xp)| self.element_with(obj, &form, s, x, sp, xp))
                    .fold(0.0, f64::max);
                pairs.push(PairSummary {
                    s,
                    s_prime: sp,
                    max_element,
                    reduced_coherence: self.reduced_object_coherence(s, sp, t)?,
                });
            }
        }
        Ok(Snapshot {
            t,
            born_weights: (0..n).map(|i| rho_t[(i, i)].re).collect(),
            grid,
            marginals,
            pairs,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ratio {
    pub name: String,
    pub value: f64,
}

/// Time scales of a setup and their ratios to `T_S`, `T_P`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimescaleReport {
    pub t: f64,
    pub t_dec: Option<f64>,
    pub t_ent: Option<f64>,
    pub t_int: Option<f64>,
    pub t_s: f64,
    pub t_p: f64,
    pub regime: Option<Regime>,
    pub ratios: Vec<Ratio>,
    pub warnings: Vec<Warning>,
}

impl TimescaleReport {
    pub fn all_within(&self) -> bool {
        self.ratios.iter().all(|r| r.value <= REGIME_THRESHOLD)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairSummary {
    pub s: f64,
    pub s_prime: f64,
    /// Largest `|<s,x| rho(t) |s',x'>|` over the position grid.
    pub max_element: f64,
    pub reduced_coherence: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub grid: Vec<f64>,
    /// One row of pointer densities per eigenvalue, on `grid`.
    pub marginals: Vec<Vec<f64>>,
    pub born_weights: Vec<f64>,
    pub pairs: Vec<PairSummary>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bathmodel::Preset;
    use crate::demo;
    use proptest::prelude::*;

    fn pm() -> PointerModel {
        PointerModel::new(1e4, 0.02, 0.01, 100.0).unwrap()
    }

    fn qubit(hs: Option<DMatrix<Complex64>>) -> Result<MeasurementSetup> {
        let rho = DMatrix::from_element(2, 2, Complex64::new(0.5, 0.0));
        let c = BathCorrelator::preset(Preset::Exponential { tau_c: 1.0 }, 50.0).unwrap();
        MeasurementSetup::new(vec![-0.5, 0.5], rho, hs, 1.0, pm(), c)
    }

    #[test]
    fn rejects_bad_objects() {
        let c = || BathCorrelator::preset(Preset::Constant, 5.0).unwrap();
        let rho = DMatrix::from_element(2, 2, Complex64::new(0.5, 0.0));
        assert!(MeasurementSetup::new(vec![1.0, 1.0], rho.clone(), None, 1.0, pm(), c()).is_err());
        assert!(MeasurementSetup::new(vec![0.0, 1.0], rho.clone(), None, 0.0, pm(), c()).is_err());
        let mut bad = rho.clone();
        bad[(0, 1)] = Complex64::new(0.5, 0.1);
        assert!(MeasurementSetup::new(vec![0.0, 1.0], bad, None, 1.0, pm(), c()).is_err());
        let neg = DMatrix::from_row_slice(2, 2, &[1.2, 0.0, 0.0, -0.2].map(|v| Complex64::new(v, 0.0)));
        assert!(MeasurementSetup::new(vec![0.0, 1.0], neg, None, 1.0, pm(), c()).is_err());
        let half = DMatrix::from_element(2, 2, Complex64::new(0.25, 0.0));
        assert!(MeasurementSetup::new(vec![0.0, 1.0], half, None, 1.0, pm(), c()).is_err());
    }

    #[test]
    fn commuting_hamiltonian_keeps_populations() {
        let hs = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(0.3, 0.0),
            Complex64::new(-1.1, 0.0),
        ]));
        let st = qubit(Some(hs)).unwrap();
        assert_eq!(st.t_s(), f64::INFINITY);
        assert_eq!(st.object_free_evolution(0.0).unwrap(), *st.rho0());
        let r = st.object_free_evolution(7.3).unwrap();
        assert!((r[(0, 0)].re - 0.5).abs() < 1e-14);
        assert!((r[(1, 1)].re - 0.5).abs() < 1e-14);
        assert!((r[(0, 1)].norm() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn non_commuting_hamiltonian_sets_object_time() {
        let hs = DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0].map(|v| Complex64::new(v, 0.0)));
        let st = qubit(Some(hs)).unwrap();
        assert!((st.t_s() - 2.0 * PI).abs() < 1e-12);
        let r = st.object_free_evolution(1.3).unwrap();
        assert!((r.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn domain_errors() {
        let st = qubit(None).unwrap();
        assert!(matches!(st.joint_matrix_element(0.3, 0.0, 0.5, 0.0, 1.0), Err(Error::Domain { .. })));
        assert!(st.reduced_object_coherence(0.5, 0.5, 1.0).is_err());
    }

    #[test]
    fn factorization_of_the_joint_element() {
        let st = qubit(None).unwrap();
        let (s, sp, x, xp, t) = (-0.5, 0.5, 0.3, -0.2, 0.8);
        let e = st.joint_matrix_element(s, x, sp, xp, t).unwrap();
        let obj = st.object_free_evolution(t).unwrap()[(0, 1)].norm();
        let ptr = st.pointer().initial_density(x - s * t, xp - sp * t);
        let d = crate::decoherence::d_general(st.correlator(), 1.0, s, sp, x, xp, t).unwrap();
        assert!((e - obj * ptr * (-d).exp()).abs() <= 1e-12 * e.max(1e-300));
    }

    #[test]
    fn diagonal_peak_is_undamped() {
        let st = qubit(None).unwrap();
        let t = 2.0;
        let x = 0.5 * t;
        let e = st.joint_matrix_element(0.5, x, 0.5, x, t).unwrap();
        assert_eq!(e, 0.5 * st.pointer().initial_density(0.0, 0.0));
        let e0 = st.joint_matrix_element(-0.5, 0.1, 0.5, 0.2, 0.0).unwrap();
        assert_eq!(e0, 0.5 * st.pointer().initial_density(0.1, 0.2));
    }

    #[test]
    fn marginal_peaks_follow_the_shift() {
        let st = qubit(None).unwrap();
        for t in [0.0, 1.0, 3.0] {
            let snap = st.snapshot(t).unwrap();
            for (i, &s) in st.eigenvalues().iter().enumerate() {
                let (k, _) = snap.marginals[i]
                    .iter()
                    .enumerate()
                    .fold((0, f64::MIN), |b, (k, &v)| if v > b.1 { (k, v) } else { b });
                assert!((snap.grid[k] - s * t).abs() < 1e-12);
            }
            let total: f64 = st.eigenvalues().iter().map(|&s| st.marginal_mass(s, t).unwrap()).sum();
            assert!((total - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn small_time_coherence_is_gaussian() {
        let st = demo::setup().unwrap();
        let lam = st.pointer().scales().lambda_th;
        for t in [0.002, 0.005, 0.01] {
            let r = st.reduced_object_coherence(-0.5, 0.5, t).unwrap();
            let g = (-2.0 * PI * PI * t * t / (lam * lam)).exp();
            assert!((r / g - 1.0).abs() < 0.02, "t={t}: {r} vs {g}");
        }
        assert!((st.reduced_object_coherence(-0.5, 0.5, 0.0).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn fast_pointer_boundary_is_flagged() {
        let pm = PointerModel::new(1e4, 0.4 * PI, 0.01, 1e5).unwrap();
        let rho = DMatrix::from_element(2, 2, Complex64::new(0.5, 0.0));
        let c = BathCorrelator::preset(Preset::Exponential { tau_c: 1.0 }, 50.0).unwrap();
        let st = MeasurementSetup::new(vec![-0.5, 0.5], rho, None, 1.0, pm, c).unwrap();
        let rep = st.validate_timescales(0.0);
        let r = rep.ratios.iter().find(|r| r.name == "1/T_P").unwrap();
        assert!((r.value - 0.2).abs() < 1e-12);
        assert!(rep.warnings.iter().any(|w| matches!(w, Warning::RegimeViolation { ratio, .. } if ratio == "1/T_P")));
        assert!(rep.ratios.iter().filter(|r| r.name.ends_with("T_S")).all(|r| r.value == 0.0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn joint_element_is_hermitian(x in -3.0..3.0f64, xp in -3.0..3.0f64, t in 0.0..4.0f64) {
            let st = qubit(None).unwrap();
            let a = st.joint_matrix_element(-0.5, x, 0.5, xp, t).unwrap();
            let b = st.joint_matrix_element(0.5, xp, -0.5, x, t).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.max(b).max(1e-300));
        }
    }
}
