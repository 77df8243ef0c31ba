//! Brute-force harmonic bath used to check the Gaussian decoherence formula.
//!
//! The bath is a handful of oscillators with coupling agent
//! `B = sum_nu g_nu (a_nu + a_nu^dag)`, so that
//! `h(t) = sum_nu g_nu^2 [coth(w_nu/2) cos(w_nu t) - i sin(w_nu t)]`.
//! For this bath Wick's theorem holds exactly and the modulus of the
//! decoherence factor `<U_b^dag U_a>` must equal `exp(-D_t)` computed from
//! the correlator alone. Here that factor is computed independently, as a
//! time-ordered product of short-time propagators in a truncated Fock space,
//! averaged over the exact thermal state.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bathmodel::BathCorrelator;
use crate::decoherence;
use crate::error::{Error, Result};

/// Highest-level thermal occupation allowed in the truncated Fock space.
pub const TRUNCATION_TOLERANCE: f64 = 1e-8;

/// Largest change allowed when the number of propagator steps is halved.
pub const STEP_TOLERANCE: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathMode {
    pub omega: f64,
    pub g: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteBath {
    modes: Vec<BathMode>,
    n_fock: usize,
}

impl DiscreteBath {
    pub const DEFAULT_N_FOCK: usize = 30;

    pub fn new(modes: Vec<BathMode>, n_fock: usize) -> Result<Self> {
        if n_fock < 10 {
            return Err(Error::InvalidModel(format!("n_fock must be >= 10, got {n_fock}")));
        }
        for m in &modes {
            if !(m.omega > 0.0 && m.omega.is_finite()) || !m.g.is_finite() {
                return Err(Error::InvalidModel(format!("invalid bath mode {m:?}")));
            }
            let top = thermal_weights(m.omega, n_fock)[n_fock - 1];
            if top >= TRUNCATION_TOLERANCE {
                return Err(Error::InvalidModel(format!(
                    "Fock truncation at {n_fock} levels too small for w = {}: top-level occupation {top:e}",
                    m.omega
                )));
            }
        }
        Ok(Self { modes, n_fock })
    }

    pub fn modes(&self) -> &[BathMode] {
        &self.modes
    }

    pub fn n_fock(&self) -> usize {
        self.n_fock
    }

    pub fn with_n_fock(&self, n_fock: usize) -> Result<Self> {
        Self::new(self.modes.clone(), n_fock)
    }

    /// Closed-form `(Re h(t), Im h(t))`.
    pub fn correlator(&self, t: f64) -> (f64, f64) {
        self.modes.iter().fold((0.0, 0.0), |(re, im), m| {
            let g2 = m.g * m.g;
            let (s, c) = (m.omega * t).sin_cos();
            let coth = 1.0 / (0.5 * m.omega).tanh();
            (re + g2 * coth * c, im - g2 * s)
        })
    }

    /// `(Re h(t), Im h(t))` as the thermal trace `tr(B(t) B rho)` in the
    /// truncated Fock basis.
    pub fn correlator_fock_trace(&self, t: f64) -> (f64, f64) {
        let mut total = Complex64::new(0.0, 0.0);
        for m in &self.modes {
            let op = ModeOperators::new(*m, self.n_fock);
            let n = self.n_fock;
            for i in 0..n {
                for k in 0..n {
                    let bik = op.coupling[(i, k)];
                    if bik == 0.0 {
                        continue;
                    }
                    let phase = Complex64::from_polar(1.0, (op.energies[i] - op.energies[k]) * t);
                    total += op.weights[i] * phase * bik * bik;
                }
            }
        }
        (total.re, total.im)
    }
}

/// Free-function form of [`DiscreteBath::correlator`].
pub fn discrete_correlator(bath: &DiscreteBath, t: f64) -> (f64, f64) {
    bath.correlator(t)
}

fn thermal_weights(omega: f64, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|k| (-omega * k as f64).exp()).collect();
    let z: f64 = raw.iter().sum();
    raw.into_iter().map(|p| p / z).collect()
}

struct ModeOperators {
    energies: Vec<f64>,
    weights: Vec<f64>,
    coupling: DMatrix<f64>,
}

impl ModeOperators {
    fn new(mode: BathMode, n: usize) -> Self {
        let mut coupling = DMatrix::zeros(n, n);
        for k in 0..n - 1 {
            let v = mode.g * ((k + 1) as f64).sqrt();
            coupling[(k, k + 1)] = v;
            coupling[(k + 1, k)] = v;
        }
        Self {
            energies: (0..n).map(|k| mode.omega * k as f64).collect(),
            weights: thermal_weights(mode.omega, n),
            coupling,
        }
    }
}

/// A linear pointer path `f(tau) = offset + slope * tau` driving the bath.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Drive {
    pub offset: f64,
    pub slope: f64,
}

impl Drive {
    /// Drive `f(tau) = x_s(t - tau) = x - eps s (t - tau)` seen by the bath
    /// for pointer position `x` and object eigenvalue `s`.
    pub fn pointer_path(x: f64, eps: f64, s: f64, t: f64) -> Self {
        Self { offset: x - eps * s * t, slope: eps * s }
    }

    fn at(&self, tau: f64) -> f64 {
        self.offset + self.slope * tau
    }
}

/// Result of the brute-force decoherence factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactFactor {
    pub value: Complex64,
    /// Change of the result when the step count is halved.
    pub step_delta: f64,
}

/// Per-mode propagation machinery in the eigenbasis of the coupling.
struct ModePropagator {
    weights: Vec<f64>,
    eigvals: Vec<f64>,
    basis: DMatrix<Complex64>,
}

impl ModePropagator {
    fn new(mode: BathMode, n: usize) -> Self {
        let ops = ModeOperators::new(mode, n);
        let eig = ops.coupling.clone().symmetric_eigen();
        Self {
            weights: ops.weights,
            eigvals: eig.eigenvalues.iter().copied().collect(),
            basis: eig.eigenvectors.map(|v| Complex64::new(v, 0.0)),
        }
    }

    /// `E_{N-1} C E_{N-2} C ... C E_0` for midpoint samples of `drive`, where
    /// `E_k = exp(-i dt f(tau_k) Lambda)` and `C = V^dag exp(-i H dt) V`.
    fn inner_product(&self, energies: &[f64], drive: &Drive, t: f64, steps: usize) -> DMatrix<Complex64> {
        let n = self.eigvals.len();
        let dt = t / steps as f64;
        let free = DVector::from_iterator(n, energies.iter().map(|e| Complex64::from_polar(1.0, -e * dt)));
        let c = self.basis.adjoint() * DMatrix::from_diagonal(&free) * &self.basis;
        let phases = |k: usize| -> Vec<Complex64> {
            let theta = dt * drive.at((k as f64 + 0.5) * dt);
            self.eigvals.iter().map(|l| Complex64::from_polar(1.0, -theta * l)).collect()
        };
        let mut acc = DMatrix::from_diagonal(&DVector::from_vec(phases(0)));
        let mut scratch = DMatrix::zeros(n, n);
        for k in 1..steps {
            c.mul_to(&acc, &mut scratch);
            let e = phases(k);
            for (i, ei) in e.iter().enumerate() {
                for j in 0..n {
                    scratch[(i, j)] *= ei;
                }
            }
            std::mem::swap(&mut acc, &mut scratch);
        }
        acc
    }

    fn average(&self, energies: &[f64], a: &Drive, b: &Drive, t: f64, steps: usize) -> Complex64 {
        let ia = self.inner_product(energies, a, t, steps);
        let ib = self.inner_product(energies, b, t, steps);
        let y = &self.basis * ib.adjoint() * ia * self.basis.adjoint();
        self.weights
            .iter()
            .enumerate()
            .map(|(k, p)| y[(k, k)] * *p)
            .sum()
    }
}

fn factor_with_steps(bath: &DiscreteBath, a: &Drive, b: &Drive, t: f64, steps: usize) -> Complex64 {
    let per_mode: Vec<Complex64> = bath
        .modes
        .par_iter()
        .map(|m| {
            if m.g == 0.0 {
                return Complex64::new(1.0, 0.0);
            }
            let prop = ModePropagator::new(*m, bath.n_fock);
            let energies: Vec<f64> = (0..bath.n_fock).map(|k| m.omega * k as f64).collect();
            prop.average(&energies, a, b, t, steps)
        })
        .collect();
    per_mode.into_iter().fold(Complex64::new(1.0, 0.0), |acc, z| acc * z)
}

/// `<U_b(t)^dag U_a(t)>_0` by an ordered product of `steps` midpoint
/// propagators, thermally averaged mode by mode.
///
/// The result is also computed with `steps / 2` propagators; if the two
/// differ by [`STEP_TOLERANCE`] or more a [`Error::NonConvergence`] is
/// returned.
pub fn exact_decoherence_factor(
    bath: &DiscreteBath,
    drive_a: &Drive,
    drive_b: &Drive,
    t: f64,
    steps: usize,
) -> Result<ExactFactor> {
    if t < 0.0 {
        return Err(Error::InvalidInput(format!("time must be >= 0, got {t}")));
    }
    if steps < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 steps, got {steps}")));
    }
    if drive_a == drive_b || t == 0.0 || bath.modes.iter().all(|m| m.g == 0.0) {
        return Ok(ExactFactor { value: Complex64::new(1.0, 0.0), step_delta: 0.0 });
    }
    let fine = factor_with_steps(bath, drive_a, drive_b, t, steps);
    let coarse = factor_with_steps(bath, drive_a, drive_b, t, steps / 2);
    let step_delta = (fine - coarse).norm();
    if step_delta >= STEP_TOLERANCE {
        return Err(Error::NonConvergence(format!(
            "propagator product not converged at t = {t}: halving {steps} steps changes the result by {step_delta:e}"
        )));
    }
    Ok(ExactFactor { value: fine, step_delta })
}

/// Object and pointer labels of the two branches compared by the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSetup {
    pub epsilon: f64,
    pub s: f64,
    pub s_prime: f64,
    #[serde(default)]
    pub x: f64,
    #[serde(default)]
    pub x_prime: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleRow {
    pub t: f64,
    pub exact_abs: f64,
    pub qclt: f64,
    pub rel_deviation: f64,
    pub phase: f64,
    pub step_delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub rows: Vec<OracleRow>,
    pub max_deviation: f64,
    /// True when some exact factor carries a nonzero phase while its
    /// modulus still matches.
    pub phase_nonzero: bool,
}

/// Compare the brute-force factor against `exp(-D_t)` from the correlator at
/// each time in `times`.
pub fn compare_with_qclt(
    bath: &DiscreteBath,
    setup: &OracleSetup,
    times: &[f64],
    steps: usize,
) -> Result<OracleReport> {
    let t_max = times.iter().copied().fold(0.0, f64::max).max(1e-12);
    let corr = BathCorrelator::discrete(bath.clone(), t_max)?;
    let mut rows = Vec::with_capacity(times.len());
    for &t in times {
        let a = Drive::pointer_path(setup.x, setup.epsilon, setup.s, t);
        let b = Drive::pointer_path(setup.x_prime, setup.epsilon, setup.s_prime, t);
        let exact = exact_decoherence_factor(bath, &a, &b, t, steps)?;
        let d = decoherence::d_general(&corr, setup.epsilon, setup.s, setup.s_prime, setup.x, setup.x_prime, t)?;
        let qclt = (-d).exp();
        let exact_abs = exact.value.norm();
        rows.push(OracleRow {
            t,
            exact_abs,
            qclt,
            rel_deviation: (exact_abs - qclt).abs() / qclt,
            phase: exact.value.arg(),
            step_delta: exact.step_delta,
        });
    }
    let max_deviation = rows.iter().map(|r| r.rel_deviation).fold(0.0, f64::max);
    let phase_nonzero = rows.iter().any(|r| r.phase.abs() > 1e-8);
    Ok(OracleReport { rows, max_deviation, phase_nonzero })
}
