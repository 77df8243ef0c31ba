//! Bath correlation functions.
//!
//! A correlator `h(tau) = Re h + i Im h` is built from one of three sources:
//!
//! * a [`SpectralModel`], the odd spectral function
//!   `J(w) = N w^m exp(-(w/cutoff)^2)` combined with the thermal factor
//!   `coth(w/2)` so that
//!   `Re h(tau) = (1/pi) int_0^inf cos(w tau) coth(w/2) J(w) dw` and
//!   `Im h(tau) = -(1/pi) int_0^inf sin(w tau) J(w) dw`;
//! * an analytic [`Preset`] (constant, exponential, Gaussian) with no
//!   imaginary part;
//! * a [`DiscreteBath`] of harmonic modes, evaluated in closed form.
//!
//! All quantities are in reduced units (hbar = beta = 1). Spectral models are
//! normalized so that `Re h(0) = <B^2>_0 = 1`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::diagnostics::Warning;
use crate::error::{Error, Result};
use crate::oracle::DiscreteBath;
use crate::quad::{self, QuadOptions, Quadrature};
use crate::spline::{LeftBoundary, UniformSpline};

/// Default correlator grid step used when only a range is given.
pub const DEFAULT_GRID_STEP: f64 = 0.005;

/// Upper frequency limit in units of the cutoff; the Gaussian factor is
/// `exp(-64)` there.
const OMEGA_MAX_IN_CUTOFFS: f64 = 8.0;

/// `x * coth(x / 2)`, finite at `x = 0` where it equals 2.
pub fn x_coth_half(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 1e-3 {
        let x2 = x * x;
        2.0 + x2 / 6.0 - x2 * x2 / 360.0
    } else {
        ax / (0.5 * ax).tanh()
    }
}

/// Spectral density family `J(w) = N w^m exp(-(w/cutoff)^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralModel {
    m: u32,
    cutoff: f64,
    normalization: f64,
}

impl SpectralModel {
    /// Builds the model and fixes `N` so that `Re h(0) = 1`.
    pub fn new(m: u32, cutoff: f64) -> Result<Self> {
        if m < 1 {
            return Err(Error::InvalidModel(format!("spectral exponent m must be >= 1, got {m}")));
        }
        if !(cutoff > 0.0 && cutoff.is_finite()) {
            return Err(Error::InvalidModel(format!("cutoff must be positive, got {cutoff}")));
        }
        let mut model = Self { m, cutoff, normalization: 1.0 };
        let omega_max = model.omega_max();
        let q = quad::integrate(
            |w| model.thermal_weight(w),
            0.0,
            omega_max,
            &QuadOptions::default().with_tolerances(0.0, 1e-14).with_initial_panels(16),
        )?;
        model.normalization = PI / q.value;
        Ok(model)
    }

    pub fn exponent(&self) -> u32 {
        self.m
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn omega_max(&self) -> f64 {
        OMEGA_MAX_IN_CUTOFFS * self.cutoff
    }

    /// `J(w)`, odd in `w`.
    pub fn density(&self, omega: f64) -> f64 {
        let w = omega.abs();
        let j = self.normalization * w.powi(self.m as i32) * (-(w / self.cutoff).powi(2)).exp();
        j.copysign(omega)
    }

    /// `coth(w/2) J(w)`, the Fourier transform of `Re h`. Even and
    /// nonnegative; the `w -> 0` limit is taken analytically.
    pub fn thermal_weight(&self, omega: f64) -> f64 {
        let w = omega.abs();
        self.normalization
            * w.powi(self.m as i32 - 1)
            * x_coth_half(w)
            * (-(w / self.cutoff).powi(2)).exp()
    }

    fn oscillatory_opts(&self, tau: f64) -> QuadOptions {
        let panels = (self.omega_max() * tau.abs() / PI).ceil() as usize + 8;
        QuadOptions::default()
            .with_tolerances(1e-15, 1e-12)
            .with_initial_panels(panels)
    }

    /// `Re h(tau)` by direct adaptive quadrature over frequency.
    pub fn re_h_direct(&self, tau: f64) -> Result<Quadrature> {
        let q = quad::integrate(
            |w| (w * tau).cos() * self.thermal_weight(w),
            0.0,
            self.omega_max(),
            &self.oscillatory_opts(tau),
        )?;
        Ok(Quadrature { value: q.value / PI, abs_err: q.abs_err / PI, ..q })
    }

    /// `Im h(tau)` by direct adaptive quadrature over frequency.
    pub fn im_h_direct(&self, tau: f64) -> Result<Quadrature> {
        let q = quad::integrate(
            |w| (w * tau).sin() * self.density(w),
            0.0,
            self.omega_max(),
            &self.oscillatory_opts(tau),
        )?;
        Ok(Quadrature { value: -q.value / PI, abs_err: q.abs_err / PI, ..q })
    }

    /// `gamma0 = (1/pi) int_0^inf J(w)/w dw`.
    pub fn gamma0_frequency(&self) -> Result<f64> {
        let q = quad::integrate(
            |w| {
                self.normalization
                    * w.powi(self.m as i32 - 1)
                    * (-(w / self.cutoff).powi(2)).exp()
            },
            0.0,
            self.omega_max(),
            &QuadOptions::default().with_tolerances(0.0, 1e-14).with_initial_panels(16),
        )?;
        Ok(q.value / PI)
    }

    /// `gamma0 = int_{-inf}^0 Im h(t) dt` evaluated in the time domain.
    ///
    /// The integral is Abel-regularized with a factor `exp(-eps |t|)` for
    /// three damping values `eps, 2 eps, 4 eps` and extrapolated to
    /// `eps -> 0` with a quadratic Richardson step.
    pub fn gamma0_time(&self) -> Result<f64> {
        // Im h decays like exp(-(cutoff t / 2)^2); 40/cutoff is far in the tail.
        let upper = 40.0 / self.cutoff;
        let (nodes, weights) = quad::composite_gauss_legendre(0.0, upper, 400, 16);
        let mut im = Vec::with_capacity(nodes.len());
        for &u in &nodes {
            // Im h(-u) = -Im h(u)
            im.push(-self.im_h_direct(u)?.value);
        }
        let eps = 1e-3;
        let damped = |e: f64| -> f64 {
            nodes
                .iter()
                .zip(&weights)
                .zip(&im)
                .map(|((u, w), f)| w * f * (-e * u).exp())
                .sum()
        };
        let (g1, g2, g4) = (damped(eps), damped(2.0 * eps), damped(4.0 * eps));
        Ok((8.0 * g1 - 6.0 * g2 + g4) / 3.0)
    }

    /// `int_0^inf Re h dtau = (1/2) lim_{w->0} coth(w/2) J(w)`.
    pub fn i0_frequency(&self) -> f64 {
        if self.m == 1 {
            self.normalization
        } else {
            0.0
        }
    }

    /// `int_0^inf tau Re h dtau = -(1/pi) int_0^inf coth(w/2) J(w) / w^2 dw`,
    /// convergent for `m >= 3`.
    pub fn i1_frequency(&self) -> Result<f64> {
        if self.m < 3 {
            return Err(Error::InvalidModel(format!(
                "frequency-route first moment diverges for m = {}",
                self.m
            )));
        }
        let q = quad::integrate(
            |w| {
                self.normalization
                    * w.powi(self.m as i32 - 3)
                    * x_coth_half(w)
                    * (-(w / self.cutoff).powi(2)).exp()
            },
            0.0,
            self.omega_max(),
            &QuadOptions::default().with_tolerances(0.0, 1e-13).with_initial_panels(16),
        )?;
        Ok(-q.value / PI)
    }
}

/// Analytic correlators with a real, even `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Preset {
    /// `h = 1`.
    Constant,
    /// `h = exp(-|tau| / tau_c)`.
    Exponential { tau_c: f64 },
    /// `h = exp(-(tau / tau_c)^2)`.
    Gaussian { tau_c: f64 },
}

impl Preset {
    fn validate(&self) -> Result<()> {
        match *self {
            Preset::Constant => Ok(()),
            Preset::Exponential { tau_c } | Preset::Gaussian { tau_c } if tau_c > 0.0 && tau_c.is_finite() => Ok(()),
            _ => Err(Error::InvalidModel(format!("preset correlation time must be positive: {self:?}"))),
        }
    }

    fn re(&self, tau: f64) -> f64 {
        match *self {
            Preset::Constant => 1.0,
            Preset::Exponential { tau_c } => (-tau.abs() / tau_c).exp(),
            Preset::Gaussian { tau_c } => (-(tau / tau_c).powi(2)).exp(),
        }
    }

    fn i0(&self) -> Option<f64> {
        match *self {
            Preset::Constant => None,
            Preset::Exponential { tau_c } => Some(tau_c),
            Preset::Gaussian { tau_c } => Some(0.5 * PI.sqrt() * tau_c),
        }
    }

    fn i1(&self) -> Option<f64> {
        match *self {
            Preset::Constant => None,
            Preset::Exponential { tau_c } => Some(tau_c * tau_c),
            Preset::Gaussian { tau_c } => Some(0.5 * tau_c * tau_c),
        }
    }
}

/// Where a correlator comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum CorrelatorSource {
    Spectral(SpectralModel),
    Preset(Preset),
    Discrete(DiscreteBath),
}

/// Integral moments of a correlator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    /// `<B^2>_0 = Re h(0)`.
    pub variance: f64,
    pub gamma0: f64,
    /// False when the source has no imaginary part (presets).
    pub gamma0_defined: bool,
    /// `int_0^inf Re h dtau`, when convergent.
    pub i0: Option<f64>,
    /// `int_0^inf tau Re h dtau`, when convergent.
    pub i1: Option<f64>,
}

#[derive(Debug, Clone)]
struct Table {
    re: UniformSpline,
    im: UniformSpline,
    re_coarse: UniformSpline,
}

/// An evaluable bath correlator on `|tau| <= tau_max`.
#[derive(Debug, Clone)]
pub struct BathCorrelator {
    source: CorrelatorSource,
    tau_max: f64,
    table: Option<Table>,
    moments: Moments,
}

/// Tabulate the correlator of `model` on `n` uniform nodes over `[0, tau_max]`.
///
/// `n` is rounded up to the next odd number so that the half-resolution grid
/// used for error estimates spans the same range.
pub fn build_correlator(model: SpectralModel, tau_max: f64, n: usize) -> Result<BathCorrelator> {
    BathCorrelator::from_spectral(model, tau_max, n)
}

impl BathCorrelator {
    pub fn from_spectral(model: SpectralModel, tau_max: f64, n: usize) -> Result<Self> {
        if !(tau_max > 0.0 && tau_max.is_finite()) {
            return Err(Error::InvalidInput(format!("tau_max must be positive, got {tau_max}")));
        }
        if n < 64 {
            return Err(Error::InvalidInput(format!("correlator grid needs n >= 64, got {n}")));
        }
        let n = n | 1;
        let step = tau_max / (n - 1) as f64;

        let omega_max = model.omega_max();
        let panel = (2.0 * PI / tau_max).min(0.25);
        let panels = (omega_max / panel).ceil() as usize;
        let (omegas, weights) = quad::composite_gauss_legendre(0.0, omega_max, panels, 16);

        let mut re = vec![0.0; n];
        let mut im = vec![0.0; n];
        for (&w, &wt) in omegas.iter().zip(&weights) {
            let r = model.thermal_weight(w);
            if r < 0.0 {
                return Err(Error::InvalidModel(format!("negative spectral weight {r} at w = {w}")));
            }
            let a = wt * r / PI;
            let b = wt * model.density(w) / PI;
            let (rot_s, rot_c) = (w * step).sin_cos();
            let (mut ps, mut pc) = (0.0, 1.0);
            for i in 0..n {
                if i % 64 == 0 {
                    (ps, pc) = (w * step * i as f64).sin_cos();
                }
                re[i] += a * pc;
                im[i] -= b * ps;
                (pc, ps) = (pc * rot_c - ps * rot_s, ps * rot_c + pc * rot_s);
            }
        }
        // Odd by construction.
        im[0] = 0.0;

        // Spot-check the tabulation against adaptive quadrature at the most
        // oscillatory node.
        let direct = model.re_h_direct(tau_max)?;
        let deviation = (direct.value - re[n - 1]).abs();
        if deviation > 1e-9 {
            return Err(Error::Quadrature { achieved: deviation, requested: 1e-9 });
        }

        let re_spline = UniformSpline::new(0.0, step, re, LeftBoundary::Clamped(0.0))?;
        let im_spline = UniformSpline::new(0.0, step, im, LeftBoundary::Natural)?;
        let re_coarse = re_spline.coarsened(LeftBoundary::Clamped(0.0))?;

        let moments = Moments {
            variance: re_spline.values()[0],
            gamma0: model.gamma0_frequency()?,
            gamma0_defined: true,
            i0: Some(re_spline.integrate_weighted(tau_max, |_| 1.0)),
            i1: Some(re_spline.integrate_weighted(tau_max, |t| t)),
        };
        Ok(Self {
            source: CorrelatorSource::Spectral(model),
            tau_max,
            table: Some(Table { re: re_spline, im: im_spline, re_coarse }),
            moments,
        })
    }

    /// Spectral correlator on the default grid step.
    pub fn spectral(model: SpectralModel, tau_max: f64) -> Result<Self> {
        let n = ((tau_max / DEFAULT_GRID_STEP).ceil() as usize + 1).max(64);
        Self::from_spectral(model, tau_max, n)
    }

    pub fn preset(preset: Preset, tau_max: f64) -> Result<Self> {
        preset.validate()?;
        if !(tau_max > 0.0) {
            return Err(Error::InvalidInput(format!("tau_max must be positive, got {tau_max}")));
        }
        Ok(Self {
            source: CorrelatorSource::Preset(preset),
            tau_max,
            table: None,
            moments: Moments {
                variance: 1.0,
                gamma0: 0.0,
                gamma0_defined: false,
                i0: preset.i0(),
                i1: preset.i1(),
            },
        })
    }

    pub fn discrete(bath: DiscreteBath, tau_max: f64) -> Result<Self> {
        if !(tau_max > 0.0) {
            return Err(Error::InvalidInput(format!("tau_max must be positive, got {tau_max}")));
        }
        let (variance, _) = bath.correlator(0.0);
        let gamma0 = bath.modes().iter().map(|m| m.g * m.g / m.omega).sum();
        Ok(Self {
            source: CorrelatorSource::Discrete(bath),
            tau_max,
            table: None,
            moments: Moments { variance, gamma0, gamma0_defined: true, i0: None, i1: None },
        })
    }

    pub fn source(&self) -> &CorrelatorSource {
        &self.source
    }

    pub fn spectral_model(&self) -> Option<&SpectralModel> {
        match &self.source {
            CorrelatorSource::Spectral(m) => Some(m),
            _ => None,
        }
    }

    pub fn tau_max(&self) -> f64 {
        self.tau_max
    }

    /// Grid step of the tabulated correlator, if tabulated.
    pub fn grid_step(&self) -> Option<f64> {
        self.table.as_ref().map(|t| t.re.step())
    }

    pub fn moments(&self) -> &Moments {
        &self.moments
    }

    fn check_range(&self, tau: f64) -> Result<f64> {
        let a = tau.abs();
        if !a.is_finite() || a > self.tau_max * (1.0 + 1e-12) {
            return Err(Error::OutOfRange { tau, tau_max: self.tau_max });
        }
        Ok(a.min(self.tau_max))
    }

    /// `(Re h(tau), Im h(tau))`. Exact at grid nodes for tabulated sources.
    pub fn at(&self, tau: f64) -> Result<(f64, f64)> {
        let a = self.check_range(tau)?;
        let (re, im) = match (&self.table, &self.source) {
            (Some(t), _) => (t.re.eval(a), t.im.eval(a)),
            (None, CorrelatorSource::Preset(p)) => (p.re(a), 0.0),
            (None, CorrelatorSource::Discrete(b)) => b.correlator(a),
            (None, CorrelatorSource::Spectral(_)) => unreachable!("spectral sources are tabulated"),
        };
        Ok((re, if tau < 0.0 { -im } else { im }))
    }

    /// `int_0^{|t|} Im h(tau) dtau`.
    pub fn im_integral(&self, t: f64) -> Result<f64> {
        let a = self.check_range(t)?;
        Ok(match (&self.table, &self.source) {
            (Some(tab), _) => tab.im.integrate_weighted(a, |_| 1.0),
            (None, CorrelatorSource::Preset(_)) => 0.0,
            (None, CorrelatorSource::Discrete(b)) => b
                .modes()
                .iter()
                .map(|m| -m.g * m.g * (1.0 - (m.omega * a).cos()) / m.omega)
                .sum(),
            (None, CorrelatorSource::Spectral(_)) => unreachable!("spectral sources are tabulated"),
        })
    }

    /// `int_0^t Re h(u) weight(u) du` with an error estimate.
    ///
    /// Tabulated sources integrate the spline exactly (for polynomial weights
    /// up to degree 4) and estimate the interpolation error as the change
    /// against the half-resolution spline. Analytic sources use adaptive
    /// quadrature.
    pub fn integrate_re_weighted<W>(&self, t: f64, weight: W) -> Result<Quadrature>
    where
        W: Fn(f64) -> f64,
    {
        if t < 0.0 {
            return Err(Error::InvalidInput(format!("integration time must be >= 0, got {t}")));
        }
        let t = self.check_range(t)?;
        if t == 0.0 {
            return Ok(Quadrature::exact(0.0));
        }
        match (&self.table, &self.source) {
            (Some(tab), _) => {
                let fine = tab.re.integrate_weighted(t, &weight);
                let coarse = tab.re_coarse.integrate_weighted(t, &weight);
                Ok(Quadrature {
                    value: fine,
                    abs_err: (fine - coarse).abs(),
                    evaluations: 4 * tab.re.len(),
                })
            }
            (None, CorrelatorSource::Preset(p)) => {
                let p = *p;
                quad::integrate(
                    |u| p.re(u) * weight(u),
                    0.0,
                    t,
                    &QuadOptions::default().with_tolerances(0.0, 1e-13).with_initial_panels(4),
                )
            }
            (None, CorrelatorSource::Discrete(b)) => {
                let w_max = b.modes().iter().map(|m| m.omega).fold(0.0, f64::max);
                let panels = (w_max * t / PI).ceil() as usize + 4;
                quad::integrate(
                    |u| b.correlator(u).0 * weight(u),
                    0.0,
                    t,
                    &QuadOptions::default().with_tolerances(0.0, 1e-13).with_initial_panels(panels),
                )
            }
            (None, CorrelatorSource::Spectral(_)) => unreachable!("spectral sources are tabulated"),
        }
    }
}

/// Free-function form of [`BathCorrelator::at`].
pub fn correlator_at(corr: &BathCorrelator, tau: f64) -> Result<(f64, f64)> {
    corr.at(tau)
}

/// gamma0 together with a warning when the source has no imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct Gamma0 {
    pub value: f64,
    pub warning: Option<Warning>,
}

/// `gamma0 = int_{-inf}^0 Im h(t) dt`, from the frequency route for spectral
/// sources and the closed form `sum g^2 / w` for discrete baths.
pub fn gamma0(corr: &BathCorrelator) -> Gamma0 {
    let m = corr.moments();
    Gamma0 {
        value: m.gamma0,
        warning: (!m.gamma0_defined).then_some(Warning::NoImaginaryPart),
    }
}

/// Linear-response mean `<B(t)>_y = -2 y int_{-inf}^t Im h`.
pub fn linear_response_mean(corr: &BathCorrelator, y: f64, t: f64) -> Result<f64> {
    let tail = corr.im_integral(t)?;
    Ok(-2.0 * y * (corr.moments().gamma0 + tail))
}

/// `Z_{B,y} / Z_{B,0} = exp(gamma0 y^2)`.
pub fn partition_ratio(corr: &BathCorrelator, y: f64) -> f64 {
    (corr.moments().gamma0 * y * y).exp()
}

/// JSON description of a bath source:
/// `{"type":"spectral","m":1,"cutoff":5.0}` or
/// `{"type":"preset","name":"exponential","tau_c":1.0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BathSpec {
    Spectral {
        m: u32,
        cutoff: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tau_max: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        grid_points: Option<usize>,
    },
    Preset {
        name: PresetName,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tau_c: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tau_max: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PresetName {
    Constant,
    Exponential,
    Gaussian,
}

impl BathSpec {
    /// Correlator range requested in the spec, if any.
    pub fn tau_max(&self) -> Option<f64> {
        match self {
            BathSpec::Spectral { tau_max, .. } | BathSpec::Preset { tau_max, .. } => *tau_max,
        }
    }

    /// Build the correlator, using `default_tau_max` when the description gives no
    /// range.
    pub fn build(&self, default_tau_max: f64) -> Result<BathCorrelator> {
        let tau_max = self.tau_max().unwrap_or(default_tau_max);
        match *self {
            BathSpec::Spectral { m, cutoff, grid_points, .. } => {
                let model = SpectralModel::new(m, cutoff)?;
                match grid_points {
                    Some(n) => BathCorrelator::from_spectral(model, tau_max, n),
                    None => BathCorrelator::spectral(model, tau_max),
                }
            }
            BathSpec::Preset { name, tau_c, .. } => {
                let preset = match name {
                    PresetName::Constant => Preset::Constant,
                    PresetName::Exponential | PresetName::Gaussian => {
                        let tau_c = tau_c.ok_or_else(|| {
                            Error::InvalidModel(format!("preset {name:?} needs tau_c"))
                        })?;
                        if name == PresetName::Exponential {
                            Preset::Exponential { tau_c }
                        } else {
                            Preset::Gaussian { tau_c }
                        }
                    }
                };
                BathCorrelator::preset(preset, tau_max)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1(m: u32) -> BathCorrelator {
        BathCorrelator::spectral(SpectralModel::new(m, 5.0).unwrap(), 10.0).unwrap()
    }

    #[test]
    fn normalization_fixes_unit_variance() {
        for m in [1, 3, 5] {
            let c = fig1(m);
            let (re, im) = c.at(0.0).unwrap();
            assert!((re - 1.0).abs() < 1e-12, "m={m}: {re}");
            assert_eq!(im, 0.0);
        }
    }

    #[test]
    fn rejects_invalid_models() {
        assert!(matches!(SpectralModel::new(0, 5.0), Err(Error::InvalidModel(_))));
        assert!(matches!(SpectralModel::new(1, 0.0), Err(Error::InvalidModel(_))));
        let m = SpectralModel::new(1, 5.0).unwrap();
        assert!(BathCorrelator::from_spectral(m, 1.0, 10).is_err());
    }

    #[test]
    fn symmetry_under_time_reversal() {
        let c = fig1(3);
        for tau in [0.013, 0.4, 1.7, 6.2] {
            let (rp, ip) = c.at(tau).unwrap();
            let (rm, im) = c.at(-tau).unwrap();
            assert_eq!(rp, rm);
            assert_eq!(ip, -im);
        }
    }

    #[test]
    fn out_of_range_is_an_error() {
        let c = fig1(1);
        assert!(matches!(c.at(10.5), Err(Error::OutOfRange { .. })));
        assert!(matches!(c.at(-11.0), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn table_matches_direct_quadrature() {
        let model = SpectralModel::new(1, 5.0).unwrap();
        let c = BathCorrelator::spectral(model, 10.0).unwrap();
        for tau in [0.0, 0.0025, 0.1234, 0.5, 1.0, 3.3] {
            let (re, im) = c.at(tau).unwrap();
            let dr = model.re_h_direct(tau).unwrap().value;
            let di = model.im_h_direct(tau).unwrap().value;
            assert!((re - dr).abs() < 1e-8, "tau={tau}: {re} vs {dr}");
            assert!((im - di).abs() < 1e-8, "tau={tau}: {im} vs {di}");
        }
    }

    #[test]
    fn spectral_weight_is_nonnegative() {
        let model = SpectralModel::new(3, 5.0).unwrap();
        let (nodes, _) = quad::composite_gauss_legendre(0.0, model.omega_max(), 200, 8);
        assert!(nodes.iter().all(|&w| model.thermal_weight(w) >= 0.0));
        assert!((model.thermal_weight(0.0)).abs() < 1e-300);
        let ohmic = SpectralModel::new(1, 5.0).unwrap();
        assert!((ohmic.thermal_weight(0.0) - 2.0 * ohmic.normalization()).abs() < 1e-14);
    }

    #[test]
    fn presets_evaluate_in_closed_form() {
        let e = BathCorrelator::preset(Preset::Exponential { tau_c: 1.0 }, 5.0).unwrap();
        let (re, im) = e.at(1.0).unwrap();
        assert!((re - (-1.0f64).exp()).abs() < 1e-15);
        assert!((re - 0.367_879).abs() < 1e-6);
        assert_eq!(im, 0.0);
        let c = BathCorrelator::preset(Preset::Constant, 5.0).unwrap();
        assert_eq!(c.at(-3.0).unwrap(), (1.0, 0.0));
        assert!(BathCorrelator::preset(Preset::Gaussian { tau_c: -1.0 }, 5.0).is_err());
    }

    #[test]
    fn gamma0_of_presets_is_flagged_zero() {
        let c = BathCorrelator::preset(Preset::Constant, 5.0).unwrap();
        let g = gamma0(&c);
        assert_eq!(g.value, 0.0);
        assert_eq!(g.warning, Some(Warning::NoImaginaryPart));
    }

    #[test]
    fn gamma0_matches_gaussian_moment_closed_form() {
        // (1/pi) N int_0^inf w^{m-1} e^{-w^2/c^2} dw = N c^m Gamma(m/2) / (2 pi)
        let c = 5.0f64;
        let sqrt_pi = PI.sqrt();
        for (m, gamma_half_m) in [(1u32, sqrt_pi), (3, 0.5 * sqrt_pi), (5, 0.75 * sqrt_pi)] {
            let model = SpectralModel::new(m, c).unwrap();
            let want = model.normalization() * c.powi(m as i32) * gamma_half_m / (2.0 * PI);
            let got = model.gamma0_frequency().unwrap();
            assert!((got - want).abs() < 1e-12 * want, "m={m}: {got} vs {want}");
        }
    }

    #[test]
    fn gamma0_decreases_with_exponent() {
        let g1 = SpectralModel::new(1, 5.0).unwrap().gamma0_frequency().unwrap();
        let g3 = SpectralModel::new(3, 5.0).unwrap().gamma0_frequency().unwrap();
        assert!(g1 > 0.0 && g1 <= 0.5);
        assert!(g3 > 0.0 && g3 < g1);
    }

    #[test]
    fn linear_response_and_partition_ratio() {
        let c = fig1(1);
        let g = c.moments().gamma0;
        assert_eq!(linear_response_mean(&c, 0.0, 2.0).unwrap(), 0.0);
        assert!((linear_response_mean(&c, 1.0, 0.0).unwrap() + 2.0 * g).abs() < 1e-15);
        assert!(linear_response_mean(&c, 1.0, 10.0).unwrap().abs() < 1e-4);
        assert_eq!(partition_ratio(&c, 0.0), 1.0);
        assert_eq!(partition_ratio(&c, 0.7), partition_ratio(&c, -0.7));
        assert!((partition_ratio(&c, 1.0) - g.exp()).abs() < 1e-15);
    }

    #[test]
    fn bath_spec_json_fragments() {
        let s: BathSpec = serde_json::from_str(r#"{"type":"spectral","m":1,"cutoff":5.0}"#).unwrap();
        assert_eq!(s, BathSpec::Spectral { m: 1, cutoff: 5.0, tau_max: None, grid_points: None });
        let p: BathSpec =
            serde_json::from_str(r#"{"type":"preset","name":"exponential","tau_c":1.0}"#).unwrap();
        let c = p.build(4.0).unwrap();
        assert!((c.at(1.0).unwrap().0 - (-1.0f64).exp()).abs() < 1e-15);
        assert!(serde_json::from_str::<BathSpec>(r#"{"type":"spectral","m":1,"cutoff":5.0,"x":1}"#).is_err());
        let bad: BathSpec = serde_json::from_str(r#"{"type":"preset","name":"gaussian"}"#).unwrap();
        assert!(bad.build(1.0).is_err());
    }
}
