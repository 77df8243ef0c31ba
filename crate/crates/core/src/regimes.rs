//! Time-scale algebra: entanglement and interaction times, the relation
//! between entanglement and decoherence times, and the two asymptotic
//! regimes.
//!
//! With `eta = <B^2>^{1/2} Delta_eff` (reduced units), the condition
//! `D^peak(t_dec) = 1` is equivalent to `(t_ent / eta)^2 = K(t_dec)`. For a
//! slow bath `K = t^4 / 8`; in the Markov regime `K ~ t^gamma / c_m` with
//! `gamma = 3` for an Ohmic bath and `gamma = 2` for super-Ohmic ones.

use rayon::prelude::*;
use serde::Serialize;

use crate::bathmodel::BathCorrelator;
use crate::decoherence::kernel_k;
use crate::error::{Error, Result};

/// Below this `t_dec` (in thermal times) the slow-bath formula is tagged
/// valid.
pub const SLOW_VALIDITY: f64 = 0.1;
/// Above this `t_dec` the Markov formula is tagged valid.
pub const MARKOV_VALIDITY: f64 = 10.0;

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} must be positive, got {v}")))
    }
}

/// `t_ent = Delta_eff / (eps ds)`.
pub fn entanglement_time(delta_eff: f64, eps: f64, ds: f64) -> Result<f64> {
    positive("delta_eff", delta_eff)?;
    positive("eps", eps)?;
    positive("ds", ds)?;
    Ok(delta_eff / (eps * ds))
}

/// `t_int = W_eff / (eps ds)`.
pub fn interaction_time(w_eff: f64, eps: f64, ds: f64) -> Result<f64> {
    positive("w_eff", w_eff)?;
    positive("eps", eps)?;
    positive("ds", ds)?;
    Ok(w_eff / (eps * ds))
}

#[derive(Debug, Clone, Copy)]
pub struct RegimeInputs<'a> {
    pub eta: f64,
    pub corr: &'a BathCorrelator,
    /// Spectral exponent; taken from the correlator when absent.
    pub m: Option<u32>,
}

impl<'a> RegimeInputs<'a> {
    pub fn new(eta: f64, corr: &'a BathCorrelator) -> Result<Self> {
        positive("eta", eta)?;
        Ok(Self { eta, corr, m: corr.spectral_model().map(|s| s.exponent()) })
    }
}

/// `t_ent = eta sqrt(K(t_dec))`.
pub fn tent_from_tdec(inputs: &RegimeInputs<'_>, t_dec: f64) -> Result<f64> {
    Ok(inputs.eta * kernel_k(inputs.corr, t_dec)?.value.max(0.0).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlowAsymptote {
    pub t_dec: f64,
    /// Decay law `exp(-(t/t_dec)^exponent)`.
    pub exponent: u32,
    pub valid: bool,
}

/// `t_dec = 2^{3/4} (t_ent / eta)^{1/2}`.
pub fn asymptotic_tdec_slow(eta: f64, t_ent: f64) -> SlowAsymptote {
    let t_dec = 2f64.powf(0.75) * (t_ent / eta).sqrt();
    SlowAsymptote { t_dec, exponent: 4, valid: t_dec <= SLOW_VALIDITY }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarkovAsymptote {
    pub t_dec: f64,
    pub gamma: u32,
    pub c_m: f64,
    pub valid: bool,
}

/// Markov exponent `gamma` and constant `c_m` of a correlator.
///
/// `c_1 = 3 / int_0^inf Re h` and `c_m = 2 / |int_0^inf tau Re h|` for odd
/// `m >= 3`.
pub fn markov_constants(corr: &BathCorrelator, m: Option<u32>) -> Result<(u32, f64)> {
    let moments = corr.moments();
    let ohmic = match m {
        Some(1) => true,
        Some(m) if m % 2 == 1 => false,
        Some(m) => {
            return Err(Error::Domain {
                value: m as f64,
                reason: "the Markov asymptote is defined for odd spectral exponents".into(),
            })
        }
        None => moments.i0.is_some_and(|i0| i0.abs() > 1e-6),
    };
    if ohmic {
        let i0 = moments.i0.unwrap_or(0.0);
        if !(i0.abs() > 1e-12) {
            return Err(Error::Domain { value: i0, reason: "int_0^inf Re h vanishes".into() });
        }
        Ok((3, 3.0 / i0))
    } else {
        let i1 = moments.i1.unwrap_or(0.0);
        if !(i1.abs() > 1e-12) {
            return Err(Error::Domain { value: i1, reason: "int_0^inf tau Re h vanishes".into() });
        }
        Ok((2, 2.0 / i1.abs()))
    }
}

/// `t_dec = c_m^{1/gamma} (t_ent / eta)^{2/gamma}`.
pub fn asymptotic_tdec_markov(inputs: &RegimeInputs<'_>, t_ent: f64) -> Result<MarkovAsymptote> {
    positive("t_ent", t_ent)?;
    let (gamma, c_m) = markov_constants(inputs.corr, inputs.m)?;
    let g = gamma as f64;
    let t_dec = c_m.powf(1.0 / g) * (t_ent / inputs.eta).powf(2.0 / g);
    Ok(MarkovAsymptote { t_dec, gamma, c_m, valid: t_dec >= MARKOV_VALIDITY })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveRow {
    pub tent_over_eta: f64,
    pub tdec_numeric: f64,
    pub tdec_slow: f64,
    pub tdec_markov: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveMetadata {
    pub m: Option<u32>,
    pub cutoff: Option<f64>,
    pub gamma: u32,
    pub c_m: f64,
    pub tdec_min: f64,
    pub tdec_max: f64,
    pub points: usize,
}

/// Decoherence time against `t_ent / eta` with both asymptotes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecoherenceCurve {
    pub rows: Vec<CurveRow>,
    pub metadata: CurveMetadata,
}

impl DecoherenceCurve {
    pub const CSV_HEADER: &'static str = "tent_over_eta,tdec_numeric,tdec_slow,tdec_markov";
}

/// `n` logarithmically spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    positive("grid start", lo)?;
    if !(hi > lo) || n < 2 {
        return Err(Error::InvalidInput(format!("need lo < hi and n >= 2, got [{lo}, {hi}], n = {n}")));
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..n)
        .map(|i| match i {
            0 => lo,
            i if i == n - 1 => hi,
            i => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect())
}

/// Evaluate the curve on the given decoherence times.
///
/// Each `t_dec` is mapped to `t_ent / eta = sqrt(K(t_dec))`; rows are
/// computed in parallel and returned sorted by `t_ent / eta`.
pub fn figure1_curve(corr: &BathCorrelator, tdec_grid: &[f64]) -> Result<DecoherenceCurve> {
    if tdec_grid.is_empty() {
        return Err(Error::InvalidInput("empty decoherence-time grid".into()));
    }
    for &t in tdec_grid {
        positive("grid point", t)?;
    }
    let m = corr.spectral_model().map(|s| s.exponent());
    let (gamma, c_m) = markov_constants(corr, m)?;
    let g = gamma as f64;
    let mut rows = tdec_grid
        .par_iter()
        .map(|&t| {
            let r = kernel_k(corr, t)?.value.max(0.0).sqrt();
            Ok(CurveRow {
                tent_over_eta: r,
                tdec_numeric: t,
                tdec_slow: 2f64.powf(0.75) * r.sqrt(),
                tdec_markov: c_m.powf(1.0 / g) * r.powf(2.0 / g),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.tent_over_eta.total_cmp(&b.tent_over_eta));
    let (lo, hi) = tdec_grid.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &t| (lo.min(t), hi.max(t)));
    Ok(DecoherenceCurve {
        rows,
        metadata: CurveMetadata {
            m,
            cutoff: corr.spectral_model().map(|s| s.cutoff()),
            gamma,
            c_m,
            tdec_min: lo,
            tdec_max: hi,
            points: tdec_grid.len(),
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    InteractionDominated,
    Crossover,
    Markovian,
}

impl Regime {
    pub fn label(&self) -> &'static str {
        match self {
            Regime::InteractionDominated => "interaction_dominated",
            Regime::Crossover => "crossover",
            Regime::Markovian => "markovian",
        }
    }
}

/// Thresholds 0.3 and 3 thermal times.
pub fn classify_regime(t_dec: f64) -> Regime {
    if t_dec < 0.3 {
        Regime::InteractionDominated
    } else if t_dec > 3.0 {
        Regime::Markovian
    } else {
        Regime::Crossover
    }
}
