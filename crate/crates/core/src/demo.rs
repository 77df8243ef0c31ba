//! The default two-level demonstration setup.
//!
//! A spin-like object with eigenvalues `-1/2, 1/2` in an equal superposition
//! is read out by a heavy, slow pointer (`M = 10^4`, `W = 0.02`) coupled to
//! an Ohmic bath with cutoff 5. With `eps = 1` every time-scale ratio stays
//! below the 0.1 reporting threshold.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::bathmodel::{BathCorrelator, SpectralModel};
use crate::error::Result;
use crate::measurement::MeasurementSetup;
use crate::pointer::PointerModel;

pub const MASS: f64 = 1e4;
pub const OMEGA: f64 = 0.02;
pub const KAPPA: f64 = 0.01;
pub const DELTA_CLASS: f64 = 100.0;
pub const EPSILON: f64 = 1.0;
pub const EIGENVALUES: [f64; 2] = [-0.5, 0.5];
pub const SPECTRAL_EXPONENT: u32 = 1;
pub const CUTOFF: f64 = 5.0;
pub const TAU_MAX: f64 = 40.0;

pub fn pointer() -> PointerModel {
    PointerModel { mass: MASS, omega: OMEGA, kappa: KAPPA, delta_class: DELTA_CLASS }
}

pub fn correlator() -> Result<BathCorrelator> {
    BathCorrelator::spectral(SpectralModel::new(SPECTRAL_EXPONENT, CUTOFF)?, TAU_MAX)
}

pub fn setup() -> Result<MeasurementSetup> {
    let rho = DMatrix::from_element(2, 2, Complex64::new(0.5, 0.0));
    MeasurementSetup::new(EIGENVALUES.to_vec(), rho, None, EPSILON, pointer(), correlator()?)
}
