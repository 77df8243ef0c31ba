//! Decoherence of pointer readouts in a linear quantum measurement model.
//!
//! A microscopic object with observable `S` is coupled to a macroscopic
//! pointer through `eps S P`; the pointer position `X` couples linearly to a
//! thermal bath through `B X`. The crate computes the bath correlator, the
//! metastable initial pointer state, the decoherence exponent of the joint
//! object-pointer state, and the decoherence/entanglement time scales in the
//! slow-bath and Markovian limits. A brute-force harmonic bath in
//! [`oracle`] checks the Gaussian decoherence formula.
//!
//! Everything is in reduced units: `hbar = 1`, `beta = 1`, and the bath
//! correlator is normalized to `Re h(0) = 1`. See [`units`] for conversions.

pub mod bathmodel;
pub mod decoherence;
pub mod demo;
pub mod diagnostics;
pub mod error;
pub mod measurement;
pub mod oracle;
pub mod pointer;
pub mod quad;
pub mod regimes;
pub mod roots;
pub mod spline;
pub mod units;

pub use bathmodel::{BathCorrelator, BathSpec, Preset, SpectralModel};
pub use decoherence::{DecoherenceParams, DecoherenceTime};
pub use diagnostics::Warning;
pub use error::{Error, Result};
pub use measurement::MeasurementSetup;
pub use oracle::{BathMode, DiscreteBath};
pub use pointer::{PointerModel, PointerState};
pub use regimes::{DecoherenceCurve, Regime};
