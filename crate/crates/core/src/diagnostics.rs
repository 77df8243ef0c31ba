//! Non-fatal findings reported alongside results.

use serde::Serialize;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    /// The correlator has no imaginary part, so gamma0 is reported as zero.
    NoImaginaryPart,
    /// A length-scale ordering `lhs < rhs` failed.
    LengthOrdering { relation: String, lhs: f64, rhs: f64 },
    /// The effective potential has no barrier (quartic coefficient zero).
    BarrierUndefined,
    /// Barrier height is not large compared with the thermal energy.
    BarrierTooLow { v0_eff: f64, threshold: f64 },
    /// A time-scale ratio exceeded the reporting threshold.
    RegimeViolation { ratio: String, value: f64, threshold: f64 },
    /// A time scale could not be computed.
    Unavailable { quantity: String, reason: String },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::NoImaginaryPart => write!(f, "correlator has no imaginary part; gamma0 set to 0"),
            Warning::LengthOrdering { relation, lhs, rhs } => {
                write!(f, "length ordering {relation} violated ({lhs} vs {rhs})")
            }
            Warning::BarrierUndefined => write!(f, "kappa = 0: barrier position W_eff undefined"),
            Warning::BarrierTooLow { v0_eff, threshold } => {
                write!(f, "barrier height {v0_eff} not above {threshold}")
            }
            Warning::RegimeViolation { ratio, value, threshold } => {
                write!(f, "{ratio} = {value} exceeds {threshold}")
            }
            Warning::Unavailable { quantity, reason } => write!(f, "{quantity} unavailable: {reason}"),
        }
    }
}
