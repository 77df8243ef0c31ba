//! Conversions between reduced units (hbar = 1, beta = 1) and SI.
//!
//! In reduced units the thermal time `hbar * beta` is the unit of time and
//! `k_B T` the unit of energy. Lengths additionally depend on the bath
//! coupling scale and are left to the caller.

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;

/// Thermal time `hbar / (k_B T)` in seconds.
pub fn thermal_time(temperature_kelvin: f64) -> f64 {
    HBAR / (K_B * temperature_kelvin)
}

pub fn time_to_seconds(reduced: f64, temperature_kelvin: f64) -> f64 {
    reduced * thermal_time(temperature_kelvin)
}

pub fn seconds_to_time(seconds: f64, temperature_kelvin: f64) -> f64 {
    seconds / thermal_time(temperature_kelvin)
}

/// Angular frequency in rad/s corresponding to a reduced frequency.
pub fn frequency_to_si(reduced: f64, temperature_kelvin: f64) -> f64 {
    reduced / thermal_time(temperature_kelvin)
}

pub fn energy_to_joules(reduced: f64, temperature_kelvin: f64) -> f64 {
    reduced * K_B * temperature_kelvin
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thermal_time_at_one_kelvin() {
        // hbar / k_B = 7.6382e-12 K s
        assert!((thermal_time(1.0) - 7.638_232_5e-12).abs() < 1e-18);
    }

    #[test]
    fn time_round_trip() {
        let t = 3.7;
        let s = time_to_seconds(t, 0.02);
        assert!((seconds_to_time(s, 0.02) - t).abs() < 1e-12);
    }
}
