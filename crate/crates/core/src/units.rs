//! Unit conventions and medium parameters.
//!
//! Everything in this crate is dimensionless: hbar = 1, the sample length is
//! the length unit (L = 1) and light crosses it in one time unit (c = 1).
//! Rabi frequencies and the collective coupling kappa are rates in units of
//! c/L. Conversions from SI inputs happen once, at config ingestion, and
//! nowhere else.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid1D;

/// Speed of light, m/s, used only when converting SI config blocks.
pub const C_SI: f64 = 299_792_458.0;

/// Marker for the single unit convention used throughout a simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SimUnits;

impl SimUnits {
    /// Convert a linear frequency in Hz to a dimensionless angular rate,
    /// given the sample length in meters.
    pub fn rate_from_hz(f_hz: f64, length_m: f64) -> f64 {
        2.0 * std::f64::consts::PI * f_hz * length_m / C_SI
    }

    /// Convert a time in seconds to time units of L/c.
    pub fn time_from_seconds(t_s: f64, length_m: f64) -> f64 {
        t_s * C_SI / length_m
    }
}

/// Collective coupling and sample geometry.
///
/// `kappa` is the collective atom-field coupling rate in units of c/L;
/// the squared value is what enters the field source term. `atom_count`
/// only scales the polariton normalization prefactor sqrt(N0 / kappa^2 L)
/// and defaults to kappa^2 * L so that the prefactor is one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumParams {
    pub kappa: f64,
    pub length: f64,
    pub n_z: usize,
    pub atom_count: f64,
}

impl MediumParams {
    pub fn new(kappa: f64, length: f64, n_z: usize) -> Result<Self> {
        let p = Self { kappa, length, n_z, atom_count: kappa * kappa * length };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa.is_finite() && self.kappa > 0.0) {
            return Err(Error::Validation(format!("kappa must be > 0 (got {})", self.kappa)));
        }
        if self.n_z < 16 {
            return Err(Error::Validation(format!("n_z must be >= 16 (got {})", self.n_z)));
        }
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(Error::Validation(format!("length must be > 0 (got {})", self.length)));
        }
        if !(self.atom_count.is_finite() && self.atom_count > 0.0) {
            return Err(Error::Validation(format!(
                "atom_count must be > 0 (got {})",
                self.atom_count
            )));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid1D> {
        Grid1D::new(self.n_z, self.length)
    }

    /// Polariton normalization prefactor sqrt(N0 / (kappa^2 L)).
    pub fn polariton_prefactor(&self) -> f64 {
        (self.atom_count / (self.kappa * self.kappa * self.length)).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_atom_count_gives_unit_prefactor() {
        let p = MediumParams::new(20.0, 1.0, 256).unwrap();
        assert!((p.polariton_prefactor() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn validation_rejects_bad_values() {
        assert!(MediumParams::new(0.0, 1.0, 256).is_err());
        assert!(MediumParams::new(20.0, 1.0, 8).is_err());
        assert!(MediumParams::new(20.0, -1.0, 256).is_err());
    }

    #[test]
    fn si_rate_round_trip() {
        // 1 GHz over a 1 cm sample: omega = 2*pi*1e9 * 0.01 / c ~ 0.2096.
        let w = SimUnits::rate_from_hz(1e9, 0.01);
        assert!((w - 2.0 * std::f64::consts::PI * 1e9 * 0.01 / C_SI).abs() < 1e-12);
    }
}
