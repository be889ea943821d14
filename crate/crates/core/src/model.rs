//! Level scheme, laser fields and vapor environment.
//!
//! Everything here is in SI units with frequencies and rates as angular
//! frequencies (rad/s). The level labels are 1 = ground, 2 = intermediate,
//! 3 = upper and 4 = the reservoir that collects the leak out of level 3.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{require, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const PLANCK: f64 = 6.626_070_15e-34;
pub const HBAR: f64 = PLANCK / (2.0 * PI);
pub const BOLTZMANN: f64 = 1.380_649e-23;
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// Converts an ordinary frequency in Hz to an angular frequency.
#[inline]
pub fn two_pi(hz: f64) -> f64 {
    2.0 * PI * hz
}

/// Three-level cascade constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomModel {
    /// Probe wavelength, 1 -> 2 (m).
    pub lambda_p: f64,
    /// Coupling wavelength, 2 -> 3 (m).
    pub lambda_c: f64,
    /// Decay 2 -> 1 (rad/s).
    pub gamma1: f64,
    /// Decay 3 -> 2 (rad/s).
    pub gamma2: f64,
    /// Leak 3 -> reservoir (rad/s). Zero closes the system.
    pub gamma3: f64,
    /// Atomic mass (kg).
    pub mass: f64,
}

impl AtomModel {
    /// Calcium 4s² ¹S₀ -> 4s4p ¹P₁ -> 4p² ¹D₂ with the leak through 4s5p ¹P₁.
    pub fn calcium() -> Self {
        Self {
            lambda_p: 423e-9,
            lambda_c: 586e-9,
            gamma1: two_pi(34e6),
            gamma2: two_pi(11e6),
            gamma3: two_pi(0.18e6),
            mass: 40.08 * ATOMIC_MASS_UNIT,
        }
    }

    /// Same atom with the leak switched off.
    pub fn closed(self) -> Self {
        Self {
            gamma3: 0.0,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        require(self.lambda_p > 0.0, "lambda_p", self.lambda_p, "must be > 0")?;
        require(self.lambda_c > 0.0, "lambda_c", self.lambda_c, "must be > 0")?;
        require(self.mass > 0.0, "mass", self.mass, "must be > 0")?;
        require(self.gamma1 > 0.0, "gamma1", self.gamma1, "must be > 0")?;
        require(self.gamma2 > 0.0, "gamma2", self.gamma2, "must be > 0")?;
        require(self.gamma3 >= 0.0, "gamma3", self.gamma3, "must be >= 0")?;
        Ok(())
    }

    pub fn k_p(&self) -> f64 {
        2.0 * PI / self.lambda_p
    }

    pub fn k_c(&self) -> f64 {
        2.0 * PI / self.lambda_c
    }

    /// Probe carrier angular frequency.
    pub fn omega_p0(&self) -> f64 {
        2.0 * PI * SPEED_OF_LIGHT / self.lambda_p
    }

    /// Squared probe transition dipole from the 2 -> 1 decay rate (C²m²).
    pub fn dipole_sq(&self) -> f64 {
        3.0 * PI * VACUUM_PERMITTIVITY * HBAR * SPEED_OF_LIGHT.powi(3) * self.gamma1
            / self.omega_p0().powi(3)
    }
}

/// Relative direction of the probe and coupling beams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Copropagating,
    Counterpropagating,
}

impl Geometry {
    /// Sign of the coupling wave vector along the probe axis.
    pub fn sign(self) -> f64 {
        match self {
            Geometry::Copropagating => 1.0,
            Geometry::Counterpropagating => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Geometry::Copropagating => "copropagating",
            Geometry::Counterpropagating => "counterpropagating",
        }
    }
}

/// Probe and coupling fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveField {
    /// Probe detuning from 1 -> 2 (rad/s).
    pub delta_p: f64,
    /// Coupling detuning from 2 -> 3 (rad/s).
    pub delta_c: f64,
    /// Probe Rabi frequency (rad/s).
    pub omega_p: f64,
    /// Coupling Rabi frequency (rad/s).
    pub omega_c: f64,
    pub geometry: Geometry,
}

impl DriveField {
    /// Resonant fields with Rabi frequencies given in units of `gamma1`.
    pub fn resonant(atom: &AtomModel, omega_p: f64, omega_c: f64, geometry: Geometry) -> Self {
        Self {
            delta_p: 0.0,
            delta_c: 0.0,
            omega_p: omega_p * atom.gamma1,
            omega_c: omega_c * atom.gamma1,
            geometry,
        }
    }

    pub fn validate(&self) -> Result<()> {
        require(self.omega_p >= 0.0, "omega_p", self.omega_p, "must be >= 0")?;
        require(self.omega_c >= 0.0, "omega_c", self.omega_c, "must be >= 0")?;
        require(self.delta_p.is_finite(), "delta_p", self.delta_p, "must be finite")?;
        require(self.delta_c.is_finite(), "delta_c", self.delta_c, "must be finite")?;
        Ok(())
    }

    pub fn with_probe_detuning(self, delta_p: f64) -> Self {
        Self { delta_p, ..self }
    }

    pub fn with_probe_rabi(self, omega_p: f64) -> Self {
        Self { omega_p, ..self }
    }

    pub fn without_coupling(self) -> Self {
        Self {
            omega_c: 0.0,
            ..self
        }
    }

    pub fn with_geometry(self, geometry: Geometry) -> Self {
        Self { geometry, ..self }
    }

    /// Probe detuning seen by atoms moving at `v` along the probe axis.
    pub fn probe_detuning_at(&self, atom: &AtomModel, v: f64) -> f64 {
        self.delta_p - atom.k_p() * v
    }

    /// Coupling detuning seen by atoms moving at `v` along the probe axis.
    pub fn coupling_detuning_at(&self, atom: &AtomModel, v: f64) -> f64 {
        self.delta_c - self.geometry.sign() * atom.k_c() * v
    }
}

/// Vapor conditions inside the lamp.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    /// Temperature (K).
    pub temperature: f64,
    /// Ground-state number density (m⁻³).
    pub density: f64,
    /// Reservoir -> ground return rate (rad/s).
    pub transit_rate: f64,
    /// Incoherent ground -> excited pump rate (rad/s), split evenly over levels 2 and 3.
    pub pump_rate: f64,
    /// Strong-collision velocity-changing rate (rad/s).
    pub vcc_rate: f64,
}

impl Environment {
    /// 1000 K calcium vapor at 1e10 cm⁻³ with a 34 kHz diffusion return.
    pub fn hollow_cathode() -> Self {
        Self {
            temperature: 1000.0,
            density: 1e16,
            transit_rate: two_pi(34e3),
            pump_rate: 0.0,
            vcc_rate: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        require(self.temperature > 0.0, "temperature", self.temperature, "must be > 0")?;
        require(self.density >= 0.0, "density", self.density, "must be >= 0")?;
        require(self.transit_rate >= 0.0, "transit_rate", self.transit_rate, "must be >= 0")?;
        require(self.pump_rate >= 0.0, "pump_rate", self.pump_rate, "must be >= 0")?;
        require(self.vcc_rate >= 0.0, "vcc_rate", self.vcc_rate, "must be >= 0")?;
        Ok(())
    }

    pub fn with_density(self, density: f64) -> Self {
        Self { density, ..self }
    }

    pub fn with_temperature(self, temperature: f64) -> Self {
        Self {
            temperature,
            ..self
        }
    }

    /// Most probable speed √(2 k_B T / m).
    pub fn most_probable_speed(&self, atom: &AtomModel) -> f64 {
        (2.0 * BOLTZMANN * self.temperature / atom.mass).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn calcium_is_valid() {
        AtomModel::calcium().validate().unwrap();
        AtomModel::calcium().closed().validate().unwrap();
        Environment::hollow_cathode().validate().unwrap();
    }

    #[test]
    fn rejects_bad_parameters() {
        let atom = AtomModel {
            gamma3: -1.0,
            ..AtomModel::calcium()
        };
        assert!(matches!(
            atom.validate(),
            Err(crate::Error::InvalidParameter { name: "gamma3", .. })
        ));
        let env = Environment {
            temperature: 0.0,
            ..Environment::hollow_cathode()
        };
        assert!(env.validate().is_err());
        let drive = DriveField {
            omega_c: -1.0,
            ..DriveField::resonant(&AtomModel::calcium(), 0.4, 1.1, Geometry::Copropagating)
        };
        assert!(drive.validate().is_err());
    }

    #[test]
    fn calcium_most_probable_speed() {
        // √(2 k_B 1000 K / 40.08 u)
        let u = Environment::hollow_cathode().most_probable_speed(&AtomModel::calcium());
        assert!((u - 644.12).abs() < 0.05, "u = {u}");
    }

    #[test]
    fn counterpropagating_two_photon_shift_vanishes_for_matched_wavelengths() {
        let atom = AtomModel {
            lambda_c: 423e-9,
            ..AtomModel::calcium()
        };
        let drive = DriveField::resonant(&atom, 0.4, 1.1, Geometry::Counterpropagating);
        for v in [-900.0, -13.5, 0.0, 250.0, 1200.0] {
            let shift = (atom.k_p() + drive.geometry.sign() * atom.k_c()) * v;
            assert_eq!(shift, 0.0);
        }
    }
}
