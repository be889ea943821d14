//! Conversions between laboratory quantities and model rates.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{require, Result};
use crate::model::{AtomModel, Environment, Geometry, BOLTZMANN, PLANCK, SPEED_OF_LIGHT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transition {
    Probe,
    Coupling,
}

/// Intensity-to-Rabi conversion convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RabiCalibration {
    /// Ω = γ·√(I/(2·I_sat)) with the two-level saturation intensity.
    Standard,
    /// Ω ∝ √I through the lamp measurements (85 mW/cm², 0.4γ1) on the probe
    /// and (707 mW/cm², 1.1γ1) on the coupling transition.
    #[default]
    Calibrated,
}

pub const PROBE_REFERENCE: (f64, f64) = (850.0, 0.4);
pub const COUPLING_REFERENCE: (f64, f64) = (7070.0, 1.1);

impl Transition {
    /// (decay rate, wavelength) of the transition.
    fn constants(self, atom: &AtomModel) -> (f64, f64) {
        match self {
            Transition::Probe => (atom.gamma1, atom.lambda_p),
            Transition::Coupling => (atom.gamma2, atom.lambda_c),
        }
    }
}

/// I_sat = π·h·c·γ/(3λ³) in W/m².
pub fn saturation_intensity(transition: Transition, atom: &AtomModel) -> f64 {
    let (gamma, lambda) = transition.constants(atom);
    PI * PLANCK * SPEED_OF_LIGHT * gamma / (3.0 * lambda.powi(3))
}

/// Rabi frequency (rad/s) for a plane wave of `intensity` W/m².
pub fn rabi_from_intensity(
    intensity: f64,
    transition: Transition,
    atom: &AtomModel,
    mode: RabiCalibration,
) -> Result<f64> {
    require(
        intensity >= 0.0 && intensity.is_finite(),
        "intensity",
        intensity,
        "must be finite and >= 0",
    )?;
    Ok(match mode {
        RabiCalibration::Standard => {
            let (gamma, _) = transition.constants(atom);
            gamma * (intensity / (2.0 * saturation_intensity(transition, atom))).sqrt()
        }
        RabiCalibration::Calibrated => {
            let (i_ref, c_ref) = match transition {
                Transition::Probe => PROBE_REFERENCE,
                Transition::Coupling => COUPLING_REFERENCE,
            };
            c_ref * atom.gamma1 * (intensity / i_ref).sqrt()
        }
    })
}

/// Inverse of [`rabi_from_intensity`].
pub fn intensity_from_rabi(
    omega: f64,
    transition: Transition,
    atom: &AtomModel,
    mode: RabiCalibration,
) -> Result<f64> {
    require(omega >= 0.0 && omega.is_finite(), "omega", omega, "must be finite and >= 0")?;
    let unit = rabi_from_intensity(1.0, transition, atom, mode)?;
    Ok((omega / unit).powi(2))
}

/// Gaussian FWHM of the probe line, (2π/λ_p)·√(8 k_B T ln2 / m), in rad/s.
pub fn doppler_fwhm(atom: &AtomModel, env: &Environment) -> f64 {
    atom.k_p() * (8.0 * BOLTZMANN * env.temperature * 2f64.ln() / atom.mass).sqrt()
}

/// Two-photon Doppler spread |k_p + s·k_c|·u with u the most probable speed.
pub fn residual_doppler_width(atom: &AtomModel, env: &Environment, geometry: Geometry) -> f64 {
    (atom.k_p() + geometry.sign() * atom.k_c()).abs() * env.most_probable_speed(atom)
}
