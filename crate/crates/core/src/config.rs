//! Run configuration in laboratory units.
//!
//! The file format is one `section.key = value` per line with `#` comments.
//! Every key has a default, so an empty file describes the reference
//! counterpropagating run at 1000 K.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lamp::{AlphaEvaluation, LampGeometry, PropagationOptions, VaporMap};
use crate::model::{two_pi, AtomModel, DriveField, Environment, Geometry, ATOMIC_MASS_UNIT};
use crate::spectrum::ScanRange;
use crate::units::{rabi_from_intensity, RabiCalibration, Transition};
use crate::velocity::{QuadratureRule, VelocityGrid};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("override #{index}: {message}")]
    Override { index: usize, message: String },
    #[error("invalid value for `{key}`: {requirement}")]
    Validation { key: &'static str, requirement: String },
}

/// A Rabi frequency given directly or through a beam intensity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RabiInput {
    /// In units of γ1.
    Gamma1(f64),
    /// Beam intensity in mW/cm², converted with the configured mode.
    IntensityMwCm2(f64),
}

impl RabiInput {
    fn value(self) -> f64 {
        match self {
            RabiInput::Gamma1(x) | RabiInput::IntensityMwCm2(x) => x,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomSection {
    pub lambda_p_nm: f64,
    pub lambda_c_nm: f64,
    pub gamma1_mhz: f64,
    pub gamma2_mhz: f64,
    pub gamma3_mhz: f64,
    pub mass_amu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriveSection {
    pub delta_p_mhz: f64,
    pub delta_c_mhz: f64,
    pub probe: RabiInput,
    pub coupling: RabiInput,
    pub rabi_mode: RabiCalibration,
    pub geometry: Geometry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentSection {
    pub temperature_k: f64,
    pub density_cm3: f64,
    pub transit_khz: f64,
    pub pump_khz: f64,
    pub vcc_mhz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericsSection {
    pub velocity_nodes: usize,
    pub quadrature: Quadrature,
    /// Half-span of the trapezoid grid in most-probable speeds.
    pub velocity_span_u: f64,
    pub scan_min_ghz: f64,
    pub scan_max_ghz: f64,
    pub scan_points: usize,
    pub group_index_step_gamma1: f64,
    pub sweep_omega_p_gamma1: Vec<f64>,
    pub max_alpha_dz: f64,
    pub alpha_evaluation: AlphaEvaluation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quadrature {
    Trapezoid,
    GaussHermite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LampSection {
    pub total_cm: f64,
    pub cathode_cm: f64,
    pub anode_gap_cm: f64,
    pub vapor: VaporMap,
    pub input_intensity_mw_cm2: f64,
    pub density_multiplier: f64,
    pub fluorescence_cathode_fraction: f64,
    /// Also propagate a coupling-free reference for channel dip metrics.
    pub with_reference: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub atom: AtomSection,
    pub drive: DriveSection,
    pub environment: EnvironmentSection,
    pub numerics: NumericsSection,
    pub lamp: LampSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            atom: AtomSection {
                lambda_p_nm: 423.0,
                lambda_c_nm: 586.0,
                gamma1_mhz: 34.0,
                gamma2_mhz: 11.0,
                gamma3_mhz: 0.18,
                mass_amu: 40.08,
            },
            drive: DriveSection {
                delta_p_mhz: 0.0,
                delta_c_mhz: 0.0,
                probe: RabiInput::Gamma1(0.4),
                coupling: RabiInput::Gamma1(1.1),
                rabi_mode: RabiCalibration::Calibrated,
                geometry: Geometry::Counterpropagating,
            },
            environment: EnvironmentSection {
                temperature_k: 1000.0,
                density_cm3: 1e10,
                transit_khz: 34.0,
                pump_khz: 0.0,
                vcc_mhz: 0.0,
            },
            numerics: NumericsSection {
                velocity_nodes: crate::velocity::DEFAULT_VELOCITY_NODES,
                quadrature: Quadrature::Trapezoid,
                velocity_span_u: 5.0,
                scan_min_ghz: -2.5,
                scan_max_ghz: 2.5,
                scan_points: 501,
                group_index_step_gamma1: 0.01,
                sweep_omega_p_gamma1: vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6],
                max_alpha_dz: 0.1,
                alpha_evaluation: AlphaEvaluation::Interpolated,
            },
            lamp: LampSection {
                total_cm: 26.0,
                cathode_cm: 2.0,
                anode_gap_cm: 0.5,
                vapor: VaporMap::Cathode,
                input_intensity_mw_cm2: 85.0,
                density_multiplier: 1.0,
                fluorescence_cathode_fraction: 0.5,
                with_reference: true,
            },
        }
    }
}

fn parse_f64(v: &str) -> Result<f64, String> {
    let x: f64 = v.parse().map_err(|_| format!("`{v}` is not a number"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("`{v}` is not finite"))
    }
}

fn parse_usize(v: &str) -> Result<usize, String> {
    v.parse().map_err(|_| format!("`{v}` is not a non-negative integer"))
}

fn parse_bool(v: &str) -> Result<bool, String> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(format!("`{v}` is not true or false")),
    }
}

fn parse_list(v: &str) -> Result<Vec<f64>, String> {
    v.split(',').map(|s| parse_f64(s.trim())).collect()
}

fn parse_choice<T: Copy>(v: &str, choices: &[(&str, T)]) -> Result<T, String> {
    choices
        .iter()
        .find(|(name, _)| *name == v)
        .map(|(_, t)| *t)
        .ok_or_else(|| {
            let names: Vec<&str> = choices.iter().map(|(n, _)| *n).collect();
            format!("`{v}` is not one of {}", names.join(", "))
        })
}

const GEOMETRIES: [(&str, Geometry); 2] = [
    ("copropagating", Geometry::Copropagating),
    ("counterpropagating", Geometry::Counterpropagating),
];
const RABI_MODES: [(&str, RabiCalibration); 2] = [
    ("standard", RabiCalibration::Standard),
    ("calibrated", RabiCalibration::Calibrated),
];
const QUADRATURES: [(&str, Quadrature); 2] = [
    ("trapezoid", Quadrature::Trapezoid),
    ("gauss-hermite", Quadrature::GaussHermite),
];
const ALPHA_MODES: [(&str, AlphaEvaluation); 2] = [
    ("interpolated", AlphaEvaluation::Interpolated),
    ("direct", AlphaEvaluation::Direct),
];
const VAPOR_MAPS: [(&str, VaporMap); 3] = [
    ("cathode", VaporMap::Cathode),
    ("inter-electrode", VaporMap::InterElectrode),
    ("full", VaporMap::Full),
];

fn name_of<T: PartialEq + Copy>(t: T, choices: &[(&'static str, T)]) -> &'static str {
    choices.iter().find(|(_, c)| *c == t).map(|(n, _)| *n).expect("every variant is named")
}

impl RunConfig {
    /// Sets one `section.key` from its textual value.
    pub fn set(&mut self, key: &str, v: &str) -> Result<(), String> {
        let f = parse_f64;
        match key {
            "atom.lambda_p_nm" => self.atom.lambda_p_nm = f(v)?,
            "atom.lambda_c_nm" => self.atom.lambda_c_nm = f(v)?,
            "atom.gamma1_mhz" => self.atom.gamma1_mhz = f(v)?,
            "atom.gamma2_mhz" => self.atom.gamma2_mhz = f(v)?,
            "atom.gamma3_mhz" => self.atom.gamma3_mhz = f(v)?,
            "atom.mass_amu" => self.atom.mass_amu = f(v)?,
            "drive.delta_p_mhz" => self.drive.delta_p_mhz = f(v)?,
            "drive.delta_c_mhz" => self.drive.delta_c_mhz = f(v)?,
            "drive.omega_p_gamma1" => self.drive.probe = RabiInput::Gamma1(f(v)?),
            "drive.omega_c_gamma1" => self.drive.coupling = RabiInput::Gamma1(f(v)?),
            "drive.probe_intensity_mw_cm2" => self.drive.probe = RabiInput::IntensityMwCm2(f(v)?),
            "drive.coupling_intensity_mw_cm2" => {
                self.drive.coupling = RabiInput::IntensityMwCm2(f(v)?)
            }
            "drive.rabi_mode" => self.drive.rabi_mode = parse_choice(v, &RABI_MODES)?,
            "drive.geometry" => self.drive.geometry = parse_choice(v, &GEOMETRIES)?,
            "environment.temperature_k" => self.environment.temperature_k = f(v)?,
            "environment.density_cm3" => self.environment.density_cm3 = f(v)?,
            "environment.transit_khz" => self.environment.transit_khz = f(v)?,
            "environment.pump_khz" => self.environment.pump_khz = f(v)?,
            "environment.vcc_mhz" => self.environment.vcc_mhz = f(v)?,
            "numerics.velocity_nodes" => self.numerics.velocity_nodes = parse_usize(v)?,
            "numerics.quadrature" => self.numerics.quadrature = parse_choice(v, &QUADRATURES)?,
            "numerics.velocity_span_u" => self.numerics.velocity_span_u = f(v)?,
            "numerics.scan_min_ghz" => self.numerics.scan_min_ghz = f(v)?,
            "numerics.scan_max_ghz" => self.numerics.scan_max_ghz = f(v)?,
            "numerics.scan_points" => self.numerics.scan_points = parse_usize(v)?,
            "numerics.group_index_step_gamma1" => self.numerics.group_index_step_gamma1 = f(v)?,
            "numerics.sweep_omega_p_gamma1" => self.numerics.sweep_omega_p_gamma1 = parse_list(v)?,
            "numerics.max_alpha_dz" => self.numerics.max_alpha_dz = f(v)?,
            "numerics.alpha_evaluation" => {
                self.numerics.alpha_evaluation = parse_choice(v, &ALPHA_MODES)?
            }
            "lamp.total_cm" => self.lamp.total_cm = f(v)?,
            "lamp.cathode_cm" => self.lamp.cathode_cm = f(v)?,
            "lamp.anode_gap_cm" => self.lamp.anode_gap_cm = f(v)?,
            "lamp.vapor" => self.lamp.vapor = parse_choice(v, &VAPOR_MAPS)?,
            "lamp.input_intensity_mw_cm2" => self.lamp.input_intensity_mw_cm2 = f(v)?,
            "lamp.density_multiplier" => self.lamp.density_multiplier = f(v)?,
            "lamp.fluorescence_cathode_fraction" => {
                self.lamp.fluorescence_cathode_fraction = f(v)?
            }
            "lamp.with_reference" => self.lamp.with_reference = parse_bool(v)?,
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    /// Canonical text form; `parse_config` of the result gives back `self`.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        let a = &self.atom;
        kv("atom.lambda_p_nm", a.lambda_p_nm.to_string());
        kv("atom.lambda_c_nm", a.lambda_c_nm.to_string());
        kv("atom.gamma1_mhz", a.gamma1_mhz.to_string());
        kv("atom.gamma2_mhz", a.gamma2_mhz.to_string());
        kv("atom.gamma3_mhz", a.gamma3_mhz.to_string());
        kv("atom.mass_amu", a.mass_amu.to_string());
        let d = &self.drive;
        kv("drive.delta_p_mhz", d.delta_p_mhz.to_string());
        kv("drive.delta_c_mhz", d.delta_c_mhz.to_string());
        match d.probe {
            RabiInput::Gamma1(x) => kv("drive.omega_p_gamma1", x.to_string()),
            RabiInput::IntensityMwCm2(x) => kv("drive.probe_intensity_mw_cm2", x.to_string()),
        }
        match d.coupling {
            RabiInput::Gamma1(x) => kv("drive.omega_c_gamma1", x.to_string()),
            RabiInput::IntensityMwCm2(x) => kv("drive.coupling_intensity_mw_cm2", x.to_string()),
        }
        kv("drive.rabi_mode", name_of(d.rabi_mode, &RABI_MODES).into());
        kv("drive.geometry", name_of(d.geometry, &GEOMETRIES).into());
        let e = &self.environment;
        kv("environment.temperature_k", e.temperature_k.to_string());
        kv("environment.density_cm3", e.density_cm3.to_string());
        kv("environment.transit_khz", e.transit_khz.to_string());
        kv("environment.pump_khz", e.pump_khz.to_string());
        kv("environment.vcc_mhz", e.vcc_mhz.to_string());
        let n = &self.numerics;
        kv("numerics.velocity_nodes", n.velocity_nodes.to_string());
        kv("numerics.quadrature", name_of(n.quadrature, &QUADRATURES).into());
        kv("numerics.velocity_span_u", n.velocity_span_u.to_string());
        kv("numerics.scan_min_ghz", n.scan_min_ghz.to_string());
        kv("numerics.scan_max_ghz", n.scan_max_ghz.to_string());
        kv("numerics.scan_points", n.scan_points.to_string());
        kv("numerics.group_index_step_gamma1", n.group_index_step_gamma1.to_string());
        let sweep: Vec<String> = n.sweep_omega_p_gamma1.iter().map(|x| x.to_string()).collect();
        kv("numerics.sweep_omega_p_gamma1", sweep.join(", "));
        kv("numerics.max_alpha_dz", n.max_alpha_dz.to_string());
        kv("numerics.alpha_evaluation", name_of(n.alpha_evaluation, &ALPHA_MODES).into());
        let l = &self.lamp;
        kv("lamp.total_cm", l.total_cm.to_string());
        kv("lamp.cathode_cm", l.cathode_cm.to_string());
        kv("lamp.anode_gap_cm", l.anode_gap_cm.to_string());
        kv("lamp.vapor", name_of(l.vapor, &VAPOR_MAPS).into());
        kv("lamp.input_intensity_mw_cm2", l.input_intensity_mw_cm2.to_string());
        kv("lamp.density_multiplier", l.density_multiplier.to_string());
        kv("lamp.fluorescence_cathode_fraction", l.fluorescence_cathode_fraction.to_string());
        kv("lamp.with_reference", l.with_reference.to_string());
        s
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        fn check(ok: bool, key: &'static str, requirement: &str) -> Result<(), ConfigError> {
            if ok {
                Ok(())
            } else {
                Err(ConfigError::Validation {
                    key,
                    requirement: requirement.into(),
                })
            }
        }
        let a = &self.atom;
        check(a.lambda_p_nm > 0.0, "atom.lambda_p_nm", "must be > 0")?;
        check(a.lambda_c_nm > 0.0, "atom.lambda_c_nm", "must be > 0")?;
        check(a.gamma1_mhz > 0.0, "atom.gamma1_mhz", "must be > 0")?;
        check(a.gamma2_mhz > 0.0, "atom.gamma2_mhz", "must be > 0")?;
        check(a.gamma3_mhz >= 0.0, "atom.gamma3_mhz", "must be >= 0")?;
        check(a.mass_amu > 0.0, "atom.mass_amu", "must be > 0")?;
        let d = &self.drive;
        let (pk, ck) = (
            match d.probe {
                RabiInput::Gamma1(_) => "drive.omega_p_gamma1",
                RabiInput::IntensityMwCm2(_) => "drive.probe_intensity_mw_cm2",
            },
            match d.coupling {
                RabiInput::Gamma1(_) => "drive.omega_c_gamma1",
                RabiInput::IntensityMwCm2(_) => "drive.coupling_intensity_mw_cm2",
            },
        );
        check(d.probe.value() >= 0.0, pk, "must be >= 0")?;
        check(d.coupling.value() >= 0.0, ck, "must be >= 0")?;
        let e = &self.environment;
        check(e.temperature_k > 0.0, "environment.temperature_k", "must be > 0")?;
        check(e.density_cm3 >= 0.0, "environment.density_cm3", "must be >= 0")?;
        check(e.transit_khz >= 0.0, "environment.transit_khz", "must be >= 0")?;
        check(e.pump_khz >= 0.0, "environment.pump_khz", "must be >= 0")?;
        check(e.vcc_mhz >= 0.0, "environment.vcc_mhz", "must be >= 0")?;
        let n = &self.numerics;
        check(
            (2..=1_000_000).contains(&n.velocity_nodes),
            "numerics.velocity_nodes",
            "must be in [2, 1000000]",
        )?;
        check(
            n.velocity_span_u > 0.0 && n.velocity_span_u <= 20.0,
            "numerics.velocity_span_u",
            "must be in (0, 20]",
        )?;
        check(
            n.scan_max_ghz > n.scan_min_ghz,
            "numerics.scan_max_ghz",
            "must exceed numerics.scan_min_ghz",
        )?;
        check(n.scan_points >= 3, "numerics.scan_points", "must be >= 3")?;
        check(
            n.group_index_step_gamma1 > 0.0,
            "numerics.group_index_step_gamma1",
            "must be > 0",
        )?;
        check(
            !n.sweep_omega_p_gamma1.is_empty()
                && n.sweep_omega_p_gamma1.iter().all(|&x| x >= 0.0)
                && n.sweep_omega_p_gamma1.windows(2).all(|w| w[0] < w[1]),
            "numerics.sweep_omega_p_gamma1",
            "must be a non-empty, strictly ascending list of values >= 0",
        )?;
        check(
            n.max_alpha_dz > 0.0 && n.max_alpha_dz <= 1.0,
            "numerics.max_alpha_dz",
            "must be in (0, 1]",
        )?;
        let l = &self.lamp;
        check(l.cathode_cm > 0.0, "lamp.cathode_cm", "must be > 0")?;
        check(l.anode_gap_cm > 0.0, "lamp.anode_gap_cm", "must be > 0")?;
        check(
            l.total_cm > l.cathode_cm + 2.0 * l.anode_gap_cm,
            "lamp.total_cm",
            "must exceed lamp.cathode_cm + 2 * lamp.anode_gap_cm",
        )?;
        check(
            l.input_intensity_mw_cm2 > 0.0,
            "lamp.input_intensity_mw_cm2",
            "must be > 0",
        )?;
        check(l.density_multiplier >= 0.0, "lamp.density_multiplier", "must be >= 0")?;
        check(
            (0.0..=1.0).contains(&l.fluorescence_cathode_fraction),
            "lamp.fluorescence_cathode_fraction",
            "must be in [0, 1]",
        )
    }

    pub fn atom_model(&self) -> AtomModel {
        let a = &self.atom;
        AtomModel {
            lambda_p: a.lambda_p_nm / 1e9,
            lambda_c: a.lambda_c_nm / 1e9,
            gamma1: two_pi(a.gamma1_mhz * 1e6),
            gamma2: two_pi(a.gamma2_mhz * 1e6),
            gamma3: two_pi(a.gamma3_mhz * 1e6),
            mass: a.mass_amu * ATOMIC_MASS_UNIT,
        }
    }

    fn rabi(&self, input: RabiInput, transition: Transition) -> crate::Result<f64> {
        let atom = self.atom_model();
        match input {
            RabiInput::Gamma1(x) => Ok(x * atom.gamma1),
            // 1 mW/cm² = 10 W/m²
            RabiInput::IntensityMwCm2(x) => {
                rabi_from_intensity(10.0 * x, transition, &atom, self.drive.rabi_mode)
            }
        }
    }

    pub fn drive_field(&self) -> crate::Result<DriveField> {
        Ok(DriveField {
            delta_p: two_pi(self.drive.delta_p_mhz * 1e6),
            delta_c: two_pi(self.drive.delta_c_mhz * 1e6),
            omega_p: self.rabi(self.drive.probe, Transition::Probe)?,
            omega_c: self.rabi(self.drive.coupling, Transition::Coupling)?,
            geometry: self.drive.geometry,
        })
    }

    pub fn environment(&self) -> Environment {
        let e = &self.environment;
        Environment {
            temperature: e.temperature_k,
            density: e.density_cm3 * 1e6,
            transit_rate: two_pi(e.transit_khz * 1e3),
            pump_rate: two_pi(e.pump_khz * 1e3),
            vcc_rate: two_pi(e.vcc_mhz * 1e6),
        }
    }

    /// Environment seen by the lamp, with the density multiplier applied.
    pub fn lamp_environment(&self) -> Environment {
        let env = self.environment();
        env.with_density(env.density * self.lamp.density_multiplier)
    }

    pub fn quadrature_rule(&self) -> QuadratureRule {
        match self.numerics.quadrature {
            Quadrature::Trapezoid => QuadratureRule::Trapezoid {
                half_span: self.numerics.velocity_span_u,
            },
            Quadrature::GaussHermite => QuadratureRule::GaussHermite,
        }
    }

    pub fn velocity_grid(&self) -> crate::Result<VelocityGrid> {
        VelocityGrid::with_rule(
            &self.atom_model(),
            &self.environment(),
            self.numerics.velocity_nodes,
            self.quadrature_rule(),
        )
    }

    pub fn scan_range(&self) -> ScanRange {
        ScanRange {
            min: two_pi(self.numerics.scan_min_ghz * 1e9),
            max: two_pi(self.numerics.scan_max_ghz * 1e9),
            points: self.numerics.scan_points,
        }
    }

    pub fn group_index_step(&self) -> f64 {
        self.numerics.group_index_step_gamma1 * self.atom_model().gamma1
    }

    pub fn sweep_rabi(&self) -> Vec<f64> {
        let g = self.atom_model().gamma1;
        self.numerics.sweep_omega_p_gamma1.iter().map(|x| x * g).collect()
    }

    pub fn lamp_geometry(&self) -> crate::Result<LampGeometry> {
        let l = &self.lamp;
        LampGeometry::symmetric(l.total_cm / 100.0, l.cathode_cm / 100.0, l.anode_gap_cm / 100.0, l.vapor)
    }

    /// Probe intensity entering the lamp (W/m²).
    pub fn input_intensity(&self) -> f64 {
        10.0 * self.lamp.input_intensity_mw_cm2
    }

    pub fn propagation_options(&self) -> PropagationOptions {
        PropagationOptions {
            rabi_mode: self.drive.rabi_mode,
            max_alpha_dz: self.numerics.max_alpha_dz,
            fluorescence_cathode_fraction: self.lamp.fluorescence_cathode_fraction,
            alpha: self.numerics.alpha_evaluation,
        }
    }

    /// Checks that every derived SI object is accepted by the solver.
    fn validate_derived(&self) -> Result<(), ConfigError> {
        let wrap = |e: crate::Error| ConfigError::Validation {
            key: "config",
            requirement: e.to_string(),
        };
        self.atom_model().validate().map_err(wrap)?;
        self.drive_field().and_then(|d| d.validate()).map_err(wrap)?;
        self.environment().validate().map_err(wrap)?;
        self.lamp_geometry().map_err(wrap)?;
        Ok(())
    }
}

fn split_line(raw: &str) -> Option<Result<(&str, &str), String>> {
    let text = raw.split('#').next().unwrap_or("").trim();
    if text.is_empty() {
        return None;
    }
    Some(match text.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() && !v.trim().is_empty() => Ok((k.trim(), v.trim())),
        _ => Err(format!("expected `section.key = value`, found `{text}`")),
    })
}

/// Parses and validates a configuration file.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    parse_config_with_overrides(text, &[])
}

/// Parses `text`, then applies `section.key=value` overrides in order.
pub fn parse_config_with_overrides(text: &str, overrides: &[String]) -> Result<RunConfig, ConfigError> {
    let mut config = RunConfig::default();
    let mut seen = std::collections::HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let parse = |message| ConfigError::Parse { line, message };
        let Some(kv) = split_line(raw) else { continue };
        let (k, v) = kv.map_err(parse)?;
        if !seen.insert(k.to_string()) {
            return Err(parse(format!("duplicate key `{k}`")));
        }
        config.set(k, v).map_err(parse)?;
    }
    for (i, raw) in overrides.iter().enumerate() {
        let index = i + 1;
        let over = |message| ConfigError::Override { index, message };
        let (k, v) = split_line(raw)
            .unwrap_or_else(|| Err("empty override".into()))
            .map_err(over)?;
        config.set(k, v).map_err(over)?;
    }
    config.validate()?;
    config.validate_derived()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(parse_config("").unwrap(), RunConfig::default());
        assert_eq!(parse_config("# nothing\n\n   \n").unwrap(), RunConfig::default());
    }

    #[test]
    fn single_override() {
        let c = parse_config("drive.geometry = copropagating\n").unwrap();
        let mut want = RunConfig::default();
        want.drive.geometry = Geometry::Copropagating;
        assert_eq!(c, want);
    }

    #[test]
    fn closed_system() {
        let c = parse_config("atom.gamma3_mhz = 0  # no leak\n").unwrap();
        assert_eq!(c.atom_model().gamma3, 0.0);
        assert_eq!(c.atom_model(), AtomModel::calcium().closed());
    }

    #[test]
    fn defaults_match_model_constructors() {
        let c = RunConfig::default();
        assert_eq!(c.atom_model(), AtomModel::calcium());
        assert_eq!(c.environment(), Environment::hollow_cathode());
        let d = c.drive_field().unwrap();
        let atom = AtomModel::calcium();
        assert_eq!(d, DriveField::resonant(&atom, 0.4, 1.1, Geometry::Counterpropagating));
        assert_eq!(c.scan_range(), ScanRange::default());
        assert_eq!(c.lamp_geometry().unwrap(), LampGeometry::default());
        // the lamp's input intensity is the calibrated 0.4 γ1 probe
        let om = rabi_from_intensity(c.input_intensity(), Transition::Probe, &atom, c.drive.rabi_mode);
        assert!((om.unwrap() - d.omega_p).abs() < 1e-9 * d.omega_p);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_config("# header\natom.gamma1_mhz = 34\natom.colour = red\n").unwrap_err();
        assert_eq!(err, ConfigError::Parse { line: 3, message: "unknown key `atom.colour`".into() });
        let err = parse_config("drive.geometry = sideways").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 1, .. }));
        let err = parse_config("numerics.scan_points\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 1, .. }));
        let err = parse_config("a.b = 1\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 1, .. }));
        let err = parse_config("atom.mass_amu = 1\natom.mass_amu = 2\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 2, .. }));
    }

    #[test]
    fn validation_names_key() {
        let err = parse_config("environment.temperature_k = -3").unwrap_err();
        assert!(matches!(err, ConfigError::Validation { key: "environment.temperature_k", .. }));
        let err = parse_config("numerics.scan_min_ghz = 3").unwrap_err();
        assert!(matches!(err, ConfigError::Validation { key: "numerics.scan_max_ghz", .. }));
        let err = parse_config("numerics.sweep_omega_p_gamma1 = 0.3, 0.2").unwrap_err();
        assert!(matches!(err, ConfigError::Validation { key: "numerics.sweep_omega_p_gamma1", .. }));
    }

    #[test]
    fn overrides_apply_after_file() {
        let c = parse_config_with_overrides(
            "drive.geometry = copropagating\n",
            &["drive.geometry=counterpropagating".into(), "environment.density_cm3 = 1e12".into()],
        )
        .unwrap();
        assert_eq!(c.drive.geometry, Geometry::Counterpropagating);
        assert_eq!(c.environment.density_cm3, 1e12);
        let err = parse_config_with_overrides("", &["nope".into()]).unwrap_err();
        assert!(matches!(err, ConfigError::Override { index: 1, .. }));
    }

    #[test]
    fn intensity_inputs() {
        let c = parse_config(
            "drive.probe_intensity_mw_cm2 = 180\ndrive.coupling_intensity_mw_cm2 = 707\n",
        )
        .unwrap();
        let d = c.drive_field().unwrap();
        let g = c.atom_model().gamma1;
        assert!((d.omega_p / g - 0.582).abs() < 1e-3);
        assert!((d.omega_c / g - 1.1).abs() < 1e-12);
    }

    #[test]
    fn default_round_trip() {
        let c = RunConfig::default();
        assert_eq!(parse_config(&c.serialize()).unwrap(), c);
    }
}
