//! Command execution and output files for the command-line driver.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::config::{ConfigError, RunConfig};
use crate::error::Error;
use crate::lamp::{channel_spectra, propagate};
use crate::metrics::dip_metrics;
use crate::model::{two_pi, Geometry};
use crate::spectrum::{dispersion_slope, group_index_from_slope, saturation_sweep, scan_probe, Stencil};
use crate::susceptibility::doppler_average;
use crate::units::{doppler_fwhm, residual_doppler_width};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Spectrum,
    Dip,
    Sweep,
    GroupIndex,
    Residual,
    Propagate,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Spectrum,
        Command::Dip,
        Command::Sweep,
        Command::GroupIndex,
        Command::Residual,
        Command::Propagate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Dip => "dip",
            Command::Sweep => "sweep",
            Command::GroupIndex => "groupindex",
            Command::Residual => "residual",
            Command::Propagate => "propagate",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("solver error: {0}")]
    Solver(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Solver(_) => 3,
            RunError::Io(_) => 4,
        }
    }
}

/// CSV text plus a JSON summary of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub csv: String,
    pub summary: Value,
}

/// SI quantities the configuration resolves to.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivedQuantities {
    pub omega_p_rad_s: f64,
    pub omega_c_rad_s: f64,
    pub omega_p_gamma1: f64,
    pub omega_c_gamma1: f64,
    pub density_m3: f64,
    pub most_probable_speed_m_s: f64,
    pub doppler_fwhm_mhz: f64,
    pub lamp_input_intensity_w_m2: f64,
    pub velocity_nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub software: String,
    pub version: String,
    pub command: Command,
    pub config: RunConfig,
    pub config_text: String,
    pub derived: DerivedQuantities,
    pub wall_clock_seconds: f64,
    pub outputs: Value,
    pub csv_file: String,
}

fn mhz(omega: f64) -> f64 {
    omega / two_pi(1e6)
}

/// 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn row(s: &mut String, cells: &[String]) {
    s.push_str(&cells.join(","));
    s.push('\n');
}

pub fn derived_quantities(config: &RunConfig) -> crate::Result<DerivedQuantities> {
    let atom = config.atom_model();
    let env = config.environment();
    let drive = config.drive_field()?;
    Ok(DerivedQuantities {
        omega_p_rad_s: drive.omega_p,
        omega_c_rad_s: drive.omega_c,
        omega_p_gamma1: drive.omega_p / atom.gamma1,
        omega_c_gamma1: drive.omega_c / atom.gamma1,
        density_m3: env.density,
        most_probable_speed_m_s: env.most_probable_speed(&atom),
        doppler_fwhm_mhz: mhz(doppler_fwhm(&atom, &env)),
        lamp_input_intensity_w_m2: config.input_intensity(),
        velocity_nodes: config.numerics.velocity_nodes,
    })
}

/// Runs `command` without touching the filesystem.
pub fn execute(command: Command, config: &RunConfig) -> crate::Result<CommandOutput> {
    let atom = config.atom_model();
    let env = config.environment();
    let drive = config.drive_field()?;
    let mut csv = String::new();

    let summary = match command {
        Command::Spectrum | Command::Dip => {
            let grid = config.velocity_grid()?;
            let range = config.scan_range();
            let cpl = scan_probe(&atom, &drive, &env, &grid, &range)?;
            let reference = scan_probe(&atom, &drive.without_coupling(), &env, &grid, &range)?;
            let metrics = match dip_metrics(&cpl, &reference) {
                Ok(m) => Some(m),
                Err(Error::NoDip) => None,
                Err(e) => return Err(e),
            };
            if command == Command::Spectrum {
                row(
                    &mut csv,
                    &[
                        "detuning_mhz".into(),
                        "im_chi_dimensionless".into(),
                        "re_chi_dimensionless".into(),
                        "im_chi_reference_dimensionless".into(),
                    ],
                );
                for ((d, c), r) in cpl.detunings().iter().zip(cpl.chi()).zip(reference.chi()) {
                    row(&mut csv, &[num(mhz(*d)), num(c.im), num(c.re), num(r.im)]);
                }
            } else {
                row(
                    &mut csv,
                    &["contrast_dimensionless".into(), "fwhm_mhz".into(), "center_mhz".into()],
                );
                match metrics {
                    Some(m) => row(&mut csv, &[num(m.contrast), num(mhz(m.fwhm)), num(mhz(m.center))]),
                    None => row(&mut csv, &[num(0.0), String::new(), String::new()]),
                }
            }
            json!({
                "points": cpl.len(),
                "dip_found": metrics.is_some(),
                "contrast": metrics.map_or(0.0, |m| m.contrast),
                "fwhm_mhz": metrics.map(|m| mhz(m.fwhm)),
                "center_mhz": metrics.map(|m| mhz(m.center)),
                "fwhm_clamped_to_scan": metrics.map(|m| m.clamped),
            })
        }
        Command::Sweep => {
            let grid = config.velocity_grid()?;
            let pts = saturation_sweep(&atom, &drive, &env, &grid, &config.scan_range(), &config.sweep_rabi())?;
            row(
                &mut csv,
                &["omega_p_gamma1".into(), "contrast_dimensionless".into(), "fwhm_mhz".into()],
            );
            for p in &pts {
                row(
                    &mut csv,
                    &[
                        num(p.omega_p / atom.gamma1),
                        num(p.contrast),
                        p.fwhm.map(|w| num(mhz(w))).unwrap_or_default(),
                    ],
                );
            }
            json!({ "contrast": pts.iter().map(|p| p.contrast).collect::<Vec<_>>() })
        }
        Command::GroupIndex => {
            let grid = config.velocity_grid()?;
            let at = drive.delta_p;
            let step = config.group_index_step();
            let centre = doppler_average(&atom, &drive, &env, &grid)?;
            let slope = dispersion_slope(&atom, &drive, &env, &grid, at, step, Stencil::ThreePoint)?;
            let ng = group_index_from_slope(centre.re, slope, atom.omega_p0());
            row(
                &mut csv,
                &[
                    "detuning_mhz".into(),
                    "re_chi_dimensionless".into(),
                    "im_chi_dimensionless".into(),
                    "dre_chi_ddetuning_per_mhz".into(),
                    "group_index_dimensionless".into(),
                ],
            );
            // slope per rad/s → per MHz of ordinary frequency
            let per_mhz = slope * two_pi(1e6);
            row(&mut csv, &[num(mhz(at)), num(centre.re), num(centre.im), num(per_mhz), num(ng)]);
            json!({ "group_index": ng, "geometry": drive.geometry.name() })
        }
        Command::Residual => {
            let counter = residual_doppler_width(&atom, &env, Geometry::Counterpropagating);
            let co = residual_doppler_width(&atom, &env, Geometry::Copropagating);
            let fwhm = doppler_fwhm(&atom, &env);
            row(
                &mut csv,
                &[
                    "temperature_k".into(),
                    "counterpropagating_width_mhz".into(),
                    "copropagating_width_mhz".into(),
                    "doppler_fwhm_mhz".into(),
                ],
            );
            row(&mut csv, &[num(env.temperature), num(mhz(counter)), num(mhz(co)), num(mhz(fwhm))]);
            json!({
                "counterpropagating_width_mhz": mhz(counter),
                "copropagating_width_mhz": mhz(co),
                "counterpropagating_width_gamma1": counter / atom.gamma1,
            })
        }
        Command::Propagate => {
            let lamp_env = config.lamp_environment();
            let grid = config.velocity_grid()?;
            let lamp = config.lamp_geometry()?;
            let opts = config.propagation_options();
            let range = config.scan_range();
            let i_in = config.input_intensity();
            let traces = propagate(&lamp, &atom, &drive, &lamp_env, &grid, i_in, &range, &opts)?;
            let reference = if config.lamp.with_reference && drive.omega_c > 0.0 {
                Some(propagate(&lamp, &atom, &drive.without_coupling(), &lamp_env, &grid, i_in, &range, &opts)?)
            } else {
                None
            };
            let mut header: Vec<String> = [
                "detuning_mhz",
                "transmission_ratio",
                "fluorescence_absorbed_w_m2",
                "optogalvanic_absorbed_w_m2",
            ]
            .map(String::from)
            .to_vec();
            if reference.is_some() {
                header.extend(
                    [
                        "transmission_reference_ratio",
                        "fluorescence_reference_absorbed_w_m2",
                        "optogalvanic_reference_absorbed_w_m2",
                    ]
                    .map(String::from),
                );
            }
            row(&mut csv, &header);
            for (i, (d, s)) in traces.detunings.iter().zip(&traces.samples).enumerate() {
                let mut cells = vec![num(mhz(*d)), num(s.transmission), num(s.fluorescence), num(s.optogalvanic)];
                if let Some(r) = &reference {
                    let q = &r.samples[i];
                    cells.extend([num(q.transmission), num(q.fluorescence), num(q.optogalvanic)]);
                }
                row(&mut csv, &cells);
            }
            let channels = match &reference {
                Some(r) => Some(channel_spectra(&traces, r)?),
                None => None,
            };
            let width = |m: Option<crate::metrics::DipMetrics>| m.map(|m| mhz(m.fwhm));
            json!({
                "points": traces.samples.len(),
                "lamp_density_m3": lamp_env.density,
                "channels": channels.map(|c| json!({
                    "transmission_contrast": c.transmission.map(|m| m.contrast),
                    "transmission_fwhm_mhz": width(c.transmission),
                    "fluorescence_contrast": c.fluorescence.map(|m| m.contrast),
                    "fluorescence_fwhm_mhz": width(c.fluorescence),
                    "optogalvanic_contrast": c.optogalvanic.map(|m| m.contrast),
                    "optogalvanic_fwhm_mhz": width(c.optogalvanic),
                })),
            })
        }
    };
    Ok(CommandOutput { csv, summary })
}

fn with_extension(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

/// Runs `command` and writes `<prefix>.csv` and `<prefix>.json`.
pub fn run_command(command: Command, config: &RunConfig, out_prefix: &Path) -> Result<RunRecord, RunError> {
    let start = Instant::now();
    let derived = derived_quantities(config)?;
    let output = execute(command, config)?;
    let csv_path = with_extension(out_prefix, "csv");
    std::fs::write(&csv_path, &output.csv)?;
    let record = RunRecord {
        software: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command,
        config: config.clone(),
        config_text: config.serialize(),
        derived,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        outputs: output.summary,
        csv_file: csv_path.display().to_string(),
    };
    let mut text = serde_json::to_string_pretty(&record).map_err(std::io::Error::other)?;
    text.push('\n');
    std::fs::write(with_extension(out_prefix, "json"), text)?;
    Ok(record)
}

/// Renders an error and its exit code for the terminal.
pub fn describe(err: &RunError) -> String {
    let mut s = String::new();
    let class = match err {
        RunError::Config(_) => "config",
        RunError::Solver(_) => "solver",
        RunError::Io(_) => "io",
    };
    let _ = write!(s, "error[{class}]: {err}");
    s
}
