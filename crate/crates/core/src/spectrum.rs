//! Probe-detuning scans and quantities derived from them.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{require, Error, Result};
use crate::metrics::dip_metrics;
use crate::model::{two_pi, AtomModel, DriveField, Environment};
use crate::susceptibility::{check_inputs, doppler_average};
use crate::velocity::VelocityGrid;

/// Uniform probe-detuning grid (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRange {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Default for ScanRange {
    /// ±2π×2.5 GHz in 501 points (2π×10 MHz spacing).
    fn default() -> Self {
        Self::symmetric(two_pi(2.5e9), 501)
    }
}

impl ScanRange {
    pub fn symmetric(half_width: f64, points: usize) -> Self {
        Self {
            min: -half_width,
            max: half_width,
            points,
        }
    }

    pub fn validate(&self) -> Result<()> {
        require(self.min.is_finite(), "scan min", self.min, "must be finite")?;
        require(
            self.max.is_finite() && self.max > self.min,
            "scan max",
            self.max,
            "must be finite and above the scan minimum",
        )?;
        require(self.points >= 3, "scan points", self.points as f64, "must be >= 3")
    }

    /// Grid points, built outward from the midpoint so that a range
    /// symmetric about zero gives exactly mirrored detunings.
    pub fn detunings(&self) -> Vec<f64> {
        let mid = 0.5 * (self.min + self.max);
        let half = 0.5 * (self.max - self.min);
        let denom = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| mid + half * ((2 * i) as f64 - denom) / denom)
            .collect()
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.points - 1) as f64
    }
}

/// Parameters a spectrum was computed with. The probe detuning of `drive`
/// is zeroed since it is the scan variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumParams {
    pub atom: AtomModel,
    pub drive: DriveField,
    pub env: Environment,
    pub velocity_nodes: usize,
}

/// Thermally averaged probe susceptibility versus probe detuning.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    detunings: Vec<f64>,
    chi: Vec<C64>,
    params: SpectrumParams,
}

impl Spectrum {
    pub fn new(detunings: Vec<f64>, chi: Vec<C64>, params: SpectrumParams) -> Result<Self> {
        if detunings.len() != chi.len() {
            return Err(Error::InvalidInput(format!(
                "{} detunings but {} susceptibility values",
                detunings.len(),
                chi.len()
            )));
        }
        if detunings.windows(2).any(|w| !(w[0] < w[1])) || detunings.iter().any(|d| !d.is_finite()) {
            return Err(Error::InvalidInput("detunings must be finite and strictly increasing".into()));
        }
        if chi.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("susceptibility must be finite".into()));
        }
        Ok(Self {
            detunings,
            chi,
            params,
        })
    }

    pub fn detunings(&self) -> &[f64] {
        &self.detunings
    }

    pub fn chi(&self) -> &[C64] {
        &self.chi
    }

    pub fn params(&self) -> &SpectrumParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.chi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chi.is_empty()
    }

    /// Absorptive part Im χ̄ per detuning.
    pub fn absorption(&self) -> Vec<f64> {
        self.chi.iter().map(|z| z.im).collect()
    }

    /// Dispersive part Re χ̄ per detuning.
    pub fn dispersion(&self) -> Vec<f64> {
        self.chi.iter().map(|z| z.re).collect()
    }
}

/// χ̄ at every detuning of `range`. Points run in parallel; results are
/// placed by index so the output does not depend on scheduling.
pub fn scan_probe(
    atom: &AtomModel,
    drive: &DriveField,
    env: &Environment,
    grid: &VelocityGrid,
    range: &ScanRange,
) -> Result<Spectrum> {
    check_inputs(atom, drive, env, grid)?;
    range.validate()?;
    let detunings = range.detunings();
    let results: Vec<Result<C64>> = detunings
        .par_iter()
        .map(|&d| doppler_average(atom, &drive.with_probe_detuning(d), env, grid))
        .collect();
    let mut chi = Vec::with_capacity(results.len());
    for (i, r) in results.into_iter().enumerate() {
        chi.push(r.map_err(|e| e.at_detuning(i))?);
    }
    let params = SpectrumParams {
        atom: *atom,
        drive: drive.with_probe_detuning(0.0),
        env: *env,
        velocity_nodes: grid.len(),
    };
    Spectrum::new(detunings, chi, params)
}

/// Finite-difference rule for ∂Re χ̄/∂δ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stencil {
    ThreePoint,
    FivePoint,
}

/// ∂Re χ̄/∂δ_p at `at` (s/rad).
pub fn dispersion_slope(
    atom: &AtomModel,
    drive: &DriveField,
    env: &Environment,
    grid: &VelocityGrid,
    at: f64,
    step: f64,
    stencil: Stencil,
) -> Result<f64> {
    require(step > 0.0 && step.is_finite(), "step", step, "must be finite and > 0")?;
    let re = |d: f64| doppler_average(atom, &drive.with_probe_detuning(d), env, grid).map(|z| z.re);
    Ok(match stencil {
        Stencil::ThreePoint => (re(at + step)? - re(at - step)?) / (2.0 * step),
        Stencil::FivePoint => {
            (8.0 * (re(at + step)? - re(at - step)?) - (re(at + 2.0 * step)? - re(at - 2.0 * step)?))
                / (12.0 * step)
        }
    })
}

/// n_g = 1 + Re χ̄/2 + (ω_p0/2)·∂Re χ̄/∂δ from a centre value and a slope.
pub fn group_index_from_slope(re_chi: f64, slope: f64, omega_p0: f64) -> f64 {
    1.0 + 0.5 * re_chi + 0.5 * omega_p0 * slope
}

/// Group index of the probe at detuning `at`, with a central-difference
/// derivative of half-width `step`.
pub fn group_index(
    atom: &AtomModel,
    drive: &DriveField,
    env: &Environment,
    grid: &VelocityGrid,
    at: f64,
    step: f64,
) -> Result<f64> {
    check_inputs(atom, drive, env, grid)?;
    let centre = doppler_average(atom, &drive.with_probe_detuning(at), env, grid)?;
    let slope = dispersion_slope(atom, drive, env, grid, at, step, Stencil::ThreePoint)?;
    Ok(group_index_from_slope(centre.re, slope, atom.omega_p0()))
}

/// Default derivative half-width, 0.01·γ1.
pub fn default_group_index_step(atom: &AtomModel) -> f64 {
    0.01 * atom.gamma1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    /// Probe Rabi frequency (rad/s).
    pub omega_p: f64,
    /// Zero when no dip is found.
    pub contrast: f64,
    pub fwhm: Option<f64>,
}

/// Dip contrast for each probe Rabi frequency, with the coupling-free
/// reference recomputed at every Ω_p.
pub fn saturation_sweep(
    atom: &AtomModel,
    drive: &DriveField,
    env: &Environment,
    grid: &VelocityGrid,
    range: &ScanRange,
    probe_rabi: &[f64],
) -> Result<Vec<SweepPoint>> {
    if probe_rabi.is_empty() {
        return Err(Error::InvalidInput("probe Rabi list is empty".into()));
    }
    if probe_rabi.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidInput("probe Rabi list must be ascending".into()));
    }
    probe_rabi
        .iter()
        .map(|&omega_p| {
            let d = drive.with_probe_rabi(omega_p);
            let cpl = scan_probe(atom, &d, env, grid, range)?;
            let reference = scan_probe(atom, &d.without_coupling(), env, grid, range)?;
            match dip_metrics(&cpl, &reference) {
                Ok(m) => Ok(SweepPoint {
                    omega_p,
                    contrast: m.contrast,
                    fwhm: Some(m.fwhm),
                }),
                Err(Error::NoDip) => Ok(SweepPoint {
                    omega_p,
                    contrast: 0.0,
                    fwhm: None,
                }),
                Err(e) => Err(e),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Geometry;

    fn small_grid(atom: &AtomModel, env: &Environment) -> VelocityGrid {
        VelocityGrid::with_rule(atom, env, 64, Default::default()).unwrap()
    }

    #[test]
    fn symmetric_range_is_mirrored() {
        let r = ScanRange::default();
        let d = r.detunings();
        assert_eq!(d.len(), 501);
        assert_eq!(d[250], 0.0);
        for i in 0..d.len() {
            assert_eq!(d[i], -d[d.len() - 1 - i]);
        }
        assert!((r.step() - two_pi(10e6)).abs() < 1e-6);
    }

    #[test]
    fn range_validation() {
        assert!(ScanRange { min: 1.0, max: 0.0, points: 5 }.validate().is_err());
        assert!(ScanRange { min: 0.0, max: 1.0, points: 2 }.validate().is_err());
    }

    #[test]
    fn spectrum_rejects_unsorted() {
        let atom = AtomModel::calcium();
        let params = SpectrumParams {
            atom,
            drive: DriveField::resonant(&atom, 0.1, 0.0, Geometry::Copropagating),
            env: Environment::hollow_cathode(),
            velocity_nodes: 1,
        };
        let z = C64::new(0.0, 0.0);
        assert!(Spectrum::new(vec![0.0, 0.0], vec![z, z], params).is_err());
        assert!(Spectrum::new(vec![0.0, 1.0], vec![z], params).is_err());
        assert!(Spectrum::new(vec![0.0, 1.0], vec![z, C64::new(f64::NAN, 0.0)], params).is_err());
    }

    #[test]
    fn probe_only_scan_is_single_even_peak() {
        let atom = AtomModel::calcium();
        let env = Environment::hollow_cathode();
        let drive = DriveField::resonant(&atom, 0.05, 0.0, Geometry::Counterpropagating);
        let grid = VelocityGrid::with_rule(&atom, &env, 1024, Default::default()).unwrap();
        let s = scan_probe(&atom, &drive, &env, &grid, &ScanRange::symmetric(two_pi(2.5e9), 41)).unwrap();
        let im = s.absorption();
        let peak = im.iter().cloned().fold(f64::MIN, f64::max);
        assert_eq!(im[20], peak);
        for i in 0..20 {
            assert!(im[i] < im[i + 1]);
            assert!((im[i] - im[40 - i]).abs() <= 1e-9 * peak);
        }
    }

    #[test]
    fn scan_errors_carry_detuning_index() {
        let atom = AtomModel::calcium();
        let env = Environment {
            transit_rate: 0.0,
            ..Environment::hollow_cathode()
        };
        let drive = DriveField::resonant(&atom, 0.0, 0.0, Geometry::Counterpropagating);
        let grid = VelocityGrid::at_rest(600.0);
        let err = scan_probe(&atom, &drive, &env, &grid, &ScanRange::symmetric(1e9, 3)).unwrap_err();
        assert!(matches!(err, Error::AtDetuning { index: 0, .. }), "{err:?}");
    }

    #[test]
    fn vacuum_group_index_is_one() {
        assert_eq!(group_index_from_slope(0.0, 0.0, 4.45e15), 1.0);
        let atom = AtomModel::calcium();
        let env = Environment::hollow_cathode().with_density(0.0);
        let drive = DriveField::resonant(&atom, 0.4, 1.1, Geometry::Counterpropagating);
        let grid = small_grid(&atom, &env);
        let ng = group_index(&atom, &drive, &env, &grid, 0.0, default_group_index_step(&atom));
        assert_eq!(ng.unwrap(), 1.0);
    }

    #[test]
    fn no_coupling_sweep_has_zero_contrast() {
        let atom = AtomModel::calcium();
        let env = Environment::hollow_cathode();
        let drive = DriveField::resonant(&atom, 0.4, 0.0, Geometry::Counterpropagating);
        let grid = small_grid(&atom, &env);
        let range = ScanRange::symmetric(two_pi(2.5e9), 51);
        let pts = saturation_sweep(&atom, &drive, &env, &grid, &range, &[0.1 * atom.gamma1, 0.3 * atom.gamma1]).unwrap();
        assert!(pts.iter().all(|p| p.contrast == 0.0 && p.fwhm.is_none()));
        assert!(saturation_sweep(&atom, &drive, &env, &grid, &range, &[]).is_err());
        assert!(saturation_sweep(&atom, &drive, &env, &grid, &range, &[2.0, 1.0]).is_err());
    }
}
