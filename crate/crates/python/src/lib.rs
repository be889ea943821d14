//! Python bindings for the `cascade_eit` simulator.
//!
//! Rates and detunings are angular frequencies in rad/s and densities are in
//! m⁻³, as in the Rust API.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use ::cascade_eit as core;
use ::cascade_eit::{
    AtomModel, DriveField, Environment, Error, Geometry, QuadratureRule, RabiCalibration, ScanRange,
    Transition, VaporMap, VelocityGrid,
};

create_exception!(cascade_eit, SolverError, PyException);
create_exception!(cascade_eit, ConfigError, PyException);

fn to_py(err: Error) -> PyErr {
    match err.root_cause() {
        Error::InvalidParameter { .. } | Error::InvalidInput(_) => PyValueError::new_err(err.to_string()),
        _ => SolverError::new_err(err.to_string()),
    }
}

fn geometry(name: &str) -> PyResult<Geometry> {
    match name {
        "copropagating" | "co" => Ok(Geometry::Copropagating),
        "counterpropagating" | "counter" => Ok(Geometry::Counterpropagating),
        _ => Err(PyValueError::new_err(format!("unknown geometry `{name}`"))),
    }
}

fn transition(name: &str) -> PyResult<Transition> {
    match name {
        "probe" => Ok(Transition::Probe),
        "coupling" => Ok(Transition::Coupling),
        _ => Err(PyValueError::new_err(format!("unknown transition `{name}`"))),
    }
}

fn rabi_mode(name: &str) -> PyResult<RabiCalibration> {
    match name {
        "standard" => Ok(RabiCalibration::Standard),
        "calibrated" => Ok(RabiCalibration::Calibrated),
        _ => Err(PyValueError::new_err(format!("unknown Rabi calibration `{name}`"))),
    }
}

#[pyclass(name = "AtomModel", module = "cascade_eit", frozen)]
struct PyAtom(AtomModel);

#[pymethods]
impl PyAtom {
    /// Calcium 423/586 nm cascade unless overridden.
    #[new]
    #[pyo3(signature = (lambda_p=None, lambda_c=None, gamma1=None, gamma2=None, gamma3=None, mass=None))]
    fn new(
        lambda_p: Option<f64>,
        lambda_c: Option<f64>,
        gamma1: Option<f64>,
        gamma2: Option<f64>,
        gamma3: Option<f64>,
        mass: Option<f64>,
    ) -> PyResult<Self> {
        let ca = AtomModel::calcium();
        let atom = AtomModel {
            lambda_p: lambda_p.unwrap_or(ca.lambda_p),
            lambda_c: lambda_c.unwrap_or(ca.lambda_c),
            gamma1: gamma1.unwrap_or(ca.gamma1),
            gamma2: gamma2.unwrap_or(ca.gamma2),
            gamma3: gamma3.unwrap_or(ca.gamma3),
            mass: mass.unwrap_or(ca.mass),
        };
        atom.validate().map_err(to_py)?;
        Ok(Self(atom))
    }

    /// The same atom without the leak to the reservoir.
    fn closed(&self) -> Self {
        Self(self.0.closed())
    }

    #[getter]
    fn lambda_p(&self) -> f64 {
        self.0.lambda_p
    }
    #[getter]
    fn lambda_c(&self) -> f64 {
        self.0.lambda_c
    }
    #[getter]
    fn gamma1(&self) -> f64 {
        self.0.gamma1
    }
    #[getter]
    fn gamma2(&self) -> f64 {
        self.0.gamma2
    }
    #[getter]
    fn gamma3(&self) -> f64 {
        self.0.gamma3
    }
    #[getter]
    fn mass(&self) -> f64 {
        self.0.mass
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.0)
    }
}

#[pyclass(name = "DriveField", module = "cascade_eit", frozen)]
struct PyDrive(DriveField);

#[pymethods]
impl PyDrive {
    #[new]
    #[pyo3(signature = (omega_p, omega_c, geometry="counterpropagating", delta_p=0.0, delta_c=0.0))]
    fn new(omega_p: f64, omega_c: f64, geometry: &str, delta_p: f64, delta_c: f64) -> PyResult<Self> {
        let drive = DriveField {
            delta_p,
            delta_c,
            omega_p,
            omega_c,
            geometry: self::geometry(geometry)?,
        };
        drive.validate().map_err(to_py)?;
        Ok(Self(drive))
    }

    /// Resonant drive with Rabi frequencies in units of the atom's γ1.
    #[staticmethod]
    #[pyo3(signature = (atom, omega_p_gamma1, omega_c_gamma1, geometry="counterpropagating"))]
    fn resonant(atom: PyRef<'_, PyAtom>, omega_p_gamma1: f64, omega_c_gamma1: f64, geometry: &str) -> PyResult<Self> {
        let drive = DriveField::resonant(&atom.0, omega_p_gamma1, omega_c_gamma1, self::geometry(geometry)?);
        drive.validate().map_err(to_py)?;
        Ok(Self(drive))
    }

    fn with_probe_detuning(&self, delta_p: f64) -> Self {
        Self(self.0.with_probe_detuning(delta_p))
    }

    fn with_probe_rabi(&self, omega_p: f64) -> Self {
        Self(self.0.with_probe_rabi(omega_p))
    }

    fn without_coupling(&self) -> Self {
        Self(self.0.without_coupling())
    }

    #[getter]
    fn delta_p(&self) -> f64 {
        self.0.delta_p
    }
    #[getter]
    fn delta_c(&self) -> f64 {
        self.0.delta_c
    }
    #[getter]
    fn omega_p(&self) -> f64 {
        self.0.omega_p
    }
    #[getter]
    fn omega_c(&self) -> f64 {
        self.0.omega_c
    }
    #[getter]
    fn geometry(&self) -> &'static str {
        self.0.geometry.name()
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.0)
    }
}

#[pyclass(name = "Environment", module = "cascade_eit", frozen)]
struct PyEnvironment(Environment);

#[pymethods]
impl PyEnvironment {
    /// Hollow-cathode defaults (1000 K, 1e16 m⁻³, 2π×34 kHz transit) unless overridden.
    #[new]
    #[pyo3(signature = (temperature=None, density=None, transit_rate=None, pump_rate=None, vcc_rate=None))]
    fn new(
        temperature: Option<f64>,
        density: Option<f64>,
        transit_rate: Option<f64>,
        pump_rate: Option<f64>,
        vcc_rate: Option<f64>,
    ) -> PyResult<Self> {
        let d = Environment::hollow_cathode();
        let env = Environment {
            temperature: temperature.unwrap_or(d.temperature),
            density: density.unwrap_or(d.density),
            transit_rate: transit_rate.unwrap_or(d.transit_rate),
            pump_rate: pump_rate.unwrap_or(d.pump_rate),
            vcc_rate: vcc_rate.unwrap_or(d.vcc_rate),
        };
        env.validate().map_err(to_py)?;
        Ok(Self(env))
    }

    fn with_density(&self, density: f64) -> Self {
        Self(self.0.with_density(density))
    }

    #[getter]
    fn temperature(&self) -> f64 {
        self.0.temperature
    }
    #[getter]
    fn density(&self) -> f64 {
        self.0.density
    }
    #[getter]
    fn transit_rate(&self) -> f64 {
        self.0.transit_rate
    }
    #[getter]
    fn pump_rate(&self) -> f64 {
        self.0.pump_rate
    }
    #[getter]
    fn vcc_rate(&self) -> f64 {
        self.0.vcc_rate
    }

    fn most_probable_speed(&self, atom: PyRef<'_, PyAtom>) -> f64 {
        self.0.most_probable_speed(&atom.0)
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.0)
    }
}

#[pyclass(name = "VelocityGrid", module = "cascade_eit", frozen)]
struct PyGrid(VelocityGrid);

#[pymethods]
impl PyGrid {
    /// `rule` is "trapezoid" (uniform over ±half_span·u) or "gauss-hermite".
    #[new]
    #[pyo3(signature = (atom, env, nodes=core::DEFAULT_VELOCITY_NODES, rule="trapezoid", half_span=5.0))]
    fn new(
        atom: PyRef<'_, PyAtom>,
        env: PyRef<'_, PyEnvironment>,
        nodes: usize,
        rule: &str,
        half_span: f64,
    ) -> PyResult<Self> {
        let rule = match rule {
            "trapezoid" => QuadratureRule::Trapezoid { half_span },
            "gauss-hermite" => QuadratureRule::GaussHermite,
            _ => return Err(PyValueError::new_err(format!("unknown quadrature rule `{rule}`"))),
        };
        VelocityGrid::with_rule(&atom.0, &env.0, nodes, rule).map(Self).map_err(to_py)
    }

    #[getter]
    fn nodes(&self) -> Vec<f64> {
        self.0.nodes().to_vec()
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.0.weights().to_vec()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

/// Steady-state density matrix of one velocity class as a 4×4 nested list.
#[pyfunction]
#[pyo3(signature = (atom, drive, env, velocity=0.0))]
fn steady_state(
    atom: PyRef<'_, PyAtom>,
    drive: PyRef<'_, PyDrive>,
    env: PyRef<'_, PyEnvironment>,
    velocity: f64,
) -> PyResult<Vec<Vec<Complex64>>> {
    let l = core::build_liouvillian(&atom.0, &drive.0, &env.0, velocity).map_err(to_py)?;
    let rho = core::steady_state(&l).map_err(to_py)?;
    Ok(rho.matrix().iter().map(|r| r.to_vec()).collect())
}

/// Susceptibility of a single velocity class.
#[pyfunction]
#[pyo3(signature = (atom, drive, env, velocity=0.0))]
fn susceptibility(
    atom: PyRef<'_, PyAtom>,
    drive: PyRef<'_, PyDrive>,
    env: PyRef<'_, PyEnvironment>,
    velocity: f64,
) -> PyResult<Complex64> {
    if drive.0.omega_p == 0.0 {
        return core::linear_susceptibility(&atom.0, &drive.0, &env.0, velocity).map_err(to_py);
    }
    let l = core::build_liouvillian(&atom.0, &drive.0, &env.0, velocity).map_err(to_py)?;
    let rho = core::steady_state(&l).map_err(to_py)?;
    core::susceptibility_single(&rho, &atom.0, &drive.0, &env.0).map_err(to_py)
}

/// Thermally averaged susceptibility.
#[pyfunction]
fn doppler_average(
    py: Python<'_>,
    atom: PyRef<'_, PyAtom>,
    drive: PyRef<'_, PyDrive>,
    env: PyRef<'_, PyEnvironment>,
    grid: PyRef<'_, PyGrid>,
) -> PyResult<Complex64> {
    let (a, d, e, g) = (atom.0, drive.0, env.0, &grid.0);
    py.detach(|| core::doppler_average(&a, &d, &e, g)).map_err(to_py)
}

/// (detunings, chi) over a uniform probe-detuning grid.
#[pyfunction]
#[pyo3(signature = (atom, drive, env, grid, min, max, points=501))]
#[allow(clippy::too_many_arguments)]
fn scan_probe(
    py: Python<'_>,
    atom: PyRef<'_, PyAtom>,
    drive: PyRef<'_, PyDrive>,
    env: PyRef<'_, PyEnvironment>,
    grid: PyRef<'_, PyGrid>,
    min: f64,
    max: f64,
    points: usize,
) -> PyResult<(Vec<f64>, Vec<Complex64>)> {
    let (a, d, e, g) = (atom.0, drive.0, env.0, &grid.0);
    let range = ScanRange { min, max, points };
    let s = py.detach(|| core::scan_probe(&a, &d, &e, g, &range)).map_err(to_py)?;
    Ok((s.detunings().to_vec(), s.chi().to_vec()))
}

/// Dip (contrast, fwhm, center) from absorption profiles; None when there is no dip.
#[pyfunction]
fn dip_metrics(detunings: Vec<f64>, coupled: Vec<f64>, reference: Vec<f64>) -> PyResult<Option<(f64, f64, f64)>> {
    match core::dip_metrics_profiles(&detunings, &coupled, &reference) {
        Ok(m) => Ok(Some((m.contrast, m.fwhm, m.center))),
        Err(Error::NoDip) => Ok(None),
        Err(e) => Err(to_py(e)),
    }
}

#[pyfunction]
#[pyo3(signature = (atom, drive, env, grid, at=0.0, step=None))]
fn group_index(
    py: Python<'_>,
    atom: PyRef<'_, PyAtom>,
    drive: PyRef<'_, PyDrive>,
    env: PyRef<'_, PyEnvironment>,
    grid: PyRef<'_, PyGrid>,
    at: f64,
    step: Option<f64>,
) -> PyResult<f64> {
    let (a, d, e, g) = (atom.0, drive.0, env.0, &grid.0);
    let step = step.unwrap_or(0.01 * a.gamma1);
    py.detach(|| core::group_index(&a, &d, &e, g, at, step)).map_err(to_py)
}

#[pyfunction]
fn residual_doppler_width(atom: PyRef<'_, PyAtom>, env: PyRef<'_, PyEnvironment>, geometry: &str) -> PyResult<f64> {
    Ok(core::residual_doppler_width(&atom.0, &env.0, self::geometry(geometry)?))
}

#[pyfunction]
fn doppler_fwhm(atom: PyRef<'_, PyAtom>, env: PyRef<'_, PyEnvironment>) -> f64 {
    core::doppler_fwhm(&atom.0, &env.0)
}

/// Rabi frequency (rad/s) for an intensity in W/m².
#[pyfunction]
#[pyo3(signature = (intensity, transition, atom, mode="calibrated"))]
fn rabi_from_intensity(intensity: f64, transition: &str, atom: PyRef<'_, PyAtom>, mode: &str) -> PyResult<f64> {
    core::rabi_from_intensity(intensity, self::transition(transition)?, &atom.0, rabi_mode(mode)?).map_err(to_py)
}

/// Detunings, transmission, fluorescence and optogalvanic traces.
type Traces = (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>);

/// Default lamp propagation; returns detunings and the three channel traces.
#[pyfunction]
#[pyo3(signature = (atom, drive, env, grid, intensity, min, max, points=201, vapor="cathode"))]
#[allow(clippy::too_many_arguments)]
fn propagate(
    py: Python<'_>,
    atom: PyRef<'_, PyAtom>,
    drive: PyRef<'_, PyDrive>,
    env: PyRef<'_, PyEnvironment>,
    grid: PyRef<'_, PyGrid>,
    intensity: f64,
    min: f64,
    max: f64,
    points: usize,
    vapor: &str,
) -> PyResult<Traces> {
    let vapor = match vapor {
        "cathode" => VaporMap::Cathode,
        "inter-electrode" => VaporMap::InterElectrode,
        "full" => VaporMap::Full,
        _ => return Err(PyValueError::new_err(format!("unknown vapor map `{vapor}`"))),
    };
    let lamp = core::LampGeometry::default().with_vapor(vapor);
    let (a, d, e, g) = (atom.0, drive.0, env.0, &grid.0);
    let range = ScanRange { min, max, points };
    let t = py
        .detach(|| core::propagate(&lamp, &a, &d, &e, g, intensity, &range, &Default::default()))
        .map_err(to_py)?;
    Ok((t.detunings.clone(), t.transmission(), t.fluorescence(), t.optogalvanic()))
}

/// Runs a CLI command on configuration text and returns (csv, summary_json).
#[pyfunction]
#[pyo3(signature = (command, config_text="", overrides=Vec::new()))]
fn execute(py: Python<'_>, command: &str, config_text: &str, overrides: Vec<String>) -> PyResult<(String, String)> {
    let cmd = core::run::Command::from_name(command)
        .ok_or_else(|| PyValueError::new_err(format!("unknown command `{command}`")))?;
    let config = core::parse_config_with_overrides(config_text, &overrides)
        .map_err(|e| ConfigError::new_err(e.to_string()))?;
    let out = py.detach(|| core::run::execute(cmd, &config)).map_err(to_py)?;
    Ok((out.csv, out.summary.to_string()))
}

/// Canonical text of a configuration after defaults and validation.
#[pyfunction]
#[pyo3(signature = (text=""))]
fn normalize_config(text: &str) -> PyResult<String> {
    core::parse_config(text)
        .map(|c| c.serialize())
        .map_err(|e| ConfigError::new_err(e.to_string()))
}

#[pymodule]
#[pyo3(name = "cascade_eit")]
fn init_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("SolverError", m.py().get_type::<SolverError>())?;
    m.add("ConfigError", m.py().get_type::<ConfigError>())?;
    m.add_class::<PyAtom>()?;
    m.add_class::<PyDrive>()?;
    m.add_class::<PyEnvironment>()?;
    m.add_class::<PyGrid>()?;
    m.add_function(wrap_pyfunction!(steady_state, m)?)?;
    m.add_function(wrap_pyfunction!(susceptibility, m)?)?;
    m.add_function(wrap_pyfunction!(doppler_average, m)?)?;
    m.add_function(wrap_pyfunction!(scan_probe, m)?)?;
    m.add_function(wrap_pyfunction!(dip_metrics, m)?)?;
    m.add_function(wrap_pyfunction!(group_index, m)?)?;
    m.add_function(wrap_pyfunction!(residual_doppler_width, m)?)?;
    m.add_function(wrap_pyfunction!(doppler_fwhm, m)?)?;
    m.add_function(wrap_pyfunction!(rabi_from_intensity, m)?)?;
    m.add_function(wrap_pyfunction!(propagate, m)?)?;
    m.add_function(wrap_pyfunction!(execute, m)?)?;
    m.add_function(wrap_pyfunction!(normalize_config, m)?)?;
    Ok(())
}
