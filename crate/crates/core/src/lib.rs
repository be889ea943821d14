//! Steady-state EIT/CPT simulator for a Doppler-broadened open ladder
//! (ground → intermediate → upper, with a dark reservoir level fed from the
//! upper state), plus propagation of a lamp's probe light through the
//! vapor it produces.

// Index loops read closer to the matrix algebra; `!(x > y)` rejects NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod density;
pub mod error;
pub mod lamp;
mod linalg;
pub mod liouvillian;
pub mod metrics;
pub mod model;
pub mod run;
pub mod spectrum;
pub mod steady;
pub mod susceptibility;
pub mod units;
pub mod velocity;

pub use num_complex::Complex64 as C64;

pub use config::{parse_config, parse_config_with_overrides, ConfigError, RunConfig};
pub use density::{DensityState, Matrix4};
pub use error::{Error, Result};
pub use lamp::{
    absorption_coefficient, channel_spectra, propagate, propagate_with, AlphaEvaluation,
    ChannelMetrics, ChannelSample, LampGeometry, PropagationOptions, Segment, SegmentRole,
    SignalTraces, VaporMap,
};
pub use liouvillian::{build_liouvillian, Liouvillian, LiouvillianContext, Superop};
pub use metrics::{dip_metrics, dip_metrics_profiles, DipMetrics};
pub use model::{two_pi, AtomModel, DriveField, Environment, Geometry};
pub use spectrum::{
    dispersion_slope, group_index, group_index_from_slope, saturation_sweep, scan_probe, ScanRange,
    Spectrum, SpectrumParams, Stencil, SweepPoint,
};
pub use steady::{condition_estimate, steady_state};
pub use susceptibility::{
    doppler_average, linear_susceptibility, node_steady_states, susceptibility_single,
    vcc_steady_state,
};
pub use units::{
    doppler_fwhm, intensity_from_rabi, rabi_from_intensity, residual_doppler_width,
    saturation_intensity, RabiCalibration, Transition,
};
pub use velocity::{make_velocity_grid, QuadratureRule, VelocityGrid, DEFAULT_VELOCITY_NODES};
