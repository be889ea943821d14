//! Transparency-dip contrast and width.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::Spectrum;

/// Fraction of the scan span, centred on its midpoint, searched for the dip.
pub const DIP_WINDOW_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipMetrics {
    /// Fractional absorption reduction at the dip centre.
    pub contrast: f64,
    /// Full width at half maximum of reference − coupled absorption (rad/s).
    pub fwhm: f64,
    /// Detuning of least coupled absorption inside the window (rad/s).
    pub center: f64,
    /// True when the half-maximum walk ran off the scan and was clamped.
    pub clamped: bool,
}

/// Dip of `with_coupling` against `reference`, both on the same grid.
pub fn dip_metrics(with_coupling: &Spectrum, reference: &Spectrum) -> Result<DipMetrics> {
    if with_coupling.detunings() != reference.detunings() {
        return Err(Error::InvalidInput("spectra are on different detuning grids".into()));
    }
    dip_metrics_profiles(
        with_coupling.detunings(),
        &with_coupling.absorption(),
        &reference.absorption(),
    )
}

/// Dip metrics from raw absorption profiles sharing `detunings`.
///
/// The centre is the lowest interior local minimum of `coupled` within the
/// central window. The width is measured on `reference − coupled` by
/// walking outwards from the centre to the first half-maximum crossings.
pub fn dip_metrics_profiles(detunings: &[f64], coupled: &[f64], reference: &[f64]) -> Result<DipMetrics> {
    let n = detunings.len();
    if n < 3 || coupled.len() != n || reference.len() != n {
        return Err(Error::InvalidInput(
            "profiles need at least three points and matching lengths".into(),
        ));
    }
    let (lo, hi) = (detunings[0], detunings[n - 1]);
    let mid = 0.5 * (lo + hi);
    let reach = 0.5 * DIP_WINDOW_FRACTION * (hi - lo);

    let centre = (1..n - 1)
        .filter(|&i| (detunings[i] - mid).abs() <= reach * (1.0 + 1e-12))
        .filter(|&i| {
            let y = coupled[i];
            y <= coupled[i - 1] && y <= coupled[i + 1] && (y < coupled[i - 1] || y < coupled[i + 1])
        })
        .min_by(|&a, &b| coupled[a].total_cmp(&coupled[b]))
        .ok_or(Error::NoDip)?;

    let depth = reference[centre] - coupled[centre];
    if !(depth > 0.0) || !(reference[centre] > 0.0) {
        return Err(Error::NoDip);
    }
    let contrast = depth / reference[centre];

    let profile: Vec<f64> = reference.iter().zip(coupled).map(|(r, c)| r - c).collect();
    let half = 0.5 * depth;
    let mut clamped = false;
    let crossing = |from: usize, to: usize| -> f64 {
        let (x0, x1) = (detunings[from], detunings[to]);
        let (y0, y1) = (profile[from], profile[to]);
        x0 + (half - y0) * (x1 - x0) / (y1 - y0)
    };

    let mut i = centre;
    let left = loop {
        if i == 0 {
            clamped = true;
            break detunings[0];
        }
        if profile[i - 1] < half {
            break crossing(i, i - 1);
        }
        i -= 1;
    };
    let mut j = centre;
    let right = loop {
        if j == n - 1 {
            clamped = true;
            break detunings[n - 1];
        }
        if profile[j + 1] < half {
            break crossing(j, j + 1);
        }
        j += 1;
    };

    Ok(DipMetrics {
        contrast,
        fwhm: right - left,
        center: detunings[centre],
        clamped,
    })
}
