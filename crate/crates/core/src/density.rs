use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type Matrix4 = [[C64; 4]; 4];

pub const HERMITICITY_TOLERANCE: f64 = 1e-12;
pub const TRACE_TOLERANCE: f64 = 1e-10;
pub const POSITIVITY_TOLERANCE: f64 = 1e-9;

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// A validated 4×4 density matrix over {ground, intermediate, upper, reservoir}.
///
/// Construction checks Hermiticity (relative to the largest element), unit
/// trace and numerical positivity (all eigenvalues ≥ −1e-9).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityState {
    rho: Matrix4,
}

impl DensityState {
    pub fn new(rho: Matrix4) -> Result<Self> {
        let herm = hermiticity_error(&rho);
        if herm > HERMITICITY_TOLERANCE {
            return Err(Error::NonPhysicalState {
                what: "relative hermiticity error",
                value: herm,
            });
        }
        let tr = trace(&rho);
        let trace_err = (tr - C64::new(1.0, 0.0)).norm();
        if !(trace_err <= TRACE_TOLERANCE) {
            return Err(Error::NonPhysicalState {
                what: "trace error",
                value: trace_err,
            });
        }
        if !is_positive_semidefinite(&rho, POSITIVITY_TOLERANCE) {
            return Err(Error::NonPhysicalState {
                what: "negative eigenvalue below tolerance",
                value: -POSITIVITY_TOLERANCE,
            });
        }
        Ok(Self { rho })
    }

    /// All population in the ground state.
    pub fn ground() -> Self {
        let mut rho = [[ZERO; 4]; 4];
        rho[0][0] = C64::new(1.0, 0.0);
        Self { rho }
    }

    pub fn matrix(&self) -> &Matrix4 {
        &self.rho
    }

    /// Element ρ_ij with zero-based level indices.
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.rho[i][j]
    }

    pub fn population(&self, level: usize) -> f64 {
        self.rho[level][level].re
    }

    pub fn populations(&self) -> [f64; 4] {
        [0, 1, 2, 3].map(|i| self.rho[i][i].re)
    }

    pub fn trace(&self) -> C64 {
        trace(&self.rho)
    }

    /// Probe coherence ρ̃21 in the sign convention where Im > 0 is absorption.
    ///
    /// The Hamiltonian couples with +Ω/2, so the physical polarization
    /// follows −ρ21.
    pub fn probe_coherence(&self) -> C64 {
        -self.rho[1][0]
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.rho)
    }
}

pub(crate) fn trace(rho: &Matrix4) -> C64 {
    (0..4).map(|i| rho[i][i]).sum()
}

/// max|ρ_ij − conj(ρ_ji)| relative to max|ρ_ij|.
pub(crate) fn hermiticity_error(rho: &Matrix4) -> f64 {
    let scale = rho
        .iter()
        .flat_map(|r| r.iter())
        .map(|z| z.norm())
        .fold(0.0_f64, f64::max)
        .max(1e-300);
    let mut worst = 0.0_f64;
    for i in 0..4 {
        for j in i..4 {
            worst = worst.max((rho[i][j] - rho[j][i].conj()).norm());
        }
    }
    worst / scale
}

/// Cholesky attempt on ρ + tol·I using the Hermitian part of ρ.
pub(crate) fn is_positive_semidefinite(rho: &Matrix4, tol: f64) -> bool {
    let mut a = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            a[i][j] = 0.5 * (rho[i][j] + rho[j][i].conj());
        }
        a[i][i] += tol;
    }
    let mut l = [[ZERO; 4]; 4];
    for j in 0..4 {
        let mut d = a[j][j].re;
        for k in 0..j {
            d -= l[j][k].norm_sqr();
        }
        if !(d > 0.0) {
            return false;
        }
        let djj = d.sqrt();
        l[j][j] = C64::new(djj, 0.0);
        for i in (j + 1)..4 {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k].conj();
            }
            l[i][j] = s / djj;
        }
    }
    true
}
