//! Rotating-frame Lindblad generator for one velocity class.
//!
//! The density matrix is flattened row-major, so element ρ_ab sits at
//! `4 * a + b` and the generator is a 16×16 complex matrix acting on that
//! vector.

use num_complex::Complex64 as C64;

use crate::density::{Matrix4, ZERO};
use crate::error::Result;
use crate::linalg::mat_vec;
use crate::model::{AtomModel, DriveField, Environment};

pub type Superop = [[C64; 16]; 16];

#[inline]
pub const fn index(a: usize, b: usize) -> usize {
    4 * a + b
}

pub fn flatten(rho: &Matrix4) -> [C64; 16] {
    let mut v = [ZERO; 16];
    for a in 0..4 {
        for b in 0..4 {
            v[index(a, b)] = rho[a][b];
        }
    }
    v
}

pub fn unflatten(v: &[C64; 16]) -> Matrix4 {
    let mut rho = [[ZERO; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            rho[a][b] = v[index(a, b)];
        }
    }
    rho
}

/// Parameters a generator was built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiouvillianContext {
    pub atom: AtomModel,
    pub drive: DriveField,
    pub env: Environment,
    /// Axial velocity along the probe direction (m/s).
    pub velocity: f64,
}

#[derive(Debug, Clone)]
pub struct Liouvillian {
    generator: Superop,
    context: LiouvillianContext,
}

impl Liouvillian {
    pub fn generator(&self) -> &Superop {
        &self.generator
    }

    pub fn context(&self) -> &LiouvillianContext {
        &self.context
    }

    /// dρ/dt for the given ρ.
    pub fn apply(&self, rho: &Matrix4) -> Matrix4 {
        unflatten(&mat_vec(&self.generator, &flatten(rho)))
    }

    /// Maximum absolute row sum.
    pub fn norm(&self) -> f64 {
        superop_norm(&self.generator)
    }

    /// Largest |d(tr ρ)/dt| coefficient over all columns; zero for a
    /// trace-preserving generator.
    pub fn trace_leak(&self) -> f64 {
        (0..16)
            .map(|j| {
                (0..4)
                    .map(|i| self.generator[index(i, i)][j])
                    .sum::<C64>()
                    .norm()
            })
            .fold(0.0, f64::max)
    }
}

pub(crate) fn superop_norm(l: &Superop) -> f64 {
    l.iter()
        .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Builds the generator of dρ/dt = −i[H, ρ] + Σ_k D[L_k]ρ for atoms moving
/// at `v`.
///
/// Collapse channels: √γ1 |1⟩⟨2|, √γ2 |2⟩⟨3|, √γ3 |4⟩⟨3|, √Γt |1⟩⟨4| and
/// √(Λ/2) |2⟩⟨1|, √(Λ/2) |3⟩⟨1|.
pub fn build_liouvillian(
    atom: &AtomModel,
    drive: &DriveField,
    env: &Environment,
    v: f64,
) -> Result<Liouvillian> {
    atom.validate()?;
    drive.validate()?;
    env.validate()?;
    crate::error::require(v.is_finite(), "velocity", v, "must be finite")?;
    let builder = GeneratorBuilder::new(atom, drive, env);
    Ok(Liouvillian {
        generator: builder.at(v),
        context: LiouvillianContext {
            atom: *atom,
            drive: *drive,
            env: *env,
            velocity: v,
        },
    })
}

/// Caches the velocity-independent dissipator so that sweeps over velocity
/// classes only rebuild the Hamiltonian part.
#[derive(Clone)]
pub(crate) struct GeneratorBuilder {
    dissipator: Superop,
    atom: AtomModel,
    drive: DriveField,
}

impl GeneratorBuilder {
    pub fn new(atom: &AtomModel, drive: &DriveField, env: &Environment) -> Self {
        let mut d = [[ZERO; 16]; 16];
        let channels = [
            (atom.gamma1, 1, 0),
            (atom.gamma2, 2, 1),
            (atom.gamma3, 2, 3),
            (env.transit_rate, 3, 0),
            (0.5 * env.pump_rate, 0, 1),
            (0.5 * env.pump_rate, 0, 2),
        ];
        for (rate, from, to) in channels {
            if rate != 0.0 {
                add_decay(&mut d, rate, from, to);
            }
        }
        Self {
            dissipator: d,
            atom: *atom,
            drive: *drive,
        }
    }

    pub fn at(&self, v: f64) -> Superop {
        let mut l = self.dissipator;
        add_hamiltonian(&mut l, &self.hamiltonian(v));
        l
    }

    /// Derivative of the generator with respect to the probe Rabi frequency.
    pub fn probe_derivative(&self) -> Superop {
        let mut l = [[ZERO; 16]; 16];
        let mut h = [[0.0; 4]; 4];
        h[0][1] = 0.5;
        h[1][0] = 0.5;
        add_hamiltonian(&mut l, &h);
        l
    }

    fn hamiltonian(&self, v: f64) -> [[f64; 4]; 4] {
        let dp = self.drive.probe_detuning_at(&self.atom, v);
        let dc = self.drive.coupling_detuning_at(&self.atom, v);
        let mut h = [[0.0; 4]; 4];
        h[1][1] = -dp;
        h[2][2] = -(dp + dc);
        h[0][1] = 0.5 * self.drive.omega_p;
        h[1][0] = 0.5 * self.drive.omega_p;
        h[1][2] = 0.5 * self.drive.omega_c;
        h[2][1] = 0.5 * self.drive.omega_c;
        h
    }
}

/// −i[H, ρ] for real symmetric H.
fn add_hamiltonian(l: &mut Superop, h: &[[f64; 4]; 4]) {
    for x in 0..4 {
        for y in 0..4 {
            let hxy = h[x][y];
            if hxy == 0.0 {
                continue;
            }
            for k in 0..4 {
                // (Hρ)_xk = H_xy ρ_yk
                l[index(x, k)][index(y, k)] += C64::new(0.0, -hxy);
                // (ρH)_ky = ρ_kx H_xy
                l[index(k, y)][index(k, x)] += C64::new(0.0, hxy);
            }
        }
    }
}

/// D[√rate |to⟩⟨from|].
fn add_decay(l: &mut Superop, rate: f64, from: usize, to: usize) {
    l[index(to, to)][index(from, from)] += rate;
    for k in 0..4 {
        l[index(from, k)][index(from, k)] -= 0.5 * rate;
        l[index(k, from)][index(k, from)] -= 0.5 * rate;
    }
}
