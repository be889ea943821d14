//! Steady state of a trace-preserving generator.
//!
//! L(ρ) = 0 has a one-dimensional null space when the dynamics are ergodic.
//! The population row for ρ11 is redundant (the population rows sum to
//! d(tr ρ)/dt = 0), so it is replaced by the trace condition and the
//! resulting 16×16 system is solved by LU.

use num_complex::Complex64 as C64;

use crate::density::{DensityState, Matrix4, ZERO};
use crate::error::{Error, Result};
use crate::linalg::Lu;
use crate::liouvillian::{index, unflatten, Liouvillian, Superop};

pub fn steady_state(l: &Liouvillian) -> Result<DensityState> {
    DensityState::new(solve_steady(l.generator())?)
}

/// Row 0 replaced by the trace functional.
fn constrained(l: &Superop) -> Superop {
    let mut a = *l;
    a[0] = [ZERO; 16];
    for i in 0..4 {
        a[0][index(i, i)] = C64::new(1.0, 0.0);
    }
    a
}

fn factor_constrained(l: &Superop) -> Result<(Lu<16>, Superop)> {
    let a = constrained(l);
    let lu = Lu::factor(a).map_err(|s| Error::SingularSystem {
        condition: s.condition,
    })?;
    Ok((lu, a))
}

pub(crate) fn solve_steady(l: &Superop) -> Result<Matrix4> {
    let (lu, _) = factor_constrained(l)?;
    let mut b = [ZERO; 16];
    b[0] = C64::new(1.0, 0.0);
    Ok(unflatten(&lu.solve(&b)))
}

/// Condition number of the trace-constrained system, for diagnostics.
pub fn condition_estimate(l: &Liouvillian) -> Result<f64> {
    let (lu, a) = factor_constrained(l.generator())?;
    Ok(lu.condition_1(&a))
}

/// Zeroth- and first-order terms of ρ in the probe Rabi frequency.
///
/// With L(Ω) = L0 + Ω·L1, the expansion ρ = ρ0 + Ω ρ1 + O(Ω²) satisfies
/// L0 ρ0 = 0 with tr ρ0 = 1, and L0 ρ1 = −L1 ρ0 with tr ρ1 = 0.
pub(crate) fn solve_linear_response(
    l0: &Superop,
    l1: &Superop,
) -> Result<(Matrix4, Matrix4)> {
    let (lu, _) = factor_constrained(l0)?;
    let mut b = [ZERO; 16];
    b[0] = C64::new(1.0, 0.0);
    let rho0 = lu.solve(&b);
    let mut rhs = crate::linalg::mat_vec(l1, &rho0);
    for z in rhs.iter_mut() {
        *z = -*z;
    }
    rhs[0] = ZERO;
    let rho1 = lu.solve(&rhs);
    Ok((unflatten(&rho0), unflatten(&rho1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouvillian::build_liouvillian;
    use crate::model::{two_pi, AtomModel, DriveField, Environment, Geometry};

    fn drives_off() -> DriveField {
        DriveField {
            delta_p: 0.0,
            delta_c: 0.0,
            omega_p: 0.0,
            omega_c: 0.0,
            geometry: Geometry::Counterpropagating,
        }
    }

    #[test]
    fn drives_off_relaxes_to_ground() {
        let atom = AtomModel::calcium();
        for transit in [two_pi(1.0), two_pi(34e3), two_pi(5e6)] {
            let env = Environment {
                transit_rate: transit,
                ..Environment::hollow_cathode()
            };
            let l = build_liouvillian(&atom, &drives_off(), &env, 250.0).unwrap();
            let rho = steady_state(&l).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    let want = if i == 0 && j == 0 { 1.0 } else { 0.0 };
                    assert!((rho.get(i, j) - want).norm() < 1e-14, "ρ{i}{j}");
                }
            }
        }
    }

    #[test]
    fn closed_two_level_saturation() {
        // ρ22 = (Ω²/4) / (γ²/4 + Ω²/2) on resonance
        let atom = AtomModel::calcium().closed();
        let drive = DriveField::resonant(&atom, 0.01, 0.0, Geometry::Counterpropagating);
        let env = Environment::hollow_cathode();
        let rho = steady_state(&build_liouvillian(&atom, &drive, &env, 0.0).unwrap()).unwrap();
        let (g, om) = (atom.gamma1, drive.omega_p);
        let want = (om * om / 4.0) / (g * g / 4.0 + om * om / 2.0);
        assert!((rho.population(1) - want).abs() < 1e-12 * want.max(1e-300) + 1e-16);
        assert!((want - 1.0e-4).abs() < 1e-7);
    }

    #[test]
    fn disconnected_reservoir_is_singular() {
        let atom = AtomModel::calcium();
        let env = Environment {
            transit_rate: 0.0,
            ..Environment::hollow_cathode()
        };
        let l = build_liouvillian(&atom, &drives_off(), &env, 0.0).unwrap();
        match steady_state(&l) {
            Err(Error::SingularSystem { condition }) => assert!(condition > 1e11),
            other => panic!("expected singular, got {other:?}"),
        }
    }

    #[test]
    fn residual_is_small_and_condition_is_finite() {
        let atom = AtomModel::calcium();
        let drive = DriveField {
            delta_p: two_pi(40e6),
            ..DriveField::resonant(&atom, 0.4, 1.1, Geometry::Copropagating)
        };
        let env = Environment::hollow_cathode();
        let l = build_liouvillian(&atom, &drive, &env, 37.0).unwrap();
        let rho = steady_state(&l).unwrap();
        let r = l.apply(rho.matrix());
        let res = r.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(res <= 1e-9 * l.norm(), "residual {res}");
        let cond = condition_estimate(&l).unwrap();
        assert!(cond.is_finite() && cond > 1.0);
    }
}
