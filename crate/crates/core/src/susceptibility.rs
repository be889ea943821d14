//! Probe susceptibility of one velocity class and of the thermal ensemble.

use num_complex::Complex64 as C64;

use crate::density::{DensityState, ZERO};
use crate::error::{Error, Result};
use crate::linalg::Lu;
use crate::liouvillian::{index, unflatten, GeneratorBuilder, Superop};
use crate::model::{AtomModel, DriveField, Environment, HBAR, VACUUM_PERMITTIVITY};
use crate::steady::{solve_linear_response, solve_steady};
use crate::velocity::VelocityGrid;

/// 2·N·d²/(ε0·ħ), the susceptibility per unit of (ρ̃21/Ω_p).
fn response_scale(atom: &AtomModel, env: &Environment) -> f64 {
    2.0 * env.density * atom.dipole_sq() / (VACUUM_PERMITTIVITY * HBAR)
}

/// χ = (2·N·d²/(ε0·ħ·Ω_p))·ρ̃21 for a single velocity class.
pub fn susceptibility_single(
    rho: &DensityState,
    atom: &AtomModel,
    drive: &DriveField,
    env: &Environment,
) -> Result<C64> {
    if drive.omega_p == 0.0 {
        return Err(Error::ZeroProbe);
    }
    Ok(response_scale(atom, env) / drive.omega_p * rho.probe_coherence())
}

/// Weak-probe limit Ω_p → 0 of the susceptibility at velocity `v`,
/// from first-order perturbation theory in the probe field.
pub fn linear_susceptibility(
    atom: &AtomModel,
    drive: &DriveField,
    env: &Environment,
    v: f64,
) -> Result<C64> {
    atom.validate()?;
    drive.validate()?;
    env.validate()?;
    let undriven = drive.with_probe_rabi(0.0);
    let builder = GeneratorBuilder::new(atom, &undriven, env);
    linear_at(&builder, atom, env, v)
}

fn linear_at(builder: &GeneratorBuilder, atom: &AtomModel, env: &Environment, v: f64) -> Result<C64> {
    let (_, rho1) = solve_linear_response(&builder.at(v), &builder.probe_derivative())?;
    Ok(response_scale(atom, env) * -rho1[1][0])
}

pub(crate) fn check_inputs(
    atom: &AtomModel,
    drive: &DriveField,
    env: &Environment,
    grid: &VelocityGrid,
) -> Result<()> {
    atom.validate()?;
    drive.validate()?;
    env.validate()?;
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty velocity grid".into()));
    }
    Ok(())
}

/// Steady states of every velocity class, ignoring collisions.
pub fn node_steady_states(
    atom: &AtomModel,
    drive: &DriveField,
    env: &Environment,
    grid: &VelocityGrid,
) -> Result<Vec<DensityState>> {
    check_inputs(atom, drive, env, grid)?;
    let builder = GeneratorBuilder::new(atom, drive, env);
    grid.nodes()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            solve_steady(&builder.at(v))
                .and_then(DensityState::new)
                .map_err(|e| e.at_node(i))
        })
        .collect()
}

/// Thermal average Σ_i w_i χ(v_i), summed in ascending node order.
///
/// With a nonzero `env.vcc_rate` the per-node states come from
/// [`vcc_steady_state`]. A zero probe Rabi frequency yields the weak-probe
/// linear susceptibility.
pub fn doppler_average(
    atom: &AtomModel,
    drive: &DriveField,
    env: &Environment,
    grid: &VelocityGrid,
) -> Result<C64> {
    check_inputs(atom, drive, env, grid)?;
    if env.density == 0.0 {
        return Ok(ZERO);
    }
    if drive.omega_p == 0.0 {
        let builder = GeneratorBuilder::new(atom, drive, env);
        let mut sum = ZERO;
        for (i, (&v, &w)) in grid.nodes().iter().zip(grid.weights()).enumerate() {
            sum += w * linear_at(&builder, atom, env, v).map_err(|e| e.at_node(i))?;
        }
        return Ok(sum);
    }
    if env.vcc_rate > 0.0 {
        let states = vcc_steady_state(atom, drive, env, grid)?;
        let mut sum = ZERO;
        for (rho, &w) in states.iter().zip(grid.weights()) {
            sum += w * rho.probe_coherence();
        }
        return Ok(response_scale(atom, env) / drive.omega_p * sum);
    }

    let builder = GeneratorBuilder::new(atom, drive, env);
    let mut sum = ZERO;
    for (i, (&v, &w)) in grid.nodes().iter().zip(grid.weights()).enumerate() {
        let rho = solve_steady(&builder.at(v))
            .and_then(DensityState::new)
            .map_err(|e| e.at_node(i))?;
        sum += w * rho.probe_coherence();
    }
    Ok(response_scale(atom, env) / drive.omega_p * sum)
}

/// Per-node steady states with strong-collision velocity-changing collisions.
///
/// Collisions at rate Γ remove every element of ρ(v_i) at Γ and return the
/// velocity-averaged populations p̄ = Σ_j w_j diag ρ(v_j) with the Maxwell
/// weight, so each node obeys L_i ρ_i − Γ ρ_i + Γ diag(p̄) = 0.
pub fn vcc_steady_state(
    atom: &AtomModel,
    drive: &DriveField,
    env: &Environment,
    grid: &VelocityGrid,
) -> Result<Vec<DensityState>> {
    check_inputs(atom, drive, env, grid)?;
    let collisionless = Environment { vcc_rate: 0.0, ..*env };
    let gamma = env.vcc_rate;
    if gamma == 0.0 {
        return node_steady_states(atom, drive, &collisionless, grid);
    }

    // Each class obeys (L_i − Γ)ρ_i = −Γ·diag(p̄), so ρ_i is linear in the
    // mean populations p̄. Collecting the population response of every class
    // gives p̄ = M·p̄; M − I has the trace as its null direction and is closed
    // by replacing one row with Σp̄ = 1. Tracing a node equation gives
    // tr ρ_i = Σp̄, which stands in for its ground-population row so the node
    // solves stay well conditioned as Γ → 0. That row is scaled to the
    // generator's rates; left at unit scale, partial pivoting loses ~1e-10.
    let builder = GeneratorBuilder::new(atom, drive, &collisionless);
    let row_scale = C64::new(gamma + atom.gamma1, 0.0);
    let mut responses: Vec<[[C64; 16]; 4]> = Vec::with_capacity(grid.len());
    let mut m = [[ZERO; 4]; 4];
    for (i, (&v, &w)) in grid.nodes().iter().zip(grid.weights()).enumerate() {
        let mut a: Superop = builder.at(v);
        for (k, row) in a.iter_mut().enumerate() {
            row[k] -= gamma;
        }
        a[0] = [ZERO; 16];
        for k in 0..4 {
            a[0][index(k, k)] = row_scale;
        }
        let lu = Lu::factor(a)
            .map_err(|s| Error::SingularSystem { condition: s.condition }.at_node(i))?;
        let mut cols = [[ZERO; 16]; 4];
        for (k, col) in cols.iter_mut().enumerate() {
            let mut rhs = [ZERO; 16];
            rhs[index(k, k)] = C64::new(-gamma, 0.0);
            rhs[0] = row_scale;
            *col = lu.solve(&rhs);
            for (j, row) in m.iter_mut().enumerate() {
                row[k] += w * col[index(j, j)];
            }
        }
        responses.push(cols);
    }
    for (k, row) in m.iter_mut().enumerate() {
        row[k] -= 1.0;
    }
    m[0] = [C64::new(1.0, 0.0); 4];
    let mut rhs = [ZERO; 4];
    rhs[0] = C64::new(1.0, 0.0);
    let pbar = Lu::factor(m)
        .map_err(|s| Error::SingularSystem { condition: s.condition })?
        .solve(&rhs);

    responses
        .iter()
        .enumerate()
        .map(|(i, cols)| {
            let mut flat = [ZERO; 16];
            for (col, p) in cols.iter().zip(&pbar) {
                for (f, c) in flat.iter_mut().zip(col) {
                    *f += c * p.re;
                }
            }
            DensityState::new(unflatten(&flat)).map_err(|e| e.at_node(i))
        })
        .collect()
}
