//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use cascade_eit::{Liouvillian, Matrix4, C64};

/// Integrates dρ/dt = L ρ from the ground state with classical fixed-step
/// RK4 until at least `t_end`, returning the final ρ and the step count.
///
/// The step is 2/‖L‖∞, inside the RK4 stability interval (|λ·dt| < 2.8 on
/// the imaginary axis) for every eigenvalue of L.
pub fn rk4_long_time(l: &Liouvillian, t_end: f64) -> (Matrix4, u64) {
    let dt = 2.0 / l.norm();
    let steps = (t_end / dt).ceil() as u64;
    let mut rho = [[C64::new(0.0, 0.0); 4]; 4];
    rho[0][0] = C64::new(1.0, 0.0);
    let axpy = |a: &Matrix4, s: f64, b: &Matrix4| {
        let mut out = *a;
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] += s * b[i][j];
            }
        }
        out
    };
    for _ in 0..steps {
        let k1 = l.apply(&rho);
        let k2 = l.apply(&axpy(&rho, 0.5 * dt, &k1));
        let k3 = l.apply(&axpy(&rho, 0.5 * dt, &k2));
        let k4 = l.apply(&axpy(&rho, dt, &k3));
        for i in 0..4 {
            for j in 0..4 {
                rho[i][j] += dt / 6.0 * (k1[i][j] + 2.0 * k2[i][j] + 2.0 * k3[i][j] + k4[i][j]);
            }
        }
    }
    (rho, steps)
}

/// Integration time long enough for the slowest relaxation channel: many
/// probe lifetimes and 25 reservoir-return times.
pub fn settle_time(gamma1: f64, slowest_rate: f64) -> f64 {
    (1e4 / gamma1).max(25.0 / slowest_rate)
}

pub fn max_abs_diff(a: &Matrix4, b: &Matrix4) -> f64 {
    let mut m = 0.0_f64;
    for i in 0..4 {
        for j in 0..4 {
            m = m.max((a[i][j] - b[i][j]).norm());
        }
    }
    m
}
