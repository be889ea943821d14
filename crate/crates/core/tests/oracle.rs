mod common;

use cascade_eit::{
    build_liouvillian, doppler_average, steady_state, susceptibility_single, two_pi, AtomModel, DriveField,
    Environment, Geometry, VelocityGrid,
};
use common::{max_abs_diff, rk4_long_time, settle_time};

fn check_against_rk4(atom: AtomModel, drive: DriveField, env: Environment, v: f64) {
    let l = build_liouvillian(&atom, &drive, &env, v).unwrap();
    let direct = steady_state(&l).unwrap();
    let (rk, _) = rk4_long_time(&l, settle_time(atom.gamma1, env.transit_rate));
    let diff = max_abs_diff(direct.matrix(), &rk);
    assert!(diff < 1e-6, "steady state differs from time evolution by {diff:e}");
}

#[test]
fn steady_state_matches_time_evolution_at_rest() {
    let atom = AtomModel::calcium();
    let drive = DriveField::resonant(&atom, 0.4, 1.1, Geometry::Counterpropagating);
    check_against_rk4(atom, drive, Environment::hollow_cathode(), 0.0);
}

#[test]
fn steady_state_matches_time_evolution_moving_pumped() {
    let atom = AtomModel::calcium();
    let drive = DriveField {
        delta_p: two_pi(60e6),
        delta_c: two_pi(-25e6),
        ..DriveField::resonant(&atom, 0.8, 1.6, Geometry::Copropagating)
    };
    let env = Environment {
        transit_rate: two_pi(200e3),
        pump_rate: two_pi(40e3),
        ..Environment::hollow_cathode()
    };
    check_against_rk4(atom, drive, env, 35.0);
}

#[test]
fn steady_state_matches_time_evolution_closed() {
    let atom = AtomModel::calcium().closed();
    let drive = DriveField::resonant(&atom, 1.5, 0.7, Geometry::Counterpropagating).with_probe_detuning(two_pi(-30e6));
    check_against_rk4(atom, drive, Environment::hollow_cathode(), -12.0);
}

/// χ for a driven two-level atom: (N d²/(ε0 ħ))·(−Δ + iγ/2)/(Δ² + γ²/4 + Ω²/2).
fn two_level_chi(atom: &AtomModel, env: &Environment, delta: f64, omega: f64) -> (f64, f64) {
    let g = atom.gamma1;
    let pre = env.density * atom.dipole_sq() / (cascade_eit::model::VACUUM_PERMITTIVITY * cascade_eit::model::HBAR);
    let den = delta * delta + g * g / 4.0 + omega * omega / 2.0;
    (-pre * delta / den, pre * 0.5 * g / den)
}

#[test]
fn uncoupled_closed_atom_is_saturated_lorentzian() {
    let atom = AtomModel::calcium().closed();
    let env = Environment::hollow_cathode();
    for &(delta_mhz, omega) in &[(0.0, 0.05), (0.0, 2.0), (17.0, 0.4), (-80.0, 1.3), (300.0, 5.0)] {
        let drive = DriveField::resonant(&atom, omega, 0.0, Geometry::Counterpropagating)
            .with_probe_detuning(two_pi(delta_mhz * 1e6));
        let rho = steady_state(&build_liouvillian(&atom, &drive, &env, 0.0).unwrap()).unwrap();
        let chi = susceptibility_single(&rho, &atom, &drive, &env).unwrap();
        let (re, im) = two_level_chi(&atom, &env, drive.delta_p, drive.omega_p);
        assert!((chi.im - im).abs() <= 1e-8 * im.abs(), "Im at {delta_mhz} MHz");
        if re != 0.0 {
            assert!((chi.re - re).abs() <= 1e-8 * re.abs(), "Re at {delta_mhz} MHz");
        }
    }
}

#[test]
fn weak_probe_doppler_profile_is_gaussian() {
    // With Ω_c = 0 and Ω_p → 0 the thermal average is a Voigt profile; far
    // from the homogeneous width it is the Doppler Gaussian.
    let atom = AtomModel::calcium();
    let env = Environment::hollow_cathode();
    let grid = VelocityGrid::thermal(&atom, &env).unwrap();
    let u = env.most_probable_speed(&atom);
    let ku = atom.k_p() * u;
    let drive = DriveField::resonant(&atom, 0.0, 0.0, Geometry::Counterpropagating);
    let peak = doppler_average(&atom, &drive, &env, &grid).unwrap().im;
    // Im χ̄(0) ≈ 3Nλ³/(4π²) · √π (γ/2)/(k u) for k u ≫ γ
    let lorentz_peak = 3.0 * env.density * atom.lambda_p.powi(3) / (4.0 * std::f64::consts::PI.powi(2));
    let gauss_peak = lorentz_peak * std::f64::consts::PI.sqrt() * 0.5 * atom.gamma1 / ku;
    assert!((peak / gauss_peak - 1.0).abs() < 0.03, "{}", peak / gauss_peak);
    let half = doppler_average(&atom, &drive.with_probe_detuning(ku * 2f64.ln().sqrt()), &env, &grid)
        .unwrap()
        .im;
    assert!((half / peak - 0.5).abs() < 0.02, "{}", half / peak);
}
