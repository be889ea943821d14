use cascade_eit::config::{Quadrature, RabiInput};
use cascade_eit::{
    build_liouvillian, dip_metrics_profiles, doppler_average, parse_config, propagate_with, rabi_from_intensity,
    steady_state, two_pi, AlphaEvaluation, AtomModel, DriveField, Environment, Error, Geometry, LampGeometry,
    PropagationOptions, RabiCalibration, RunConfig, Transition, VaporMap, VelocityGrid,
};
use proptest::prelude::*;

fn geometry() -> impl Strategy<Value = Geometry> {
    prop_oneof![Just(Geometry::Copropagating), Just(Geometry::Counterpropagating)]
}

prop_compose! {
    fn physical_point()(
        omega_p in 0.0..3.0f64,
        omega_c in 0.0..3.0f64,
        dp in -2000.0..2000.0f64,
        dc in -200.0..200.0f64,
        v in -2000.0..2000.0f64,
        transit_khz in 1.0..2000.0f64,
        pump_khz in prop_oneof![Just(0.0), 0.0..500.0f64],
        gamma3_mhz in prop_oneof![Just(0.0), 0.0..2.0f64],
        geom in geometry(),
    ) -> (AtomModel, DriveField, Environment, f64) {
        let atom = AtomModel { gamma3: two_pi(gamma3_mhz * 1e6), ..AtomModel::calcium() };
        let drive = DriveField {
            delta_p: two_pi(dp * 1e6),
            delta_c: two_pi(dc * 1e6),
            ..DriveField::resonant(&atom, omega_p, omega_c, geom)
        };
        let env = Environment {
            transit_rate: two_pi(transit_khz * 1e3),
            pump_rate: two_pi(pump_khz * 1e3),
            ..Environment::hollow_cathode()
        };
        (atom, drive, env, v)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn steady_states_are_physical((atom, drive, env, v) in physical_point()) {
        let l = build_liouvillian(&atom, &drive, &env, v).unwrap();
        prop_assert!(l.trace_leak() <= 1e-12 * l.norm());
        // construction validates Hermiticity, unit trace and positivity
        let rho = steady_state(&l).unwrap();
        let r = l.apply(rho.matrix());
        let res = r.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(res <= 1e-9 * l.norm());
        for p in rho.populations() {
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&p));
        }
    }

    #[test]
    fn rabi_square_root_law(i in 0.0..1e6f64) {
        let atom = AtomModel::calcium();
        for mode in [RabiCalibration::Standard, RabiCalibration::Calibrated] {
            for t in [Transition::Probe, Transition::Coupling] {
                let one = rabi_from_intensity(i, t, &atom, mode).unwrap();
                let four = rabi_from_intensity(4.0 * i, t, &atom, mode).unwrap();
                prop_assert_eq!(four, 2.0 * one);
            }
        }
    }

    #[test]
    fn beer_lambert_bookkeeping(
        a0 in 0.0..400.0f64,
        sat in 1.0..5000.0f64,
        i_in in 1.0..5000.0f64,
        vapor in prop_oneof![Just(VaporMap::Cathode), Just(VaporMap::InterElectrode), Just(VaporMap::Full)],
    ) {
        let lamp = LampGeometry::default().with_vapor(vapor);
        let alpha = |i: f64| Ok(a0 / (1.0 + i / sat));
        let s = propagate_with(&lamp, i_in, alpha, &PropagationOptions::default()).unwrap();
        prop_assert!((0.0..=1.0).contains(&s.transmission));
        let lost: f64 = s.segment_absorbed.iter().sum();
        prop_assert!(((1.0 - s.transmission) * i_in - lost).abs() <= 1e-6 * i_in);
        prop_assert!(s.segment_absorbed.iter().all(|&x| x >= 0.0));
        prop_assert!(s.optogalvanic >= s.fluorescence);
        // more absorbers never transmit more
        let denser = propagate_with(&lamp, i_in, |i: f64| Ok(1.5 * a0 / (1.0 + i / sat)), &PropagationOptions::default()).unwrap();
        prop_assert!(denser.transmission <= s.transmission + 1e-12);
    }

    #[test]
    fn thin_medium_limit(a in 1e-4..0.5f64) {
        // α·L ≤ 0.01 over the 2 cm cathode
        let lamp = LampGeometry::default();
        let s = propagate_with(&lamp, 100.0, |_| Ok(a), &PropagationOptions::default()).unwrap();
        let ratio = (1.0 - s.transmission) / (a * lamp.active_length());
        prop_assert!((0.99..=1.0).contains(&ratio), "{}", ratio);
    }

    #[test]
    fn dip_contrast_is_scale_invariant(scale in 1e-6..1e6f64, depth in 0.05..0.9f64, width in 0.02..0.3f64) {
        let x: Vec<f64> = (0..201).map(|i| (i as f64 - 100.0) / 100.0).collect();
        let r: Vec<f64> = x.iter().map(|_| 1.0).collect();
        let c: Vec<f64> = x.iter().zip(&r).map(|(d, rv)| rv * (1.0 - depth * (-(d / width).powi(2)).exp())).collect();
        let m = dip_metrics_profiles(&x, &c, &r).unwrap();
        let rs: Vec<f64> = r.iter().map(|v| v * scale).collect();
        let cs: Vec<f64> = c.iter().map(|v| v * scale).collect();
        let ms = dip_metrics_profiles(&x, &cs, &rs).unwrap();
        prop_assert!((m.contrast - depth).abs() < 1e-12);
        prop_assert!((ms.contrast - m.contrast).abs() < 1e-12);
        prop_assert!((ms.fwhm - m.fwhm).abs() < 1e-9);
        prop_assert_eq!(dip_metrics_profiles(&x, &r, &r), Err(Error::NoDip));
    }
}

prop_compose! {
    fn rabi_input()(gamma in any::<bool>(), x in 0.0..1e4f64) -> RabiInput {
        if gamma { RabiInput::Gamma1(x) } else { RabiInput::IntensityMwCm2(x) }
    }
}

prop_compose! {
    fn valid_config()(
        atom in (100.0..2000.0f64, 100.0..2000.0f64, 0.1..200.0f64, 0.1..200.0f64, 0.0..10.0f64, 1.0..300.0f64),
        drive in (-5e3..5e3f64, -5e3..5e3f64, rabi_input(), rabi_input(), any::<bool>(), geometry()),
        env in (1.0..3000.0f64, 0.0..1e14f64, 0.0..1e4f64, 0.0..1e4f64, 0.0..100.0f64),
        nodes in 2usize..10_000,
        quad in any::<bool>(),
        span in 0.5..20.0f64,
        scan in (-10.0..0.0f64, 0.001..20.0f64, 3usize..5000),
        step in 1e-4..1.0f64,
        sweep in proptest::collection::vec(1e-3..1.0f64, 1..8),
        dz in 1e-3..1.0f64,
        direct in any::<bool>(),
        lamp in (0.1..10.0f64, 0.01..5.0f64, 0.01..100.0f64, 1e-3..1e4f64, 0.0..1e3f64, 0.0..1.0f64, any::<bool>()),
        vapor in prop_oneof![Just(VaporMap::Cathode), Just(VaporMap::InterElectrode), Just(VaporMap::Full)],
    ) -> RunConfig {
        let mut c = RunConfig::default();
        c.atom.lambda_p_nm = atom.0;
        c.atom.lambda_c_nm = atom.1;
        c.atom.gamma1_mhz = atom.2;
        c.atom.gamma2_mhz = atom.3;
        c.atom.gamma3_mhz = atom.4;
        c.atom.mass_amu = atom.5;
        c.drive.delta_p_mhz = drive.0;
        c.drive.delta_c_mhz = drive.1;
        c.drive.probe = drive.2;
        c.drive.coupling = drive.3;
        c.drive.rabi_mode = if drive.4 { RabiCalibration::Standard } else { RabiCalibration::Calibrated };
        c.drive.geometry = drive.5;
        c.environment.temperature_k = env.0;
        c.environment.density_cm3 = env.1;
        c.environment.transit_khz = env.2;
        c.environment.pump_khz = env.3;
        c.environment.vcc_mhz = env.4;
        c.numerics.velocity_nodes = nodes;
        c.numerics.quadrature = if quad { Quadrature::Trapezoid } else { Quadrature::GaussHermite };
        c.numerics.velocity_span_u = span;
        c.numerics.scan_min_ghz = scan.0;
        c.numerics.scan_max_ghz = scan.0 + scan.1;
        c.numerics.scan_points = scan.2;
        c.numerics.group_index_step_gamma1 = step;
        let mut acc = 0.0;
        c.numerics.sweep_omega_p_gamma1 = sweep.iter().map(|d| { acc += d; acc }).collect();
        c.numerics.max_alpha_dz = dz;
        c.numerics.alpha_evaluation = if direct { AlphaEvaluation::Direct } else { AlphaEvaluation::Interpolated };
        c.lamp.cathode_cm = lamp.0;
        c.lamp.anode_gap_cm = lamp.1;
        c.lamp.total_cm = lamp.0 + 2.0 * lamp.1 + lamp.2;
        c.lamp.input_intensity_mw_cm2 = lamp.3;
        c.lamp.density_multiplier = lamp.4;
        c.lamp.fluorescence_cathode_fraction = lamp.5;
        c.lamp.with_reference = lamp.6;
        c.lamp.vapor = vapor;
        c
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn config_text_round_trip(c in valid_config()) {
        let text = c.serialize();
        let back = parse_config(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.serialize(), text);
    }
}

#[test]
fn absorption_is_even_without_coupling_detuning() {
    let atom = AtomModel::calcium();
    let env = Environment::hollow_cathode();
    let grid = VelocityGrid::with_rule(&atom, &env, 1024, Default::default()).unwrap();
    for geom in [Geometry::Counterpropagating, Geometry::Copropagating] {
        let drive = DriveField::resonant(&atom, 0.4, 1.1, geom);
        for mhz in [15.0, 120.0, 900.0] {
            let d = two_pi(mhz * 1e6);
            let plus = doppler_average(&atom, &drive.with_probe_detuning(d), &env, &grid).unwrap();
            let minus = doppler_average(&atom, &drive.with_probe_detuning(-d), &env, &grid).unwrap();
            assert!((plus.im - minus.im).abs() <= 1e-9 * plus.im.abs(), "{geom:?} at {mhz} MHz");
            // and the dispersion is odd
            assert!((plus.re + minus.re).abs() <= 1e-9 * plus.re.abs().max(plus.im.abs()));
        }
    }
}

#[test]
fn susceptibility_is_linear_in_density() {
    let atom = AtomModel::calcium();
    let env = Environment::hollow_cathode();
    let grid = VelocityGrid::with_rule(&atom, &env, 256, Default::default()).unwrap();
    let drive = DriveField::resonant(&atom, 0.4, 1.1, Geometry::Counterpropagating).with_probe_detuning(two_pi(40e6));
    let a = doppler_average(&atom, &drive, &env, &grid).unwrap();
    let b = doppler_average(&atom, &drive, &env.with_density(100.0 * env.density), &grid).unwrap();
    assert!((b - 100.0 * a).norm() <= 1e-12 * b.norm());
}

#[test]
fn vcc_limits() {
    // Negligible collisions reproduce the collision-free average; strong
    // collisions still give a physical, finite spectrum.
    let atom = AtomModel::calcium();
    let env = Environment::hollow_cathode();
    let grid = VelocityGrid::with_rule(&atom, &env, 256, Default::default()).unwrap();
    let drive = DriveField::resonant(&atom, 0.4, 1.1, Geometry::Counterpropagating);
    let free = doppler_average(&atom, &drive, &env, &grid).unwrap();
    let rare = Environment { vcc_rate: two_pi(1.0), ..env };
    let slow = doppler_average(&atom, &drive, &rare, &grid).unwrap();
    assert!((slow - free).norm() < 1e-4 * free.norm(), "{slow} vs {free}");
    for mhz in [1.0, 1e3, 1e6] {
        let often = Environment { vcc_rate: two_pi(mhz * 1e6), ..env };
        let fast = doppler_average(&atom, &drive, &often, &grid).unwrap();
        assert!(fast.im > 0.0 && fast.im.is_finite(), "{mhz} MHz: {fast}");
    }
}
