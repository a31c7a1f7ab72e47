use std::f64::consts::PI;

use biasflip::config::RunConfig;
use biasflip::dynamics::{propagate, FnPotential, PropagationConfig, StaticPotential};
use biasflip::experiments::{log_spaced, SweepCell};
use biasflip::export::sweep_csv;
use biasflip::grid::{inner_product, Grid, Wavefunction};
use biasflip::potentials::{IonQuarticParams, PotentialParams, WellSide};
use biasflip::protocols::{
    build, compensate, displacement_unitary_apply, displacement_unitary_inverse, minima_trajectory, ProtocolKind,
    RigidHarmonic,
};
use biasflip::spectral::{harmonic_eigenstate, solve_stationary};
use biasflip::units::mass_be9_ion;
use proptest::prelude::*;

fn kinds() -> impl Strategy<Value = ProtocolKind> {
    prop_oneof![
        Just(ProtocolKind::Polynomial),
        Just(ProtocolKind::Faquad),
        Just(ProtocolKind::PolynomialCompensated),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn protocols_hit_their_end_points(
        kind in kinds(),
        start in -1e-19f64..1e-19,
        end in -1e-19f64..1e-19,
        tf in 1e-8f64..1e-5,
    ) {
        let p = build(kind, start, end, tf).unwrap();
        let scale = start.abs().max(end.abs()).max(1e-30);
        prop_assert!((p.lambda(0.0) - start).abs() <= 1e-12 * scale);
        prop_assert!((p.lambda(tf) - end).abs() <= 1e-12 * scale);
        if kind != ProtocolKind::Faquad {
            // quintic: rest at both ends
            for t in [0.0, tf] {
                prop_assert!(p.lambda_dot(t).abs() * tf <= 1e-9 * scale);
                prop_assert!(p.lambda_ddot(t).abs() * tf * tf <= 1e-9 * scale);
            }
        }
    }

    #[test]
    fn nonpositive_durations_are_rejected(kind in kinds(), tf in -1.0f64..=0.0) {
        prop_assert!(build(kind, 1.0, -1.0, tf).is_err());
    }

    #[test]
    fn ion_compensation_is_minus_m_x0_ddot(frac in 0.05f64..0.9, tf in 2e-8f64..1e-6) {
        let params = PotentialParams::Ion(IonQuarticParams {
            alpha: -4.7e-12,
            beta: 5.2e-3,
            gamma: 86.4e-21,
            mass: mass_be9_ion(),
        });
        let g0 = 86.4e-21 * frac;
        let spec = build(ProtocolKind::PolynomialCompensated, g0, -g0, tf).unwrap();
        let traj = minima_trajectory(&spec, &params, 0, WellSide::Left).unwrap();
        let comp = compensate(&traj, &params);
        for i in 0..traj.len() {
            let want = traj.lambda[i] - mass_be9_ion() * traj.x0_ddot[i];
            prop_assert!((comp.lambda_eff[i] - want).abs() <= 1e-12 * g0);
        }
    }

    #[test]
    fn displacement_unitary_round_trips(x0 in -3.0f64..3.0, v0 in -2.0f64..2.0, c in -1.0f64..1.0) {
        let g = Grid::centered(0.0, 40.0, 256).unwrap();
        let psi = harmonic_eigenstate(0, 1.0, c, 1.0, &g).unwrap();
        let moved = displacement_unitary_apply(&psi, x0, v0, 1.0).unwrap();
        let back = displacement_unitary_inverse(&moved, x0, v0, 1.0).unwrap();
        prop_assert!(inner_product(&psi, &back).unwrap().norm() > 1.0 - 1e-10);
        prop_assert!((moved.norm_squared() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sweep_csv_round_trips_any_error_text(msg in "\\PC{0,40}", tf in 1e-9f64..1e-3) {
        let cells = vec![SweepCell { protocol: ProtocolKind::Faquad, t_final: tf, metrics: None, error: Some(msg.clone()) }];
        let text = sweep_csv(&cells).unwrap();
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::None).from_reader(text.as_bytes());
        let row = rdr.records().next().unwrap().unwrap();
        prop_assert_eq!(&row[5], msg.as_str());
        prop_assert_eq!(row[1].parse::<f64>().unwrap(), tf);
    }

    #[test]
    fn config_canonical_form_is_a_fixed_point(
        gamma in 1e-22f64..1e-19,
        span in 16.0f64..128.0,
        exp in 7u32..11,
        lo in 1e-8f64..1e-6,
        ratio in 1.0f64..100.0,
        points in 1usize..50,
        right in any::<bool>(),
    ) {
        let text = format!(
            "[scenario]\npreset = \"ion-be9\"\ngamma0_N = {gamma:e}\nwell = \"{}\"\n\n[protocol]\ntf_min_s = {lo:e}\ntf_max_s = {:e}\ntf_points = {points}\n\n[numerics]\nspan_a0 = {span}\nn_points = {}\n",
            if right { "right" } else { "left" },
            lo * ratio,
            1usize << exp,
        );
        let c = RunConfig::from_toml_str(&text).unwrap();
        let once = c.canonical().unwrap();
        let back = RunConfig::from_toml_str(&once).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.canonical().unwrap(), once);
        prop_assert_eq!(c.tf_grid().unwrap().unwrap().len(), points);
    }

    #[test]
    fn log_spacing_is_monotone(lo in 1e-9f64..1e-3, ratio in 1.0001f64..1e3, n in 2usize..60) {
        let g = log_spaced(lo, lo * ratio, n);
        prop_assert_eq!(g.len(), n);
        prop_assert!((g[0] / lo - 1.0).abs() < 1e-12);
        prop_assert!((g[n - 1] / (lo * ratio) - 1.0).abs() < 1e-12);
        prop_assert!(g.windows(2).all(|w| w[1] > w[0]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn norm_is_conserved(shift in -2.0f64..2.0, omega in 0.5f64..2.0, steps_per_period in 200usize..2000) {
        let g = Grid::centered(0.0, 40.0, 256).unwrap();
        let v: Vec<f64> = g.points().iter().map(|x| 0.5 * omega * omega * x * x).collect();
        let psi = harmonic_eigenstate(0, 1.0, shift, 1.0, &g).unwrap();
        let period = 2.0 * PI / omega;
        let dt = period / steps_per_period as f64;
        let r = propagate(&psi, &StaticPotential(v), 1.0, 3.0 * period, &PropagationConfig::new(dt)).unwrap();
        prop_assert!(r.max_norm_drift() < 1e-9);
    }

    #[test]
    fn harmonic_ladder_for_any_frequency(omega in 0.3f64..3.0, center in -2.0f64..2.0) {
        let g = Grid::centered(0.0, 40.0, 512).unwrap();
        let v: Vec<f64> = g.points().iter().map(|x| 0.5 * omega * omega * (x - center).powi(2)).collect();
        let sol = solve_stationary(&v, &g, 1.0, 6).unwrap();
        for (n, e) in sol.energies.iter().enumerate() {
            prop_assert!((e / (omega * (n as f64 + 0.5)) - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn compensated_rigid_transport_is_exact(d in 0.5f64..4.0, tf in 0.4f64..15.0) {
        let trap = RigidHarmonic { omega: 1.0, mass: 1.0 };
        let g = Grid::centered(d / 2.0, 40.0, 512).unwrap();
        let spec = build(ProtocolKind::PolynomialCompensated, 0.0, d, tf).unwrap();
        let v = FnPotential(|x: f64, t: f64| {
            let s = spec.drive_at(t, &trap, WellSide::Left).unwrap();
            trap.value(x, s.x0) - s.x0_ddot * x
        });
        let psi0 = harmonic_eigenstate(0, 1.0, 0.0, 1.0, &g).unwrap();
        let r = propagate(&psi0, &v, 1.0, tf, &PropagationConfig::for_period(2.0 * PI, tf)).unwrap();
        let target = harmonic_eigenstate(0, 1.0, d, 1.0, &g).unwrap();
        prop_assert!(inner_product(&target, &r.final_state).unwrap().norm() > 1.0 - 1e-8);
    }

    #[test]
    fn mirrored_double_well_mirrors_levels(a in 0.5f64..1.5, tilt in 0.01f64..0.2) {
        // V(x) = a (x^2 - 9)^2 / 81 + tilt x and its mirror image
        let g = Grid::centered(0.0, 24.0, 512).unwrap();
        let v = |s: f64| -> Vec<f64> {
            g.points().iter().map(|x| a * (x * x - 9.0).powi(2) / 81.0 * 20.0 + s * tilt * x).collect()
        };
        let l = solve_stationary(&v(1.0), &g, 1.0, 4).unwrap();
        let r = solve_stationary(&v(-1.0), &g, 1.0, 4).unwrap();
        for (x, y) in l.energies.iter().zip(&r.energies) {
            prop_assert!((x - y).abs() < 1e-8 * x.abs().max(1.0));
        }
        let flipped: Vec<_> = r.states[0].amplitudes().iter().rev().cloned().collect();
        // reversal maps x_i to -x_i shifted by one grid point
        let mut shifted = flipped.clone();
        shifted.rotate_right(1);
        let w = Wavefunction::new(g, shifted).unwrap();
        prop_assert!(inner_product(&l.states[0], &w).unwrap().norm() > 1.0 - 1e-8);
    }
}
