//! Diagnostics evaluated on the standard run and on synthetic trajectories
//! with known answers.

use dyadic::diagnostics::{
    check_lyapunov_decrease, check_partial_energy_inequality, constants, cube_56_integral, decay_fit,
    hs_square_integral, mean_dissipation, spectrum_fit,
};
use dyadic::integrator::Trajectory;
use dyadic::oracle::{integrating_factor_reference, rk4_reference};
use dyadic::runner::verify::standard_run;
use dyadic::{fixed_point, ModelParams, ShellState, StepControl, LAMBDA_EXP_3D};

fn constant_trajectory(f0: f64, n: usize, t_end: f64, samples: usize) -> Trajectory {
    let p = ModelParams::standard(f0, n).unwrap();
    let fp = fixed_point(&p);
    let states = (0..=samples)
        .map(|i| ShellState::new(t_end * i as f64 / samples as f64, fp.a.clone()))
        .collect();
    Trajectory::from_states(p, StepControl::default(), states).unwrap()
}

#[test]
fn partial_energy_inequality_holds_across_shells() {
    let traj = standard_run();
    for k in [0, 1, 4, 9, 14, 17, 18] {
        for t in [0.5, 3.0, 12.0, 25.0] {
            let r = check_partial_energy_inequality(traj, k, t, 0.01).unwrap();
            assert!(r.passed(), "k = {k}, t = {t}: {r:?}");
        }
    }
}

#[test]
fn derivative_estimate_is_second_order_in_width() {
    let traj = standard_run();
    let d = |w: f64| check_partial_energy_inequality(traj, 3, 1.0, w).unwrap().value("derivative").unwrap();
    let (d1, d2, d4) = (d(0.01), d(0.02), d(0.04));
    let ratio = (d4 - d2) / (d2 - d1);
    assert!((ratio - 4.0).abs() < 0.5, "halving ratio {ratio}");
}

#[test]
fn inequality_rejects_bad_inputs() {
    let traj = standard_run();
    assert!(check_partial_energy_inequality(traj, 19, 5.0, 0.01).is_err());
    assert!(check_partial_energy_inequality(traj, 3, 5.0, 0.0).is_err());
    assert!(check_partial_energy_inequality(traj, 3, 5.005, 0.01).is_err());
    assert!(check_partial_energy_inequality(traj, 3, 0.01, 0.01).is_err());
}

#[test]
fn decrease_holds_on_sample_pairs() {
    let traj = standard_run();
    let c = constants(&traj.params).unwrap();
    for (t1, t2) in [(0.0, 0.01), (0.0, 30.0), (1.0, 2.0), (7.5, 22.5), (29.0, 30.0)] {
        let r = check_lyapunov_decrease(traj, &c, t1, t2).unwrap();
        assert!(r.passed(), "[{t1}, {t2}]: {r:?}");
    }
}

#[test]
fn decay_rate_beats_the_guaranteed_rate() {
    let traj = standard_run();
    let c = constants(&traj.params).unwrap();
    let fit = decay_fit(traj, &c, 2.0, 30.0, 0.01).unwrap();
    assert!(fit.rate_normalized >= c.beta_normalized);
    assert!(fit.bound_holds);
    assert!(fit.r_squared > 0.9);
}

#[test]
fn fixed_point_h56_integral_counts_shells() {
    let f0 = ModelParams::normalized_forcing(LAMBDA_EXP_3D);
    for n in [5, 10, 20, 30] {
        let traj = constant_trajectory(f0, n, 3.0, 30);
        let v = hs_square_integral(&traj, 5.0 / 6.0, 0.0, 3.0).unwrap();
        let want = 3.0 * (n + 1) as f64;
        assert!((v - want).abs() <= 1e-12 * want, "N = {n}: {v}");
    }
}

#[test]
fn cube_56_integral_grows_with_truncation() {
    let f0 = ModelParams::normalized_forcing(LAMBDA_EXP_3D);
    let values: Vec<f64> = [4, 8, 16, 32]
        .iter()
        .map(|&n| cube_56_integral(&constant_trajectory(f0, n, 2.0, 20), 0.0, 2.0).unwrap())
        .collect();
    assert!(values.windows(2).all(|w| w[1] > w[0]), "{values:?}");
    // (N + 1)^{3/2} growth: doubling N + 1 roughly multiplies by 2^{3/2}
    let r = values[3] / values[2];
    assert!((r - (33.0f64 / 17.0).powf(1.5)).abs() < 1e-9);
}

#[test]
fn fixed_point_spectrum_and_dissipation_are_exact() {
    let traj = constant_trajectory(1.0, 20, 4.0, 40);
    let fit = spectrum_fit(&traj, 0.0, 4.0, Some((3, 15))).unwrap();
    assert!((fit.slope + 5.0 / 3.0).abs() < 1e-12);
    assert!((fit.prefactor() / (5.0f64 / 6.0).exp2() - 1.0).abs() < 1e-12);
    let d = mean_dissipation(&traj, 0.0, 4.0).unwrap();
    assert!((d / (5.0f64 / 12.0).exp2() - 1.0).abs() < 1e-12);
}

#[test]
fn integrating_factor_reference_is_first_order() {
    let p = ModelParams::standard(1.0, 4).unwrap();
    let z = ShellState::zeros(&p);
    let reference = rk4_reference(&z, &p, 1e-5, &[0.5, 1.0]).unwrap();
    let err = |dt: f64| {
        let got = integrating_factor_reference(&z, &p, dt, &[0.5, 1.0]).unwrap();
        got.states[1].a.iter().zip(&reference.states[1].a).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    };
    let (e1, e2, e4) = (err(2.5e-4), err(5e-4), err(1e-3));
    assert!(e1 < e2 && e2 < e4);
    for ratio in [e4 / e2, e2 / e1] {
        assert!((ratio - 2.0).abs() < 0.2, "ratio {ratio}");
    }
}

#[test]
fn decrease_check_skips_pairs_at_the_equilibrium() {
    let traj = constant_trajectory(ModelParams::normalized_forcing(LAMBDA_EXP_3D), 8, 1.0, 10);
    let c = constants(&traj.params).unwrap();
    let r = dyadic::diagnostics::check_lyapunov_decrease_all_pairs(&traj, &c, 0.0, 1.0).unwrap();
    assert!(r.passed());
    assert_eq!(r.value("pairs"), Some(0.0));
    assert_eq!(r.value("pairs_at_equilibrium"), Some(55.0));
}
