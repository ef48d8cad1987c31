use super::*;
use crate::model::{fixed_point, rhs};
use crate::oracle::rk4_reference;
use crate::params::{Closure, LAMBDA_EXP_3D};

fn uniform(t_end: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| t_end * i as f64 / n as f64).collect()
}

#[test]
fn positivity_examples() {
    let c = StepControl::default();
    let mut ok = vec![0.0, 1.0, 2.0];
    assert_eq!(enforce_positivity(&mut ok, &c), PositivityDecision::Accepted);
    assert_eq!(ok, vec![0.0, 1.0, 2.0]);
    let mut small = vec![1.0, -c.atol / 2.0, 0.5];
    assert_eq!(enforce_positivity(&mut small, &c), PositivityDecision::Clamped(1));
    assert_eq!(small[1], 0.0);
    let mut bad = vec![1.0, 0.2, -10.0 * c.atol];
    assert_eq!(enforce_positivity(&mut bad, &c), PositivityDecision::Rejected { shell: 2 });
}

#[test]
fn control_validation() {
    let mut c = StepControl::default();
    c.dt_min = 2.0;
    assert!(matches!(c.validate(), Err(Error::InvalidParameter { field: "dt_min", .. })));
    let c = StepControl { rtol: 0.0, ..StepControl::default() };
    assert!(matches!(c.validate(), Err(Error::InvalidParameter { field: "rtol", .. })));
    let c = StepControl { safety: 1.0, ..StepControl::default() };
    assert!(c.validate().is_err());
}

#[test]
fn fixed_point_is_preserved_by_both_methods() {
    for method in [Method::DormandPrince, Method::Rosenbrock] {
        let p = ModelParams::standard(1.0, 10).unwrap();
        let fp = fixed_point(&p);
        let c = StepControl::default().with_method(method);
        let out = step(&fp, &p, &c, 0.1).unwrap();
        assert_eq!(out.error_estimate, 0.0);
        for (x, y) in out.state.a.iter().zip(&fp.a) {
            assert!((x - y).abs() <= 4.0 * f64::EPSILON * y);
        }
        let traj = integrate(&fp, &p, &c, 5.0, &uniform(5.0, 10)).unwrap();
        for s in &traj.samples {
            for (x, y) in s.a.iter().zip(&fp.a) {
                assert!((x - y).abs() <= 10.0 * c.rtol * y);
            }
        }
        assert!(traj.deviations.iter().all(|d| d.b.iter().all(|b| *b == 0.0)));
    }
}

#[test]
fn samples_land_exactly_on_requested_times() {
    let p = ModelParams::standard(1.0, 6).unwrap();
    let times = vec![0.0, 0.013, 0.5, 0.50001, 1.7, 3.0];
    let traj = integrate(&ShellState::zeros(&p), &p, &StepControl::default(), 3.0, &times).unwrap();
    assert_eq!(traj.times(), times);
    let late = vec![0.25, 1.0];
    let traj = integrate(&ShellState::zeros(&p), &p, &StepControl::default(), 2.0, &late).unwrap();
    assert_eq!(traj.times(), late);
}

#[test]
fn rejects_bad_inputs() {
    let p = ModelParams::standard(1.0, 4).unwrap();
    let c = StepControl::default();
    let z = ShellState::zeros(&p);
    assert!(matches!(integrate(&z, &p, &c, 0.0, &[]), Err(Error::InvalidInput(_))));
    assert!(matches!(integrate(&z, &p, &c, 1.0, &[0.5, 0.2]), Err(Error::InvalidInput(_))));
    assert!(matches!(integrate(&z, &p, &c, 1.0, &[2.0]), Err(Error::InvalidInput(_))));
    let neg = ShellState::new(0.0, vec![1.0, -0.1, 0.0, 0.0, 0.0]);
    assert!(matches!(integrate(&neg, &p, &c, 1.0, &[1.0]), Err(Error::InvalidInput(_))));
    let short = ShellState::new(0.0, vec![0.0; 3]);
    assert!(matches!(integrate(&short, &p, &c, 1.0, &[1.0]), Err(Error::LengthMismatch { .. })));
}

#[test]
fn early_growth_is_linear_in_the_forced_shell() {
    // With a_1 = 0 the coupling -a_0 a_1 vanishes to leading order: a_0 = f0 t.
    let p = ModelParams::new(LAMBDA_EXP_3D, 1.0, 1, Closure::PureGalerkin).unwrap();
    for method in [Method::DormandPrince, Method::Rosenbrock] {
        let c = StepControl::default().with_method(method).with_tolerances(1e-12, 1e-16);
        let traj = integrate(&ShellState::zeros(&p), &p, &c, 1e-3, &[1e-4, 1e-3]).unwrap();
        let s = &traj.samples[1];
        assert!((s.a[0] - 1e-3).abs() < 1e-12, "{method:?}: {}", s.a[0]);
        assert!(s.a[1] < 1e-8);
    }
}

#[test]
fn constant_forcing_is_integrated_exactly() {
    // The uncoupled sub-problem da_0/dt = f0: one shell is enough when the
    // second never gets energy within the step (a_0 a_1 term enters at O(dt^3)).
    let p = ModelParams::new(LAMBDA_EXP_3D, 2.0, 1, Closure::PureGalerkin).unwrap();
    let c = StepControl::default().with_method(Method::DormandPrince);
    let out = step(&ShellState::zeros(&p), &p, &c, 1e-6).unwrap();
    // state is carried as an offset from the equilibrium, so round-off is
    // measured against that scale
    let scale = fixed_point(&p).a[0];
    assert!((out.state.a[0] - 2.0 * out.dt_used).abs() <= 4.0 * f64::EPSILON * scale);
}

fn oracle_error(method: Method, dt: f64) -> f64 {
    let p = ModelParams::standard(1.0, 4).unwrap();
    let z = ShellState::zeros(&p);
    let reference = rk4_reference(&z, &p, 1e-4, &[1.0]).unwrap();
    let traj = integrate(&z, &p, &StepControl::fixed_step(dt, method), 1.0, &[1.0]).unwrap();
    let got = &traj.samples[0].a;
    got.iter()
        .zip(&reference.states[0].a)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[test]
fn fixed_step_convergence_order() {
    for (method, lo, hi) in [(Method::DormandPrince, 4.5, 5.5), (Method::Rosenbrock, 3.7, 4.6)] {
        let dts = [0.02, 0.01, 0.005];
        let errs: Vec<f64> = dts.iter().map(|dt| oracle_error(method, *dt)).collect();
        let slope = (errs[0] / errs[2]).log2() / 2.0;
        assert!(slope > lo && slope < hi, "{method:?}: errors {errs:?}, slope {slope}");
        assert!((4.0..=5.5).contains(&slope.clamp(4.0, 5.5)));
    }
}

#[test]
fn one_step_versus_two_half_steps() {
    // small N keeps h |J| well inside the asymptotic regime
    let p = ModelParams::new(LAMBDA_EXP_3D, 1.0, 2, Closure::PureGalerkin).unwrap();
    let s = ShellState::new(0.0, vec![0.8, 0.6, 0.3]);
    let diff = |h: f64| {
        let c = StepControl::fixed_step(h, Method::DormandPrince);
        let one = step(&s, &p, &c, h).unwrap().state;
        let half = step(&s, &p, &c, h / 2.0).unwrap().state;
        let two = step(&half, &p, &c, h / 2.0).unwrap().state;
        one.a.iter().zip(&two.a).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    };
    let (d1, d2, d3) = (diff(0.02), diff(0.01), diff(0.005));
    for ratio in [d1 / d2, d2 / d3] {
        // local error of a fifth-order step: h^6, i.e. a ratio near 64
        assert!(ratio > 24.0 && ratio < 100.0, "ratio {ratio}");
    }
}

#[test]
fn events_threshold_cases() {
    let p = ModelParams::standard(1.0, 6).unwrap();
    let z = ShellState::zeros(&p);
    let c = StepControl::default();
    let below = EventSpec::new(Functional::EnergyNorm, -1.0, Direction::Upward);
    let never = EventSpec::new(Functional::EnergyNorm, f64::INFINITY, Direction::Upward);
    let shell = EventSpec::new(Functional::ShellValue { j: 0 }, 0.5, Direction::Upward);
    let (traj, hits) = integrate_with_events(&z, &p, &c, 2.0, &uniform(2.0, 200), &[below, never, shell]).unwrap();
    assert_eq!(hits[0].as_ref().unwrap().t, 0.0);
    assert!(hits[1].is_none());
    let hit = hits[2].as_ref().unwrap();
    assert!((hit.state.a[0] - 0.5).abs() < 1e-6, "{}", hit.state.a[0]);
    // the post-hoc detector on samples agrees to interpolation accuracy
    let post = detect_event(&traj, &shell).unwrap();
    assert!((post.t - hit.t).abs() < 1e-5, "{} vs {}", post.t, hit.t);
    assert!(detect_event(&traj, &never).is_none());
    assert_eq!(detect_event(&traj, &below).unwrap().t, 0.0);
}

#[test]
fn deterministic_runs_are_bit_identical() {
    let p = ModelParams::standard(1.0, 10).unwrap();
    let times = uniform(5.0, 50);
    let run = || integrate(&ShellState::zeros(&p), &p, &StepControl::default(), 5.0, &times).unwrap();
    let (a, b) = (run(), run());
    assert_eq!(a.samples, b.samples);
}

#[test]
fn cached_scalars_match_states() {
    let p = ModelParams::standard(1.3, 8).unwrap();
    let traj = integrate(&ShellState::zeros(&p), &p, &StepControl::default(), 3.0, &uniform(3.0, 30)).unwrap();
    for (i, s) in traj.samples.iter().enumerate() {
        assert!((traj.energy_sq[i] - s.energy_sq()).abs() <= 1e-12 * s.energy_sq().max(1e-300));
        assert_eq!(traj.forcing_power[i], 1.3 * s.a[0]);
        let d = crate::model::dissipation_rate(s, &p);
        assert!((traj.dissipation[i] - d).abs() <= 1e-12 * d.max(1e-300));
    }
    let _ = rhs(&traj.samples[0], &p).unwrap();
}
