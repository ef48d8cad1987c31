//! The acceptance suite: twelve numbered criteria, each with its own
//! tolerance, shared by `dyadic verify` and the `acceptance` test target.

use std::fmt::Write as _;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::diagnostics::{
    check_lyapunov_decrease_all_pairs, check_partial_energy_inequality, constants, decay_fit,
    energy_balance_residual, mean_dissipation, spectrum_fit, time_average, DiagnosticsConstants,
};
use crate::integrator::{integrate, StepControl, Trajectory};
use crate::model::{fixed_point, rhs};
use crate::oracle::{integrating_factor_reference, integrating_factor_step, rk4_reference, series_partial_sums};
use crate::params::{Closure, ModelParams, LAMBDA_EXP_3D};
use crate::state::ShellState;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tier {
    /// Small-N subset.
    Fast,
    /// Every criterion.
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: &'static str,
    pub anchor: &'static str,
    pub pass: bool,
    pub detail: String,
}

pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub anchor: &'static str,
    pub fast: bool,
    check: fn() -> (bool, String),
}

impl Criterion {
    pub fn run(&self) -> CriterionOutcome {
        let (pass, detail) = (self.check)();
        CriterionOutcome { id: self.id, name: self.name, anchor: self.anchor, pass, detail }
    }
}

pub fn criteria() -> Vec<Criterion> {
    let c = |id, name, anchor, fast, check| Criterion { id, name, anchor, fast, check };
    vec![
        c(1, "fixed-point residual", "unique-fixed-point", true, fixed_point_residual as fn() -> (bool, String)),
        c(2, "oracle equivalence", "galerkin-dynamics", true, oracle_equivalence),
        c(3, "galerkin energy identity", "energy-identity", true, galerkin_energy_identity),
        c(4, "positivity", "positivity", true, positivity),
        c(5, "stability constants", "stability-constants", true, stability_constants),
        c(6, "exponential attraction", "exponential-attraction", false, exponential_attraction),
        c(7, "lyapunov decrease", "lyapunov-decrease", false, lyapunov_decrease),
        c(8, "partial-energy inequality", "partial-energy-inequality", false, partial_energy_inequality),
        c(9, "kolmogorov spectrum", "kolmogorov-spectrum", false, kolmogorov_spectrum),
        c(10, "mean dissipation", "anomalous-dissipation", false, mean_dissipation_rate),
        c(11, "blow-up proxy", "critical-norm-divergence", false, blowup_proxy),
        c(12, "integrating-factor oracle", "variation-of-constants", true, integrating_factor_oracle),
    ]
}

/// Runs the criteria of `tier` in order.
pub fn run_criteria(tier: Tier) -> Vec<CriterionOutcome> {
    criteria().iter().filter(|c| tier == Tier::Full || c.fast).map(Criterion::run).collect()
}

/// One line per criterion.
pub fn format_table(outcomes: &[CriterionOutcome]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<3} {:<28} {:<27} {:<6} detail", "id", "criterion", "anchor", "result");
    for o in outcomes {
        let status = if o.pass { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{:<3} {:<28} {:<27} {:<6} {}", o.id, o.name, o.anchor, status, o.detail);
    }
    out
}

fn uniform_grid(t_end: f64, step: f64) -> Vec<f64> {
    let n = (t_end / step).round() as usize;
    (0..=n).map(|i| if i == n { t_end } else { i as f64 * step }).collect()
}

fn normalized_params(n: usize) -> ModelParams {
    ModelParams::standard(ModelParams::normalized_forcing(LAMBDA_EXP_3D), n).expect("valid parameters")
}

/// The standard run: normalized forcing, `N = 18`, zero start, samples every 0.01 up to 30.
pub fn standard_run() -> &'static Trajectory {
    static RUN: OnceLock<Trajectory> = OnceLock::new();
    RUN.get_or_init(|| {
        let p = normalized_params(18);
        integrate(&ShellState::zeros(&p), &p, &StepControl::default(), 30.0, &uniform_grid(30.0, 0.01))
            .expect("standard run integrates")
    })
}

/// Long run from rest with `f0 = 1`, samples every 0.01 up to 200.
pub fn long_run(n_shells: usize) -> Trajectory {
    let p = ModelParams::standard(1.0, n_shells).expect("valid parameters");
    integrate(&ShellState::zeros(&p), &p, &StepControl::default(), 200.0, &uniform_grid(200.0, 0.01))
        .expect("long run integrates")
}

fn long_run_20() -> &'static Trajectory {
    static RUN: OnceLock<Trajectory> = OnceLock::new();
    RUN.get_or_init(|| long_run(20))
}

fn fixed_point_residual() -> (bool, String) {
    let mut worst = 0.0f64;
    for f0 in [ModelParams::normalized_forcing(LAMBDA_EXP_3D), 1.0] {
        for n in [10, 20] {
            let p = ModelParams::standard(f0, n).expect("valid parameters");
            let a = fixed_point(&p);
            let r = rhs(&a, &p).expect("matching length");
            for (j, rj) in r.iter().enumerate() {
                // relative to the largest term balanced in row j
                let gain = if j > 0 { p.lambda_pow(j as f64 - 1.0) * a.a[j - 1] * a.a[j - 1] } else { p.forcing(0) };
                worst = worst.max(rj.abs() / gain);
            }
        }
    }
    (worst <= 1e-10, format!("max relative rhs component {worst:.3e} (tol 1e-10)"))
}

fn oracle_equivalence() -> (bool, String) {
    let p = ModelParams::standard(1.0, 4).expect("valid parameters");
    let z = ShellState::zeros(&p);
    let reference = rk4_reference(&z, &p, 1e-5, &[2.0]).expect("oracle integrates");
    let traj = integrate(&z, &p, &StepControl::default(), 2.0, &[2.0]).expect("integrates");
    let worst = traj.samples[0]
        .a
        .iter()
        .zip(&reference.states[0].a)
        .map(|(x, y)| (x - y).abs() / y.abs())
        .fold(0.0, f64::max);
    (worst <= 1e-7, format!("max componentwise relative difference at T=2: {worst:.3e} (tol 1e-7)"))
}

fn galerkin_energy_identity() -> (bool, String) {
    let p = ModelParams::new(LAMBDA_EXP_3D, 1.0, 12, Closure::PureGalerkin).expect("valid parameters");
    let traj = integrate(&ShellState::zeros(&p), &p, &StepControl::default(), 10.0, &uniform_grid(10.0, 1e-3))
        .expect("integrates");
    let r = energy_balance_residual(&traj, 0.0, 10.0).expect("window holds samples").abs();
    (r <= 1e-6, format!("relative residual {r:.3e} (tol 1e-6)"))
}

/// Random nonnegative state around the fixed point scale, with some shells empty.
pub fn random_nonnegative_state(params: &ModelParams, rng: &mut ChaCha8Rng) -> ShellState {
    let a = fixed_point(params)
        .a
        .iter()
        .map(|x| if rng.gen_bool(0.2) { 0.0 } else { 2.0 * x * rng.gen::<f64>() })
        .collect();
    ShellState::new(0.0, a)
}

fn positivity() -> (bool, String) {
    let p = ModelParams::standard(1.0, 15).expect("valid parameters");
    let grid = uniform_grid(10.0, 0.01);
    let mut worst = f64::INFINITY;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let init = random_nonnegative_state(&p, &mut rng);
        let traj = integrate(&init, &p, &StepControl::default(), 10.0, &grid).expect("integrates");
        worst = worst.min(traj.min_amplitude());
    }
    (worst >= 0.0, format!("min amplitude over 20 runs: {worst:.3e}"))
}

fn stability_constants() -> (bool, String) {
    let p = ModelParams::standard(1.0, 4).expect("valid parameters");
    let c = constants(&p).expect("admissible lambda");
    let alpha = 2.0 - (15.0f64 / 16.0).exp2();
    let brute = series_partial_sums(p.lambda(), 10_000);
    let e_alpha = (c.alpha - alpha).abs();
    let e_series = (c.series - brute).abs();
    let e_beta = (c.beta_normalized - alpha / brute).abs();
    let worst = e_alpha.max(e_series).max(e_beta);
    (
        worst <= 1e-9,
        format!("alpha {:.10}, beta {:.10}, max deviation from brute force {worst:.1e} (tol 1e-9)", c.alpha, c.beta_normalized),
    )
}

fn exponential_attraction() -> (bool, String) {
    let traj = standard_run();
    let c = constants(&traj.params).expect("admissible lambda");
    match decay_fit(traj, &c, 2.0, 30.0, 0.01) {
        Ok(fit) => (
            fit.bound_holds && fit.rate_normalized >= c.beta_normalized,
            format!(
                "rate {:.4} vs beta {:.4}; max |b|^2 / envelope {:.3e} (tol 1.01)",
                fit.rate_normalized, c.beta_normalized, fit.bound_ratio
            ),
        ),
        Err(e) => (false, e.to_string()),
    }
}

/// All-pairs decrease check on the standard run with the given constants.
pub fn lyapunov_decrease_with(consts: &DiagnosticsConstants) -> (bool, String) {
    let traj = standard_run();
    match check_lyapunov_decrease_all_pairs(traj, consts, 0.0, 30.0) {
        Ok(r) => (
            r.passed(),
            format!(
                "{} pairs, worst slack / |b(t1)|^2 {:.3e} (tol 1e-3), guard {:.2} of allowance",
                r.value("pairs").unwrap_or(0.0),
                r.value("worst_normalized_slack").unwrap_or(f64::NAN),
                r.value("worst_guard_fraction").unwrap_or(f64::NAN)
            ),
        ),
        Err(e) => (false, e.to_string()),
    }
}

fn lyapunov_decrease() -> (bool, String) {
    lyapunov_decrease_with(&constants(&standard_run().params).expect("admissible lambda"))
}

fn partial_energy_inequality() -> (bool, String) {
    let traj = standard_run();
    let k = traj.params.n_shells() - 2;
    let mut failures = 0;
    let mut worst = f64::INFINITY;
    for i in 0..50 {
        // interior sample times 0.3, 0.88, ... 28.72, all with two neighbours each side
        let t = 0.3 + i as f64 * 0.58;
        let t = (t * 100.0).round() / 100.0;
        match check_partial_energy_inequality(traj, k, t, 0.01) {
            Ok(r) => {
                let slack = r.value("slack_first").unwrap_or(f64::NAN);
                if !(slack >= -r.tolerance) {
                    failures += 1;
                }
                worst = worst.min(slack + r.tolerance);
            }
            Err(_) => failures += 1,
        }
    }
    (failures == 0, format!("50 times, k = {k}: {failures} failures, min slack + tol_fd {worst:.3e}"))
}

fn kolmogorov_spectrum() -> (bool, String) {
    match spectrum_fit(long_run_20(), 100.0, 200.0, Some((3, 15))) {
        Ok(fit) => {
            let ratio = fit.prefactor() / (5.0f64 / 6.0).exp2();
            let pass = (fit.slope + 5.0 / 3.0).abs() <= 0.02 && (ratio - 1.0).abs() <= 0.02;
            (pass, format!("slope {:.6} (target -5/3 +- 0.02), prefactor / 2^(5/6) {ratio:.6} (+- 2%)", fit.slope))
        }
        Err(e) => (false, e.to_string()),
    }
}

fn mean_dissipation_rate() -> (bool, String) {
    match mean_dissipation(long_run_20(), 100.0, 200.0) {
        Ok(d) => {
            let ratio = d / (5.0f64 / 12.0).exp2();
            ((ratio - 1.0).abs() <= 0.01, format!("mean dissipation {d:.6}, ratio to 2^(5/12) {ratio:.6} (+- 1%)"))
        }
        Err(e) => (false, e.to_string()),
    }
}

fn blowup_proxy() -> (bool, String) {
    let mut h56 = Vec::new();
    let mut s07 = Vec::new();
    for n in [10usize, 15, 20] {
        let traj = if n == 20 { long_run_20().clone() } else { long_run(n) };
        let avg = |s: f64| time_average(&traj, 100.0, 200.0, |i| traj.samples[i].sobolev_sq(s)).expect("window");
        h56.push((n, avg(5.0 / 6.0)));
        s07.push(avg(0.7));
    }
    let ratios: Vec<f64> = h56.iter().map(|(n, v)| v / ((*n as f64 + 1.0) * (5.0f64 / 6.0).exp2())).collect();
    let linear = ratios.iter().all(|r| (r - 1.0).abs() <= 0.01);
    let growing = h56.windows(2).all(|w| w[1].1 > w[0].1);
    let sub_change = (s07[2] - s07[1]).abs() / s07[1];
    let pass = linear && growing && sub_change <= 0.01;
    (
        pass,
        format!(
            "||a||_(5/6)^2 / ((N+1) 2^(5/6)) = {:.5}, {:.5}, {:.5}; ||a||_0.7^2 change N=15->20 {:.2}% (tol 1%)",
            ratios[0],
            ratios[1],
            ratios[2],
            100.0 * sub_change
        ),
    )
}

fn integrating_factor_oracle() -> (bool, String) {
    let p = ModelParams::standard(1.0, 4).expect("valid parameters");
    let z = ShellState::zeros(&p);
    let reference = rk4_reference(&z, &p, 1e-5, &[1.0]).expect("oracle integrates");
    let err = |dt: f64| {
        let s = &integrating_factor_reference(&z, &p, dt, &[1.0]).expect("divides").states[0];
        s.a.iter().zip(&reference.states[0].a).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    };
    let errs = [err(1e-3), err(5e-4), err(2.5e-4)];
    let orders: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let first_order = orders.iter().all(|o| (o - 1.0).abs() <= 0.1);

    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut negative = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=20);
        let p = ModelParams::standard(rng.gen_range(0.01..10.0), n).expect("valid parameters");
        let s = random_nonnegative_state(&p, &mut rng);
        let dt = 10f64.powf(rng.gen_range(-6.0..1.0));
        if integrating_factor_step(&s, &p, dt).a.iter().any(|x| !(*x >= 0.0)) {
            negative += 1;
        }
    }
    (
        first_order && negative == 0,
        format!("observed orders {:.3}, {:.3} (target 1 +- 0.1); {negative} of 1000 steps negative", orders[0], orders[1]),
    )
}
