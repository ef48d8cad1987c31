//! Deliberately naive references the adaptive integrator is checked against.
//! Nothing here shares code with the integrator: the vector field is the
//! amplitude form from [`crate::model`], steps are fixed and unclamped.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{closure_amplitude, rhs_into};
use crate::params::ModelParams;
use crate::state::ShellState;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub states: Vec<ShellState>,
    pub method: &'static str,
    pub dt: f64,
}

/// Classical fixed-step RK4 from `initial`, reporting the state at every
/// sample time. Each gap between consecutive stops must be a whole number of
/// steps.
pub fn rk4_reference(initial: &ShellState, params: &ModelParams, dt: f64, sample_times: &[f64]) -> Result<OracleResult> {
    params.check_len(initial.len())?;
    if !(dt > 0.0) {
        return Err(Error::InvalidInput(format!("dt must be positive, got {dt}")));
    }
    let n = initial.len();
    let mut a = initial.a.clone();
    let mut t = initial.t;
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut states = Vec::with_capacity(sample_times.len());
    for &stop in sample_times {
        let span = stop - t;
        let steps_f = span / dt;
        let steps = steps_f.round();
        if span < 0.0 || (steps_f - steps).abs() > 1e-6 {
            return Err(Error::InvalidInput(format!(
                "dt = {dt} does not divide the interval [{t}, {stop}]"
            )));
        }
        let t_start = t;
        for i in 0..steps as usize {
            rhs_into(&a, params, &mut k1);
            for j in 0..n {
                tmp[j] = a[j] + 0.5 * dt * k1[j];
            }
            rhs_into(&tmp, params, &mut k2);
            for j in 0..n {
                tmp[j] = a[j] + 0.5 * dt * k2[j];
            }
            rhs_into(&tmp, params, &mut k3);
            for j in 0..n {
                tmp[j] = a[j] + dt * k3[j];
            }
            rhs_into(&tmp, params, &mut k4);
            for j in 0..n {
                a[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            }
            if a.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFiniteState { t: t_start + (i + 1) as f64 * dt });
            }
        }
        t = stop;
        states.push(ShellState::new(stop, a.clone()));
    }
    Ok(OracleResult { states, method: "rk4", dt })
}

/// One step of the variation-of-constants form with every neighbour frozen
/// at its value at the start of the step:
///
/// ```text
/// a_j <- a_j e^{-r dt} + (f_j + lambda^{j-1} a_{j-1}^2) (1 - e^{-r dt}) / r,   r = lambda^j a_{j+1}
/// ```
///
/// The update is a sum of nonnegative terms for nonnegative input.
pub fn integrating_factor_step(state: &ShellState, params: &ModelParams, dt: f64) -> ShellState {
    let n = params.n_shells();
    let a = &state.a;
    let out = (0..=n)
        .map(|j| {
            let next = if j < n { a[j + 1] } else { closure_amplitude(a[n], params) };
            let rate = params.lambda_pow(j as f64) * next;
            let source = params.forcing(j)
                + if j > 0 { params.lambda_pow(j as f64 - 1.0) * a[j - 1] * a[j - 1] } else { 0.0 };
            if rate == 0.0 {
                a[j] + dt * source
            } else {
                let x = rate * dt;
                a[j] * (-x).exp() + source * (-(-x).exp_m1()) / rate
            }
        })
        .collect();
    ShellState::new(state.t + dt, out)
}

/// Fixed-step composition of [`integrating_factor_step`] up to each sample time.
pub fn integrating_factor_reference(
    initial: &ShellState,
    params: &ModelParams,
    dt: f64,
    sample_times: &[f64],
) -> Result<OracleResult> {
    params.check_len(initial.len())?;
    let mut s = initial.clone();
    let mut states = Vec::with_capacity(sample_times.len());
    for &stop in sample_times {
        let steps_f = (stop - s.t) / dt;
        let steps = steps_f.round();
        if steps_f < -1e-9 || (steps_f - steps).abs() > 1e-6 {
            return Err(Error::InvalidInput(format!("dt = {dt} does not divide [{}, {stop}]", s.t)));
        }
        for _ in 0..steps as usize {
            s = integrating_factor_step(&s, params, dt);
        }
        s.t = stop;
        states.push(s.clone());
    }
    Ok(OracleResult { states, method: "integrating_factor", dt })
}

/// Direct partial sum `sum_{j < terms} lambda^{1/3 - 2j/3} (j + 1)`.
pub fn series_partial_sums(lambda: f64, terms: usize) -> f64 {
    (0..terms)
        .map(|j| lambda.powf(1.0 / 3.0 - 2.0 * j as f64 / 3.0) * (j as f64 + 1.0))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixed_point;
    use crate::params::{Closure, LAMBDA_EXP_3D};

    #[test]
    fn rk4_keeps_fixed_point() {
        let p = ModelParams::standard(1.0, 4).unwrap();
        let fp = fixed_point(&p);
        let r = rk4_reference(&fp, &p, 1e-3, &[0.5, 1.0]).unwrap();
        for s in &r.states {
            for (x, y) in s.a.iter().zip(&fp.a) {
                assert!((x - y).abs() <= 1e-13 * y.max(1e-3), "{x} vs {y}");
            }
        }
    }

    #[test]
    fn rk4_linear_growth_without_coupling() {
        // N = 1 with a_1 = 0 stays uncoupled while a_0 grows; over a tiny horizon
        // a_1 ~ t^3/3 and a_0 = t - O(t^5).
        let p = ModelParams::new(LAMBDA_EXP_3D, 1.0, 1, Closure::PureGalerkin).unwrap();
        let r = rk4_reference(&ShellState::zeros(&p), &p, 1e-4, &[1e-3]).unwrap();
        assert!((r.states[0].a[0] - 1e-3).abs() < 1e-15);
        assert!(r.states[0].a[1] < 1e-9);
    }

    #[test]
    fn rk4_rejects_non_dividing_dt() {
        let p = ModelParams::standard(1.0, 3).unwrap();
        assert!(matches!(
            rk4_reference(&ShellState::zeros(&p), &p, 0.3, &[1.0]),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn integrating_factor_zero_state() {
        let p = ModelParams::standard(2.0, 5).unwrap();
        let s = integrating_factor_step(&ShellState::zeros(&p), &p, 0.01);
        assert_eq!(s.a[0], 2.0 * 0.01);
        assert!(s.a[1..].iter().all(|x| *x == 0.0));
    }

    #[test]
    fn integrating_factor_is_first_order_consistent() {
        let p = ModelParams::standard(1.0, 4).unwrap();
        let s = ShellState::new(0.0, vec![0.9, 0.5, 0.3, 0.1, 0.05]);
        let mut r = vec![0.0; 5];
        rhs_into(&s.a, &p, &mut r);
        let mut prev = f64::INFINITY;
        for dt in [1e-3, 1e-4, 1e-5] {
            let next = integrating_factor_step(&s, &p, dt);
            let dev = (0..5).map(|j| ((next.a[j] - s.a[j]) / dt - r[j]).abs()).fold(0.0, f64::max);
            assert!(dev < prev * 0.2, "dt={dt}: {dev}");
            prev = dev;
        }
        assert!(prev < 1e-3);
    }

    #[test]
    fn series_examples() {
        let lam = LAMBDA_EXP_3D.exp2();
        assert!((series_partial_sums(lam, 1) - 1.781_797_436_280_678_5).abs() < 1e-15);
        let closed = 3.797_101_091_432_252_6;
        assert!((series_partial_sums(lam, 10_000) - closed).abs() <= 1e-9);
        let mut prev = 0.0;
        for terms in 1..60 {
            let s = series_partial_sums(lam, terms);
            assert!(s >= prev && s <= closed + 1e-12);
            prev = s;
        }
        let big = 1e12f64;
        assert!((series_partial_sums(big, 50) / big.powf(1.0 / 3.0) - 1.0).abs() < 1e-7);
    }
}
