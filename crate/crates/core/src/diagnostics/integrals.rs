//! Time integrals of scalar functionals along a trajectory.

use crate::error::Result;
use crate::integrator::Trajectory;
use crate::state::sobolev_sq;

use super::quadrature::trapezoid;

fn integrate_over<F: Fn(usize) -> f64>(traj: &Trajectory, t1: f64, t2: f64, f: F) -> Result<f64> {
    let w = traj.window(t1, t2)?;
    let x: Vec<f64> = w.clone().map(|i| traj.samples[i].t).collect();
    let y: Vec<f64> = w.map(f).collect();
    Ok(trapezoid(&x, &y))
}

/// `int ||a(t)||_s^2 dt` over the samples in `[t1, t2]`.
pub fn hs_square_integral(traj: &Trajectory, s: f64, t1: f64, t2: f64) -> Result<f64> {
    integrate_over(traj, t1, t2, |i| sobolev_sq(&traj.samples[i].a, s))
}

/// `int ||a(t)||_{5/6}^3 dt` over the samples in `[t1, t2]`.
pub fn cube_56_integral(traj: &Trajectory, t1: f64, t2: f64) -> Result<f64> {
    integrate_over(traj, t1, t2, |i| sobolev_sq(&traj.samples[i].a, 5.0 / 6.0).powf(1.5))
}

/// Trapezoid time average of `f(sample index)` over `[t1, t2]`.
pub fn time_average<F: Fn(usize) -> f64>(traj: &Trajectory, t1: f64, t2: f64, f: F) -> Result<f64> {
    let w = traj.window(t1, t2)?;
    let span = traj.samples[w.end - 1].t - traj.samples[w.start].t;
    Ok(integrate_over(traj, t1, t2, f)? / span)
}

/// Time average of the boundary dissipation `lambda^{N-1/3} a_N^3`.
pub fn mean_dissipation(traj: &Trajectory, t1: f64, t2: f64) -> Result<f64> {
    time_average(traj, t1, t2, |i| traj.dissipation[i])
}

/// Residual of the energy balance between the first and last sample of
/// `[t1, t2]`:
/// `|a(t2)|^2 - |a(t1)|^2 - 2 int f0 a_0 + 2 int D`, divided by
/// `max(1, |a(t2)|^2)`. Under the pure Galerkin truncation `D = 0` and this is
/// the energy identity.
pub fn energy_balance_residual(traj: &Trajectory, t1: f64, t2: f64) -> Result<f64> {
    let w = traj.window(t1, t2)?;
    let (i1, i2) = (w.start, w.end - 1);
    let input = integrate_over(traj, t1, t2, |i| traj.forcing_power[i])?;
    let loss = integrate_over(traj, t1, t2, |i| traj.dissipation[i])?;
    let e1 = traj.energy_sq[i1];
    let e2 = traj.energy_sq[i2];
    Ok((e2 - e1 - 2.0 * input + 2.0 * loss) / e2.max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::StepControl;
    use crate::model::fixed_point;
    use crate::params::{ModelParams, LAMBDA_EXP_3D};
    use crate::state::ShellState;

    fn constant(state: &ShellState, params: &ModelParams, t_end: f64) -> Trajectory {
        let states = (0..=20).map(|i| ShellState::new(t_end * i as f64 / 20.0, state.a.clone())).collect();
        Trajectory::from_states(params.clone(), StepControl::default(), states).unwrap()
    }

    #[test]
    fn fixed_point_integrals() {
        let n = 12;
        let p = ModelParams::standard(ModelParams::normalized_forcing(LAMBDA_EXP_3D), n).unwrap();
        let traj = constant(&fixed_point(&p), &p, 3.0);
        let geometric: f64 = (0..=n).map(|j| (-5.0 * j as f64 / 3.0).exp2()).sum();
        let s0 = hs_square_integral(&traj, 0.0, 0.0, 3.0).unwrap();
        assert!((s0 - 3.0 * geometric).abs() < 1e-13);
        let crit = hs_square_integral(&traj, 5.0 / 6.0, 0.0, 3.0).unwrap();
        assert!((crit - 3.0 * (n + 1) as f64).abs() < 1e-12, "{crit}");
        let cube = cube_56_integral(&traj, 0.0, 3.0).unwrap();
        assert!((cube - 3.0 * ((n + 1) as f64).powf(1.5)).abs() < 1e-11, "{cube}");
    }

    #[test]
    fn fixed_point_dissipation() {
        let p = ModelParams::standard(1.0, 10).unwrap();
        let traj = constant(&fixed_point(&p), &p, 2.0);
        let d = mean_dissipation(&traj, 0.0, 2.0).unwrap();
        assert!((d - 1.334_839_854_170_034_4).abs() < 1e-13, "{d}");
        // input equals output on the equilibrium
        assert!(energy_balance_residual(&traj, 0.0, 2.0).unwrap().abs() < 1e-13);
    }

    #[test]
    fn zero_trajectory() {
        let p = ModelParams::standard(1.0, 6).unwrap();
        let traj = constant(&ShellState::zeros(&p), &p, 1.0);
        assert_eq!(hs_square_integral(&traj, 0.3, 0.0, 1.0).unwrap(), 0.0);
        assert_eq!(cube_56_integral(&traj, 0.0, 1.0).unwrap(), 0.0);
        assert_eq!(mean_dissipation(&traj, 0.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn window_must_hold_samples() {
        let p = ModelParams::standard(1.0, 6).unwrap();
        let traj = constant(&ShellState::zeros(&p), &p, 1.0);
        assert!(mean_dissipation(&traj, 0.51, 0.52).is_err());
    }
}
