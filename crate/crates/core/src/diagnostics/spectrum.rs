use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrator::Trajectory;

use super::integrals::time_average;

/// Least-squares fit `log2 E_j = log2_prefactor + slope * j` with `k_j = 2^j`,
/// so `slope` is the exponent of `E(k)` and `2^{log2_prefactor}` its prefactor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumFit {
    pub slope: f64,
    pub log2_prefactor: f64,
    pub j_min: usize,
    pub j_max: usize,
    pub residual_rms: f64,
}

impl SpectrumFit {
    pub fn prefactor(&self) -> f64 {
        self.log2_prefactor.exp2()
    }
}

/// Default inertial range `[3, N - 5]`, away from the forced shell and the closure.
pub fn default_range(n_shells: usize) -> (usize, usize) {
    (3, n_shells.saturating_sub(5))
}

/// Fits shells `j_min..=j_max` of `energies`; the range must hold at least four
/// shells inside `[1, len - 3]`.
pub fn fit_log2_energies(energies: &[f64], j_min: usize, j_max: usize) -> Result<SpectrumFit> {
    let max = energies.len().saturating_sub(3);
    if j_min < 1 || j_max > max || j_max < j_min + 3 {
        return Err(Error::RangeTooSmall { j_min, j_max, max });
    }
    if let Some(j) = (j_min..=j_max).find(|&j| !(energies[j] > 0.0 && energies[j].is_finite())) {
        return Err(Error::InvalidInput(format!("shell {j} has non-positive energy {}", energies[j])));
    }
    let xs: Vec<f64> = (j_min..=j_max).map(|j| j as f64).collect();
    let ys: Vec<f64> = (j_min..=j_max).map(|j| energies[j].log2()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    Ok(SpectrumFit { slope, log2_prefactor: intercept, j_min, j_max, residual_rms: (ss / n).sqrt() })
}

/// Trapezoid time average of `a_j^2` for every shell over `[t1, t2]`.
pub fn time_averaged_energies(traj: &Trajectory, t1: f64, t2: f64) -> Result<Vec<f64>> {
    (0..traj.params.len())
        .map(|j| time_average(traj, t1, t2, |i| traj.samples[i].a[j] * traj.samples[i].a[j]))
        .collect()
}

/// Fits the time-averaged spectrum over `[t1, t2]`; `j_range` defaults to `[3, N - 5]`.
pub fn spectrum_fit(traj: &Trajectory, t1: f64, t2: f64, j_range: Option<(usize, usize)>) -> Result<SpectrumFit> {
    let (j_min, j_max) = j_range.unwrap_or_else(|| default_range(traj.params.n_shells()));
    let energies = time_averaged_energies(traj, t1, t2)?;
    fit_log2_energies(&energies, j_min, j_max)
}
