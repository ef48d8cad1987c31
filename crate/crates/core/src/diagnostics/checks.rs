//! Lyapunov-type certificates in the normalized frame.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrator::Trajectory;
use crate::transform::{boundary_d, deviation_to_d};

use super::constants::DiagnosticsConstants;
use super::quadrature::trapezoid_with_guard;
use super::report::CheckRecord;

/// Allowance of the Lyapunov decrease check, relative to `|b(t1)|^2`.
pub const LYAPUNOV_TOLERANCE: f64 = 1e-3;

/// Fraction of the check tolerance the quadrature may move when the grid is halved.
const GUARD_FRACTION: f64 = 0.1;

fn sum_sq(xs: &[f64]) -> f64 {
    xs.iter().map(|x| x * x).sum()
}

/// Partial-energy inequality at sample time `t` for the shells `0..=k`:
///
/// ```text
/// d/dtau sum_{j<=k} b_j^2 <= -sum_{j<=k} d_j^2 + d_{k+1}^2
/// d/dtau sum_{j<=k} b_j^2 <= -sum_{j<k} d_j^2 + lambda^{(k-1)/3} |b|      (k >= 2)
/// ```
///
/// The derivative is a central difference of width `fd_width` on the samples
/// `t +- fd_width`; the samples at `t +- 2 fd_width` give a second difference
/// whose distance to the first estimates the truncation error. The check
/// passes when every slack `rhs - lhs` is at least `-tol_fd`, with `tol_fd`
/// twice that estimate plus an allowance for the integration tolerance.
pub fn check_partial_energy_inequality(traj: &Trajectory, k: usize, t: f64, fd_width: f64) -> Result<CheckRecord> {
    let params = &traj.params;
    let n = params.n_shells();
    if k > n {
        return Err(Error::ShellIndexOutOfRange { index: k, max: n });
    }
    if !(fd_width > 0.0 && fd_width.is_finite()) {
        return Err(Error::InvalidParameter { field: "fd_width", reason: format!("must be positive, got {fd_width}") });
    }
    let at = |dt: f64| traj.sample_index(t + dt);
    let (i0, im1, ip1, im2, ip2) = (at(0.0)?, at(-fd_width)?, at(fd_width)?, at(-2.0 * fd_width)?, at(2.0 * fd_width)?);
    let c = params.frame_scale();
    let partial = |i: usize| traj.deviations[i].prefix_norm_sq(k);
    let deriv = |lo: usize, hi: usize| (partial(hi) - partial(lo)) / ((traj.samples[hi].t - traj.samples[lo].t) * c);
    let d_w = deriv(im1, ip1);
    let d_2w = deriv(im2, ip2);
    let truncation = (d_2w - d_w).abs() / 3.0;

    let dev = &traj.deviations[i0];
    let b = &dev.b[..=k];
    let err = 2.0 * (traj.control.rtol * sum_sq(b) + traj.control.atol * b.iter().map(|x| x.abs()).sum::<f64>());
    let noise = 10.0 * err / (fd_width * c);
    let tol_fd = 2.0 * truncation + noise;

    let d = deviation_to_d(dev, params).d;
    let d_next = if k < n { d[k + 1] } else { boundary_d(dev, params) };
    let rhs_first = -sum_sq(&d[..=k]) + d_next * d_next;
    let slack_first = rhs_first - d_w;
    let mut record = CheckRecord::new("partial_energy_inequality", "partial-energy-inequality", tol_fd)
        .with("t", traj.samples[i0].t)
        .with("k", k as f64)
        .with("fd_width", fd_width)
        .with("derivative", d_w)
        .with("derivative_wide", d_2w)
        .with("truncation_estimate", truncation)
        .with("rhs_first", rhs_first)
        .with("slack_first", slack_first);
    let mut pass = slack_first >= -tol_fd;
    if k >= 2 {
        let rhs_second = -sum_sq(&d[..k]) + params.lambda_pow((k as f64 - 1.0) / 3.0) * dev.norm_sq().sqrt();
        let slack_second = rhs_second - d_w;
        record = record.with("rhs_second", rhs_second).with("slack_second", slack_second);
        pass &= slack_second >= -tol_fd;
    }
    Ok(record.verdict(pass))
}

/// `|d|^2` at every sample, converted to physical time (`dtau = c dt`).
fn d_norm_sq_physical(traj: &Trajectory, range: std::ops::Range<usize>) -> Vec<f64> {
    let c = traj.params.frame_scale();
    range
        .map(|i| c * deviation_to_d(&traj.deviations[i], &traj.params).norm_sq())
        .collect()
}

/// `|b(t2)|^2 - |b(t1)|^2 + alpha int_{t1}^{t2} |d|^2 dtau <= 1e-3 |b(t1)|^2`.
///
/// A non-positive `alpha` would make the inequality vacuous, so the check
/// also requires `0 < alpha < 1`.
/// Both times must be sample times. The integral is a trapezoid sum; halving
/// the grid must move `alpha int |d|^2` by less than a tenth of the allowance.
pub fn check_lyapunov_decrease(traj: &Trajectory, consts: &DiagnosticsConstants, t1: f64, t2: f64) -> Result<CheckRecord> {
    if !(t1 <= t2) {
        return Err(Error::InvalidInput(format!("need t1 <= t2, got [{t1}, {t2}]")));
    }
    let (i1, i2) = (traj.sample_index(t1)?, traj.sample_index(t2)?);
    let b1 = traj.deviation_norm_sq(i1);
    let b2 = traj.deviation_norm_sq(i2);
    let x: Vec<f64> = (i1..=i2).map(|i| traj.samples[i].t).collect();
    let y = d_norm_sq_physical(traj, i1..i2 + 1);
    let integral = trapezoid_with_guard(&x, &y);
    let slack = b2 - b1 + consts.alpha * integral.value;
    let shift = consts.alpha.abs() * integral.shift();
    let allowance = LYAPUNOV_TOLERANCE * b1;
    let pass = consts.alpha_admissible() && slack <= allowance && shift <= GUARD_FRACTION * allowance.max(0.0);
    Ok(CheckRecord::new("lyapunov_decrease", "lyapunov-decrease", LYAPUNOV_TOLERANCE)
        .with("alpha", consts.alpha)
        .with("t1", t1)
        .with("t2", t2)
        .with("b_sq_t1", b1)
        .with("b_sq_t2", b2)
        .with("d_sq_integral", integral.value)
        .with("slack", slack)
        .with("quadrature_shift", shift)
        .verdict(pass))
}

/// Running maximum and minimum of a sequence from the back.
fn suffix_extrema(v: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut hi = v.to_vec();
    let mut lo = v.to_vec();
    for i in (0..v.len().saturating_sub(1)).rev() {
        hi[i] = hi[i].max(hi[i + 1]);
        lo[i] = lo[i].min(lo[i + 1]);
    }
    (hi, lo)
}

/// Suffix integrals `int_{x_i}^{x_last} y` by the trapezoid rule, summed from
/// the end so late (small) values keep their relative precision.
fn suffix_trapezoid(x: &[f64], y: &[f64]) -> Vec<f64> {
    let mut q = vec![0.0; x.len()];
    for i in (0..x.len().saturating_sub(1)).rev() {
        q[i] = q[i + 1] + 0.5 * (x[i + 1] - x[i]) * (y[i] + y[i + 1]);
    }
    q
}

/// The Lyapunov decrease check for every pair of samples `t1 < t2` in
/// `[t_start, t_end]`, in linear time.
///
/// With `Q_i = alpha int_{t_i}^{T} |d|^2` the slack of a pair is
/// `H_j - H_i` where `H = |b|^2 - Q`, so the worst partner of `i` is the suffix
/// maximum of `H`. The grid-halving guard is applied to every pair of
/// even-offset samples the same way.
pub fn check_lyapunov_decrease_all_pairs(
    traj: &Trajectory,
    consts: &DiagnosticsConstants,
    t_start: f64,
    t_end: f64,
) -> Result<CheckRecord> {
    let w = traj.window(t_start, t_end)?;
    let bsq: Vec<f64> = w.clone().map(|i| traj.deviation_norm_sq(i)).collect();
    let x: Vec<f64> = w.clone().map(|i| traj.samples[i].t).collect();
    let y = d_norm_sq_physical(traj, w.clone());
    let q_raw = suffix_trapezoid(&x, &y);
    let q: Vec<f64> = q_raw.iter().map(|v| consts.alpha * v).collect();
    let h: Vec<f64> = bsq.iter().zip(&q).map(|(b, q)| b - q).collect();
    let (h_max, _) = suffix_extrema(&h);

    let m = h.len();
    // a deviation that squares to a subnormal is the equilibrium to working
    // precision; no relative allowance can be formed there
    let resolved = |i: usize| bsq[i] >= f64::MIN_POSITIVE;
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_ratio = f64::NEG_INFINITY;
    let mut worst_t1 = x[0];
    let mut skipped = 0usize;
    for i in 0..m - 1 {
        if !resolved(i) {
            skipped += m - 1 - i;
            continue;
        }
        let slack = h_max[i + 1] - h[i];
        let excess = slack - LYAPUNOV_TOLERANCE * bsq[i];
        if excess > worst_excess {
            worst_excess = excess;
            worst_t1 = x[i];
        }
        worst_ratio = worst_ratio.max(slack / bsq[i]);
    }

    // grid-halving guard on the even-offset subgrid (last sample always kept)
    let mut idx: Vec<usize> = (0..m).step_by(2).collect();
    if idx.last() != Some(&(m - 1)) {
        idx.push(m - 1);
    }
    let cx: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
    let cy: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
    let qc = suffix_trapezoid(&cx, &cy);
    let e: Vec<f64> = idx.iter().zip(&qc).map(|(&i, qc)| consts.alpha.abs() * (q_raw[i] - qc)).collect();
    let (e_max, e_min) = suffix_extrema(&e);
    let mut worst_guard = 0.0f64;
    let mut worst_guard_t1 = x[0];
    for r in 0..idx.len().saturating_sub(1) {
        if !resolved(idx[r]) {
            continue;
        }
        let shift = (e_max[r + 1] - e[r]).max(e[r] - e_min[r + 1]);
        let fraction = shift / (LYAPUNOV_TOLERANCE * bsq[idx[r]]);
        if fraction > worst_guard {
            worst_guard = fraction;
            worst_guard_t1 = x[idx[r]];
        }
    }
    let guard_ok = worst_guard <= GUARD_FRACTION;
    let checked = m * (m - 1) / 2 - skipped;
    if checked == 0 {
        worst_excess = 0.0;
        worst_ratio = 0.0;
    }

    let mut record = CheckRecord::new("lyapunov_decrease_all_pairs", "lyapunov-decrease", LYAPUNOV_TOLERANCE)
        .with("alpha", consts.alpha)
        .with("t_start", x[0])
        .with("t_end", x[m - 1])
        .with("pairs", checked as f64)
        .with("pairs_at_equilibrium", skipped as f64)
        .with("worst_excess", worst_excess)
        .with("worst_excess_t1", worst_t1)
        .with("worst_normalized_slack", worst_ratio)
        .with("worst_guard_fraction", worst_guard)
        .with("worst_guard_t1", worst_guard_t1);
    if !guard_ok {
        record = record.note(format!(
            "sample grid too coarse to resolve int |d|^2 after t = {worst_guard_t1}; the decrease is not certified there"
        ));
    }
    Ok(record.verdict(consts.alpha_admissible() && worst_excess <= 0.0 && guard_ok))
}

/// Exponential decay of `|b(t)|^2` over a window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    /// Fitted rate in physical time: `|b|^2 ~ exp(-rate t)`.
    pub rate: f64,
    /// Fitted rate in normalized time, `rate / c`.
    pub rate_normalized: f64,
    pub r_squared: f64,
    pub samples_used: usize,
    /// Largest `|b(t)|^2 / (|b(t0)|^2 exp(-beta (t - t0)))` over the window.
    pub bound_ratio: f64,
    pub bound_holds: bool,
}

/// Least-squares slope of `ln |b(t)|^2` over `[t1, t2]`, using the samples where
/// `|b|` is above `10 atol`, plus the pointwise bound
/// `|b(t)|^2 <= |b(t0)|^2 exp(-beta (t - t0)) (1 + bound_tol)` on every sample in
/// the window, `t0` being the first sample of the trajectory.
pub fn decay_fit(traj: &Trajectory, consts: &DiagnosticsConstants, t1: f64, t2: f64, bound_tol: f64) -> Result<DecayFit> {
    let w = traj.window(t1, t2)?;
    let floor = 10.0 * traj.control.atol;
    let floor_sq = floor * floor;
    if traj.deviation_norm_sq(w.start) < floor_sq {
        return Err(Error::DegenerateWindow { t1, t2 });
    }
    let pts: Vec<(f64, f64)> = w
        .clone()
        .filter(|&i| traj.deviation_norm_sq(i) >= floor_sq)
        .map(|i| (traj.samples[i].t, traj.deviation_norm_sq(i).ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::DegenerateWindow { t1, t2 });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };

    let t0 = traj.samples[0].t;
    let b0 = traj.deviation_norm_sq(0);
    let mut bound_ratio = 0.0f64;
    for i in w {
        let envelope = b0 * (-consts.beta_general * (traj.samples[i].t - t0)).exp();
        let b = traj.deviation_norm_sq(i);
        let ratio = if envelope > 0.0 { b / envelope } else if b > 0.0 { f64::INFINITY } else { 0.0 };
        bound_ratio = bound_ratio.max(ratio);
    }
    Ok(DecayFit {
        rate: -slope,
        rate_normalized: -slope / consts.frame_scale,
        r_squared,
        samples_used: pts.len(),
        bound_ratio,
        bound_holds: bound_ratio <= 1.0 + bound_tol,
    })
}

impl DecayFit {
    /// Record asserting the pointwise bound and `rate >= beta`.
    pub fn record(&self, consts: &DiagnosticsConstants, bound_tol: f64) -> CheckRecord {
        CheckRecord::new("decay_fit", "exponential-attraction", bound_tol)
            .with("rate", self.rate)
            .with("rate_normalized", self.rate_normalized)
            .with("beta_normalized", consts.beta_normalized)
            .with("beta_general", consts.beta_general)
            .with("r_squared", self.r_squared)
            .with("samples_used", self.samples_used as f64)
            .with("bound_ratio", self.bound_ratio)
            .verdict(self.bound_holds && self.rate >= consts.beta_general)
    }
}
