//! Threshold crossings of scalar functionals, located by bisection on the
//! cubic Hermite interpolant between two states.

use serde::{Deserialize, Serialize};

use crate::model::rhs_into;
use crate::state::{sobolev_sq, ShellState};

use super::trajectory::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Functional {
    SobolevNorm { s: f64 },
    ShellValue { j: usize },
    EnergyNorm,
}

impl Functional {
    pub fn eval(&self, a: &[f64]) -> f64 {
        match *self {
            Functional::SobolevNorm { s } => sobolev_sq(a, s).sqrt(),
            Functional::ShellValue { j } => a[j],
            Functional::EnergyNorm => sobolev_sq(a, 0.0).sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Upward,
    Downward,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventSpec {
    pub functional: Functional,
    pub threshold: f64,
    pub direction: Direction,
}

impl EventSpec {
    pub fn new(functional: Functional, threshold: f64, direction: Direction) -> Self {
        Self { functional, threshold, direction }
    }

    /// Whether the functional value sits on the far side of the threshold.
    pub fn reached(&self, value: f64) -> bool {
        match self.direction {
            Direction::Upward => value >= self.threshold,
            Direction::Downward => value <= self.threshold,
        }
    }

    pub(crate) fn validate(&self, len: usize) -> Result<(), String> {
        match self.functional {
            Functional::SobolevNorm { s } if !s.is_finite() => {
                Err(format!("Sobolev exponent must be finite, got {s}"))
            }
            Functional::ShellValue { j } if j >= len => {
                Err(format!("event shell {j} outside 0..{len}"))
            }
            _ if self.threshold.is_nan() => Err("event threshold is NaN".into()),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventHit {
    pub t: f64,
    pub state: ShellState,
}

/// Cubic Hermite interpolation of one component on `[t0, t0 + h]`.
#[inline]
pub(crate) fn hermite(theta: f64, h: f64, y0: f64, f0: f64, y1: f64, f1: f64) -> f64 {
    let t2 = theta * theta;
    let t3 = t2 * theta;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0
        + (t3 - 2.0 * t2 + theta) * h * f0
        + (-2.0 * t3 + 3.0 * t2) * y1
        + (t3 - t2) * h * f1
}

/// Endpoint data of one interpolation interval.
pub(crate) struct Segment<'a> {
    pub t0: f64,
    pub t1: f64,
    pub y0: &'a [f64],
    pub f0: &'a [f64],
    pub y1: &'a [f64],
    pub f1: &'a [f64],
}

impl Segment<'_> {
    pub(crate) fn interpolate(&self, t: f64, out: &mut [f64]) {
        let h = self.t1 - self.t0;
        let theta = if h > 0.0 { (t - self.t0) / h } else { 1.0 };
        for i in 0..out.len() {
            out[i] = hermite(theta, h, self.y0[i], self.f0[i], self.y1[i], self.f1[i]);
        }
    }

    /// First crossing inside the segment, assuming the left end has not
    /// reached the threshold and the right end has. `map` turns the
    /// interpolated vector into amplitudes.
    pub(crate) fn locate(
        &self,
        spec: &EventSpec,
        time_tol: f64,
        mut map: impl FnMut(&[f64], &mut [f64]),
    ) -> (f64, Vec<f64>) {
        let n = self.y0.len();
        let mut y = vec![0.0; n];
        let mut a = vec![0.0; n];
        let (mut lo, mut hi) = (self.t0, self.t1);
        for _ in 0..200 {
            if hi - lo <= time_tol {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            self.interpolate(mid, &mut y);
            map(&y, &mut a);
            if spec.reached(spec.functional.eval(&a)) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        self.interpolate(hi, &mut y);
        map(&y, &mut a);
        (hi, a)
    }
}

/// First crossing of `spec` along the samples of a trajectory, or `None`.
///
/// Between samples the state is interpolated with cubic Hermite polynomials
/// built from the model right-hand side; the crossing time is bisected to
/// `rtol` of the trajectory's step control.
pub fn detect_event(traj: &Trajectory, spec: &EventSpec) -> Option<EventHit> {
    if spec.validate(traj.params.len()).is_err() {
        return None;
    }
    let first = traj.samples.first()?;
    if spec.reached(spec.functional.eval(&first.a)) {
        return Some(EventHit { t: first.t, state: first.clone() });
    }
    let n = traj.params.len();
    let mut f_prev = vec![0.0; n];
    let mut f_next = vec![0.0; n];
    rhs_into(&first.a, &traj.params, &mut f_prev);
    for w in traj.samples.windows(2) {
        rhs_into(&w[1].a, &traj.params, &mut f_next);
        if spec.reached(spec.functional.eval(&w[1].a)) {
            let seg = Segment { t0: w[0].t, t1: w[1].t, y0: &w[0].a, f0: &f_prev, y1: &w[1].a, f1: &f_next };
            let (t, a) = seg.locate(spec, traj.control.rtol, |y, out| out.copy_from_slice(y));
            return Some(EventHit { t, state: ShellState::new(t, a) });
        }
        std::mem::swap(&mut f_prev, &mut f_next);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_reproduces_cubics() {
        let p = |t: f64| 1.0 - 2.0 * t + 0.5 * t * t - 0.25 * t * t * t;
        let dp = |t: f64| -2.0 + t - 0.75 * t * t;
        let (t0, t1) = (0.3, 1.1);
        for k in 0..=10 {
            let t = t0 + (t1 - t0) * k as f64 / 10.0;
            let v = hermite((t - t0) / (t1 - t0), t1 - t0, p(t0), dp(t0), p(t1), dp(t1));
            assert!((v - p(t)).abs() < 1e-14);
        }
    }

    #[test]
    fn reached_respects_direction() {
        let up = EventSpec::new(Functional::EnergyNorm, 1.0, Direction::Upward);
        assert!(up.reached(1.0) && up.reached(2.0) && !up.reached(0.5));
        let down = EventSpec::new(Functional::ShellValue { j: 0 }, 1.0, Direction::Downward);
        assert!(down.reached(0.5) && !down.reached(1.5));
        let inf = EventSpec::new(Functional::EnergyNorm, f64::INFINITY, Direction::Upward);
        assert!(!inf.reached(1e308));
    }
}
