use std::ops::Range;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{dissipation_rate, forcing_power};
use crate::params::ModelParams;
use crate::state::ShellState;
use crate::transform::{from_deviation, to_deviation, Deviation};

use super::StepControl;

/// Counters collected while integrating.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub positivity_rejections: usize,
    pub clamped_components: usize,
    pub rhs_evals: usize,
    pub dt_min_used: f64,
    pub dt_max_used: f64,
}

/// Samples of one integration on a strictly increasing time grid.
///
/// Besides the amplitudes every sample keeps the normalized-frame deviation
/// the integrator actually advanced (exact near the fixed point) and three
/// cached scalars: `|a|^2`, the forcing power `f0 a_0` and the boundary
/// dissipation.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub params: ModelParams,
    pub control: StepControl,
    pub samples: Vec<ShellState>,
    pub deviations: Vec<Deviation>,
    pub energy_sq: Vec<f64>,
    pub forcing_power: Vec<f64>,
    pub dissipation: Vec<f64>,
    pub stats: StepStats,
}

impl Trajectory {
    pub(crate) fn empty(params: ModelParams, control: StepControl) -> Self {
        Self {
            params,
            control,
            samples: Vec::new(),
            deviations: Vec::new(),
            energy_sq: Vec::new(),
            forcing_power: Vec::new(),
            dissipation: Vec::new(),
            stats: StepStats::default(),
        }
    }

    pub(crate) fn push(&mut self, state: ShellState, dev: Deviation) {
        self.energy_sq.push(state.energy_sq());
        self.forcing_power.push(forcing_power(&state, &self.params));
        self.dissipation.push(dissipation_rate(&state, &self.params));
        self.samples.push(state);
        self.deviations.push(dev);
    }

    /// Builds a trajectory from amplitude samples (deviations are derived).
    pub fn from_states(params: ModelParams, control: StepControl, states: Vec<ShellState>) -> Result<Self> {
        check_times(states.iter().map(|s| s.t))?;
        let mut traj = Self::empty(params, control);
        for s in states {
            traj.params.check_len(s.len())?;
            let dev = to_deviation(&s, &traj.params);
            traj.push(s, dev);
        }
        Ok(traj)
    }

    /// Builds a trajectory from normalized-frame deviations.
    pub fn from_deviations(
        params: ModelParams,
        control: StepControl,
        times: &[f64],
        deviations: Vec<Deviation>,
    ) -> Result<Self> {
        check_times(times.iter().copied())?;
        if times.len() != deviations.len() {
            return Err(Error::InvalidInput(format!(
                "{} times for {} deviations",
                times.len(),
                deviations.len()
            )));
        }
        let mut traj = Self::empty(params, control);
        for (t, dev) in times.iter().zip(deviations) {
            traj.params.check_len(dev.b.len())?;
            let s = from_deviation(&dev, &traj.params, *t);
            traj.push(s, dev);
        }
        Ok(traj)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn final_state(&self) -> Option<&ShellState> {
        self.samples.last()
    }

    /// Smallest amplitude over all samples and shells.
    pub fn min_amplitude(&self) -> f64 {
        self.samples.iter().map(|s| s.min_amplitude()).fold(f64::INFINITY, f64::min)
    }

    /// Normalized-frame `|b|^2` of sample `i`.
    pub fn deviation_norm_sq(&self, i: usize) -> f64 {
        self.deviations[i].norm_sq()
    }

    /// Index of the sample at time `t`, within `1e-9` relative.
    pub fn sample_index(&self, t: f64) -> Result<usize> {
        let tol = 1e-9 * t.abs().max(1.0);
        let i = self.samples.partition_point(|s| s.t < t - tol);
        match self.samples.get(i) {
            Some(s) if (s.t - t).abs() <= tol => Ok(i),
            _ => Err(Error::SampleMiss { t }),
        }
    }

    /// Index range of the samples with `t1 <= t <= t2`; needs two or more.
    pub fn window(&self, t1: f64, t2: f64) -> Result<Range<usize>> {
        let tol = 1e-9 * t1.abs().max(t2.abs()).max(1.0);
        let lo = self.samples.partition_point(|s| s.t < t1 - tol);
        let hi = self.samples.partition_point(|s| s.t <= t2 + tol);
        if hi < lo + 2 {
            return Err(Error::EmptyWindow { t1, t2 });
        }
        Ok(lo..hi)
    }
}

fn check_times(times: impl Iterator<Item = f64>) -> Result<()> {
    let mut prev = f64::NEG_INFINITY;
    for t in times {
        if !(t.is_finite() && t > prev) {
            return Err(Error::InvalidInput(format!(
                "sample times must be finite and strictly increasing (saw {t} after {prev})"
            )));
        }
        prev = t;
    }
    Ok(())
}
