//! Adaptive time integration of the truncated model.
//!
//! Two embedded pairs share one driver: the explicit Dormand–Prince 5(4) pair
//! and a linearly implicit Rosenbrock 4(3) method. The explicit pair is fine
//! for a handful of shells; beyond that the relaxation time of shell `j` near
//! equilibrium, about `lambda^{-2j/3}`, makes the system stiff and only the
//! Rosenbrock method reaches the long times the attractor checks need.
//!
//! The driver advances the normalized-frame deviation `b` (see
//! [`crate::transform`]) and lands steps exactly on every requested sample
//! time. Error control is componentwise on `b`:
//! `|err_j| <= atol + rtol * max(|b_j|, |b_j'|)`.

mod dopri;
mod event;
mod field;
mod rosenbrock;
mod trajectory;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::state::ShellState;
use crate::transform::{to_deviation, Deviation};

pub use event::{detect_event, Direction, EventHit, EventSpec, Functional};
pub use trajectory::{StepStats, Trajectory};

use dopri::DormandPrince;
use event::Segment;
use field::DeviationField;
use rosenbrock::Rosenbrock4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Explicit Dormand–Prince 5(4).
    DormandPrince,
    /// Linearly implicit Rosenbrock 4(3) with the exact tridiagonal Jacobian.
    #[default]
    Rosenbrock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub dt_init: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub safety: f64,
    pub max_steps: usize,
    pub method: Method,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-12,
            dt_init: 1e-6,
            dt_min: 1e-15,
            dt_max: 1.0,
            safety: 0.9,
            max_steps: 10_000_000,
            method: Method::Rosenbrock,
        }
    }
}

impl StepControl {
    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_tolerances(mut self, rtol: f64, atol: f64) -> Self {
        self.rtol = rtol;
        self.atol = atol;
        self
    }

    /// Every step has length `dt` (except where a sample time cuts it short);
    /// the error test always passes.
    pub fn fixed_step(dt: f64, method: Method) -> Self {
        Self {
            rtol: f64::MAX,
            atol: f64::MAX,
            dt_init: dt,
            dt_min: dt * 1e-6,
            dt_max: dt,
            safety: 0.9,
            max_steps: usize::MAX,
            method,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &'static str, reason: String| Err(Error::InvalidParameter { field, reason });
        if !(self.rtol > 0.0) {
            return bad("rtol", format!("must be positive, got {}", self.rtol));
        }
        if !(self.atol > 0.0) {
            return bad("atol", format!("must be positive, got {}", self.atol));
        }
        if !(self.dt_min > 0.0 && self.dt_min <= self.dt_max) {
            return bad("dt_min", format!("need 0 < dt_min <= dt_max, got {} and {}", self.dt_min, self.dt_max));
        }
        if !(self.dt_init > 0.0 && self.dt_init.is_finite()) {
            return bad("dt_init", format!("must be positive, got {}", self.dt_init));
        }
        if !(self.safety > 0.0 && self.safety < 1.0) {
            return bad("safety", format!("must lie in (0, 1), got {}", self.safety));
        }
        if self.max_steps == 0 {
            return bad("max_steps", "must be at least 1".into());
        }
        Ok(())
    }
}

/// Outcome of [`enforce_positivity`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PositivityDecision {
    Accepted,
    /// Accepted after setting this many slightly negative components to zero.
    Clamped(usize),
    /// Some component fell below `-atol`; the step must be retried.
    Rejected { shell: usize },
}

/// Positivity contract on a trial state: components below `-atol` reject
/// the step, components in `[-atol, 0)` are set to zero.
pub fn enforce_positivity(candidate: &mut [f64], control: &StepControl) -> PositivityDecision {
    positivity_with_floor(candidate, |_| 0.0, |_| control.atol)
}

/// Generic form: `value(j) = floor(j) + candidate[j]` must stay above `-band(j)`;
/// clamping sets `candidate[j] = -floor(j)`.
fn positivity_with_floor(
    candidate: &mut [f64],
    floor: impl Fn(usize) -> f64,
    band: impl Fn(usize) -> f64,
) -> PositivityDecision {
    for (j, x) in candidate.iter().enumerate() {
        if floor(j) + x < -band(j) || x.is_nan() {
            return PositivityDecision::Rejected { shell: j };
        }
    }
    let mut clamped = 0;
    for (j, x) in candidate.iter_mut().enumerate() {
        if floor(j) + *x < 0.0 {
            *x = -floor(j);
            clamped += 1;
        }
    }
    if clamped == 0 {
        PositivityDecision::Accepted
    } else {
        PositivityDecision::Clamped(clamped)
    }
}

enum Scheme {
    Explicit(DormandPrince),
    Implicit(Rosenbrock4),
}

/// Result of a single accepted step from [`step`].
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub state: ShellState,
    pub dt_used: f64,
    pub dt_next: f64,
    pub error_estimate: f64,
}

struct Accepted {
    h: f64,
    h_next: f64,
    err: f64,
}

/// Stepping machinery for one integration: owns all scratch buffers.
struct Engine {
    field: DeviationField,
    control: StepControl,
    scheme: Scheme,
    /// positivity band in normalized amplitude units
    band: Vec<f64>,
    y_new: Vec<f64>,
    f_new: Vec<f64>,
    err: Vec<f64>,
    stats: StepStats,
    attempts: usize,
}

impl Engine {
    fn new(params: &ModelParams, control: &StepControl) -> Self {
        let field = DeviationField::new(params);
        let dim = field.dim();
        let scheme = match control.method {
            Method::DormandPrince => Scheme::Explicit(DormandPrince::new(dim)),
            Method::Rosenbrock => Scheme::Implicit(Rosenbrock4::new(dim)),
        };
        // Amplitudes are carried as lambda^{-j/3} + b_j, so nothing finer than
        // a few ulp of lambda^{-j/3} is resolvable; the band never drops below that.
        let atol_norm = control.atol / params.frame_scale();
        let band = (0..dim)
            .map(|j| atol_norm.max(8.0 * f64::EPSILON * field.anchor[j]))
            .collect();
        Self {
            field,
            control: control.clone(),
            scheme,
            band,
            y_new: vec![0.0; dim],
            f_new: vec![0.0; dim],
            err: vec![0.0; dim],
            stats: StepStats { dt_min_used: f64::INFINITY, ..StepStats::default() },
            attempts: 0,
        }
    }

    fn error_exponent(&self) -> f64 {
        match self.scheme {
            Scheme::Explicit(_) => 1.0 / DormandPrince::ERROR_ORDER,
            Scheme::Implicit(_) => 1.0 / Rosenbrock4::ERROR_ORDER,
        }
    }

    fn error_norm(&self, y: &[f64]) -> f64 {
        let c = &self.control;
        let mut worst = 0.0f64;
        for j in 0..y.len() {
            let sc = c.atol + c.rtol * y[j].abs().max(self.y_new[j].abs());
            let e = (self.err[j] / sc).abs();
            if !e.is_finite() {
                return f64::INFINITY;
            }
            worst = worst.max(e);
        }
        worst
    }

    /// Tries steps from `(t, y)` starting with `h` until one is accepted.
    /// The accepted state is left in `y_new`/`f_new`.
    fn advance(&mut self, t: f64, y: &[f64], fy: &[f64], mut h: f64) -> Result<Accepted> {
        let q = self.error_exponent();
        loop {
            self.attempts += 1;
            if self.attempts > self.control.max_steps {
                return Err(Error::MaxStepsExceeded { t, max_steps: self.control.max_steps });
            }
            let solved = match &mut self.scheme {
                Scheme::Explicit(s) => {
                    s.attempt(&self.field, y, fy, h, &mut self.y_new, &mut self.f_new, &mut self.err);
                    self.stats.rhs_evals += DormandPrince::RHS_PER_ATTEMPT;
                    true
                }
                Scheme::Implicit(s) => {
                    self.stats.rhs_evals += Rosenbrock4::RHS_PER_ATTEMPT;
                    s.attempt(&self.field, y, fy, h, &mut self.y_new, &mut self.f_new, &mut self.err)
                }
            };
            let err = if solved { self.error_norm(y) } else { f64::INFINITY };
            if !err.is_finite() {
                self.stats.rejected += 1;
                h *= 0.25;
                if h < self.control.dt_min {
                    return Err(Error::NonFiniteState { t });
                }
                continue;
            }
            if err > 1.0 {
                self.stats.rejected += 1;
                let fac = (self.control.safety * err.powf(-q)).clamp(0.2, 1.0);
                h *= fac;
                if h < self.control.dt_min {
                    return Err(Error::StepSizeUnderflow { t, dt: h });
                }
                continue;
            }
            let anchor = &self.field.anchor;
            let band = &self.band;
            match positivity_with_floor(&mut self.y_new, |j| anchor[j], |j| band[j]) {
                PositivityDecision::Rejected { .. } => {
                    self.stats.positivity_rejections += 1;
                    h *= 0.5;
                    if h < self.control.dt_min {
                        return Err(Error::StepSizeUnderflow { t, dt: h });
                    }
                    continue;
                }
                PositivityDecision::Clamped(k) => {
                    self.stats.clamped_components += k;
                    self.field.eval(&self.y_new, &mut self.f_new);
                    self.stats.rhs_evals += 1;
                }
                PositivityDecision::Accepted => {}
            }
            self.stats.accepted += 1;
            self.stats.dt_min_used = self.stats.dt_min_used.min(h);
            self.stats.dt_max_used = self.stats.dt_max_used.max(h);
            let growth = if err == 0.0 { 5.0 } else { (self.control.safety * err.powf(-q)).clamp(0.2, 5.0) };
            let h_next = (h * growth).clamp(self.control.dt_min, self.control.dt_max);
            return Ok(Accepted { h, h_next, err });
        }
    }

    fn state(&self, t: f64, b: &[f64]) -> (ShellState, Deviation) {
        let mut a = vec![0.0; b.len()];
        self.field.to_amplitudes(b, &mut a);
        (ShellState::new(t, a), Deviation { b: b.to_vec() })
    }
}

fn check_initial(initial: &ShellState, params: &ModelParams) -> Result<()> {
    params.check_len(initial.len())?;
    if let Some((j, v)) = initial.a.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::InvalidInput(format!("initial amplitude a_{j} = {v} must be finite and nonnegative")));
    }
    if !initial.t.is_finite() {
        return Err(Error::InvalidInput("initial time must be finite".into()));
    }
    Ok(())
}

/// Integrates from `initial` to `t_end`, recording the state at every time in
/// `sample_times` (strictly increasing, inside `[initial.t, t_end]`).
pub fn integrate(
    initial: &ShellState,
    params: &ModelParams,
    control: &StepControl,
    t_end: f64,
    sample_times: &[f64],
) -> Result<Trajectory> {
    integrate_with_events(initial, params, control, t_end, sample_times, &[]).map(|(traj, _)| traj)
}

/// As [`integrate`], also locating the first crossing of each event during
/// the run (bisection on the step's Hermite interpolant to `rtol` in time).
pub fn integrate_with_events(
    initial: &ShellState,
    params: &ModelParams,
    control: &StepControl,
    t_end: f64,
    sample_times: &[f64],
    events: &[EventSpec],
) -> Result<(Trajectory, Vec<Option<EventHit>>)> {
    control.validate()?;
    check_initial(initial, params)?;
    let t0 = initial.t;
    if !(t_end > t0) {
        return Err(Error::InvalidInput(format!("t_end = {t_end} must exceed the initial time {t0}")));
    }
    let mut prev = f64::NEG_INFINITY;
    for &s in sample_times {
        if !(s > prev && s >= t0 && s <= t_end) {
            return Err(Error::InvalidInput(format!(
                "sample times must increase strictly inside [{t0}, {t_end}] (got {s})"
            )));
        }
        prev = s;
    }
    for ev in events {
        ev.validate(params.len()).map_err(Error::InvalidInput)?;
    }

    let mut engine = Engine::new(params, control);
    let mut traj = Trajectory::empty(params.clone(), control.clone());
    let mut hits: Vec<Option<EventHit>> = vec![None; events.len()];

    let dim = params.len();
    let mut y = to_deviation(initial, params).b;
    let mut fy = vec![0.0; dim];
    engine.field.eval(&y, &mut fy);
    engine.stats.rhs_evals += 1;

    for (ev, hit) in events.iter().zip(hits.iter_mut()) {
        if ev.reached(ev.functional.eval(&initial.a)) {
            *hit = Some(EventHit { t: t0, state: initial.clone() });
        }
    }

    let mut next_sample = 0;
    if sample_times.first() == Some(&t0) {
        traj.push(initial.clone(), Deviation { b: y.clone() });
        next_sample = 1;
    }

    let mut t = t0;
    let mut h = control.dt_init.min(control.dt_max);
    let mut a_buf = vec![0.0; dim];
    while t < t_end {
        let stop = sample_times.get(next_sample).copied().unwrap_or(t_end);
        let mut landing = false;
        let mut h_try = h;
        if t + 1.0001 * h_try >= stop {
            h_try = stop - t;
            landing = true;
        }
        let acc = engine.advance(t, &y, &fy, h_try)?;
        let landed = landing && acc.h == h_try;
        let t_new = if landed { stop } else { t + acc.h };

        if hits.iter().any(Option::is_none) {
            for (ev, hit) in events.iter().zip(hits.iter_mut()) {
                if hit.is_some() {
                    continue;
                }
                engine.field.to_amplitudes(&engine.y_new, &mut a_buf);
                if ev.reached(ev.functional.eval(&a_buf)) {
                    let seg = Segment { t0: t, t1: t_new, y0: &y, f0: &fy, y1: &engine.y_new, f1: &engine.f_new };
                    let field = &engine.field;
                    let (te, a) = seg.locate(ev, control.rtol, |b, out| field.to_amplitudes(b, out));
                    *hit = Some(EventHit { t: te, state: ShellState::new(te, a) });
                }
            }
        }

        y.copy_from_slice(&engine.y_new);
        fy.copy_from_slice(&engine.f_new);
        t = t_new;
        // a step shortened to land on a sample should not shrink the next one
        h = if landed { acc.h_next.max(h.min(control.dt_max)) } else { acc.h_next };

        if next_sample < sample_times.len() && t == sample_times[next_sample] {
            let (s, d) = engine.state(t, &y);
            traj.push(s, d);
            next_sample += 1;
        }
    }
    if engine.stats.accepted == 0 {
        engine.stats.dt_min_used = 0.0;
    }
    traj.stats = engine.stats;
    Ok((traj, hits))
}

/// One accepted step from `state` with trial size `dt_try`, retrying with
/// smaller steps on error-test or positivity failure.
pub fn step(state: &ShellState, params: &ModelParams, control: &StepControl, dt_try: f64) -> Result<StepOutcome> {
    control.validate()?;
    check_initial(state, params)?;
    if !(dt_try > 0.0) {
        return Err(Error::InvalidInput(format!("dt_try must be positive, got {dt_try}")));
    }
    let mut engine = Engine::new(params, control);
    let y = to_deviation(state, params).b;
    let mut fy = vec![0.0; y.len()];
    engine.field.eval(&y, &mut fy);
    let acc = engine.advance(state.t, &y, &fy, dt_try)?;
    let b = engine.y_new.clone();
    let (s, _) = engine.state(state.t + acc.h, &b);
    Ok(StepOutcome { state: s, dt_used: acc.h, dt_next: acc.h_next, error_estimate: acc.err })
}

#[cfg(test)]
mod tests;
