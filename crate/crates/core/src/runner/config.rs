//! JSON run configuration.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::Error;
use crate::integrator::StepControl;
use crate::model::fixed_point;
use crate::params::{Closure, ModelParams, LAMBDA_EXP_3D};
use crate::state::ShellState;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(String),
    #[error("invalid config field `{field}`: {reason}")]
    Invalid { field: String, reason: String },
}

impl ConfigError {
    pub(crate) fn invalid(field: &str, reason: impl Into<String>) -> Self {
        Self::Invalid { field: field.into(), reason: reason.into() }
    }
}

impl From<Error> for ConfigError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { field, reason } => Self::invalid(field, reason),
            Error::LengthMismatch { expected, found } => {
                Self::invalid("initial.values", format!("expected {expected} values, found {found}"))
            }
            other => Self::invalid("config", other.to_string()),
        }
    }
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

fn default_lambda_exp() -> f64 {
    LAMBDA_EXP_3D
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    #[serde(default = "default_lambda_exp")]
    pub lambda_exp: f64,
    pub f0: f64,
    pub n_shells: usize,
    #[serde(default)]
    pub closure: Closure,
}

impl ParamsConfig {
    pub fn build(&self) -> Result<ModelParams, ConfigError> {
        Ok(ModelParams::new(self.lambda_exp, self.f0, self.n_shells, self.closure)?)
    }
}

/// Output grid: `count` evenly spaced samples on `[0, t_end]`, or explicit times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Samples {
    Count(usize),
    Times(Vec<f64>),
}

impl Default for Samples {
    fn default() -> Self {
        Samples::Count(1001)
    }
}

impl Samples {
    pub fn grid(&self, t_end: f64) -> Result<Vec<f64>, ConfigError> {
        match self {
            Samples::Count(n) if *n < 2 => Err(ConfigError::invalid("samples.count", "need at least 2 samples")),
            Samples::Count(n) => {
                let last = (n - 1) as f64;
                Ok((0..*n).map(|i| if i + 1 == *n { t_end } else { t_end * i as f64 / last }).collect())
            }
            Samples::Times(ts) => {
                if ts.is_empty() {
                    return Err(ConfigError::invalid("samples.times", "empty sample grid"));
                }
                if ts.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(ConfigError::invalid("samples.times", "times must be strictly increasing"));
                }
                if ts[0] < 0.0 || ts[ts.len() - 1] > t_end {
                    return Err(ConfigError::invalid("samples.times", format!("times must lie in [0, {t_end}]")));
                }
                Ok(ts.clone())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    #[default]
    Zero,
    FixedPoint,
    /// `a_j = a_hat_j (1 + amplitude u_j)` with `u_j` uniform in `[-1, 1]`;
    /// without its own seed the run seed is used.
    Perturbed {
        #[serde(default)]
        seed: Option<u64>,
        amplitude: f64,
    },
    Explicit {
        values: Vec<f64>,
    },
}

impl InitialData {
    pub fn build(&self, params: &ModelParams, run_seed: u64) -> Result<ShellState, ConfigError> {
        match self {
            InitialData::Zero => Ok(ShellState::zeros(params)),
            InitialData::FixedPoint => Ok(fixed_point(params)),
            InitialData::Perturbed { seed, amplitude } => {
                if !(0.0..=1.0).contains(amplitude) {
                    return Err(ConfigError::invalid(
                        "initial.amplitude",
                        format!("must lie in [0, 1] to keep data nonnegative, got {amplitude}"),
                    ));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(run_seed));
                let a = fixed_point(params).a.iter().map(|x| x * (1.0 + amplitude * rng.gen_range(-1.0..=1.0))).collect();
                Ok(ShellState::new(0.0, a))
            }
            InitialData::Explicit { values } => {
                if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                    return Err(ConfigError::invalid("initial.values", format!("amplitudes must be finite and >= 0, got {v}")));
                }
                Ok(ShellState::checked(0.0, values.clone(), params)?)
            }
        }
    }
}

/// Which diagnostics to compute and over which windows. Unset windows are
/// resolved from `t_end` (see [`RunConfig::resolve`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnosticsConfig {
    pub enabled: bool,
    /// Window of the decay-rate fit; default `[min(2, t_end / 2), t_end]`.
    pub decay_window: Option<[f64; 2]>,
    /// Time-average window of spectrum, dissipation and norms; default `[t_end / 2, t_end]`.
    pub average_window: Option<[f64; 2]>,
    /// Spectrum fit shells; default `[3, N - 5]`.
    pub fit_range: Option<[usize; 2]>,
    /// Number of interior samples at which the partial-energy inequality is checked.
    pub inequality_samples: usize,
    /// Allowance of the pointwise decay bound.
    pub decay_bound_tol: f64,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            decay_window: None,
            average_window: None,
            fit_range: None,
            inequality_samples: 20,
            decay_bound_tol: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    pub params: ParamsConfig,
    #[serde(default)]
    pub control: StepControl,
    pub t_end: f64,
    #[serde(default)]
    pub samples: Samples,
    #[serde(default)]
    pub initial: InitialData,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::invalid(
                "schema_version",
                format!("unsupported version {} (expected {SCHEMA_VERSION})", self.schema_version),
            ));
        }
        let params = self.params.build()?;
        self.control.validate()?;
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(ConfigError::invalid("t_end", format!("must be positive and finite, got {}", self.t_end)));
        }
        self.samples.grid(self.t_end)?;
        self.initial.build(&params, self.seed)?;
        let d = &self.diagnostics;
        for (name, w) in [("diagnostics.decay_window", d.decay_window), ("diagnostics.average_window", d.average_window)] {
            if let Some([a, b]) = w {
                if !(0.0 <= a && a < b && b <= self.t_end) {
                    return Err(ConfigError::invalid(name, format!("need 0 <= t1 < t2 <= t_end, got [{a}, {b}]")));
                }
            }
        }
        if !(d.decay_bound_tol >= 0.0) {
            return Err(ConfigError::invalid("diagnostics.decay_bound_tol", "must be nonnegative"));
        }
        Ok(())
    }

    /// Copy with every defaulted window filled in, as written to `config.resolved.json`.
    pub fn resolve(&self) -> Self {
        let mut out = self.clone();
        let t = self.t_end;
        let d = &mut out.diagnostics;
        d.decay_window.get_or_insert([2.0f64.min(0.5 * t), t]);
        d.average_window.get_or_insert([0.5 * t, t]);
        if d.fit_range.is_none() && self.params.n_shells >= 5 {
            d.fit_range = Some([3, self.params.n_shells - 5]);
        }
        out
    }
}
