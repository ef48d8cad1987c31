//! Cartesian parameter sweeps executed on a worker pool.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ConfigError, RunConfig, SCHEMA_VERSION};
use super::run::{csv_string, fmt_f64, run_to_dir, RunSummary};

/// Environment variable capping the number of concurrent runs.
pub const THREADS_ENV: &str = "DYADIC_THREADS";

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

fn default_max_runs() -> usize {
    256
}

/// Values swept per axis; an empty axis keeps the base value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Axes {
    pub f0: Vec<f64>,
    pub n_shells: Vec<usize>,
    pub lambda_exp: Vec<f64>,
    pub seed: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    pub base: RunConfig,
    #[serde(default)]
    pub axes: Axes,
    #[serde(default = "default_max_runs")]
    pub max_runs: usize,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

/// Coordinates of one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub f0: f64,
    pub n_shells: usize,
    pub lambda_exp: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub index: usize,
    pub point: SweepPoint,
    pub dir: PathBuf,
    pub result: Result<RunSummary, String>,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::invalid("schema_version", format!("unsupported version {}", cfg.schema_version)));
        }
        let count = cfg.point_count();
        if count > cfg.max_runs {
            return Err(ConfigError::invalid("max_runs", format!("sweep has {count} points, cap is {}", cfg.max_runs)));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        Self::from_json(&text)
    }

    fn point_count(&self) -> usize {
        let len = |n: usize| n.max(1);
        let a = &self.axes;
        len(a.f0.len()) * len(a.n_shells.len()) * len(a.lambda_exp.len()) * len(a.seed.len())
    }

    /// Points in axis order `f0`, `n_shells`, `lambda_exp`, `seed` (last varies fastest).
    pub fn points(&self) -> Vec<SweepPoint> {
        let p = &self.base.params;
        let or = |v: &Vec<f64>, d: f64| if v.is_empty() { vec![d] } else { v.clone() };
        let f0s = or(&self.axes.f0, p.f0);
        let ns = if self.axes.n_shells.is_empty() { vec![p.n_shells] } else { self.axes.n_shells.clone() };
        let gs = or(&self.axes.lambda_exp, p.lambda_exp);
        let seeds = if self.axes.seed.is_empty() { vec![self.base.seed] } else { self.axes.seed.clone() };
        let mut out = Vec::new();
        for &f0 in &f0s {
            for &n_shells in &ns {
                for &lambda_exp in &gs {
                    for &seed in &seeds {
                        out.push(SweepPoint { f0, n_shells, lambda_exp, seed });
                    }
                }
            }
        }
        out
    }

    /// Base configuration with the point's coordinates substituted.
    pub fn config_for(&self, point: &SweepPoint) -> RunConfig {
        let mut cfg = self.base.clone();
        cfg.params.f0 = point.f0;
        cfg.params.lambda_exp = point.lambda_exp;
        cfg.seed = point.seed;
        if cfg.params.n_shells != point.n_shells {
            cfg.params.n_shells = point.n_shells;
            // a fit range tied to the base N may not fit the new one
            cfg.diagnostics.fit_range = None;
        }
        cfg
    }
}

/// Worker count: `DYADIC_THREADS` if set and positive, else the available parallelism.
pub fn thread_count() -> usize {
    let available = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    match std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        Some(n) if n > 0 => n,
        _ => available,
    }
}

/// Runs every point into `out/run_XXX` and writes `out/summary.csv`. Rows come
/// back in point order regardless of completion order.
pub fn run_sweep(cfg: &SweepConfig, out: &Path, threads: usize) -> std::io::Result<Vec<SweepRow>> {
    fs::create_dir_all(out)?;
    let points = cfg.points();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| std::io::Error::other(e.to_string()))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        points
            .par_iter()
            .enumerate()
            .map(|(index, point)| {
                let dir = out.join(format!("run_{index:03}"));
                let result = run_to_dir(&cfg.config_for(point), Some(&dir))
                    .map(|(outcome, _)| outcome.summary)
                    .map_err(|e| e.to_string());
                if let Err(msg) = &result {
                    // keep a trace of the failure next to the other runs
                    let _ = fs::create_dir_all(&dir);
                    let _ = fs::write(dir.join("error.txt"), msg);
                }
                SweepRow { index, point: point.clone(), dir, result }
            })
            .collect()
    });
    fs::write(out.join("summary.csv"), summary_csv(&rows))?;
    Ok(rows)
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub const SUMMARY_COLUMNS: [&str; 14] = [
    "run",
    "status",
    "f0",
    "n_shells",
    "lambda_exp",
    "seed",
    "final_b_norm_sq",
    "decay_rate",
    "spectrum_slope",
    "mean_dissipation",
    "h56_sq_steady",
    "checks_passed",
    "checks_failed",
    "error",
];

pub fn summary_csv(rows: &[SweepRow]) -> String {
    let header = SUMMARY_COLUMNS.map(String::from);
    let lines = rows.iter().map(|row| {
        let p = &row.point;
        let mut line = vec![row.index.to_string()];
        let coords = [fmt_f64(p.f0), p.n_shells.to_string(), fmt_f64(p.lambda_exp), p.seed.to_string()];
        match &row.result {
            Ok(s) => {
                line.push("ok".into());
                line.extend(coords);
                line.extend([
                    fmt_f64(s.final_b_norm_sq),
                    opt(s.decay_rate),
                    opt(s.spectrum_slope),
                    opt(s.mean_dissipation),
                    fmt_f64(s.h56_sq_steady),
                    s.checks_passed.to_string(),
                    s.checks_failed.to_string(),
                    String::new(),
                ]);
            }
            Err(msg) => {
                line.push("failed".into());
                line.extend(coords);
                line.extend(std::iter::repeat_n(String::new(), 7));
                line.push(msg.clone());
            }
        }
        line
    });
    csv_string(&header, lines)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sweep(axes: &str) -> SweepConfig {
        SweepConfig::from_json(&format!(
            r#"{{"base": {{"params": {{"f0": 1.0, "n_shells": 6}}, "t_end": 1.0, "samples": {{"count": 11}}}}, "axes": {axes}}}"#
        ))
        .unwrap()
    }

    #[test]
    fn cartesian_order_and_count() {
        let s = sweep(r#"{"f0": [0.5, 1.0], "n_shells": [4, 5, 6]}"#);
        let pts = s.points();
        assert_eq!(pts.len(), 6);
        assert_eq!((pts[0].f0, pts[0].n_shells), (0.5, 4));
        assert_eq!((pts[1].f0, pts[1].n_shells), (0.5, 5));
        assert_eq!((pts[5].f0, pts[5].n_shells), (1.0, 6));
        assert_eq!(sweep("{}").points().len(), 1);
    }

    #[test]
    fn cap_is_enforced() {
        let text = r#"{"base": {"params": {"f0": 1.0, "n_shells": 6}, "t_end": 1.0}, "axes": {"seed": [1, 2, 3]}, "max_runs": 2}"#;
        let err = SweepConfig::from_json(text).unwrap_err();
        assert!(err.to_string().contains("max_runs"));
    }

    #[test]
    fn empty_axes_reproduce_the_base_config() {
        let s = sweep("{}");
        assert_eq!(s.config_for(&s.points()[0]), s.base);
    }
}
