//! Single runs: integrate, diagnose, write artifacts.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::diagnostics::{
    check_lyapunov_decrease_all_pairs, check_partial_energy_inequality, constants, cube_56_integral, decay_fit,
    energy_balance_residual, hs_square_integral, mean_dissipation, spectrum_fit, time_average,
    time_averaged_energies, CheckRecord, DiagnosticsReport,
};
use crate::error::Error;
use crate::integrator::{integrate, StepStats, Trajectory};
use crate::model::energy_flux;
use crate::params::Closure;

use super::config::{ConfigError, RunConfig};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("integration failed: {0}")]
    Integration(Error),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl RunError {
    /// Process exit code: 2 for configuration errors, 3 for integration failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Integration(_) => 3,
            RunError::Io { .. } => 1,
        }
    }
}

/// Headline numbers of a run, as collected in sweep summaries.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunSummary {
    pub final_b_norm_sq: f64,
    pub decay_rate: Option<f64>,
    pub spectrum_slope: Option<f64>,
    pub mean_dissipation: Option<f64>,
    /// Time average of `||a||_{5/6}^2` over the averaging window.
    pub h56_sq_steady: f64,
    pub checks_passed: usize,
    pub checks_failed: usize,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub config: RunConfig,
    pub trajectory: Trajectory,
    pub report: DiagnosticsReport,
    pub summary: RunSummary,
    pub wall_time_s: f64,
}

#[derive(Serialize)]
struct RunMetadata<'a> {
    crate_version: &'static str,
    wall_time_s: f64,
    samples: usize,
    stats: &'a StepStats,
    summary: &'a RunSummary,
}

/// Integrates and diagnoses a validated configuration. Nothing is written.
pub fn execute(config: &RunConfig) -> Result<RunOutcome, RunError> {
    config.validate()?;
    let config = config.resolve();
    let params = config.params.build()?;
    let initial = config.initial.build(&params, config.seed)?;
    let times = config.samples.grid(config.t_end)?;
    let start = Instant::now();
    let trajectory =
        integrate(&initial, &params, &config.control, config.t_end, &times).map_err(RunError::Integration)?;
    let report = if config.diagnostics.enabled {
        standard_report(&trajectory, &config)
    } else {
        DiagnosticsReport::new(params.n_shells(), params.frame_scale())
    };
    let summary = summarize(&trajectory, &report, &config);
    Ok(RunOutcome { config, trajectory, report, summary, wall_time_s: start.elapsed().as_secs_f64() })
}

fn summarize(traj: &Trajectory, report: &DiagnosticsReport, config: &RunConfig) -> RunSummary {
    let [a1, a2] = config.diagnostics.average_window.expect("resolved");
    let value = |check: &str, key: &str| report.get(check).and_then(|r| r.value(key));
    RunSummary {
        final_b_norm_sq: traj.deviation_norm_sq(traj.len() - 1),
        decay_rate: value("decay_fit", "rate"),
        spectrum_slope: value("spectrum_fit", "slope"),
        mean_dissipation: value("mean_dissipation", "value"),
        h56_sq_steady: time_average(traj, a1, a2, |i| traj.samples[i].sobolev_sq(5.0 / 6.0)).unwrap_or(f64::NAN),
        checks_passed: report.pass_count(),
        checks_failed: report.fail_count(),
    }
}

/// Descriptive record carrying an error that prevented a check.
fn skipped(check: &str, anchor: &str, err: &Error) -> CheckRecord {
    CheckRecord::new(check, anchor, 0.0).note(err.to_string())
}

/// The diagnostics written to `diagnostics.json` for every run.
pub fn standard_report(traj: &Trajectory, config: &RunConfig) -> DiagnosticsReport {
    let params = &traj.params;
    let n = params.n_shells();
    let mut report = DiagnosticsReport::new(n, params.frame_scale());
    let t0 = traj.samples[0].t;
    let t_end = traj.samples[traj.len() - 1].t;
    let diag = &config.diagnostics;

    let min = traj.min_amplitude();
    report.push(CheckRecord::new("positivity", "positivity", 0.0).with("min_amplitude", min).verdict(min >= 0.0));

    if traj.len() >= 2 {
        let mut r = CheckRecord::new("energy_equality", "energy-equality-critical-regularity", 0.0);
        if let Ok(v) = energy_balance_residual(traj, t0, t_end) {
            r = r.with("energy_balance_residual", v);
        }
        if let Ok(v) = cube_56_integral(traj, t0, t_end) {
            r = r.with("cube_56_integral", v);
        }
        report.push(r);
        let mut r = CheckRecord::new("hs_square_integral", "subcritical-integrability", 0.0);
        for (key, s) in [("s_0", 0.0), ("s_0.7", 0.7), ("s_5/6", 5.0 / 6.0)] {
            if let Ok(v) = hs_square_integral(traj, s, t0, t_end) {
                r = r.with(key, v);
            }
        }
        report.push(r);
    }

    match constants(params) {
        Err(e) => report.push(skipped("constants", "stability-constants", &e)),
        Ok(consts) => {
            report.push(
                CheckRecord::new("constants", "stability-constants", 0.0)
                    .with("alpha", consts.alpha)
                    .with("series", consts.series)
                    .with("beta_normalized", consts.beta_normalized)
                    .with("beta_general", consts.beta_general)
                    .with("frame_scale", consts.frame_scale),
            );
            let [d1, d2] = diag.decay_window.expect("resolved");
            match decay_fit(traj, &consts, d1, d2, diag.decay_bound_tol) {
                Ok(fit) => report.push(fit.record(&consts, diag.decay_bound_tol)),
                Err(e) => report.push(skipped("decay_fit", "exponential-attraction", &e)),
            }
            match check_lyapunov_decrease_all_pairs(traj, &consts, t0, t_end) {
                Ok(r) => report.push(r),
                Err(e) => report.push(skipped("lyapunov_decrease_all_pairs", "lyapunov-decrease", &e)),
            }
        }
    }

    if let Some(r) = inequality_record(traj, n.saturating_sub(2), diag.inequality_samples) {
        report.push(r);
    }

    let [w1, w2] = diag.average_window.expect("resolved");
    let fit_range = diag.fit_range.map(|[a, b]| (a, b));
    match (fit_range, time_averaged_energies(traj, w1, w2)) {
        (Some(range), Ok(_)) => match spectrum_fit(traj, w1, w2, Some(range)) {
            Ok(fit) => report.push(
                CheckRecord::new("spectrum_fit", "kolmogorov-spectrum", 0.0)
                    .with("slope", fit.slope)
                    .with("log2_prefactor", fit.log2_prefactor)
                    .with("prefactor_ratio", fit.prefactor() / ((5.0f64 / 6.0).exp2() * params.f0()))
                    .with("j_min", fit.j_min as f64)
                    .with("j_max", fit.j_max as f64)
                    .with("residual_rms", fit.residual_rms),
            ),
            Err(e) => report.push(skipped("spectrum_fit", "kolmogorov-spectrum", &e)),
        },
        (None, _) => {}
        (_, Err(e)) => report.push(skipped("spectrum_fit", "kolmogorov-spectrum", &e)),
    }

    if params.closure() == Closure::FixedPointClosure {
        match mean_dissipation(traj, w1, w2) {
            Ok(v) => {
                let target = (5.0f64 / 12.0).exp2() * params.f0().powf(1.5);
                report.push(
                    CheckRecord::new("mean_dissipation", "anomalous-dissipation", 0.0)
                        .with("value", v)
                        .with("ratio_to_equilibrium", v / target),
                )
            }
            Err(e) => report.push(skipped("mean_dissipation", "anomalous-dissipation", &e)),
        }
    }
    report
}

/// Partial-energy inequality at up to `count` interior samples, with the
/// local sample spacing as difference width.
fn inequality_record(traj: &Trajectory, k: usize, count: usize) -> Option<CheckRecord> {
    let m = traj.len();
    if count == 0 || m < 5 {
        return None;
    }
    // samples whose neighbours are not evenly spaced are skipped (SampleMiss)
    let candidates: Vec<usize> = (2..m - 2).collect();
    let stride = (candidates.len() as f64 / count as f64).max(1.0);
    let mut checked = 0usize;
    let mut failed = 0usize;
    let mut worst = f64::INFINITY;
    let mut worst_t = f64::NAN;
    let mut pick = 0.0;
    while (pick as usize) < candidates.len() && checked < count {
        let i = candidates[pick as usize];
        pick += stride;
        let w = traj.samples[i + 1].t - traj.samples[i].t;
        let Ok(r) = check_partial_energy_inequality(traj, k, traj.samples[i].t, w) else { continue };
        checked += 1;
        if !r.passed() {
            failed += 1;
        }
        let margin = r.value("slack_first").unwrap_or(f64::NAN) + r.tolerance;
        if margin < worst {
            worst = margin;
            worst_t = traj.samples[i].t;
        }
    }
    Some(
        CheckRecord::new("partial_energy_inequality", "partial-energy-inequality", 0.0)
            .with("k", k as f64)
            .with("times_checked", checked as f64)
            .with("failures", failed as f64)
            .with("worst_margin", worst)
            .with("worst_margin_t", worst_t)
            .verdict(checked > 0 && failed == 0),
    )
}

/// Full round-trip decimal formatting (17 significant digits).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn write(path: &Path, contents: &str) -> Result<(), RunError> {
    fs::write(path, contents).map_err(|source| RunError::Io { path: path.into(), source })
}

pub(crate) fn csv_string(header: &[String], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

/// `t, a_0..a_N, energy_sq, b_norm_sq, h56_norm, flux_mid, dissipation`.
pub fn timeseries_csv(traj: &Trajectory) -> String {
    let n = traj.params.n_shells();
    let mut header = vec!["t".to_string()];
    header.extend((0..=n).map(|j| format!("a_{j}")));
    header.extend(["energy_sq", "b_norm_sq", "h56_norm", "flux_mid", "dissipation"].map(String::from));
    let rows = traj.samples.iter().enumerate().map(|(i, s)| {
        let flux = energy_flux(s, n / 2, &traj.params).expect("shell in range");
        let mut row = vec![fmt_f64(s.t)];
        row.extend(s.a.iter().map(|a| fmt_f64(*a)));
        row.extend(
            [traj.energy_sq[i], traj.deviation_norm_sq(i), s.sobolev_norm(5.0 / 6.0), flux, traj.dissipation[i]]
                .map(fmt_f64),
        );
        row
    });
    csv_string(&header, rows)
}

/// `j, k, E_time_avg` over `[t1, t2]`.
pub fn spectrum_csv(traj: &Trajectory, t1: f64, t2: f64) -> crate::error::Result<String> {
    let energies = time_averaged_energies(traj, t1, t2)?;
    let header = ["j", "k", "E_time_avg"].map(String::from);
    let rows = energies.iter().enumerate().map(|(j, e)| vec![j.to_string(), fmt_f64((j as f64).exp2()), fmt_f64(*e)]);
    Ok(csv_string(&header, rows))
}

/// Writes every artifact of `outcome` into `dir` (created if missing).
pub fn write_artifacts(outcome: &RunOutcome, dir: &Path) -> Result<(), RunError> {
    fs::create_dir_all(dir).map_err(|source| RunError::Io { path: dir.into(), source })?;
    write(&dir.join("config.resolved.json"), &outcome.config.to_json())?;
    write(&dir.join("timeseries.csv"), &timeseries_csv(&outcome.trajectory))?;
    let [w1, w2] = outcome.config.diagnostics.average_window.expect("resolved");
    let spectrum = spectrum_csv(&outcome.trajectory, w1, w2).unwrap_or_else(|_| csv_string(&["j", "k", "E_time_avg"].map(String::from), std::iter::empty()));
    write(&dir.join("spectrum.csv"), &spectrum)?;
    write(&dir.join("diagnostics.json"), &outcome.report.to_json())?;
    let meta = RunMetadata {
        crate_version: env!("CARGO_PKG_VERSION"),
        wall_time_s: outcome.wall_time_s,
        samples: outcome.trajectory.len(),
        stats: &outcome.trajectory.stats,
        summary: &outcome.summary,
    };
    write(&dir.join("run.json"), &serde_json::to_string_pretty(&meta).expect("metadata serializes"))?;
    Ok(())
}

/// Runs a configuration and writes its artifacts to `out`, or to the
/// configured `output_dir`, or to `./run_output`.
pub fn run_to_dir(config: &RunConfig, out: Option<&Path>) -> Result<(RunOutcome, PathBuf), RunError> {
    let outcome = execute(config)?;
    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("run_output"));
    write_artifacts(&outcome, &dir)?;
    Ok((outcome, dir))
}
