//! Configuration-driven runs, sweeps and the verification suite.

pub mod config;
pub mod run;
pub mod sweep;
pub mod verify;

pub use config::{ConfigError, DiagnosticsConfig, InitialData, ParamsConfig, RunConfig, Samples};
pub use run::{execute, run_to_dir, write_artifacts, RunError, RunOutcome, RunSummary};
pub use sweep::{run_sweep, thread_count, SweepConfig, SweepPoint, SweepRow};
pub use verify::{criteria, format_table, run_criteria, Criterion, CriterionOutcome, Tier};
