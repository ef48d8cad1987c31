//! A small forcing sweep through the runner API, mirroring `dyadic sweep`.
//!
//!     cargo run --release --example parameter_sweep -- /tmp/dyadic_sweep

use std::path::PathBuf;

use dyadic::runner::{run_sweep, thread_count, SweepConfig};

const SWEEP: &str = r#"{
  "base": {
    "params": {"f0": 1.0, "n_shells": 14},
    "t_end": 100.0,
    "samples": {"count": 5001},
    "diagnostics": {"average_window": [50.0, 100.0]}
  },
  "axes": {"f0": [0.25, 1.0, 4.0]}
}"#;

fn main() {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("dyadic_sweep"));
    let cfg = SweepConfig::from_json(SWEEP).expect("valid sweep");
    let rows = run_sweep(&cfg, &out, thread_count()).expect("output directory is writable");
    println!("f0      mean D       D / (2^(5/12) f0^(3/2))");
    for row in &rows {
        match &row.result {
            Ok(s) => {
                let d = s.mean_dissipation.unwrap_or(f64::NAN);
                let f0 = row.point.f0;
                println!("{f0:<6}  {d:.6e}  {:.6}", d / ((5.0f64 / 12.0).exp2() * f0.powf(1.5)));
            }
            Err(e) => println!("{:<6}  failed: {e}", row.point.f0),
        }
    }
    println!("artifacts in {}", out.display());
}
