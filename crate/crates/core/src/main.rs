use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use dyadic::runner::{format_table, run_criteria, run_sweep, run_to_dir, thread_count, RunConfig, SweepConfig, Tier};

#[derive(Parser)]
#[command(name = "dyadic", version, about = "Forced dyadic model: runs, sweeps and verification")]
struct Cli {
    /// Output directory (overrides the config's `output_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print nothing but errors.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one configuration and write its artifacts.
    Run { config: PathBuf },
    /// Run every point of a sweep configuration.
    Sweep { config: PathBuf },
    /// Evaluate the acceptance criteria.
    Verify {
        #[arg(long, value_enum, default_value_t = TierArg::Fast)]
        tier: TierArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TierArg {
    Fast,
    Full,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { config } => match RunConfig::load(&config).map_err(Into::into).and_then(|c| run_to_dir(&c, cli.out.as_deref())) {
            Ok((outcome, dir)) => {
                if !cli.quiet {
                    let s = &outcome.summary;
                    println!(
                        "wrote {} ({} samples, {} checks passed, {} failed)",
                        dir.display(),
                        outcome.trajectory.len(),
                        s.checks_passed,
                        s.checks_failed
                    );
                }
                0
            }
            Err(e) => {
                eprintln!("error: {e}");
                e.exit_code()
            }
        },
        Command::Sweep { config } => match SweepConfig::load(&config) {
            Err(e) => {
                eprintln!("error: {e}");
                2
            }
            Ok(sweep) => {
                let out = cli.out.or_else(|| sweep.output_dir.clone()).unwrap_or_else(|| PathBuf::from("sweep_output"));
                let threads = thread_count();
                match run_sweep(&sweep, &out, threads) {
                    Err(e) => {
                        eprintln!("error: {e}");
                        1
                    }
                    Ok(rows) => {
                        let ok = rows.iter().filter(|r| r.result.is_ok()).count();
                        for r in rows.iter().filter(|r| r.result.is_err()) {
                            eprintln!("run_{:03} failed: {}", r.index, r.result.as_ref().unwrap_err());
                        }
                        if !cli.quiet {
                            println!(
                                "{ok} of {} runs succeeded (worker threads: {threads}); summary in {}",
                                rows.len(),
                                out.join("summary.csv").display()
                            );
                        }
                        if ok == 0 {
                            3
                        } else {
                            0
                        }
                    }
                }
            }
        },
        Command::Verify { tier } => {
            let tier = match tier {
                TierArg::Fast => Tier::Fast,
                TierArg::Full => Tier::Full,
            };
            let outcomes = run_criteria(tier);
            if !cli.quiet {
                print!("{}", format_table(&outcomes));
            }
            let failing: Vec<String> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id.to_string()).collect();
            if failing.is_empty() {
                0
            } else {
                eprintln!("failing criteria: {}", failing.join(", "));
                1
            }
        }
    };
    ExitCode::from(code as u8)
}
