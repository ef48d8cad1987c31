//! Time-averaged spectrum and mean dissipation of a long run.
//!
//!     cargo run --release --example kolmogorov_spectrum -- 20

use dyadic::diagnostics::{mean_dissipation, spectrum_fit, time_averaged_energies};
use dyadic::{integrate, ModelParams, ShellState, StepControl};

fn main() -> dyadic::Result<()> {
    let n: usize = std::env::args().nth(1).map(|s| s.parse().expect("N")).unwrap_or(20);
    let p = ModelParams::standard(1.0, n)?;
    let times: Vec<f64> = (0..=20_000).map(|i| i as f64 * 0.01).collect();
    let traj = integrate(&ShellState::zeros(&p), &p, &StepControl::default(), 200.0, &times)?;

    let fit = spectrum_fit(&traj, 100.0, 200.0, None)?;
    println!(
        "fit over shells {}..={}: slope {:.6}, prefactor {:.6} (2^(5/6) = {:.6}), rms {:.2e}",
        fit.j_min,
        fit.j_max,
        fit.slope,
        fit.prefactor(),
        (5.0f64 / 6.0).exp2(),
        fit.residual_rms
    );
    println!("mean dissipation {:.6} (2^(5/12) = {:.6})", mean_dissipation(&traj, 100.0, 200.0)?, (5.0f64 / 12.0).exp2());
    for (j, e) in time_averaged_energies(&traj, 100.0, 200.0)?.iter().enumerate() {
        println!("{j:2} {:.6e}", e);
    }
    Ok(())
}
