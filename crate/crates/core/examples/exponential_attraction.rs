//! Convergence to the fixed point: decay fit, Lyapunov decrease and the
//! partial-energy inequality on a run from rest.
//!
//!     cargo run --release --example exponential_attraction

use dyadic::diagnostics::{check_lyapunov_decrease_all_pairs, check_partial_energy_inequality, constants, decay_fit};
use dyadic::{integrate, ModelParams, ShellState, StepControl, LAMBDA_EXP_3D};

fn main() -> dyadic::Result<()> {
    let p = ModelParams::standard(ModelParams::normalized_forcing(LAMBDA_EXP_3D), 18)?;
    let times: Vec<f64> = (0..=3000).map(|i| i as f64 * 0.01).collect();
    let traj = integrate(&ShellState::zeros(&p), &p, &StepControl::default(), 30.0, &times)?;
    let c = constants(&p)?;
    println!("alpha = {:.10}, guaranteed rate beta = {:.10}", c.alpha, c.beta_normalized);

    let fit = decay_fit(&traj, &c, 2.0, 30.0, 0.01)?;
    println!(
        "fitted rate {:.4} (r^2 {:.4}, {} samples), worst |b|^2 / envelope {:.3e}",
        fit.rate_normalized, fit.r_squared, fit.samples_used, fit.bound_ratio
    );

    let rec = check_lyapunov_decrease_all_pairs(&traj, &c, 0.0, 30.0)?;
    println!(
        "decrease over {} pairs: {}, worst normalized slack {:.3e}",
        rec.value("pairs").unwrap_or(0.0),
        if rec.passed() { "holds" } else { "violated" },
        rec.value("worst_normalized_slack").unwrap_or(f64::NAN)
    );

    for k in [2, 8, 16] {
        let r = check_partial_energy_inequality(&traj, k, 5.0, 0.01)?;
        println!(
            "k = {k:2}: d/dt |P_k b|^2 = {:+.4e}, bound {:+.4e}, tol_fd {:.1e}",
            r.value("derivative").unwrap_or(f64::NAN),
            r.value("rhs_first").unwrap_or(f64::NAN),
            r.tolerance
        );
    }
    Ok(())
}
