//! Spin-up from rest: energy, dissipation and step statistics along the way.
//!
//!     cargo run --release --example integrate_transient

use dyadic::{integrate, Method, ModelParams, ShellState, StepControl};

fn main() -> dyadic::Result<()> {
    let times: Vec<f64> = (0..=20).map(|i| i as f64).collect();

    // the explicit method is limited by the stiff top shells, so compare at small N
    let small = ModelParams::standard(1.0, 8)?;
    for method in [Method::Rosenbrock, Method::DormandPrince] {
        let control = StepControl::default().with_method(method);
        let traj = integrate(&ShellState::zeros(&small), &small, &control, 20.0, &times)?;
        let s = &traj.stats;
        println!(
            "N = 8, {method:?}: {} accepted, {} rejected, {} rhs evaluations, dt in [{:.2e}, {:.2e}]",
            s.accepted, s.rejected, s.rhs_evals, s.dt_min_used, s.dt_max_used
        );
    }

    let p = ModelParams::standard(1.0, 16)?;
    let traj = integrate(&ShellState::zeros(&p), &p, &StepControl::default(), 20.0, &times)?;
    println!("\nN = 16, {} steps", traj.stats.accepted);
    println!("    t   |a|^2        D(t)         (f,a)        a_N");
    for (i, st) in traj.samples.iter().enumerate().step_by(2) {
        println!(
            "{:5.1}   {:.6e}  {:.6e}  {:.6e}  {:.6e}",
            st.t, traj.energy_sq[i], traj.dissipation[i], traj.forcing_power[i], st.a[p.n_shells()]
        );
    }
    Ok(())
}
