//! Steady Sobolev norms against the truncation level: the 5/6 norm grows
//! like N + 1 while lower norms level off.
//!
//!     cargo run --release --example blowup_proxy

use dyadic::diagnostics::time_average;
use dyadic::integrator::{Direction, EventSpec, Functional};
use dyadic::{integrate, ModelParams, ShellState, StepControl};

fn main() -> dyadic::Result<()> {
    let times: Vec<f64> = (0..=4000).map(|i| i as f64 * 0.05).collect();
    let exps = [0.5, 0.7, 0.8, 5.0 / 6.0];
    println!(" N   {}", exps.map(|s| format!("s={s:.3}      ")).join(""));
    for n in [10, 15, 20, 25] {
        let p = ModelParams::standard(1.0, n)?;
        let traj = integrate(&ShellState::zeros(&p), &p, &StepControl::default(), 200.0, &times)?;
        let row: Vec<String> = exps
            .iter()
            .map(|&s| time_average(&traj, 100.0, 200.0, |i| traj.samples[i].sobolev_sq(s)).map(|v| format!("{v:<13.6}")))
            .collect::<dyadic::Result<_>>()?;
        println!("{n:2}   {}", row.join(""));
    }

    println!("\nfirst time ||a||_(5/6) reaches 0.9 sqrt(N+1), f0 = 2^(-5/6):");
    for n in [10, 14, 18, 22] {
        let p = ModelParams::standard((-5.0f64 / 6.0).exp2(), n)?;
        let ev = EventSpec::new(Functional::SobolevNorm { s: 5.0 / 6.0 }, 0.9 * ((n + 1) as f64).sqrt(), Direction::Upward);
        let (_, hits) =
            dyadic::integrate_with_events(&ShellState::zeros(&p), &p, &StepControl::default(), 100.0, &[], &[ev])?;
        match &hits[0] {
            Some(hit) => println!("N = {n:2}: t = {:.6}", hit.t),
            None => println!("N = {n:2}: not reached"),
        }
    }
    Ok(())
}
