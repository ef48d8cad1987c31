//! The adaptive integrator against the fixed-step references.
//!
//!     cargo run --release --example oracle_crosscheck

use dyadic::oracle::{integrating_factor_reference, rk4_reference};
use dyadic::{integrate, Method, ModelParams, ShellState, StepControl};

fn max_rel(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)).fold(0.0, f64::max)
}

fn main() -> dyadic::Result<()> {
    let p = ModelParams::standard(1.0, 4)?;
    let z = ShellState::zeros(&p);
    let reference = rk4_reference(&z, &p, 1e-5, &[2.0])?;
    let exact = &reference.states[0].a;

    for method in [Method::Rosenbrock, Method::DormandPrince] {
        for rtol in [1e-6, 1e-8, 1e-10] {
            let control = StepControl::default().with_method(method).with_tolerances(rtol, rtol * 1e-4);
            let traj = integrate(&z, &p, &control, 2.0, &[2.0])?;
            println!(
                "{method:?} rtol {rtol:.0e}: {:6} steps, max relative difference {:.3e}",
                traj.stats.accepted,
                max_rel(&traj.samples[0].a, exact)
            );
        }
    }

    println!("\nintegrating-factor scheme at T = 1:");
    let at_one = rk4_reference(&z, &p, 1e-5, &[1.0])?;
    for dt in [4e-3, 2e-3, 1e-3, 5e-4] {
        let s = integrating_factor_reference(&z, &p, dt, &[1.0])?;
        println!("dt {dt:.1e}: max relative error {:.4e}", max_rel(&s.states[0].a, &at_one.states[0].a));
    }
    Ok(())
}
