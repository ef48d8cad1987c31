//! Fixed point of the forced model, its spectrum, flux and norms.
//!
//!     cargo run --example fixed_point_and_norms -- 1.0 20

use dyadic::{dissipation_rate, energy_flux, fixed_point, rhs, spectrum, ModelParams};

fn main() -> dyadic::Result<()> {
    let mut args = std::env::args().skip(1);
    let f0: f64 = args.next().map(|s| s.parse().expect("f0")).unwrap_or(1.0);
    let n: usize = args.next().map(|s| s.parse().expect("N")).unwrap_or(20);
    let p = ModelParams::standard(f0, n)?;
    let fp = fixed_point(&p);

    let residual = rhs(&fp, &p)?.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    println!("f0 = {f0}, N = {n}, lambda = {:.6}", p.lambda());
    println!("max |rhs| at the fixed point: {residual:.3e}");
    println!("energy norm {:.12}", fp.energy_norm());
    for s in [0.0, 0.5, 0.7, 5.0 / 6.0, 1.0] {
        println!("||a||_{s:.4}^2 = {:.6}", fp.sobolev_sq(s));
    }
    println!("flux through shell N/2: {:.12}", energy_flux(&fp, n / 2, &p)?);
    println!("boundary dissipation:   {:.12}", dissipation_rate(&fp, &p));
    println!("2^(5/12) f0^(3/2):      {:.12}", (5.0f64 / 12.0).exp2() * f0.powf(1.5));

    println!("\n j  k          E(k)         2^(5/6) f0 k^(-5/3)");
    for (j, (k, e)) in spectrum(&fp).pairs().enumerate() {
        println!("{j:2}  {k:<9}  {e:.6e}  {:.6e}", (5.0f64 / 6.0).exp2() * f0 * k.powf(-5.0 / 3.0));
    }
    Ok(())
}
