//! Right-hand side of the truncated forced dyadic model and the scalar
//! functionals built on it (flux, boundary dissipation, spectrum).

use crate::error::{Error, Result};
use crate::params::{Closure, ModelParams};
use crate::state::{ShellState, SpectrumSample};

/// The unique equilibrium `a_j = lambda^{1/6} sqrt(f0) lambda^{-j/3}`.
pub fn fixed_point(params: &ModelParams) -> ShellState {
    let root = params.f0().sqrt();
    let a = (0..params.len())
        .map(|j| root * params.lambda_pow(1.0 / 6.0 - j as f64 / 3.0))
        .collect();
    ShellState::new(0.0, a)
}

/// Amplitude of the virtual shell `N + 1` implied by the closure.
#[inline]
pub fn closure_amplitude(a_last: f64, params: &ModelParams) -> f64 {
    match params.closure() {
        Closure::PureGalerkin => 0.0,
        Closure::FixedPointClosure => params.lambda_pow(-1.0 / 3.0) * a_last,
    }
}

/// `da/dt` of the truncated system.
pub fn rhs(state: &ShellState, params: &ModelParams) -> Result<Vec<f64>> {
    params.check_len(state.len())?;
    let mut out = vec![0.0; state.len()];
    rhs_into(&state.a, params, &mut out);
    Ok(out)
}

/// Unchecked form of [`rhs`]; `a` and `out` must both hold `N + 1` entries.
pub fn rhs_into(a: &[f64], params: &ModelParams, out: &mut [f64]) {
    let n = params.n_shells();
    debug_assert_eq!(a.len(), n + 1);
    debug_assert_eq!(out.len(), n + 1);
    for j in 0..=n {
        let next = if j < n { a[j + 1] } else { closure_amplitude(a[n], params) };
        let lj = params.lambda_pow(j as f64);
        let inflow = if j > 0 {
            params.lambda_pow(j as f64 - 1.0) * a[j - 1] * a[j - 1]
        } else {
            0.0
        };
        out[j] = inflow - lj * a[j] * next + params.forcing(j);
    }
}

/// Forcing power `(f, a) = f0 a_0`.
pub fn forcing_power(state: &ShellState, params: &ModelParams) -> f64 {
    params.f0() * state.a[0]
}

/// Instantaneous energy flux through shell `k`: `lambda^k a_k^2 a_{k+1}`.
pub fn energy_flux(state: &ShellState, k: usize, params: &ModelParams) -> Result<f64> {
    params.check_len(state.len())?;
    let n = params.n_shells();
    if k > n {
        return Err(Error::ShellIndexOutOfRange { index: k, max: n });
    }
    let next = if k < n { state.a[k + 1] } else { closure_amplitude(state.a[n], params) };
    Ok(params.lambda_pow(k as f64) * state.a[k] * state.a[k] * next)
}

/// Energy drained through the truncation boundary, `lambda^{N-1/3} a_N^3`
/// under the fixed-point closure and zero for the pure Galerkin system.
pub fn dissipation_rate(state: &ShellState, params: &ModelParams) -> f64 {
    match params.closure() {
        Closure::PureGalerkin => 0.0,
        Closure::FixedPointClosure => {
            let n = params.n_shells();
            let an = state.a[n];
            params.lambda_pow(n as f64 - 1.0 / 3.0) * an * an * an
        }
    }
}

pub fn spectrum(state: &ShellState) -> SpectrumSample {
    SpectrumSample::from_energies(state.a.iter().map(|x| x * x).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::LAMBDA_EXP_3D;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn fixed_point_values() {
        let p = ModelParams::standard(1.0, 2).unwrap();
        let fp = fixed_point(&p);
        let want = [1.334_839_854_170_034_4, 0.749_153_538_438_340_7, 0.420_448_207_626_857_3];
        for (x, w) in fp.a.iter().zip(want) {
            assert!(close(*x, w, 1e-15), "{x} vs {w}");
        }
        let pn = ModelParams::standard(ModelParams::normalized_forcing(LAMBDA_EXP_3D), 9).unwrap();
        for (j, x) in fixed_point(&pn).a.iter().enumerate() {
            assert!(close(*x, (-5.0 * j as f64 / 6.0).exp2(), 1e-14));
        }
    }

    #[test]
    fn fixed_point_is_equilibrium_of_closed_system() {
        let p = ModelParams::standard(1.0, 12).unwrap();
        let r = rhs(&fixed_point(&p), &p).unwrap();
        for (j, v) in r.iter().enumerate() {
            let scale = p.lambda_pow(j as f64 - 1.0) * fixed_point(&p).a[j.saturating_sub(1)].powi(2) + 1.0;
            assert!(v.abs() / scale < 1e-14, "shell {j}: {v}");
        }
    }

    #[test]
    fn rhs_examples() {
        let p = ModelParams::new(LAMBDA_EXP_3D, 1.0, 2, Closure::PureGalerkin).unwrap();
        assert_eq!(rhs(&ShellState::zeros(&p), &p).unwrap(), vec![1.0, 0.0, 0.0]);
        let r = rhs(&ShellState::new(0.0, vec![1.0, 0.5, 0.25]), &p).unwrap();
        assert!(close(r[0], 0.5, 1e-15));
        assert!(close(r[1], 0.292_893_218_813_452_5, 1e-14));
        assert!(close(r[2], 1.414_213_562_373_095, 1e-15));
        assert!(matches!(
            rhs(&ShellState::new(0.0, vec![1.0, 2.0]), &p),
            Err(Error::LengthMismatch { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn flux_is_constant_at_the_fixed_point() {
        let f0 = ModelParams::normalized_forcing(LAMBDA_EXP_3D);
        let p = ModelParams::standard(f0, 15).unwrap();
        let fp = fixed_point(&p);
        for k in 0..15 {
            let pk = energy_flux(&fp, k, &p).unwrap();
            assert!(close(pk, 0.561_231_024_154_686_5, 1e-14), "k={k}: {pk}");
        }
        for f0 in [0.25, 1.0, 4.0] {
            let p = ModelParams::standard(f0, 10).unwrap();
            let want = (5.0f64 / 12.0).exp2() * f0.powf(1.5);
            for k in 0..=10 {
                assert!(close(energy_flux(&fixed_point(&p), k, &p).unwrap(), want, 1e-14));
            }
            assert!(close(dissipation_rate(&fixed_point(&p), &p), want, 1e-14));
        }
        assert!(matches!(
            energy_flux(&fp, 16, &p),
            Err(Error::ShellIndexOutOfRange { index: 16, max: 15 })
        ));
    }

    #[test]
    fn flux_vanishes_without_downstream_amplitude() {
        let p = ModelParams::standard(1.0, 3).unwrap();
        let s = ShellState::new(0.0, vec![2.0, 1.0, 0.0, 0.0]);
        assert_eq!(energy_flux(&s, 1, &p).unwrap(), 0.0);
        assert_eq!(dissipation_rate(&s, &p), 0.0);
        let g = p.clone().with_closure(Closure::PureGalerkin);
        assert_eq!(dissipation_rate(&fixed_point(&g), &g), 0.0);
    }

    #[test]
    fn spectrum_examples() {
        let p = ModelParams::standard(1.0, 6).unwrap();
        let sp = spectrum(&fixed_point(&p));
        for (j, (k, e)) in sp.pairs().enumerate() {
            assert_eq!(k, (j as f64).exp2());
            assert!(close(e, (5.0f64 / 6.0).exp2() * k.powf(-5.0 / 3.0), 1e-14));
        }
        let z = spectrum(&ShellState::zeros(&p));
        assert!(z.energy.iter().all(|e| *e == 0.0));
    }
}
