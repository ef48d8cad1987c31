//! Vector field of the deviation variables.
//!
//! The integrator advances `b = a / c - lambda^{-j/3}` instead of `a`. Written
//! this way every term of the right-hand side carries a factor of `b`, so it
//! vanishes exactly at the fixed point and keeps full relative precision as the
//! orbit closes in on it (the amplitude form loses everything below
//! `eps * a_j` to cancellation).

use crate::model::fixed_point;
use crate::params::{Closure, ModelParams};
use crate::transform::normalized_fixed_point;

#[derive(Debug, Clone)]
pub(crate) struct DeviationField {
    n: usize,
    closure: Closure,
    /// frame scale `c`; `db/dt = c G(b)`
    scale: f64,
    /// normalized fixed point `lambda^{-j/3}`, `j = 0..=N+1`
    pub(crate) anchor: Vec<f64>,
    /// physical fixed point, so that `b = 0` maps to it without rounding
    equilibrium: Vec<f64>,
    lin_prev: Vec<f64>,
    lin_self: Vec<f64>,
    lin_next: Vec<f64>,
    quad_prev: Vec<f64>,
    quad_next: Vec<f64>,
    closure_ratio: f64,
    closure_sink: f64,
}

impl DeviationField {
    pub(crate) fn new(params: &ModelParams) -> Self {
        let n = params.n_shells();
        let mut anchor = normalized_fixed_point(params);
        anchor.push(params.lambda_pow(-((n + 1) as f64) / 3.0));
        let mut lin_prev = vec![0.0; n + 1];
        let mut lin_self = vec![0.0; n + 1];
        let mut lin_next = vec![0.0; n + 1];
        let mut quad_prev = vec![0.0; n + 1];
        let mut quad_next = vec![0.0; n + 1];
        for j in 0..=n {
            let jf = j as f64;
            if j > 0 {
                lin_prev[j] = 2.0 * params.lambda_pow(2.0 * (jf - 1.0) / 3.0);
                quad_prev[j] = params.lambda_pow(jf - 1.0);
            }
            lin_self[j] = params.lambda_pow((2.0 * jf - 1.0) / 3.0);
            lin_next[j] = params.lambda_pow(2.0 * jf / 3.0);
            quad_next[j] = params.lambda_pow(jf);
        }
        Self {
            n,
            closure: params.closure(),
            scale: params.frame_scale(),
            anchor,
            equilibrium: fixed_point(params).a,
            lin_prev,
            lin_self,
            lin_next,
            quad_prev,
            quad_next,
            closure_ratio: params.lambda_pow(-1.0 / 3.0),
            closure_sink: params.lambda_pow(n as f64 - 1.0 / 3.0),
        }
    }

    pub(crate) fn dim(&self) -> usize {
        self.n + 1
    }

    #[inline]
    fn next_deviation(&self, b: &[f64], j: usize) -> f64 {
        if j < self.n {
            b[j + 1]
        } else {
            match self.closure {
                Closure::FixedPointClosure => self.closure_ratio * b[self.n],
                Closure::PureGalerkin => -self.anchor[self.n + 1],
            }
        }
    }

    /// `out = db/dt` in physical time.
    pub(crate) fn eval(&self, b: &[f64], out: &mut [f64]) {
        for j in 0..=self.n {
            let next = self.next_deviation(b, j);
            let prev = if j > 0 { b[j - 1] } else { 0.0 };
            let g = self.lin_prev[j] * prev - self.lin_self[j] * b[j] - self.lin_next[j] * next
                + self.quad_prev[j] * prev * prev
                - self.quad_next[j] * b[j] * next;
            out[j] = self.scale * g;
        }
    }

    /// Tridiagonal Jacobian `d(db/dt)/db` as (sub, diag, super) bands.
    pub(crate) fn jacobian(&self, b: &[f64], sub: &mut [f64], diag: &mut [f64], sup: &mut [f64]) {
        let c = self.scale;
        let amp = |j: usize| self.anchor[j] + b[j];
        for j in 0..=self.n {
            if j > 0 {
                sub[j - 1] = c * 2.0 * self.quad_prev[j] * amp(j - 1);
            }
            if j < self.n {
                diag[j] = -c * self.quad_next[j] * amp(j + 1);
                sup[j] = -c * self.quad_next[j] * amp(j);
            } else {
                diag[j] = match self.closure {
                    Closure::FixedPointClosure => -c * 2.0 * self.closure_sink * amp(j),
                    Closure::PureGalerkin => 0.0,
                };
            }
        }
    }

    /// Normalized amplitude `a_j / c = lambda^{-j/3} + b_j`.
    #[inline]
    pub(crate) fn to_amplitudes(&self, b: &[f64], out: &mut [f64]) {
        for j in 0..=self.n {
            // b_j >= -anchor_j is enforced upstream; only rounding can go below zero
            out[j] = (self.equilibrium[j] + self.scale * b[j]).max(0.0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rhs;
    use crate::params::LAMBDA_EXP_3D;
    use crate::transform::{from_deviation, Deviation};

    fn params(closure: Closure, f0: f64, n: usize) -> ModelParams {
        ModelParams::new(LAMBDA_EXP_3D, f0, n, closure).unwrap()
    }

    #[test]
    fn matches_amplitude_form() {
        for closure in [Closure::FixedPointClosure, Closure::PureGalerkin] {
            for f0 in [0.3, 1.0, 2.0] {
                let p = params(closure, f0, 7);
                let field = DeviationField::new(&p);
                let b: Vec<f64> = (0..8).map(|j| 0.3 * ((j as f64) * 1.7).sin() * field.anchor[j]).collect();
                let mut db = vec![0.0; 8];
                field.eval(&b, &mut db);
                let a = from_deviation(&Deviation { b: b.clone() }, &p, 0.0);
                let da = rhs(&a, &p).unwrap();
                let c = p.frame_scale();
                for j in 0..8 {
                    let scale = da[j].abs().max(p.lambda_pow(j as f64 / 3.0));
                    assert!((db[j] * c - da[j]).abs() <= 1e-13 * scale, "{closure:?} {j}: {} vs {}", db[j] * c, da[j]);
                }
            }
        }
    }

    #[test]
    fn vanishes_exactly_at_fixed_point() {
        let p = params(Closure::FixedPointClosure, 1.0, 20);
        let field = DeviationField::new(&p);
        let mut out = vec![1.0; 21];
        field.eval(&vec![0.0; 21], &mut out);
        assert!(out.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        for closure in [Closure::FixedPointClosure, Closure::PureGalerkin] {
            let p = params(closure, 0.7, 5);
            let field = DeviationField::new(&p);
            let b: Vec<f64> = (0..6).map(|j| 0.2 * (j as f64 + 0.5).cos() * field.anchor[j]).collect();
            let (mut sub, mut diag, mut sup) = (vec![0.0; 5], vec![0.0; 6], vec![0.0; 5]);
            field.jacobian(&b, &mut sub, &mut diag, &mut sup);
            for col in 0..6 {
                let h = 1e-6 * field.anchor[col];
                let (mut bp, mut bm) = (b.clone(), b.clone());
                bp[col] += h;
                bm[col] -= h;
                let (mut fp, mut fm) = (vec![0.0; 6], vec![0.0; 6]);
                field.eval(&bp, &mut fp);
                field.eval(&bm, &mut fm);
                for row in 0..6 {
                    let fd = (fp[row] - fm[row]) / (2.0 * h);
                    let an = if row == col {
                        diag[row]
                    } else if row == col + 1 {
                        sub[col]
                    } else if col == row + 1 {
                        sup[row]
                    } else {
                        0.0
                    };
                    assert!((fd - an).abs() <= 1e-6 * (1.0 + an.abs()), "{closure:?} ({row},{col}): fd {fd} an {an}");
                }
            }
        }
    }
}
