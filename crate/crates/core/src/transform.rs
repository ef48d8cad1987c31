//! Deviation from the fixed point and the diagonalizing `d` variables used by
//! the Lyapunov argument.
//!
//! Both live in the normalized frame: a run with forcing `f0` is mapped by
//! the exact scaling symmetry onto the model with `f0 = lambda^{-1/3}`, whose
//! fixed point is `p_j = lambda^{-j/3}`. With `c = sqrt(f0 lambda^{1/3})`
//!
//! ```text
//! b_j = a_j / c - lambda^{-j/3}
//! ```
//!
//! and normalized time runs `c` times faster than physical time.

use serde::{Deserialize, Serialize};

use crate::model::fixed_point;
use crate::params::{Closure, ModelParams};
use crate::state::ShellState;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DSequence {
    pub d: Vec<f64>,
}

impl Deviation {
    pub fn norm_sq(&self) -> f64 {
        self.b.iter().map(|x| x * x).sum()
    }

    pub fn prefix_norm_sq(&self, k: usize) -> f64 {
        self.b[..=k].iter().map(|x| x * x).sum()
    }
}

impl DSequence {
    pub fn norm_sq(&self) -> f64 {
        self.d.iter().map(|x| x * x).sum()
    }
}

/// Fixed point of the normalized model, `lambda^{-j/3}`.
pub fn normalized_fixed_point(params: &ModelParams) -> Vec<f64> {
    (0..params.len()).map(|j| params.lambda_pow(-(j as f64) / 3.0)).collect()
}

pub fn to_deviation(state: &ShellState, params: &ModelParams) -> Deviation {
    // Subtracting the physical equilibrium first makes b vanish exactly on it.
    let c = params.frame_scale();
    let b = state.a.iter().zip(&fixed_point(params).a).map(|(a, e)| (a - e) / c).collect();
    Deviation { b }
}

pub fn from_deviation(dev: &Deviation, params: &ModelParams, t: f64) -> ShellState {
    let c = params.frame_scale();
    let a = dev.b.iter().zip(&fixed_point(params).a).map(|(b, e)| e + c * b).collect();
    ShellState::new(t, a)
}

/// `d_0 = lambda^{-1/6} b_0`, `d_j = lambda^{(j-1)/3} (lambda^{1/6} b_j - lambda^{-1/6} b_{j-1})`.
///
/// With `e_j = lambda^{(2j-1)/6} b_j` this is `d_j = e_j - e_{j-1}`. Each
/// difference is taken against the compensated running sum of the `d`
/// already emitted, so rounding does not pile up along the prefix sums
/// and [`d_to_deviation`] recovers `b` to a few ulp of `lambda^{-j/3}`.
pub fn deviation_to_d(dev: &Deviation, params: &ModelParams) -> DSequence {
    let mut acc = Neumaier::default();
    let mut d = Vec::with_capacity(dev.b.len());
    for (j, bj) in dev.b.iter().enumerate() {
        let e = d_weight(j, params) * bj;
        let dj = (e - acc.sum) - acc.comp;
        acc.add(dj);
        d.push(dj);
    }
    DSequence { d }
}

#[inline]
fn d_weight(j: usize, params: &ModelParams) -> f64 {
    params.lambda_pow((2.0 * j as f64 - 1.0) / 6.0)
}

#[inline]
fn d_component(bj: f64, bprev: f64, j: usize, params: &ModelParams) -> f64 {
    d_weight(j, params) * bj - d_weight(j - 1, params) * bprev
}

#[derive(Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Inverse of [`deviation_to_d`]: `b_j = lambda^{1/6 - j/3} (d_0 + ... + d_j)`.
pub fn d_to_deviation(d: &DSequence, params: &ModelParams) -> Deviation {
    let mut acc = Neumaier::default();
    let b = d
        .d
        .iter()
        .enumerate()
        .map(|(j, dj)| {
            acc.add(*dj);
            acc.value() / d_weight(j, params)
        })
        .collect();
    Deviation { b }
}

/// Deviation of the virtual shell `N + 1` implied by the closure.
pub fn boundary_deviation(dev: &Deviation, params: &ModelParams) -> f64 {
    let n = params.n_shells();
    match params.closure() {
        Closure::FixedPointClosure => params.lambda_pow(-1.0 / 3.0) * dev.b[n],
        Closure::PureGalerkin => -params.lambda_pow(-((n + 1) as f64) / 3.0),
    }
}

/// `d_{N+1}` implied by the closure; identically zero for the fixed-point closure.
pub fn boundary_d(dev: &Deviation, params: &ModelParams) -> f64 {
    let n = params.n_shells();
    match params.closure() {
        Closure::FixedPointClosure => 0.0,
        Closure::PureGalerkin => d_component(boundary_deviation(dev, params), dev.b[n], n + 1, params),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixed_point;
    use crate::params::LAMBDA_EXP_3D;

    fn normalized(n: usize) -> ModelParams {
        ModelParams::standard(ModelParams::normalized_forcing(LAMBDA_EXP_3D), n).unwrap()
    }

    #[test]
    fn fixed_point_has_zero_deviation() {
        for f0 in [ModelParams::normalized_forcing(LAMBDA_EXP_3D), 1.0, 3.0] {
            let p = ModelParams::standard(f0, 10).unwrap();
            let dev = to_deviation(&fixed_point(&p), &p);
            assert!(dev.b.iter().all(|b| b.abs() < 1e-15), "{:?}", dev.b);
        }
    }

    #[test]
    fn zero_state_deviation() {
        let p = normalized(6);
        let dev = to_deviation(&ShellState::zeros(&p), &p);
        for (j, b) in dev.b.iter().enumerate() {
            assert!((b + (-5.0 * j as f64 / 6.0).exp2()).abs() < 1e-16);
        }
    }

    #[test]
    fn d_examples() {
        let p = normalized(5);
        let zero = Deviation { b: vec![0.0; 6] };
        assert!(deviation_to_d(&zero, &p).d.iter().all(|d| *d == 0.0));
        let mut b = vec![0.0; 6];
        b[0] = 1.0;
        let d = deviation_to_d(&Deviation { b }, &p).d;
        assert!((d[0] - 0.749_153_538_438_340_7).abs() < 1e-15);
        assert!((d[1] + 0.749_153_538_438_340_7).abs() < 1e-15);
        assert!(d[2..].iter().all(|x| *x == 0.0));
    }

    #[test]
    fn closure_boundary_d_vanishes() {
        let p = normalized(4);
        let dev = Deviation { b: vec![0.1, -0.2, 0.05, 0.3, -0.01] };
        assert_eq!(boundary_d(&dev, &p), 0.0);
        // the explicit formula with b_{N+1} = lambda^{-1/3} b_N cancels too
        let bn1 = boundary_deviation(&dev, &p);
        assert!(d_component(bn1, dev.b[4], 5, &p).abs() < 1e-15);
    }
}
