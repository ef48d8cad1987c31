use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{ModelParams, LAMBDA_EXP_3D};

/// Shell amplitudes `a_0..a_N` at time `t`. `a_j^2` is the energy in the
/// wavenumber shell `2^j <= |k| < 2^{j+1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellState {
    pub t: f64,
    pub a: Vec<f64>,
}

impl ShellState {
    pub fn new(t: f64, a: Vec<f64>) -> Self {
        Self { t, a }
    }

    pub fn zeros(params: &ModelParams) -> Self {
        Self { t: 0.0, a: vec![0.0; params.len()] }
    }

    /// Builds a state and checks its length against `params`.
    pub fn checked(t: f64, a: Vec<f64>, params: &ModelParams) -> Result<Self> {
        params.check_len(a.len())?;
        Ok(Self { t, a })
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// `sum_j a_j^2`.
    pub fn energy_sq(&self) -> f64 {
        self.a.iter().map(|x| x * x).sum()
    }

    /// The `l^2` energy norm.
    pub fn energy_norm(&self) -> f64 {
        self.energy_sq().sqrt()
    }

    /// `sum_j 2^{2 s j} a_j^2`.
    pub fn sobolev_sq(&self, s: f64) -> f64 {
        sobolev_sq(&self.a, s)
    }

    /// `H^s` norm, `(sum_j 2^{2 s j} a_j^2)^{1/2}`.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        self.sobolev_sq(s).sqrt()
    }

    pub fn min_amplitude(&self) -> f64 {
        self.a.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

pub(crate) fn sobolev_sq(a: &[f64], s: f64) -> f64 {
    if s == 0.0 {
        return a.iter().map(|x| x * x).sum();
    }
    a.iter()
        .enumerate()
        .map(|(j, x)| (2.0 * s * j as f64).exp2() * x * x)
        .sum()
}

/// Weak distance `sum_j lambda^{-j^2} |x_j - y_j| / (1 + |x_j - y_j|)` with
/// `lambda = 2^{5/2}`. Weights below the smallest normal double are dropped.
pub fn weak_distance(x: &ShellState, y: &ShellState) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { expected: x.len(), found: y.len() });
    }
    let mut sum = 0.0;
    for (j, (xj, yj)) in x.a.iter().zip(&y.a).enumerate() {
        let w = (-LAMBDA_EXP_3D * (j * j) as f64).exp2();
        if w < f64::MIN_POSITIVE {
            break;
        }
        let diff = (xj - yj).abs();
        sum += w * diff / (1.0 + diff);
    }
    Ok(sum)
}

/// Shell-resolution energy spectrum: pairs `(k_j = 2^j, E_j = a_j^2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSample {
    pub k: Vec<f64>,
    pub energy: Vec<f64>,
}

impl SpectrumSample {
    pub fn from_energies(energy: Vec<f64>) -> Self {
        let k = (0..energy.len()).map(|j| (j as f64).exp2()).collect();
        Self { k, energy }
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.k.iter().copied().zip(self.energy.iter().copied())
    }
}
