//! Four-stage, fourth-order Rosenbrock method with an embedded third-order
//! estimate (Shampine's coefficient set, `gamma = 1/2`), A-stable.
//!
//! Stage equations, with `M = I / (gamma h) - J`:
//!
//! ```text
//! M k1 = f(y)
//! M k2 = f(y + a21 k1) + c21 k1 / h
//! M k3 = f(y + a31 k1 + a32 k2) + (c31 k1 + c32 k2) / h
//! M k4 = f(y + a31 k1 + a32 k2) + (c41 k1 + c42 k2 + c43 k3) / h
//! ```
//!
//! The model couples nearest neighbours only, so `J` is tridiagonal and each
//! step costs one banded factorization and four O(N) solves.

use super::field::DeviationField;

const GAMMA: f64 = 0.5;
const A21: f64 = 2.0;
const A31: f64 = 48.0 / 25.0;
const A32: f64 = 6.0 / 25.0;
const C21: f64 = -8.0;
const C31: f64 = 372.0 / 25.0;
const C32: f64 = 12.0 / 5.0;
const C41: f64 = -112.0 / 125.0;
const C42: f64 = -54.0 / 125.0;
const C43: f64 = -2.0 / 5.0;
const B1: f64 = 19.0 / 9.0;
const B2: f64 = 1.0 / 2.0;
const B3: f64 = 25.0 / 108.0;
const B4: f64 = 125.0 / 108.0;
const E1: f64 = 17.0 / 54.0;
const E2: f64 = 7.0 / 36.0;
const E3: f64 = 0.0;
const E4: f64 = 125.0 / 108.0;

/// LU factorization of a tridiagonal matrix with partial pivoting
/// (the `gttrf`/`gttrs` scheme: row swaps create one extra super-diagonal).
#[derive(Debug, Clone)]
pub(crate) struct TridiagonalLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagonalLu {
    pub(crate) fn new(n: usize) -> Self {
        let m = n.saturating_sub(1);
        Self {
            dl: vec![0.0; m],
            d: vec![0.0; n],
            du: vec![0.0; m],
            du2: vec![0.0; n.saturating_sub(2)],
            swapped: vec![false; m],
        }
    }

    /// Factor the matrix with bands `sub`, `diag`, `sup`. Returns `false` if a
    /// pivot vanishes or the factors are not finite.
    pub(crate) fn factor(&mut self, sub: &[f64], diag: &[f64], sup: &[f64]) -> bool {
        let n = diag.len();
        self.dl.copy_from_slice(sub);
        self.d.copy_from_slice(diag);
        self.du.copy_from_slice(sup);
        self.du2.iter_mut().for_each(|x| *x = 0.0);
        for i in 0..n.saturating_sub(1) {
            if self.d[i].abs() >= self.dl[i].abs() {
                self.swapped[i] = false;
                if self.d[i] != 0.0 {
                    let fact = self.dl[i] / self.d[i];
                    self.dl[i] = fact;
                    self.d[i + 1] -= fact * self.du[i];
                }
            } else {
                self.swapped[i] = true;
                let fact = self.d[i] / self.dl[i];
                self.d[i] = self.dl[i];
                self.dl[i] = fact;
                let temp = self.du[i];
                self.du[i] = self.d[i + 1];
                self.d[i + 1] = temp - fact * self.d[i + 1];
                if i + 2 < n {
                    self.du2[i] = self.du[i + 1];
                    self.du[i + 1] *= -fact;
                }
            }
        }
        self.d.iter().all(|x| *x != 0.0 && x.is_finite())
    }

    pub(crate) fn solve(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i] - self.dl[i] * b[i + 1];
                b[i] = b[i + 1];
                b[i + 1] = temp;
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Rosenbrock4 {
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
    lu: TridiagonalLu,
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    stage: Vec<f64>,
    f_stage: Vec<f64>,
}

impl Rosenbrock4 {
    pub(crate) const ERROR_ORDER: f64 = 4.0;
    pub(crate) const RHS_PER_ATTEMPT: usize = 3;

    pub(crate) fn new(dim: usize) -> Self {
        Self {
            sub: vec![0.0; dim - 1],
            diag: vec![0.0; dim],
            sup: vec![0.0; dim - 1],
            lu: TridiagonalLu::new(dim),
            k1: vec![0.0; dim],
            k2: vec![0.0; dim],
            k3: vec![0.0; dim],
            k4: vec![0.0; dim],
            stage: vec![0.0; dim],
            f_stage: vec![0.0; dim],
        }
    }

    /// One trial step; returns `false` if the stage matrix is singular.
    /// `f_new` receives `f(y_new)`.
    pub(crate) fn attempt(
        &mut self,
        field: &DeviationField,
        y: &[f64],
        fy: &[f64],
        h: f64,
        y_new: &mut [f64],
        f_new: &mut [f64],
        err: &mut [f64],
    ) -> bool {
        let n = y.len();
        field.jacobian(y, &mut self.sub, &mut self.diag, &mut self.sup);
        let shift = 1.0 / (GAMMA * h);
        for i in 0..n {
            self.diag[i] = shift - self.diag[i];
        }
        for i in 0..n - 1 {
            self.sub[i] = -self.sub[i];
            self.sup[i] = -self.sup[i];
        }
        if !self.lu.factor(&self.sub, &self.diag, &self.sup) {
            return false;
        }
        let inv_h = 1.0 / h;

        self.k1.copy_from_slice(fy);
        self.lu.solve(&mut self.k1);

        for i in 0..n {
            self.stage[i] = y[i] + A21 * self.k1[i];
        }
        field.eval(&self.stage, &mut self.f_stage);
        for i in 0..n {
            self.k2[i] = self.f_stage[i] + C21 * inv_h * self.k1[i];
        }
        self.lu.solve(&mut self.k2);

        for i in 0..n {
            self.stage[i] = y[i] + A31 * self.k1[i] + A32 * self.k2[i];
        }
        field.eval(&self.stage, &mut self.f_stage);
        for i in 0..n {
            self.k3[i] = self.f_stage[i] + inv_h * (C31 * self.k1[i] + C32 * self.k2[i]);
        }
        self.lu.solve(&mut self.k3);

        for i in 0..n {
            self.k4[i] =
                self.f_stage[i] + inv_h * (C41 * self.k1[i] + C42 * self.k2[i] + C43 * self.k3[i]);
        }
        self.lu.solve(&mut self.k4);

        for i in 0..n {
            y_new[i] = y[i] + B1 * self.k1[i] + B2 * self.k2[i] + B3 * self.k3[i] + B4 * self.k4[i];
            err[i] = E1 * self.k1[i] + E2 * self.k2[i] + E3 * self.k3[i] + E4 * self.k4[i];
        }
        field.eval(y_new, f_new);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_mul(sub: &[f64], diag: &[f64], sup: &[f64], x: &[f64]) -> Vec<f64> {
        let n = diag.len();
        (0..n)
            .map(|i| {
                let mut v = diag[i] * x[i];
                if i > 0 {
                    v += sub[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    v += sup[i] * x[i + 1];
                }
                v
            })
            .collect()
    }

    #[test]
    fn pivoted_tridiagonal_solve() {
        for n in [1usize, 2, 3, 7, 20] {
            // weak diagonal forces row swaps
            let sub: Vec<f64> = (0..n.saturating_sub(1)).map(|i| 3.0 + i as f64).collect();
            let diag: Vec<f64> = (0..n).map(|i| 0.1 * (i as f64 + 1.0).sin()).collect();
            let sup: Vec<f64> = (0..n.saturating_sub(1)).map(|i| 1.0 + 0.1 * i as f64).collect();
            let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).cos()).collect();
            let rhs = dense_mul(&sub, &diag, &sup, &x);
            let mut sol = rhs.clone();
            let mut lu = TridiagonalLu::new(n);
            assert!(lu.factor(&sub, &diag, &sup));
            lu.solve(&mut sol);
            // backward error: the residual is at round-off level
            let back = dense_mul(&sub, &diag, &sup, &sol);
            for (a, b) in back.iter().zip(&rhs) {
                assert!((a - b).abs() < 1e-13 * (1.0 + b.abs()), "n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        let mut lu = TridiagonalLu::new(2);
        assert!(!lu.factor(&[1.0], &[1.0, 1.0], &[1.0]));
    }
}
