//! Dormand–Prince 5(4) embedded pair.

use super::field::DeviationField;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth minus fourth order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone)]
pub(crate) struct DormandPrince {
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    k5: Vec<f64>,
    k6: Vec<f64>,
    stage: Vec<f64>,
}

impl DormandPrince {
    pub(crate) const ERROR_ORDER: f64 = 5.0;
    pub(crate) const RHS_PER_ATTEMPT: usize = 6;

    pub(crate) fn new(dim: usize) -> Self {
        Self {
            k2: vec![0.0; dim],
            k3: vec![0.0; dim],
            k4: vec![0.0; dim],
            k5: vec![0.0; dim],
            k6: vec![0.0; dim],
            stage: vec![0.0; dim],
        }
    }

    /// One trial step. On return `y_new` holds the fifth-order solution,
    /// `f_new` its derivative (FSAL stage) and `err` the embedded difference.
    pub(crate) fn attempt(
        &mut self,
        field: &DeviationField,
        y: &[f64],
        k1: &[f64],
        h: f64,
        y_new: &mut [f64],
        f_new: &mut [f64],
        err: &mut [f64],
    ) {
        let n = y.len();
        for i in 0..n {
            self.stage[i] = y[i] + h * A21 * k1[i];
        }
        field.eval(&self.stage, &mut self.k2);
        for i in 0..n {
            self.stage[i] = y[i] + h * (A31 * k1[i] + A32 * self.k2[i]);
        }
        field.eval(&self.stage, &mut self.k3);
        for i in 0..n {
            self.stage[i] = y[i] + h * (A41 * k1[i] + A42 * self.k2[i] + A43 * self.k3[i]);
        }
        field.eval(&self.stage, &mut self.k4);
        for i in 0..n {
            self.stage[i] =
                y[i] + h * (A51 * k1[i] + A52 * self.k2[i] + A53 * self.k3[i] + A54 * self.k4[i]);
        }
        field.eval(&self.stage, &mut self.k5);
        for i in 0..n {
            self.stage[i] = y[i]
                + h * (A61 * k1[i]
                    + A62 * self.k2[i]
                    + A63 * self.k3[i]
                    + A64 * self.k4[i]
                    + A65 * self.k5[i]);
        }
        field.eval(&self.stage, &mut self.k6);
        for i in 0..n {
            y_new[i] = y[i]
                + h * (B1 * k1[i] + B3 * self.k3[i] + B4 * self.k4[i] + B5 * self.k5[i] + B6 * self.k6[i]);
        }
        field.eval(y_new, f_new);
        for i in 0..n {
            err[i] = h
                * (E1 * k1[i]
                    + E3 * self.k3[i]
                    + E4 * self.k4[i]
                    + E5 * self.k5[i]
                    + E6 * self.k6[i]
                    + E7 * f_new[i]);
        }
    }
}
