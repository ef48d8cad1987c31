//! Trapezoid rule on the sample grid.

/// Compensated trapezoid sum of `y` over `x`.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "trapezoid: abscissae and values differ in length");
    let mut sum = 0.0;
    let mut comp = 0.0;
    for i in 1..x.len() {
        let term = 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// An integral together with its value on the grid of every other sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuardedIntegral {
    pub value: f64,
    pub coarse: f64,
}

impl GuardedIntegral {
    /// How far the integral moves when the grid is halved.
    pub fn shift(&self) -> f64 {
        (self.value - self.coarse).abs()
    }
}

/// Trapezoid on the full grid and on the even-indexed subgrid (the last
/// sample is always kept so both cover the same interval).
pub fn trapezoid_with_guard(x: &[f64], y: &[f64]) -> GuardedIntegral {
    let value = trapezoid(x, y);
    let (cx, cy) = coarse_grid(x, y);
    GuardedIntegral { value, coarse: trapezoid(&cx, &cy) }
}

pub(crate) fn coarse_grid(x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut idx: Vec<usize> = (0..x.len()).step_by(2).collect();
    if x.len() > 1 && idx.last() != Some(&(x.len() - 1)) {
        idx.push(x.len() - 1);
    }
    (idx.iter().map(|&i| x[i]).collect(), idx.iter().map(|&i| y[i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_linear_functions() {
        let x: Vec<f64> = (0..11).map(|i| i as f64 * 0.3).collect();
        let y: Vec<f64> = x.iter().map(|t| 2.0 * t - 1.0).collect();
        let want = 3.0 * 3.0 - 3.0;
        assert!((trapezoid(&x, &y) - want).abs() < 1e-14);
        let g = trapezoid_with_guard(&x, &y);
        assert!(g.shift() < 1e-14);
    }

    #[test]
    fn guard_shift_tracks_second_order_error() {
        let x: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        let y: Vec<f64> = x.iter().map(|t| (-t).exp()).collect();
        let g = trapezoid_with_guard(&x, &y);
        let exact = 1.0 - (-1.0f64).exp();
        let err = (g.value - exact).abs();
        // coarse error is four times the fine one
        assert!((g.shift() / err - 3.0).abs() < 0.01, "{} {}", g.shift(), err);
    }

    #[test]
    fn degenerate_grids() {
        assert_eq!(trapezoid(&[], &[]), 0.0);
        assert_eq!(trapezoid(&[1.0], &[5.0]), 0.0);
        let g = trapezoid_with_guard(&[0.0, 1.0], &[1.0, 1.0]);
        assert_eq!(g.value, 1.0);
        assert_eq!(g.coarse, 1.0);
    }
}
