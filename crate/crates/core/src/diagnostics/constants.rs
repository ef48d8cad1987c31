use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Stability constants of the Lyapunov argument.
///
/// `alpha = 2 - lambda^{3/8}`, `series = sum_j lambda^{1/3 - 2j/3} (j + 1)`
/// in closed form `lambda^{1/3} / (1 - lambda^{-2/3})^2`,
/// `beta_normalized = alpha / series` (rate in normalized time) and
/// `beta_general = c beta_normalized` (rate in physical time).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagnosticsConstants {
    pub alpha: f64,
    pub series: f64,
    pub beta_normalized: f64,
    pub beta_general: f64,
    pub frame_scale: f64,
}

impl DiagnosticsConstants {
    /// `alpha` lies in `(0, 1)`, where the decrease inequality has content.
    pub fn alpha_admissible(&self) -> bool {
        self.alpha > 0.0 && self.alpha < 1.0
    }
}

pub fn constants(params: &ModelParams) -> Result<DiagnosticsConstants> {
    let g = params.lambda_exp();
    let alpha = 2.0 - params.lambda_pow(3.0 / 8.0);
    // alpha > 0 iff g < 8/3; compare exponents to decide the boundary exactly
    if 3.0 * g >= 8.0 || !(alpha > 0.0) {
        return Err(Error::InvalidLambda { lambda_exp: g });
    }
    let ratio = params.lambda_pow(-2.0 / 3.0);
    let series = params.lambda_pow(1.0 / 3.0) / ((1.0 - ratio) * (1.0 - ratio));
    let beta_normalized = alpha / series;
    let frame_scale = params.frame_scale();
    Ok(DiagnosticsConstants { alpha, series, beta_normalized, beta_general: frame_scale * beta_normalized, frame_scale })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::series_partial_sums;
    use crate::params::LAMBDA_EXP_3D;

    #[test]
    fn three_dimensional_values() {
        let p = ModelParams::standard(1.0, 10).unwrap();
        let c = constants(&p).unwrap();
        assert!((c.alpha - 0.084_793_438_602_852_7).abs() < 1e-15);
        assert!((c.alpha - (2.0 - (15.0f64 / 16.0).exp2())).abs() < 1e-15);
        assert!((c.series - 3.797_101_091_432_252_6).abs() < 1e-14);
        assert!((c.beta_normalized - 0.022_331_098_530_450_0).abs() < 1e-15);
        assert!(c.alpha > 0.0 && c.alpha < 1.0);
    }

    #[test]
    fn closed_form_matches_partial_sums() {
        let p = ModelParams::standard(1.0, 4).unwrap();
        let c = constants(&p).unwrap();
        let brute = series_partial_sums(p.lambda(), 10_000);
        assert!((brute - c.series).abs() <= 1e-9 * c.series);
    }

    #[test]
    fn frame_rescaling() {
        let norm = ModelParams::standard(ModelParams::normalized_forcing(LAMBDA_EXP_3D), 5).unwrap();
        let c = constants(&norm).unwrap();
        assert!((c.frame_scale - 1.0).abs() < 1e-15);
        assert!((c.beta_general - c.beta_normalized).abs() < 1e-16);
        let p = ModelParams::standard(4.0, 5).unwrap();
        let c4 = constants(&p).unwrap();
        assert!((c4.beta_general - c4.beta_normalized * (4.0 * p.lambda_pow(1.0 / 3.0)).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn boundary_exponent_is_rejected() {
        let p = ModelParams::standard(1.0, 4).unwrap();
        let edge = ModelParams::new(8.0 / 3.0, 1.0, 4, p.closure()).unwrap();
        assert!(matches!(constants(&edge), Err(Error::InvalidLambda { .. })));
        let above = ModelParams::new(2.9, 1.0, 4, p.closure()).unwrap();
        assert!(matches!(constants(&above), Err(Error::InvalidLambda { .. })));
        let below = ModelParams::new(2.6, 1.0, 4, p.closure()).unwrap();
        assert!(constants(&below).unwrap().alpha > 0.0);
    }
}
