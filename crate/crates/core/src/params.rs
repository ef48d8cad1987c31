use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scaling exponent of the three-dimensional model, `lambda = 2^(5/2)`.
pub const LAMBDA_EXP_3D: f64 = 2.5;

/// Largest admissible truncation index. Beyond this the coefficient ladder
/// `lambda^j` leaves the comfortable double-precision range for larger `g`.
pub const MAX_SHELLS: usize = 48;

/// Treatment of the missing amplitude `a_{N+1}` in the truncated system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Closure {
    /// `a_{N+1} = 0`: the last shell only gains energy.
    PureGalerkin,
    /// `a_{N+1} = lambda^{-1/3} a_N`: keeps the fixed point an equilibrium and
    /// drains energy through the boundary at rate `lambda^{N-1/3} a_N^3`.
    #[default]
    FixedPointClosure,
}

/// Parameters of the truncated forced dyadic model.
///
/// `lambda` is stored through its base-2 exponent `g` so every power used by the
/// model is evaluated as a single `exp2`, which keeps the steep coefficient
/// ladder free of compounded rounding.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelParams {
    lambda_exp: f64,
    f0: f64,
    n_shells: usize,
    closure: Closure,
}

impl ModelParams {
    pub fn new(lambda_exp: f64, f0: f64, n_shells: usize, closure: Closure) -> Result<Self> {
        if !(lambda_exp.is_finite() && lambda_exp > 0.0) {
            return Err(Error::InvalidParameter {
                field: "lambda_exp",
                reason: format!("need lambda = 2^g > 1, got g = {lambda_exp}"),
            });
        }
        if !(f0.is_finite() && f0 > 0.0) {
            return Err(Error::InvalidParameter {
                field: "f0",
                reason: format!("forcing must be positive and finite, got {f0}"),
            });
        }
        if n_shells == 0 || n_shells > MAX_SHELLS {
            return Err(Error::InvalidParameter {
                field: "n_shells",
                reason: format!("need 1 <= N <= {MAX_SHELLS}, got {n_shells}"),
            });
        }
        if lambda_exp * n_shells as f64 > 512.0 {
            return Err(Error::InvalidParameter {
                field: "lambda_exp",
                reason: format!(
                    "lambda^N = 2^{} overflows intermediate products",
                    lambda_exp * n_shells as f64
                ),
            });
        }
        Ok(Self { lambda_exp, f0, n_shells, closure })
    }

    /// `lambda = 2^(5/2)` with the fixed-point closure.
    pub fn standard(f0: f64, n_shells: usize) -> Result<Self> {
        Self::new(LAMBDA_EXP_3D, f0, n_shells, Closure::FixedPointClosure)
    }

    /// Forcing that puts the fixed point at `lambda^{-j/3}` (so `a_0 = 1`).
    pub fn normalized_forcing(lambda_exp: f64) -> f64 {
        (-lambda_exp / 3.0).exp2()
    }

    pub fn with_closure(mut self, closure: Closure) -> Self {
        self.closure = closure;
        self
    }

    pub fn lambda_exp(&self) -> f64 {
        self.lambda_exp
    }

    pub fn lambda(&self) -> f64 {
        self.lambda_exp.exp2()
    }

    /// `lambda^p` evaluated as `2^(g p)`.
    #[inline]
    pub fn lambda_pow(&self, p: f64) -> f64 {
        (self.lambda_exp * p).exp2()
    }

    pub fn f0(&self) -> f64 {
        self.f0
    }

    /// Highest retained shell index `N`.
    pub fn n_shells(&self) -> usize {
        self.n_shells
    }

    /// Number of amplitudes in a state, `N + 1`.
    pub fn len(&self) -> usize {
        self.n_shells + 1
    }

    pub fn closure(&self) -> Closure {
        self.closure
    }

    /// Forcing on shell `j`: `f_0` on shell 0, zero elsewhere.
    pub fn forcing(&self, j: usize) -> f64 {
        if j == 0 {
            self.f0
        } else {
            0.0
        }
    }

    /// Scale `c` of the exact symmetry `a(t) -> c a(c t)`, `f0 -> c^2 f0`
    /// mapping the normalized model (`f0 = lambda^{-1/3}`) onto this one.
    pub fn frame_scale(&self) -> f64 {
        (self.f0 * self.lambda_pow(1.0 / 3.0)).sqrt()
    }

    pub(crate) fn check_len(&self, found: usize) -> Result<()> {
        if found != self.len() {
            return Err(Error::LengthMismatch { expected: self.len(), found });
        }
        Ok(())
    }
}
