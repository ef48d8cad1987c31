//! Forced inviscid dyadic model of turbulence.
//!
//! The model is the infinite cascade
//!
//! ```text
//! da_0/dt = -a_0 a_1 + f_0
//! da_j/dt = lambda^{j-1} a_{j-1}^2 - lambda^j a_j a_{j+1},   j >= 1
//! ```
//!
//! truncated at shell `N`. With `lambda = 2^{5/2}` its unique equilibrium
//! `a_j = 2^{5/12} sqrt(f0) 2^{-5j/6}` attracts every nonnegative solution
//! exponentially fast, the `H^{5/6}` norm blows up in finite time, and the
//! energy spectrum on the attractor follows Kolmogorov's `-5/3` law.
//!
//! The crate is organised bottom-up:
//!
//! - [`params`], [`state`], [`model`], [`transform`]: pure model algebra.
//! - [`integrator`]: adaptive stepping with a positivity contract and events.
//! - [`oracle`]: naive fixed-step references used for cross-validation.
//! - [`diagnostics`]: Lyapunov, decay, integrability and spectrum checks.
//! - [`runner`]: JSON-configured runs, sweeps and the verification suite.

pub mod diagnostics;
pub mod error;
pub mod integrator;
pub mod model;
pub mod oracle;
pub mod params;
pub mod runner;
pub mod state;
pub mod transform;

pub use error::{Error, Result};
pub use integrator::{integrate, integrate_with_events, Method, StepControl, Trajectory};
pub use model::{dissipation_rate, energy_flux, fixed_point, rhs, spectrum};
pub use params::{Closure, ModelParams, LAMBDA_EXP_3D};
pub use state::{weak_distance, ShellState, SpectrumSample};
