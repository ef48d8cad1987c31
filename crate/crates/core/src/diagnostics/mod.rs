//! Certificates computed from trajectories.
//!
//! Everything here is a pure function of an immutable [`Trajectory`]. The
//! stability checks work in the normalized frame: the deviation `b` stored on
//! the trajectory is already frame-scaled, and physical time is converted to
//! normalized time with the frame constant `c = sqrt(f0 lambda^{1/3})`.
//!
//! All certificates concern the closed truncation, not the infinite cascade.
//!
//! [`Trajectory`]: crate::integrator::Trajectory

mod checks;
mod constants;
mod integrals;
mod quadrature;
mod report;
mod spectrum;

pub use checks::{
    check_lyapunov_decrease, check_lyapunov_decrease_all_pairs, check_partial_energy_inequality, decay_fit,
    DecayFit, LYAPUNOV_TOLERANCE,
};
pub use constants::{constants, DiagnosticsConstants};
pub use integrals::{
    cube_56_integral, energy_balance_residual, hs_square_integral, mean_dissipation, time_average,
};
pub use quadrature::{trapezoid, trapezoid_with_guard, GuardedIntegral};
pub use report::{CheckRecord, DiagnosticsReport};
pub use spectrum::{fit_log2_energies, spectrum_fit, time_averaged_energies, SpectrumFit};
