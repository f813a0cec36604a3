//! Pseudo-spectral solver for the dissipative generalized surface quasi-geostrophic
//! equation on the torus `[0, 2pi)^2`, with the norm diagnostics and vanishing-viscosity
//! experiments built on top of it.

pub mod diagnostics;
pub mod experiments;
pub mod error;
mod fft;
pub mod forcing;
pub mod integrator;
pub mod manufactured;
pub mod nonlinearity;
pub mod oracles;
pub mod selftest;
pub mod snapshot;
pub mod spectral;

pub use diagnostics::{
    decay_envelope_check, hamiltonian_balance_residual, l2_balance_residual, lp_monotonicity_check,
    BalanceResidual, DecayEnvelope, DiagnosticSample, DiagnosticSeries, LpExponent, LpViolation,
};
pub use error::{Error, Result};
pub use experiments::{
    build_counterexample_family, frequency_equivalence_check, global_existence_experiment, higher_order_bound_check,
    no_instant_dissipation_check, run_sweep, SweepConfig, SweepReport,
};
pub use forcing::{ForcingEntry, ForcingSpec, TimeProfile};
pub use integrator::{dissipation_factor, run, step, Observer, SimParams, Stepper, TrajectoryState};
pub use nonlinearity::{
    cancellation_residuals, commutator_t_alpha, nonlinear_term, weak_form_identity_gap, DealiasPolicy,
    TestFunction, TransportKernel,
};
pub use snapshot::Snapshot;
pub use spectral::{critical_exponent, Coefficients, PhysicalGrid, SobolevIndex, SpectralField, Wavenumber};
