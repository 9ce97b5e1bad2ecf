//! Truncated Fock-space simulation of conditional photon-number operations.
//!
//! This crate provides the state and operator layer for simulating coherent
//! superpositions of photon creation/annihilation sequences applied to
//! phase-averaged (diagonal) light states:
//!
//! * [`DiagonalState`] — photon-number probability distributions,
//!   [`thermal_state`] constructor with explicit truncation-tail control;
//! * [`OperatorMatrix`] — complex operators on the truncated space,
//!   with [`ladder_matrices`], [`superposition_operator`] and
//!   [`polynomial_operator`] builders;
//! * heralded (conditional) application via [`apply_conditional`] and the
//!   partial-coherence model [`apply_partially_coherent`];
//! * photon-loss channels: [`loss_channel`] (Bernoulli efficiency) and the
//!   exact beam-splitter subtraction map [`bs_subtraction`];
//! * [`DensityMatrix`] for the general (non-diagonal) case and the general
//!   Uhlmann fidelity.
//!
//! All values are immutable after construction; every function is pure.

mod channel;
mod density;
mod dim;
mod error;
mod operator;
mod state;

pub use channel::{binomial_transform, bs_subtraction, loss_channel};
pub use density::DensityMatrix;
pub use dim::TruncationDim;
pub use error::FockError;
pub use operator::{
    apply_conditional, apply_conditional_density, apply_partially_coherent, ladder_matrices,
    polynomial_operator, superposition_operator, OperatorMatrix, PolynomialTerm,
    SuperpositionSpec,
};
pub use state::{fidelity, thermal_state, thermal_state_with_tol, DiagonalState};

/// Default Hilbert-space truncation (`n_max`) used by the pipelines.
///
/// For thermal inputs with mean photon number around 0.9 this keeps the bare
/// thermal tail below 1e-10 and the tail after the quadratic number-operator
/// reweighting below 1e-6.
pub const DEFAULT_N_MAX: usize = 30;

/// Default upper bound on the probability mass lost to truncation before
/// [`thermal_state`] reports an error.
pub const DEFAULT_TAIL_TOL: f64 = 1e-6;
