//! Reconstruction of diagonal Fock-space states from binned homodyne data.
//!
//! The measurement model is a binned POVM with detector efficiency folded in:
//! the probability that a sample from Fock level n lands in bin j is
//! Σ_m Binom(n, m, η_d) ∫_bin ψ_m(x)² dx. [`mle_reconstruct`] inverts
//! histograms through this model by expectation-maximization, [`wigner_diagonal`]
//! maps reconstructed distributions to phase space, and [`inverse_loss`]
//! provides the post-hoc efficiency-correction path as an alternative to the
//! POVM-embedded one.

mod mle;
mod povm;
mod wigner;

pub use mle::{inverse_loss, mle_reconstruct, ReconstructionResult, DEFAULT_MAX_ITER, DEFAULT_TOL};
pub use povm::{build_povm, BinnedPovm};
pub use wigner::{wigner_diagonal, WignerGrid};

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum TomographyError {
    #[error("bin edges must be strictly increasing")]
    EdgesNotIncreasing,

    #[error("detector efficiency eta_d = {0} outside (0, 1]")]
    InvalidEfficiency(f64),

    #[error("histogram and POVM bin edges differ")]
    EdgeMismatch,

    #[error("histogram is empty (total = 0)")]
    EmptyHistogram,

    #[error("bin {bin} has counts but zero model mass for every state (model mismatch)")]
    ModelMismatch { bin: usize },

    #[error("inverse loss needs eta in (0.5, 1], got {0}")]
    InverseLossRange(f64),

    #[error("inverse loss clipped {clipped:.4} of probability mass (> {limit}); correction unreliable")]
    InverseLossUnreliable { clipped: f64, limit: f64 },

    #[error(transparent)]
    Fock(#[from] fock_core::FockError),
}
