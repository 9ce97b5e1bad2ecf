//! Quantitative estimation of the commutator constant K from homodyne data.
//!
//! The anticommutator-configured experiment applies 2n̂ + K to a thermal
//! state; the resulting lossy quadrature distribution depends strongly on K,
//! so an unbinned maximum-likelihood fit of simulated (or measured) samples
//! recovers K with a quantifiable standard error. [`fit_k`] maximizes the
//! log-likelihood over a scanned K range and reports the curvature-based
//! 1σ error; [`fit_k_bootstrap`] cross-checks the error by resampling.

mod fit;
mod model;

pub use fit::{
    fit_k, fit_k_at_phase, fit_k_bootstrap, format_k, FitMethod, KFitResult,
    DEFAULT_BOOTSTRAP_RESAMPLES, DEFAULT_COARSE_STEP, DEFAULT_K_RANGE,
};
pub use model::{model_curve, model_pdf, model_state, ModelCurve};

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum EstimationError {
    #[error("need at least {min} samples for a K fit, got {got}")]
    TooFewSamples { got: usize, min: usize },

    #[error("k_range ({0}, {1}) is empty or not finite")]
    InvalidKRange(f64, f64),

    #[error("likelihood maximum lies on the k_range boundary (k = {k_hat}); widen the range")]
    BoundaryMaximum { k_hat: f64 },

    #[error("log-likelihood is flat in K over the scanned range (variation {variation:.3e}); the data carry no information on K")]
    FlatLikelihood { variation: f64 },

    #[error("log-likelihood is not concave at the maximum (d²logL/dK² = {second_derivative:.3e})")]
    NonConcaveMaximum { second_derivative: f64 },

    #[error("parameter {name} = {value} outside valid range {range}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error(transparent)]
    Fock(#[from] fock_core::FockError),

    #[error(transparent)]
    Quadrature(#[from] quadrature::QuadratureError),
}

/// Mach-Zehnder single-photon fringe model used for phase calibration:
/// the Ds count rate is proportional to (1 + visibility·cos φ)/2.
///
/// Panics if `visibility` is outside [0, 1] or `phi` is not finite.
pub fn fringe_rate(phi: f64, visibility: f64) -> f64 {
    assert!(
        (0.0..=1.0).contains(&visibility),
        "visibility {visibility} outside [0, 1]"
    );
    assert!(phi.is_finite(), "phi must be finite");
    0.5 * (1.0 + visibility * phi.cos())
}
