use fock_core::{
    apply_conditional, loss_channel, superposition_operator, thermal_state_with_tol,
    DiagonalState, SuperpositionSpec, TruncationDim, DEFAULT_N_MAX,
};
use quadrature::{quadrature_pdf, QuadratureGrid};
use serde::Serialize;

use crate::EstimationError;

/// Truncation used by the fit model; ample for thermal inputs around n̄ = 0.9
/// after the quadratic reweighting.
pub(crate) fn model_dim() -> TruncationDim {
    TruncationDim::new(DEFAULT_N_MAX).expect("default n_max is valid")
}

/// State produced by the anticommutator-setup model chain at phase φ:
/// thermal(n̄) → conditional Ô(φ, K) → loss(η).
pub(crate) fn model_state_at_phase(
    k: f64,
    phi: f64,
    mean_n: f64,
    eta: f64,
    dim: TruncationDim,
) -> Result<DiagonalState, EstimationError> {
    let (th, _) = thermal_state_with_tol(mean_n, dim, 1e-4)?;
    let spec = SuperpositionSpec::new(phi, k, 1.0)?;
    let op = superposition_operator(&spec, dim);
    let (post, _) = apply_conditional(&op, &th)?;
    Ok(loss_channel(&post, eta)?)
}

/// The anticommutator-setup model state (φ = π): thermal(n̄) → (2n̂ + K) → loss(η).
pub fn model_state(
    k: f64,
    mean_n: f64,
    eta: f64,
    dim: TruncationDim,
) -> Result<DiagonalState, EstimationError> {
    model_state_at_phase(k, std::f64::consts::PI, mean_n, eta, dim)
}

/// Quadrature PDF of the anticommutator model at position `x`.
///
/// Composes the Fock-space chain with the homodyne marginal; no new
/// mathematics beyond the constituent operations.
pub fn model_pdf(k: f64, mean_n: f64, eta: f64, x: f64) -> Result<f64, EstimationError> {
    let state = model_state(k, mean_n, eta, model_dim())?;
    Ok(quadrature_pdf(&state, x))
}

/// Model PDF sampled on a grid, with the generating parameters attached.
#[derive(Debug, Clone, Serialize)]
pub struct ModelCurve {
    pub k: f64,
    pub eta: f64,
    pub mean_n: f64,
    pub xs: Vec<f64>,
    pub pdf: Vec<f64>,
}

pub fn model_curve(
    k: f64,
    mean_n: f64,
    eta: f64,
    grid: &QuadratureGrid,
) -> Result<ModelCurve, EstimationError> {
    let state = model_state(k, mean_n, eta, model_dim())?;
    let xs = grid.xs();
    let pdf = xs.iter().map(|&x| quadrature_pdf(&state, x)).collect();
    Ok(ModelCurve {
        k,
        eta,
        mean_n,
        xs,
        pdf,
    })
}
