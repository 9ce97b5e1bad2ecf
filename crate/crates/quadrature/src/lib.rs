//! Homodyne quadrature observable model for diagonal Fock-space states.
//!
//! Phase-averaged states have the phase-independent marginal
//! P(x) = Σ_n p_n ψ_n(x)², with ψ_n the harmonic-oscillator eigenfunctions in
//! the convention x̂ = (â + â†)/√2 (vacuum variance 1/2). This crate evaluates
//! those marginals, draws reproducible Monte-Carlo samples from them by
//! inverse-CDF lookup, and bins samples into histograms with CSV/JSON export.

mod histogram;
mod oscillator;
mod pdf;
mod sampler;

pub use histogram::{make_histogram, QuadratureHistogram};
pub use oscillator::{oscillator_eigenfunction, oscillator_eigenfunctions};
pub use pdf::{quadrature_pdf, quadrature_pdf_on_grid, quadrature_std, QuadratureGrid};
pub use sampler::{sample_quadratures, sample_quadratures_stream, QuadratureSampler};

use thiserror::Error;

/// Quadrature convention recorded in all exported data products.
pub const CONVENTION: &str = "x = (a + a_dagger)/sqrt(2); vacuum variance 1/2";

/// Minimum number of standard deviations a sampling grid must cover.
pub const MIN_COVERAGE_SIGMAS: f64 = 6.0;

/// Default number of tabulation points for the inverse-CDF sampler.
pub const DEFAULT_GRID_POINTS: usize = 4096;

/// Default grid half-width in standard deviations of the target PDF.
pub const DEFAULT_GRID_SIGMAS: f64 = 8.0;

#[derive(Debug, Clone, Error)]
pub enum QuadratureError {
    #[error("grid bounds invalid: x_min = {x_min} must be < x_max = {x_max}")]
    InvalidGridBounds { x_min: f64, x_max: f64 },

    #[error("grid needs at least 2 points, got {0}")]
    TooFewGridPoints(usize),

    #[error(
        "grid [{x_min}, {x_max}] does not cover {required} standard deviations \
         (sigma = {sigma:.4}); widen the grid"
    )]
    InsufficientCoverage {
        x_min: f64,
        x_max: f64,
        sigma: f64,
        required: f64,
    },

    #[error("sample count must be >= 1")]
    EmptySampleRequest,

    #[error("histogram needs at least 1 bin")]
    NoBins,

    #[error("histogram range invalid: ({0}, {1})")]
    InvalidRange(f64, f64),

    #[error("PDF mass on the grid is not positive (integral = {0:.3e})")]
    DegeneratePdf(f64),
}
