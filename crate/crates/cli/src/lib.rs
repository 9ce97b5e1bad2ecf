//! Experiment driver for the operator-superposition simulator.
//!
//! Wires the Fock-space, quadrature, tomography and estimation layers into
//! reproducible pipelines: phase scans of the heralded superposition
//! â â† − e^{iφ} â†â on thermal light, maximum-likelihood state tomography
//! with detector-efficiency handling, and the commutator-constant fit. Every
//! pipeline writes its data products plus a manifest with content hashes;
//! identical configs and seeds give byte-identical outputs.

pub mod config;
pub mod manifest;
pub mod pipeline;

pub use config::{ExperimentConfig, SubtractionModel};
pub use pipeline::{
    run_kfit, run_phase_scan, run_tomography, KfitSummary, ScanSummary, TomoSummary,
    ANTICOMMUTATOR_LEVELS, COMMUTATOR_LEVELS, TOMO_EM_MAX_ITER, TOMO_EM_TOL,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    /// Process exit code: 2 for configuration problems, 3 for numerical
    /// failures, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 1,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<fock_core::FockError> for CliError {
    fn from(e: fock_core::FockError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<quadrature::QuadratureError> for CliError {
    fn from(e: quadrature::QuadratureError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<tomography::TomographyError> for CliError {
    fn from(e: tomography::TomographyError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<estimation::EstimationError> for CliError {
    fn from(e: estimation::EstimationError) -> Self {
        CliError::Numerical(e.to_string())
    }
}
