use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use estimation::{fit_k, fringe_rate, model_curve, KFitResult, DEFAULT_K_RANGE};
use fock_core::{
    apply_partially_coherent, bs_subtraction, fidelity, loss_channel, thermal_state_with_tol,
    DiagonalState, SuperpositionSpec, TruncationDim,
};
use quadrature::{
    make_histogram, quadrature_pdf, sample_quadratures_stream, QuadratureGrid,
    QuadratureHistogram, CONVENTION, DEFAULT_GRID_POINTS,
};
use tomography::{build_povm, mle_reconstruct, wigner_diagonal, ReconstructionResult};

use crate::config::{ExperimentConfig, SubtractionModel};
use crate::manifest::OutputWriter;
use crate::CliError;

/// RNG substream used for the primary (signal) acquisition of a run. All
/// phase points share it, so configurations with identical output states
/// produce bit-identical data.
const STREAM_SIGNAL: u64 = 0;
/// RNG substream for the thermal-input reference acquisition in tomography.
const STREAM_REFERENCE: u64 = 1;

/// Iteration budget for the tomography reconstructions.
///
/// Inverting an efficiency-degraded POVM is a noise-amplifying deconvolution:
/// run to convergence, the maximum-likelihood estimate develops large
/// seed-to-seed swings in the high-order elements. EM converges along the
/// well-conditioned (smooth) directions first, so a small fixed budget acts
/// as spectral regularization, analogous to early-stopped Lucy-Richardson.
pub const TOMO_EM_MAX_ITER: usize = 150;
pub const TOMO_EM_TOL: f64 = 1e-9;

/// Reconstruction dimensions: the reference analysis quotes 10 diagonal
/// elements for the commutator case and 13 for the anticommutator case; one
/// guard level is added on top.
pub const COMMUTATOR_LEVELS: usize = 11;
pub const ANTICOMMUTATOR_LEVELS: usize = 14;

fn truncation(config: &ExperimentConfig) -> Result<TruncationDim, CliError> {
    TruncationDim::new(config.n_max).map_err(CliError::from)
}

/// Thermal input state; tail tolerance relaxed slightly so operator
/// reweighting keeps headroom at the default truncation.
fn thermal_input(config: &ExperimentConfig) -> Result<DiagonalState, CliError> {
    let dim = truncation(config)?;
    Ok(thermal_state_with_tol(config.mean_n, dim, 1e-4)?.0)
}

/// State after the heralded superposition at phase `phi`, plus the relative
/// heralding weight.
fn prepared_state(
    config: &ExperimentConfig,
    phi: f64,
) -> Result<(DiagonalState, f64), CliError> {
    let input = thermal_input(config)?;
    let spec = SuperpositionSpec::new(phi, config.k, config.v)?;
    Ok(apply_partially_coherent(&spec, &input)?)
}

fn acquire(
    state: &DiagonalState,
    count: usize,
    seed: u64,
    stream: u64,
) -> Result<Vec<f64>, CliError> {
    let grid = QuadratureGrid::covering(state, DEFAULT_GRID_POINTS)?;
    Ok(sample_quadratures_stream(state, count, seed, stream, &grid)?)
}

#[derive(Debug, Serialize)]
pub struct PhaseRecord {
    pub index: usize,
    pub phi: f64,
    pub success_weight: f64,
    pub fringe_rate: f64,
    pub histogram_file: String,
    pub total: u64,
    pub overflow: u64,
}

#[derive(Debug, Serialize)]
pub struct SubtractionCheck {
    pub reflectivity: f64,
    pub click_prob: f64,
    /// Total-variation distance between the beam-splitter subtraction map and
    /// the ideal annihilation operator on the thermal input.
    pub tv_distance_to_ideal: f64,
}

#[derive(Debug, Serialize)]
pub struct ScanSummary {
    pub command: &'static str,
    pub convention: &'static str,
    pub config: ExperimentConfig,
    pub phases: Vec<PhaseRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subtraction_check: Option<SubtractionCheck>,
}

/// Runs the phase scan: one histogram per configured φ, all from the same
/// seeded stream, plus a manifest with heralding weights and fringe metadata.
pub fn run_phase_scan(config: &ExperimentConfig, out_dir: &Path) -> Result<ScanSummary, CliError> {
    config.validate()?;
    let mut writer = OutputWriter::new(out_dir)?;

    let per_phase: Result<Vec<(QuadratureHistogram, f64)>, CliError> = config
        .phi_list
        .par_iter()
        .map(|&phi| {
            let (state, weight) = prepared_state(config, phi)?;
            let degraded = loss_channel(&state, config.eta_total)?;
            let samples = acquire(
                &degraded,
                config.samples_per_phase,
                config.seed,
                STREAM_SIGNAL,
            )?;
            let hist = make_histogram(&samples, config.bins, config.x_range)?;
            Ok((hist, weight))
        })
        .collect();
    let per_phase = per_phase?;

    let mut phases = Vec::with_capacity(per_phase.len());
    for (index, (phi, (hist, weight))) in config.phi_list.iter().zip(per_phase).enumerate() {
        let histogram_file = format!("phase_{index:02}.csv");
        writer.write(&histogram_file, &hist.to_csv_string())?;
        phases.push(PhaseRecord {
            index,
            phi: *phi,
            success_weight: weight,
            fringe_rate: fringe_rate(*phi, config.v),
            histogram_file,
            total: hist.total(),
            overflow: hist.overflow(),
        });
    }

    let subtraction_check = match config.subtraction_model {
        SubtractionModel::Ideal => None,
        SubtractionModel::Beamsplitter { reflectivity } => {
            Some(subtraction_diagnostic(config, reflectivity)?)
        }
    };

    let summary = ScanSummary {
        command: "scan",
        convention: CONVENTION,
        config: config.clone(),
        phases,
        subtraction_check,
    };
    writer.finish(&summary)?;
    Ok(summary)
}

/// Quantifies how far the configured beam-splitter subtraction is from the
/// ideal â assumed by the operator pipeline, on the thermal input.
fn subtraction_diagnostic(
    config: &ExperimentConfig,
    reflectivity: f64,
) -> Result<SubtractionCheck, CliError> {
    let input = thermal_input(config)?;
    let (bs_out, click_prob) = bs_subtraction(&input, reflectivity)?;
    let probs = input.probs();
    let mut ideal = vec![0.0; probs.len()];
    for m in 0..probs.len() - 1 {
        ideal[m] = (m + 1) as f64 * probs[m + 1];
    }
    let total: f64 = ideal.iter().sum();
    ideal.iter_mut().for_each(|w| *w /= total);
    let ideal = DiagonalState::new(ideal)?;
    Ok(SubtractionCheck {
        reflectivity,
        click_prob,
        tv_distance_to_ideal: bs_out.trace_distance(&ideal)?,
    })
}

#[derive(Debug, Serialize)]
pub struct ReconstructionSummary {
    pub file: String,
    pub iterations: usize,
    pub converged: bool,
    pub w00: f64,
    pub wigner_file: String,
}

#[derive(Debug, Serialize)]
pub struct TomoSummary {
    pub command: &'static str,
    pub convention: &'static str,
    pub config: ExperimentConfig,
    pub phi: f64,
    pub samples: usize,
    pub levels: usize,
    pub em_max_iter: usize,
    pub em_tol: f64,
    pub success_weight: f64,
    /// Fidelity between the reconstructed output and reconstructed input
    /// without efficiency correction (the headline consistency number).
    pub fidelity_io_uncorrected: f64,
    /// Same with the detector efficiency folded into the POVM.
    pub fidelity_io_corrected: f64,
    /// Fidelity of the corrected output reconstruction against the simulated
    /// model state it estimates (diagnostic; only available in simulation).
    pub fidelity_vs_model: f64,
    pub corrected: ReconstructionSummary,
    pub uncorrected: ReconstructionSummary,
}

/// Default sample counts: 10⁴ for the commutator-side phases, 10⁵ for the
/// anticommutator side.
fn default_samples(phi: f64) -> usize {
    if phi <= std::f64::consts::FRAC_PI_2 {
        10_000
    } else {
        100_000
    }
}

fn default_levels(phi: f64) -> usize {
    if phi <= std::f64::consts::FRAC_PI_2 {
        COMMUTATOR_LEVELS
    } else {
        ANTICOMMUTATOR_LEVELS
    }
}

/// Runs the tomography pipeline at one phase: acquires signal and
/// thermal-reference datasets, reconstructs both with and without the
/// detector-efficiency correction, and emits states, Wigner grids and
/// fidelities.
pub fn run_tomography(
    config: &ExperimentConfig,
    phi: f64,
    samples_override: Option<usize>,
    levels_override: Option<usize>,
    out_dir: &Path,
) -> Result<TomoSummary, CliError> {
    config.validate()?;
    if !phi.is_finite() || !(0.0..std::f64::consts::TAU).contains(&phi) {
        return Err(CliError::Config(format!("phi: {phi} not in [0, 2pi)")));
    }
    let samples = samples_override.unwrap_or_else(|| default_samples(phi));
    let levels = levels_override.unwrap_or_else(|| default_levels(phi));
    if levels < 2 || levels > config.n_max {
        return Err(CliError::Config(format!(
            "levels: {levels} not in [2, n_max = {}]",
            config.n_max
        )));
    }
    let mut writer = OutputWriter::new(out_dir)?;
    let recon_dim = TruncationDim::new(levels - 1)?;
    let full_dim = truncation(config)?;

    // signal acquisition
    let (prepared, success_weight) = prepared_state(config, phi)?;
    let signal_state = loss_channel(&prepared, config.eta_total)?;
    let signal = acquire(&signal_state, samples, config.seed, STREAM_SIGNAL)?;
    let signal_hist = make_histogram(&signal, config.bins, config.x_range)?;
    writer.write("signal_histogram.csv", &signal_hist.to_csv_string())?;

    // thermal-input reference acquisition (an independent experiment)
    let reference_state = loss_channel(&thermal_input(config)?, config.eta_total)?;
    let reference = acquire(&reference_state, samples, config.seed, STREAM_REFERENCE)?;
    let reference_hist = make_histogram(&reference, config.bins, config.x_range)?;
    writer.write("reference_histogram.csv", &reference_hist.to_csv_string())?;

    let povm_corrected = build_povm(signal_hist.bin_edges(), recon_dim, config.eta_d)?;
    let povm_ideal = build_povm(signal_hist.bin_edges(), recon_dim, 1.0)?;

    let reconstruct = |hist: &QuadratureHistogram,
                       povm: &tomography::BinnedPovm|
     -> Result<ReconstructionResult, CliError> {
        Ok(mle_reconstruct(hist, povm, TOMO_EM_MAX_ITER, TOMO_EM_TOL)?)
    };
    let out_corrected = reconstruct(&signal_hist, &povm_corrected)?;
    let out_uncorrected = reconstruct(&signal_hist, &povm_ideal)?;
    let in_corrected = reconstruct(&reference_hist, &povm_corrected)?;
    let in_uncorrected = reconstruct(&reference_hist, &povm_ideal)?;

    writer.write("recon_corrected.json", &out_corrected.to_json_string())?;
    writer.write("recon_uncorrected.json", &out_uncorrected.to_json_string())?;
    writer.write("recon_input_corrected.json", &in_corrected.to_json_string())?;
    writer.write(
        "recon_input_uncorrected.json",
        &in_uncorrected.to_json_string(),
    )?;

    // Wigner grids of the output reconstructions
    let wigner_axis = |state: &DiagonalState| -> Vec<f64> {
        let half = 6.0 * quadrature::quadrature_std(state);
        let n = 121;
        (0..n)
            .map(|i| -half + 2.0 * half * i as f64 / (n - 1) as f64)
            .collect()
    };
    let axis_corr = wigner_axis(&out_corrected.state);
    let wigner_corr = wigner_diagonal(&out_corrected.state, &axis_corr, &axis_corr);
    writer.write("wigner_corrected.csv", &wigner_corr.to_csv_string())?;
    let axis_unc = wigner_axis(&out_uncorrected.state);
    let wigner_unc = wigner_diagonal(&out_uncorrected.state, &axis_unc, &axis_unc);
    writer.write("wigner_uncorrected.csv", &wigner_unc.to_csv_string())?;

    let w00 = |state: &DiagonalState| wigner_diagonal(state, &[0.0], &[0.0]).value_at(0, 0);

    // the corrected reconstruction estimates the state before the detector,
    // i.e. after preparation loss only
    let model_corrected = loss_channel(&prepared, config.eta_prep())?;
    let fidelity_vs_model = fidelity(
        &out_corrected.state.padded_to(full_dim),
        &model_corrected,
    )?;

    let summary = TomoSummary {
        command: "tomo",
        convention: CONVENTION,
        config: config.clone(),
        phi,
        samples,
        levels,
        em_max_iter: TOMO_EM_MAX_ITER,
        em_tol: TOMO_EM_TOL,
        success_weight,
        fidelity_io_uncorrected: fidelity(&in_uncorrected.state, &out_uncorrected.state)?,
        fidelity_io_corrected: fidelity(&in_corrected.state, &out_corrected.state)?,
        fidelity_vs_model,
        corrected: ReconstructionSummary {
            file: "recon_corrected.json".into(),
            iterations: out_corrected.iterations,
            converged: out_corrected.converged,
            w00: w00(&out_corrected.state),
            wigner_file: "wigner_corrected.csv".into(),
        },
        uncorrected: ReconstructionSummary {
            file: "recon_uncorrected.json".into(),
            iterations: out_uncorrected.iterations,
            converged: out_uncorrected.converged,
            w00: w00(&out_uncorrected.state),
            wigner_file: "wigner_uncorrected.csv".into(),
        },
    };
    writer.finish(&summary)?;
    Ok(summary)
}

#[derive(Debug, Serialize)]
pub struct ChiSquaredRecord {
    pub k: f64,
    pub chi_squared: f64,
}

#[derive(Debug, Serialize)]
pub struct KfitSummary {
    pub command: &'static str,
    pub convention: &'static str,
    pub config: ExperimentConfig,
    pub samples: usize,
    pub k_truth: f64,
    pub k_hat: f64,
    pub sigma_k: f64,
    pub formatted: String,
    /// χ² of the data histogram against binned model curves for integer K,
    /// with `dof` in-range bins.
    pub chi_squared: Vec<ChiSquaredRecord>,
    pub dof: usize,
}

/// Runs the K-fit pipeline: simulates anticommutator data at the configured
/// truth K, fits K by maximum likelihood, and emits the fit plus the
/// theoretical comparison curves for K ∈ {0, 1, 2, 3}.
pub fn run_kfit(config: &ExperimentConfig, out_dir: &Path) -> Result<(KfitSummary, KFitResult), CliError> {
    config.validate()?;
    let mut writer = OutputWriter::new(out_dir)?;

    let (prepared, _) = prepared_state(config, std::f64::consts::PI)?;
    let degraded = loss_channel(&prepared, config.eta_total)?;
    let samples = acquire(
        &degraded,
        config.samples_per_phase,
        config.seed,
        STREAM_SIGNAL,
    )?;
    let hist = make_histogram(&samples, config.bins, config.x_range)?;
    writer.write("data_histogram.csv", &hist.to_csv_string())?;

    let fit = fit_k(&samples, config.mean_n, config.eta_total, DEFAULT_K_RANGE)?;
    writer.write("kfit.json", &fit.to_json_string())?;

    // comparison curves on the histogram range
    let curve_grid = QuadratureGrid::new(config.x_range.0, config.x_range.1, 561)?;
    let mut curves_csv = String::from("x,k0,k1,k2,k3\n");
    let mut curves = Vec::new();
    for k in [0.0, 1.0, 2.0, 3.0] {
        curves.push(model_curve(k, config.mean_n, config.eta_total, &curve_grid)?);
    }
    for (i, x) in curves[0].xs.iter().enumerate() {
        curves_csv.push_str(&format!(
            "{},{},{},{},{}\n",
            x, curves[0].pdf[i], curves[1].pdf[i], curves[2].pdf[i], curves[3].pdf[i]
        ));
    }
    writer.write("model_curves.csv", &curves_csv)?;

    // goodness of fit of the data against each integer-K model
    let mut chi_squared = Vec::new();
    let mut dof = 0;
    for k in [0.0, 1.0, 2.0, 3.0] {
        let state = estimation::model_state(k, config.mean_n, config.eta_total, truncation(config)?)?;
        let (chi2, bins_used) = binned_chi_squared(&hist, |x| quadrature_pdf(&state, x));
        chi_squared.push(ChiSquaredRecord { k, chi_squared: chi2 });
        dof = bins_used;
    }

    let summary = KfitSummary {
        command: "kfit",
        convention: CONVENTION,
        config: config.clone(),
        samples: config.samples_per_phase,
        k_truth: config.k,
        k_hat: fit.k_hat,
        sigma_k: fit.sigma_k,
        formatted: fit.formatted.clone(),
        chi_squared,
        dof,
    };
    writer.finish(&summary)?;
    Ok((summary, fit))
}

/// Pearson χ² of histogram counts against a model PDF, Simpson-integrated per
/// bin; bins with expected count below 1 are skipped. Returns (χ², bins used).
fn binned_chi_squared(hist: &QuadratureHistogram, pdf: impl Fn(f64) -> f64) -> (f64, usize) {
    let edges = hist.bin_edges();
    let total = hist.total() as f64;
    let mut chi2 = 0.0;
    let mut used = 0;
    for (w, &count) in edges.windows(2).zip(hist.counts()) {
        let (a, b) = (w[0], w[1]);
        let steps = 8;
        let h = (b - a) / steps as f64;
        let mut mass = pdf(a) + pdf(b);
        for i in 1..steps {
            mass += if i % 2 == 1 { 4.0 } else { 2.0 } * pdf(a + i as f64 * h);
        }
        mass *= h / 3.0;
        let expected = total * mass;
        if expected < 1.0 {
            continue;
        }
        let delta = count as f64 - expected;
        chi2 += delta * delta / expected;
        used += 1;
    }
    (chi2, used)
}
