use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::Serialize;

use quadrature::oscillator_eigenfunctions;

use crate::model::{model_dim, model_state_at_phase};
use crate::EstimationError;

/// Default K scan range; brackets all values plotted in the reference
/// analysis (0, 1, 2, 3) with headroom.
pub const DEFAULT_K_RANGE: (f64, f64) = (0.1, 5.0);
/// Coarse scan step before golden-section refinement.
pub const DEFAULT_COARSE_STEP: f64 = 0.05;

const MIN_SAMPLES: usize = 1000;
const CURVATURE_STEP: f64 = 1e-3;
const GOLDEN_TOL: f64 = 1e-6;
/// Log-likelihood variation below which the scan is considered K-blind.
const FLAT_TOL: f64 = 1e-6;

/// How the 1σ error on K was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    Curvature,
    Bootstrap,
}

/// Maximum-likelihood estimate of the commutator constant.
#[derive(Debug, Clone, Serialize)]
pub struct KFitResult {
    pub k_hat: f64,
    /// 1σ standard error.
    pub sigma_k: f64,
    /// Coarse-scan (K, log-likelihood) pairs for external plotting.
    pub log_likelihood_profile: Vec<(f64, f64)>,
    pub method: FitMethod,
    /// Parenthesis-notation summary, e.g. "K = 1.02(3)".
    pub formatted: String,
}

impl KFitResult {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("fit result serializes")
    }
}

/// ψ_n(x_i)² for every sample and Fock level; the expensive part of the
/// likelihood that does not depend on K.
struct PsiSqTable {
    data: Vec<f64>,
    levels: usize,
}

impl PsiSqTable {
    fn build(samples: &[f64], levels: usize) -> Self {
        let mut data = Vec::with_capacity(samples.len() * levels);
        for &x in samples {
            let psis = oscillator_eigenfunctions(levels - 1, x);
            data.extend(psis.iter().map(|p| p * p));
        }
        Self { data, levels }
    }

    /// Σ_i w_i · log Σ_n p_n ψ_n(x_i)², Kahan-summed. `weights` of `None`
    /// means unit weight per sample.
    fn log_likelihood(&self, probs: &[f64], weights: Option<&[u32]>) -> f64 {
        debug_assert_eq!(probs.len(), self.levels);
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for (i, row) in self.data.chunks_exact(self.levels).enumerate() {
            let w = weights.map_or(1.0, |ws| ws[i] as f64);
            if w == 0.0 {
                continue;
            }
            let density: f64 = row.iter().zip(probs).map(|(ps, p)| ps * p).sum();
            let term = w * density.ln();
            // Kahan compensation keeps the curvature finite-differences clean
            let y = term - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        sum
    }
}

/// Fits K to quadrature samples of the anticommutator-configured experiment
/// (φ = π) with n̄ and η fixed from calibration.
///
/// Maximizes the unbinned log-likelihood over a coarse K grid refined by
/// golden-section search; σ_K comes from the observed curvature
/// (−d²logL/dK²)^{−1/2} at the maximum.
pub fn fit_k(
    samples: &[f64],
    mean_n: f64,
    eta: f64,
    k_range: (f64, f64),
) -> Result<KFitResult, EstimationError> {
    fit_k_at_phase(samples, std::f64::consts::PI, mean_n, eta, k_range)
}

/// [`fit_k`] with an explicit superposition phase. At φ = 0 the model is
/// K-independent and the fit is rejected with a flat-likelihood error.
pub fn fit_k_at_phase(
    samples: &[f64],
    phi: f64,
    mean_n: f64,
    eta: f64,
    k_range: (f64, f64),
) -> Result<KFitResult, EstimationError> {
    validate_inputs(samples, mean_n, eta, k_range)?;
    let table = PsiSqTable::build(samples, model_dim().size());
    fit_on_table(&table, None, phi, mean_n, eta, k_range, true)
}

fn validate_inputs(
    samples: &[f64],
    mean_n: f64,
    eta: f64,
    k_range: (f64, f64),
) -> Result<(), EstimationError> {
    if samples.len() < MIN_SAMPLES {
        return Err(EstimationError::TooFewSamples {
            got: samples.len(),
            min: MIN_SAMPLES,
        });
    }
    if !k_range.0.is_finite() || !k_range.1.is_finite() || k_range.0 >= k_range.1 {
        return Err(EstimationError::InvalidKRange(k_range.0, k_range.1));
    }
    if !mean_n.is_finite() || mean_n <= 0.0 {
        return Err(EstimationError::InvalidParameter {
            name: "mean_n",
            value: mean_n,
            range: "(0, inf)",
        });
    }
    if !(0.0 < eta && eta <= 1.0) {
        return Err(EstimationError::InvalidParameter {
            name: "eta",
            value: eta,
            range: "(0, 1]",
        });
    }
    Ok(())
}

fn fit_on_table(
    table: &PsiSqTable,
    weights: Option<&[u32]>,
    phi: f64,
    mean_n: f64,
    eta: f64,
    k_range: (f64, f64),
    keep_profile: bool,
) -> Result<KFitResult, EstimationError> {
    let dim = model_dim();
    let eval = |k: f64| -> Result<f64, EstimationError> {
        let state = model_state_at_phase(k, phi, mean_n, eta, dim)?;
        Ok(table.log_likelihood(state.probs(), weights))
    };

    // coarse scan
    let (lo, hi) = k_range;
    let steps = ((hi - lo) / DEFAULT_COARSE_STEP).round() as usize;
    let steps = steps.max(2);
    let mut profile = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let k = lo + (hi - lo) * i as f64 / steps as f64;
        profile.push((k, eval(k)?));
    }

    let (mut best_idx, mut best_ll) = (0, f64::NEG_INFINITY);
    let mut min_ll = f64::INFINITY;
    for (i, &(_, ll)) in profile.iter().enumerate() {
        if ll > best_ll {
            best_ll = ll;
            best_idx = i;
        }
        min_ll = min_ll.min(ll);
    }
    let variation = best_ll - min_ll;
    if variation < FLAT_TOL {
        return Err(EstimationError::FlatLikelihood { variation });
    }
    if best_idx == 0 || best_idx == steps {
        return Err(EstimationError::BoundaryMaximum {
            k_hat: profile[best_idx].0,
        });
    }

    // golden-section refinement inside the bracketing interval
    let k_hat = golden_section_max(
        profile[best_idx - 1].0,
        profile[best_idx + 1].0,
        GOLDEN_TOL,
        &eval,
    )?;

    // observed curvature at the maximum
    let h = CURVATURE_STEP;
    let (l_minus, l_mid, l_plus) = (eval(k_hat - h)?, eval(k_hat)?, eval(k_hat + h)?);
    let second = (l_plus - 2.0 * l_mid + l_minus) / (h * h);
    if !second.is_finite() || second >= 0.0 {
        return Err(EstimationError::NonConcaveMaximum {
            second_derivative: second,
        });
    }
    let sigma_k = (-second).powf(-0.5);

    Ok(KFitResult {
        k_hat,
        sigma_k,
        log_likelihood_profile: if keep_profile { profile } else { Vec::new() },
        method: FitMethod::Curvature,
        formatted: format_k(k_hat, sigma_k),
    })
}

fn golden_section_max(
    mut a: f64,
    mut b: f64,
    tol: f64,
    eval: &dyn Fn(f64) -> Result<f64, EstimationError>,
) -> Result<f64, EstimationError> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - (b - a) * INV_PHI;
    let mut d = a + (b - a) * INV_PHI;
    let mut fc = eval(c)?;
    let mut fd = eval(d)?;
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * INV_PHI;
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * INV_PHI;
            fd = eval(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// Number of bootstrap resamples used by [`fit_k_bootstrap`].
pub const DEFAULT_BOOTSTRAP_RESAMPLES: usize = 200;

/// Cross-checks the curvature error by a nonparametric bootstrap: refits K on
/// `resamples` with-replacement resamples of the data and reports the spread
/// of the replicate estimates as σ_K. Replicates run in parallel; the result
/// is deterministic for a fixed `seed`.
pub fn fit_k_bootstrap(
    samples: &[f64],
    mean_n: f64,
    eta: f64,
    k_range: (f64, f64),
    resamples: usize,
    seed: u64,
) -> Result<KFitResult, EstimationError> {
    validate_inputs(samples, mean_n, eta, k_range)?;
    let phi = std::f64::consts::PI;
    let table = PsiSqTable::build(samples, model_dim().size());
    let base = fit_on_table(&table, None, phi, mean_n, eta, k_range, true)?;

    // narrow scan window around the point estimate for the replicates
    let width = 8.0 * base.sigma_k.max(1e-3);
    let replicate_range = (
        (base.k_hat - width).max(k_range.0),
        (base.k_hat + width).min(k_range.1),
    );
    let n = samples.len();

    let k_replicates: Result<Vec<f64>, EstimationError> = (0..resamples)
        .into_par_iter()
        .map(|rep| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(rep as u64 + 1);
            let mut weights = vec![0u32; n];
            for _ in 0..n {
                weights[rng.gen_range(0..n)] += 1;
            }
            let fit = fit_on_table(
                &table,
                Some(&weights),
                phi,
                mean_n,
                eta,
                replicate_range,
                false,
            )?;
            Ok(fit.k_hat)
        })
        .collect();
    let k_replicates = k_replicates?;

    let mean: f64 = k_replicates.iter().sum::<f64>() / k_replicates.len() as f64;
    let var: f64 = k_replicates
        .iter()
        .map(|k| (k - mean) * (k - mean))
        .sum::<f64>()
        / (k_replicates.len() - 1) as f64;
    let sigma_k = var.sqrt();

    Ok(KFitResult {
        k_hat: base.k_hat,
        sigma_k,
        log_likelihood_profile: base.log_likelihood_profile,
        method: FitMethod::Bootstrap,
        formatted: format_k(base.k_hat, sigma_k),
    })
}

/// Formats a value with a 1σ uncertainty in parenthesis notation,
/// e.g. (1.0234, 0.031) → "K = 1.02(3)".
pub fn format_k(k_hat: f64, sigma_k: f64) -> String {
    if !sigma_k.is_finite() || sigma_k <= 0.0 {
        return format!("K = {k_hat}");
    }
    // round sigma to one significant digit
    let exponent = sigma_k.log10().floor() as i32;
    let scale = 10f64.powi(-exponent);
    let mut digit = (sigma_k * scale).round() as i64;
    let mut exponent = exponent;
    if digit == 10 {
        digit = 1;
        exponent += 1;
    }
    if exponent >= 0 {
        // uncertainty at or above 1: print both numbers in full
        let unc = digit as f64 * 10f64.powi(exponent);
        format!("K = {:.0}({:.0})", k_hat.round(), unc)
    } else {
        let decimals = (-exponent) as usize;
        format!("K = {k_hat:.decimals$}({digit})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parenthesis_notation() {
        assert_eq!(format_k(1.0234, 0.031), "K = 1.02(3)");
        assert_eq!(format_k(1.0234, 0.0098), "K = 1.02(1)");
        assert_eq!(format_k(0.98, 0.12), "K = 1.0(1)");
        assert_eq!(format_k(12.3, 2.0), "K = 12(2)");
    }

    #[test]
    fn rejects_too_few_samples() {
        let samples = vec![0.0; 10];
        assert!(matches!(
            fit_k(&samples, 0.9, 0.61, DEFAULT_K_RANGE),
            Err(EstimationError::TooFewSamples { .. })
        ));
    }

    #[test]
    fn rejects_bad_range_and_parameters() {
        let samples = vec![0.0; 2000];
        assert!(fit_k(&samples, 0.9, 0.61, (2.0, 1.0)).is_err());
        assert!(fit_k(&samples, 0.0, 0.61, DEFAULT_K_RANGE).is_err());
        assert!(fit_k(&samples, 0.9, 0.0, DEFAULT_K_RANGE).is_err());
    }
}
