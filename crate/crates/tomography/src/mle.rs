use fock_core::{binomial_transform, DiagonalState};
use quadrature::QuadratureHistogram;
use serde::Serialize;

use crate::{BinnedPovm, TomographyError};

/// Default iteration cap for direct calls; pipelines that invert a lossy POVM
/// use a much smaller budget (see the tomography pipeline documentation).
pub const DEFAULT_MAX_ITER: usize = 5000;
/// Default stopping tolerance on the largest per-level probability change.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Result of an expectation-maximization reconstruction.
#[derive(Debug, Clone, Serialize)]
pub struct ReconstructionResult {
    #[serde(serialize_with = "serialize_probs")]
    pub state: DiagonalState,
    /// Log-likelihood after each iteration (natural log, unnormalized).
    pub log_likelihood_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

fn serialize_probs<S: serde::Serializer>(
    state: &DiagonalState,
    ser: S,
) -> Result<S::Ok, S::Error> {
    serde::Serialize::serialize(state.probs(), ser)
}

impl ReconstructionResult {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }
}

/// Iterative maximum-likelihood reconstruction of a photon-number
/// distribution from a binned histogram.
///
/// The update is the diagonal expectation-maximization step
///
/// ```text
/// p_n ← p_n Σ_j (f_j / q_j) E(j, n),   q_j = Σ_n E(j, n) p_n
/// ```
///
/// renormalized each iteration, starting from the uniform distribution.
/// The histogram's overflow counter participates as one extra bin matched to
/// the POVM's out-of-range row, which completes the measurement model and
/// keeps each EM step monotone in the likelihood. Iteration stops when the
/// largest per-level change drops below `tol` or after `max_iter` steps.
///
/// Note: with an efficiency-corrected POVM the exact likelihood maximum is a
/// severely noise-amplifying deconvolution; small iteration budgets act as
/// regularization (the smooth components converge first).
pub fn mle_reconstruct(
    hist: &QuadratureHistogram,
    povm: &BinnedPovm,
    max_iter: usize,
    tol: f64,
) -> Result<ReconstructionResult, TomographyError> {
    let edges_match = hist.bin_edges().len() == povm.edges().len()
        && hist
            .bin_edges()
            .iter()
            .zip(povm.edges())
            .all(|(a, b)| (a - b).abs() <= 1e-12 * b.abs().max(1.0));
    if !edges_match {
        return Err(TomographyError::EdgeMismatch);
    }
    if hist.total() == 0 {
        return Err(TomographyError::EmptyHistogram);
    }
    let dim = povm.dim();
    let bins = povm.num_bins();
    let grand_total = (hist.total() + hist.overflow()) as f64;

    // observed frequencies over bins plus the out-of-range pseudo-bin
    let mut freqs: Vec<f64> = hist
        .counts()
        .iter()
        .map(|&c| c as f64 / grand_total)
        .collect();
    freqs.push(hist.overflow() as f64 / grand_total);

    let row = |j: usize| -> &[f64] {
        if j < bins {
            povm.bin_row(j)
        } else {
            povm.out_of_range()
        }
    };

    // bins with data must be reachable by the model
    for (j, &f) in freqs.iter().enumerate() {
        if f > 0.0 && row(j).iter().all(|&e| e <= 0.0) {
            return Err(TomographyError::ModelMismatch { bin: j });
        }
    }

    let mut p = vec![1.0 / dim as f64; dim];
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    for _ in 0..max_iter {
        iterations += 1;
        let mut multiplier = vec![0.0; dim];
        let mut log_likelihood = 0.0;
        for (j, &f) in freqs.iter().enumerate() {
            if f == 0.0 {
                continue;
            }
            let r = row(j);
            let q: f64 = r.iter().zip(&p).map(|(e, pn)| e * pn).sum();
            if q <= 1e-300 {
                // model mass vanished under the current iterate
                return Err(TomographyError::ModelMismatch { bin: j });
            }
            log_likelihood += f * grand_total * q.ln();
            let ratio = f / q;
            for (m, e) in multiplier.iter_mut().zip(r) {
                *m += ratio * e;
            }
        }
        let mut next: Vec<f64> = p.iter().zip(&multiplier).map(|(pn, m)| pn * m).collect();
        let norm: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= norm);

        let delta = next
            .iter()
            .zip(&p)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        p = next;
        trace.push(log_likelihood);
        if delta < tol {
            converged = true;
            break;
        }
    }

    Ok(ReconstructionResult {
        state: DiagonalState::new(p)?,
        log_likelihood_trace: trace,
        iterations,
        converged,
    })
}

/// Inverts the Bernoulli loss channel on a diagonal state (post-hoc
/// efficiency correction).
///
/// The binomial kernels form a semigroup, so the inverse is the same kernel
/// evaluated at 1/η; it is exact on the truncated space in exact arithmetic
/// but exponentially noise-amplifying, hence the η > 0.5 restriction.
/// Negative entries produced by the inversion are clipped to zero and the
/// state renormalized; the clipped mass is returned and must not exceed 5%.
pub fn inverse_loss(
    state: &DiagonalState,
    eta: f64,
) -> Result<(DiagonalState, f64), TomographyError> {
    if !eta.is_finite() || !(0.5 < eta && eta <= 1.0) {
        return Err(TomographyError::InverseLossRange(eta));
    }
    const CLIP_LIMIT: f64 = 0.05;
    let raw = binomial_transform(state.probs(), 1.0 / eta);
    let clipped: f64 = -raw.iter().filter(|&&w| w < 0.0).sum::<f64>();
    if clipped > CLIP_LIMIT {
        return Err(TomographyError::InverseLossUnreliable {
            clipped,
            limit: CLIP_LIMIT,
        });
    }
    let positive: Vec<f64> = raw.iter().map(|&w| w.max(0.0)).collect();
    let total: f64 = positive.iter().sum();
    let probs: Vec<f64> = positive.iter().map(|w| w / total).collect();
    Ok((DiagonalState::new(probs)?, clipped))
}
