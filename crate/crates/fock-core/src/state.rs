use crate::{FockError, TruncationDim, DEFAULT_TAIL_TOL};

/// Photon-number probability distribution on the truncated Fock space.
///
/// All states handled by the pipelines are phase-averaged, so the density
/// operator is diagonal in the number basis and a probability vector is a
/// complete description.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalState {
    probs: Vec<f64>,
}

/// Tolerated negative excursion from roundoff before a probability is
/// considered invalid.
const NEG_TOL: f64 = 1e-12;
/// Tolerated deviation of the total probability from one.
const SUM_TOL: f64 = 1e-10;

impl DiagonalState {
    /// Builds a state from a probability vector.
    ///
    /// Entries must be nonnegative within 1e-12 and sum to one within 1e-10.
    /// Tiny negative roundoff is clamped to zero.
    pub fn new(probs: Vec<f64>) -> Result<Self, FockError> {
        if probs.len() < 2 {
            return Err(FockError::InvalidDimension(probs.len().saturating_sub(1)));
        }
        let mut clean = probs;
        for (n, p) in clean.iter_mut().enumerate() {
            if !p.is_finite() || *p < -NEG_TOL {
                return Err(FockError::InvalidProbabilities(format!(
                    "entry {n} = {p:e}"
                )));
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let sum: f64 = clean.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(FockError::InvalidProbabilities(format!(
                "probabilities sum to {sum}, expected 1"
            )));
        }
        Ok(Self { probs: clean })
    }

    /// Normalizes a vector of nonnegative weights into a state, returning the
    /// normalization (the unnormalized total weight).
    pub(crate) fn from_weights(weights: Vec<f64>) -> Result<(Self, f64), FockError> {
        let total: f64 = weights.iter().sum();
        if !total.is_finite() || total < 1e-14 {
            return Err(FockError::ZeroTrace { trace: total });
        }
        let probs = weights.iter().map(|w| (w / total).max(0.0)).collect();
        Ok((Self { probs }, total))
    }

    /// Vacuum state |0⟩⟨0|.
    pub fn vacuum(dim: TruncationDim) -> Self {
        let mut probs = vec![0.0; dim.size()];
        probs[0] = 1.0;
        Self { probs }
    }

    /// Fock state |n⟩⟨n|.
    pub fn fock(n: usize, dim: TruncationDim) -> Result<Self, FockError> {
        if n > dim.n_max() {
            return Err(FockError::PowerExceedsDimension {
                power: n,
                n_max: dim.n_max(),
            });
        }
        let mut probs = vec![0.0; dim.size()];
        probs[n] = 1.0;
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn dim(&self) -> TruncationDim {
        TruncationDim::new(self.probs.len() - 1).expect("len >= 2 by construction")
    }

    pub fn size(&self) -> usize {
        self.probs.len()
    }

    /// Mean photon number Σ n p_n.
    pub fn mean_photon(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }

    /// Second moment Σ n² p_n.
    pub fn mean_photon_sq(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(n, p)| (n * n) as f64 * p)
            .sum()
    }

    /// Trace distance ½ Σ |a_n − b_n| (equals the total-variation distance).
    pub fn trace_distance(&self, other: &DiagonalState) -> Result<f64, FockError> {
        check_same_dim(self, other)?;
        Ok(self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            / 2.0)
    }

    /// Extends the state with zero-probability levels up to `dim`.
    pub fn padded_to(&self, dim: TruncationDim) -> DiagonalState {
        let mut probs = self.probs.clone();
        probs.resize(dim.size().max(probs.len()), 0.0);
        DiagonalState { probs }
    }
}

fn check_same_dim(a: &DiagonalState, b: &DiagonalState) -> Result<(), FockError> {
    if a.size() != b.size() {
        return Err(FockError::DimensionMismatch {
            left: a.size(),
            right: b.size(),
        });
    }
    Ok(())
}

/// Thermal (Bose-Einstein) state of mean photon number `mean_n`, truncated and
/// renormalized. Returns the state together with the untruncated tail mass
/// (1 − Σ of the retained bare weights).
///
/// Errors if the tail exceeds [`crate::DEFAULT_TAIL_TOL`]; use
/// [`thermal_state_with_tol`] to override.
pub fn thermal_state(
    mean_n: f64,
    dim: TruncationDim,
) -> Result<(DiagonalState, f64), FockError> {
    thermal_state_with_tol(mean_n, dim, DEFAULT_TAIL_TOL)
}

/// [`thermal_state`] with an explicit bound on the acceptable truncation tail.
pub fn thermal_state_with_tol(
    mean_n: f64,
    dim: TruncationDim,
    tail_tol: f64,
) -> Result<(DiagonalState, f64), FockError> {
    if !mean_n.is_finite() || mean_n < 0.0 {
        return Err(FockError::InvalidParameter {
            name: "mean_n",
            value: mean_n,
            range: "[0, inf)",
        });
    }
    // p_n = n̄^n / (1+n̄)^(n+1); computed by the stable ratio recurrence.
    let ratio = mean_n / (1.0 + mean_n);
    let mut weights = Vec::with_capacity(dim.size());
    let mut w = 1.0 / (1.0 + mean_n);
    for _ in 0..dim.size() {
        weights.push(w);
        w *= ratio;
    }
    let retained: f64 = weights.iter().sum();
    let tail = (1.0 - retained).max(0.0);
    if tail > tail_tol {
        return Err(FockError::TruncationTail { tail, tol: tail_tol });
    }
    let (state, _) = DiagonalState::from_weights(weights)?;
    Ok((state, tail))
}

/// Fidelity of two diagonal states, (Σ √(a_n b_n))².
///
/// This is the Uhlmann fidelity restricted to commuting diagonal density
/// operators; it equals 1 iff the states coincide.
pub fn fidelity(a: &DiagonalState, b: &DiagonalState) -> Result<f64, FockError> {
    check_same_dim(a, b)?;
    let s: f64 = a
        .probs
        .iter()
        .zip(&b.probs)
        .map(|(x, y)| (x * y).sqrt())
        .sum();
    Ok((s * s).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn dim(n_max: usize) -> TruncationDim {
        TruncationDim::new(n_max).unwrap()
    }

    #[test]
    fn thermal_zero_mean_is_vacuum() {
        let (state, tail) = thermal_state(0.0, dim(10)).unwrap();
        assert_eq!(state, DiagonalState::vacuum(dim(10)));
        assert_eq!(tail, 0.0);
    }

    #[test]
    fn thermal_unit_mean_halves_each_level() {
        let (state, _) = thermal_state(1.0, dim(30)).unwrap();
        let p = state.probs();
        for n in 0..10 {
            assert_abs_diff_eq!(p[n + 1] / p[n], 0.5, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(p[0], 0.5, epsilon = 1e-9);
    }

    #[test]
    fn thermal_tail_and_mean_at_paper_parameters() {
        let (state, tail) = thermal_state(0.9, dim(30)).unwrap();
        assert!(tail < 1e-6, "tail = {tail:e}");
        assert_abs_diff_eq!(state.mean_photon(), 0.9, epsilon = 1e-6);
    }

    #[test]
    fn thermal_rejects_insufficient_truncation() {
        assert!(matches!(
            thermal_state(5.0, dim(4)),
            Err(FockError::TruncationTail { .. })
        ));
    }

    #[test]
    fn mean_photon_basics() {
        assert_eq!(DiagonalState::vacuum(dim(5)).mean_photon(), 0.0);
        assert_eq!(DiagonalState::fock(1, dim(5)).unwrap().mean_photon(), 1.0);
    }

    #[test]
    fn fidelity_basics() {
        let (th, _) = thermal_state(0.9, dim(20)).unwrap();
        assert_abs_diff_eq!(fidelity(&th, &th).unwrap(), 1.0, epsilon = 1e-14);
        let vac = DiagonalState::vacuum(dim(20));
        let one = DiagonalState::fock(1, dim(20)).unwrap();
        assert_eq!(fidelity(&vac, &one).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_probability_vectors() {
        assert!(DiagonalState::new(vec![0.5, 0.4]).is_err());
        assert!(DiagonalState::new(vec![1.1, -0.1]).is_err());
        assert!(DiagonalState::new(vec![0.5, 0.5, f64::NAN]).is_err());
        // roundoff-scale negatives are clamped
        let s = DiagonalState::new(vec![1.0 + 1e-13, -1e-13, 0.0]).unwrap();
        assert_eq!(s.probs()[1], 0.0);
    }
}
