use crate::{DiagonalState, FockError};

/// Binomial coefficient C(n, k) in f64. Exact up to 2^53; relative error
/// ~1e-16 beyond, which is ample for the truncations used here.
pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Raw binomial kernel out[m] = Σ_{n≥m} C(n,m) η^m (1−η)^{n−m} in[n].
///
/// For η ∈ [0, 1] this is the Bernoulli loss map. Values η > 1 implement the
/// analytic continuation used to invert the channel (the kernels form a
/// semigroup, L(η₁)∘L(η₂) = L(η₁η₂)); outputs may then be negative.
pub fn binomial_transform(probs: &[f64], eta: f64) -> Vec<f64> {
    let d = probs.len();
    let mut out = vec![0.0; d];
    if eta == 1.0 {
        out.copy_from_slice(probs);
        return out;
    }
    let complement = 1.0 - eta;
    for (n, p) in probs.iter().enumerate() {
        if *p == 0.0 {
            continue;
        }
        for (m, slot) in out.iter_mut().enumerate().take(n + 1) {
            *slot += binomial(n, m) * eta.powi(m as i32) * complement.powi((n - m) as i32) * p;
        }
    }
    out
}

/// Bernoulli photon-loss channel with survival probability `eta`:
/// out[m] = Σ_{n≥m} C(n,m) η^m (1−η)^{n−m} in[n]. Trace-preserving and
/// positivity-preserving; composes as a semigroup in η.
pub fn loss_channel(state: &DiagonalState, eta: f64) -> Result<DiagonalState, FockError> {
    if !eta.is_finite() || !(0.0..=1.0).contains(&eta) {
        return Err(FockError::InvalidParameter {
            name: "eta",
            value: eta,
            range: "[0, 1]",
        });
    }
    if eta == 0.0 {
        return Ok(DiagonalState::vacuum(state.dim()));
    }
    DiagonalState::new(binomial_transform(state.probs(), eta))
}

/// Conditional single-photon subtraction by a beam splitter of intensity
/// reflectivity `r` with a vacuum ancilla and a non-number-resolving herald
/// detector (POVM 1 − |0⟩⟨0| on the reflected mode).
///
/// Implemented by the explicit two-mode expansion: the joint weight of
/// (m kept, k reflected) is C(m+k, k) (1−r)^m r^k in[m+k]; the output
/// conditions on k ≥ 1 and marginalizes k. Also returns the herald click
/// probability Σ_n in[n] (1 − (1−r)^n).
///
/// As r → 0 the output converges to the ideal annihilation map â ρ â† / Tr
/// with total-variation distance O(r).
pub fn bs_subtraction(
    state: &DiagonalState,
    reflectivity: f64,
) -> Result<(DiagonalState, f64), FockError> {
    if !reflectivity.is_finite() || !(0.0 < reflectivity && reflectivity < 1.0) {
        return Err(FockError::InvalidParameter {
            name: "reflectivity",
            value: reflectivity,
            range: "(0, 1)",
        });
    }
    let r = reflectivity;
    let t = 1.0 - r;
    let probs = state.probs();
    let d = probs.len();

    let mut click_prob = 0.0;
    let mut weights = vec![0.0; d];
    for (n, p) in probs.iter().enumerate() {
        if *p == 0.0 {
            continue;
        }
        click_prob += p * (1.0 - t.powi(n as i32));
        // joint weight of keeping m and reflecting k = n - m, conditioned on k >= 1
        for (m, slot) in weights.iter_mut().enumerate().take(n) {
            let k = n - m;
            *slot += binomial(n, k) * t.powi(m as i32) * r.powi(k as i32) * p;
        }
    }
    if click_prob < 1e-14 {
        return Err(FockError::NoClick(click_prob));
    }
    let (out, _) = DiagonalState::from_weights(weights)?;
    Ok((out, click_prob))
}
