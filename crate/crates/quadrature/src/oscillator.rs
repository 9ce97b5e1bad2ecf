/// Harmonic-oscillator eigenfunction ψ_n(x) in the vacuum-variance-1/2
/// convention:
///
/// ```text
/// ψ_n(x) = π^{-1/4} (2^n n!)^{-1/2} H_n(x) e^{-x²/2}
/// ```
///
/// Evaluated through the three-term recurrence on the weighted functions
///
/// ```text
/// ψ_{n+1}(x) = √(2/(n+1)) x ψ_n(x) − √(n/(n+1)) ψ_{n-1}(x)
/// ```
///
/// which stays bounded for all n, unlike raw Hermite polynomial values.
pub fn oscillator_eigenfunction(n: usize, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = psi_zero(x);
    for k in 0..n {
        let next = (2.0 / (k as f64 + 1.0)).sqrt() * x * cur
            - (k as f64 / (k as f64 + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// All eigenfunctions ψ_0(x) .. ψ_{n_max}(x) in one recurrence sweep.
pub fn oscillator_eigenfunctions(n_max: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(psi_zero(x));
    if n_max >= 1 {
        out.push(std::f64::consts::SQRT_2 * x * out[0]);
    }
    for n in 1..n_max {
        let next = (2.0 / (n as f64 + 1.0)).sqrt() * x * out[n]
            - (n as f64 / (n as f64 + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
    out
}

#[inline]
fn psi_zero(x: f64) -> f64 {
    std::f64::consts::PI.powf(-0.25) * (-x * x / 2.0).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ground_state_at_origin() {
        assert_abs_diff_eq!(
            oscillator_eigenfunction(0, 0.0),
            std::f64::consts::PI.powf(-0.25),
            epsilon = 1e-15
        );
    }

    #[test]
    fn odd_states_vanish_at_origin() {
        for n in [1, 3, 5, 11] {
            assert_eq!(oscillator_eigenfunction(n, 0.0), 0.0);
        }
    }

    #[test]
    fn batch_matches_single_evaluation() {
        for &x in &[-3.7, -0.4, 0.0, 1.1, 6.0] {
            let all = oscillator_eigenfunctions(20, x);
            for (n, &psi) in all.iter().enumerate() {
                assert_abs_diff_eq!(psi, oscillator_eigenfunction(n, x), epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn normalized_for_all_levels_up_to_30() {
        // Simpson quadrature oracle for ∫ ψ_n(x)² dx over ±12.
        let a = -12.0;
        let b = 12.0;
        let steps = 4800; // even
        let h = (b - a) / steps as f64;
        for n in 0..=30 {
            let f = |x: f64| {
                let v = oscillator_eigenfunction(n, x);
                v * v
            };
            let mut integral = f(a) + f(b);
            for i in 1..steps {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                integral += w * f(a + i as f64 * h);
            }
            integral *= h / 3.0;
            assert!(
                (integral - 1.0).abs() < 1e-8,
                "n = {n}: integral = {integral}"
            );
        }
    }
}
