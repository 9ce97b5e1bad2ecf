use fock_core::DiagonalState;

use crate::oscillator::oscillator_eigenfunctions;
use crate::{QuadratureError, DEFAULT_GRID_SIGMAS, MIN_COVERAGE_SIGMAS};

/// Uniform evaluation grid for quadrature PDFs and CDF tabulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureGrid {
    x_min: f64,
    x_max: f64,
    points: usize,
}

impl QuadratureGrid {
    pub fn new(x_min: f64, x_max: f64, points: usize) -> Result<Self, QuadratureError> {
        if !x_min.is_finite() || !x_max.is_finite() || x_min >= x_max {
            return Err(QuadratureError::InvalidGridBounds { x_min, x_max });
        }
        if points < 2 {
            return Err(QuadratureError::TooFewGridPoints(points));
        }
        Ok(Self {
            x_min,
            x_max,
            points,
        })
    }

    /// Symmetric grid spanning [`DEFAULT_GRID_SIGMAS`] standard deviations of
    /// the state's quadrature distribution.
    pub fn covering(state: &DiagonalState, points: usize) -> Result<Self, QuadratureError> {
        let half = DEFAULT_GRID_SIGMAS * quadrature_std(state);
        Self::new(-half, half, points)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn step(&self) -> f64 {
        (self.x_max - self.x_min) / (self.points - 1) as f64
    }

    pub fn xs(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.points).map(|i| self.x_min + i as f64 * h).collect()
    }

    /// Checks that the grid spans at least [`MIN_COVERAGE_SIGMAS`] standard
    /// deviations of the state's quadrature distribution on both sides.
    pub fn check_coverage(&self, state: &DiagonalState) -> Result<(), QuadratureError> {
        let sigma = quadrature_std(state);
        let required = MIN_COVERAGE_SIGMAS * sigma;
        if self.x_min > -required || self.x_max < required {
            return Err(QuadratureError::InsufficientCoverage {
                x_min: self.x_min,
                x_max: self.x_max,
                sigma,
                required: MIN_COVERAGE_SIGMAS,
            });
        }
        Ok(())
    }
}

/// Standard deviation of the quadrature distribution of a diagonal state:
/// ⟨x²⟩ = Σ p_n (n + 1/2) in the vacuum-variance-1/2 convention (the mean
/// vanishes by parity).
pub fn quadrature_std(state: &DiagonalState) -> f64 {
    state
        .probs()
        .iter()
        .enumerate()
        .map(|(n, p)| (n as f64 + 0.5) * p)
        .sum::<f64>()
        .sqrt()
}

/// Phase-averaged quadrature probability density P(x) = Σ_n p_n ψ_n(x)².
pub fn quadrature_pdf(state: &DiagonalState, x: f64) -> f64 {
    let psis = oscillator_eigenfunctions(state.size() - 1, x);
    state
        .probs()
        .iter()
        .zip(&psis)
        .map(|(p, psi)| p * psi * psi)
        .sum()
}

/// P(x) evaluated at every grid point.
pub fn quadrature_pdf_on_grid(state: &DiagonalState, grid: &QuadratureGrid) -> Vec<f64> {
    grid.xs()
        .into_iter()
        .map(|x| quadrature_pdf(state, x))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use fock_core::{thermal_state, TruncationDim};

    #[test]
    fn vacuum_pdf_is_standard_gaussian_of_variance_half() {
        let vac = DiagonalState::vacuum(TruncationDim::new(5).unwrap());
        assert_abs_diff_eq!(
            quadrature_pdf(&vac, 0.0),
            1.0 / std::f64::consts::PI.sqrt(),
            epsilon = 1e-14
        );
        // P(x) = e^{-x²}/√π
        for &x in &[0.5, 1.0, 2.2] {
            assert_abs_diff_eq!(
                quadrature_pdf(&vac, x),
                (-x * x).exp() / std::f64::consts::PI.sqrt(),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn thermal_moments_match_closed_form() {
        // Var(x) = (2n̄ + 1)/2 for a thermal state; moment oracle by Simpson
        // integration of the evaluated PDF.
        let dim = TruncationDim::new(40).unwrap();
        let (th, _) = thermal_state(0.9, dim).unwrap();
        let grid = QuadratureGrid::new(-12.0, 12.0, 4801).unwrap();
        let pdf = quadrature_pdf_on_grid(&th, &grid);
        let xs = grid.xs();
        let h = grid.step();
        let simpson = |f: &dyn Fn(usize) -> f64| {
            let n = xs.len() - 1;
            let mut acc = f(0) + f(n);
            for i in 1..n {
                acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i);
            }
            acc * h / 3.0
        };
        let norm = simpson(&|i| pdf[i]);
        let var = simpson(&|i| xs[i] * xs[i] * pdf[i]);
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(var, (2.0 * 0.9 + 1.0) / 2.0, epsilon = 1e-6);
    }

    #[test]
    fn pdf_is_even() {
        let dim = TruncationDim::new(30).unwrap();
        let (th, _) = thermal_state(0.9, dim).unwrap();
        for &x in &[0.1, 0.9, 2.5, 4.0] {
            let left = quadrature_pdf(&th, -x);
            let right = quadrature_pdf(&th, x);
            assert!((left - right).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_coverage_check() {
        let dim = TruncationDim::new(30).unwrap();
        let (th, _) = thermal_state(0.9, dim).unwrap();
        // sigma = sqrt(1.4) ≈ 1.18; 6 sigma ≈ 7.1
        let narrow = QuadratureGrid::new(-5.0, 5.0, 128).unwrap();
        assert!(narrow.check_coverage(&th).is_err());
        let wide = QuadratureGrid::covering(&th, 128).unwrap();
        assert!(wide.check_coverage(&th).is_ok());
    }
}
