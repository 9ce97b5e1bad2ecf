use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::{DiagonalState, FockError, TruncationDim};

const HERM_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-10;
const EIG_TOL: f64 = 1e-10;

/// General density matrix on the truncated Fock space.
///
/// The pipelines work with diagonal states throughout; this type exists for
/// intermediate non-diagonal computations and for the general Uhlmann
/// fidelity. Construction validates Hermiticity, unit trace and positivity.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    elements: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn new(elements: DMatrix<Complex64>) -> Result<Self, FockError> {
        if elements.nrows() != elements.ncols() || elements.nrows() < 2 {
            return Err(FockError::InvalidDimension(
                elements.nrows().saturating_sub(1),
            ));
        }
        let d = elements.nrows();
        for i in 0..d {
            for j in i..d {
                let delta = elements[(i, j)] - elements[(j, i)].conj();
                if delta.norm() > HERM_TOL {
                    return Err(FockError::InvalidDensityMatrix(format!(
                        "not Hermitian at ({i},{j}): asymmetry {:.3e}",
                        delta.norm()
                    )));
                }
            }
        }
        let trace: f64 = (0..d).map(|i| elements[(i, i)].re).sum();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(FockError::InvalidDensityMatrix(format!(
                "trace = {trace}, expected 1"
            )));
        }
        let eigs = SymmetricEigen::new(elements.clone()).eigenvalues;
        if eigs.iter().any(|&l| l < -EIG_TOL) {
            let min = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
            return Err(FockError::InvalidDensityMatrix(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self { elements })
    }

    /// Embeds a diagonal state as a density matrix.
    pub fn from_diagonal(state: &DiagonalState) -> Self {
        let d = state.size();
        let mut m = DMatrix::zeros(d, d);
        for (n, p) in state.probs().iter().enumerate() {
            m[(n, n)] = Complex64::new(*p, 0.0);
        }
        Self { elements: m }
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.elements
    }

    pub fn size(&self) -> usize {
        self.elements.nrows()
    }

    pub fn dim(&self) -> TruncationDim {
        TruncationDim::new(self.size() - 1).expect("size >= 2 by construction")
    }

    /// Diagonal of the density matrix as a [`DiagonalState`] (valid when the
    /// off-diagonal part is irrelevant for the caller, e.g. phase-averaged
    /// measurements).
    pub fn diagonal_state(&self) -> Result<DiagonalState, FockError> {
        let probs: Vec<f64> = (0..self.size()).map(|i| self.elements[(i, i)].re).collect();
        DiagonalState::new(probs)
    }

    /// Uhlmann fidelity F = |Tr √(√ρ σ √ρ)|², computed by Hermitian
    /// eigendecomposition. Reduces to (Σ √(a_n b_n))² for commuting diagonal
    /// states.
    pub fn fidelity(&self, other: &DensityMatrix) -> Result<f64, FockError> {
        if self.size() != other.size() {
            return Err(FockError::DimensionMismatch {
                left: self.size(),
                right: other.size(),
            });
        }
        let sqrt_rho = hermitian_sqrt(&self.elements);
        let inner = &sqrt_rho * other.matrix() * &sqrt_rho;
        let eigs = SymmetricEigen::new(inner).eigenvalues;
        let s: f64 = eigs.iter().map(|&l| l.max(0.0).sqrt()).sum();
        Ok((s * s).min(1.0))
    }
}

fn hermitian_sqrt(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let eig = SymmetricEigen::new(m.clone());
    let d = m.nrows();
    let mut sqrt_diag = DMatrix::<Complex64>::zeros(d, d);
    for i in 0..d {
        sqrt_diag[(i, i)] = Complex64::new(eig.eigenvalues[i].max(0.0).sqrt(), 0.0);
    }
    &eig.eigenvectors * sqrt_diag * eig.eigenvectors.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{apply_conditional, superposition_operator, SuperpositionSpec};
    use approx::assert_abs_diff_eq;

    fn dim(n_max: usize) -> TruncationDim {
        TruncationDim::new(n_max).unwrap()
    }

    #[test]
    fn general_fidelity_matches_diagonal_formula() {
        let (a, _) = crate::thermal_state(0.9, dim(25)).unwrap();
        let (b, _) = crate::thermal_state(0.4, dim(25)).unwrap();
        let fd = crate::fidelity(&a, &b).unwrap();
        let fg = DensityMatrix::from_diagonal(&a)
            .fidelity(&DensityMatrix::from_diagonal(&b))
            .unwrap();
        assert_abs_diff_eq!(fd, fg, epsilon = 1e-10);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = DMatrix::<Complex64>::zeros(3, 3);
        m[(0, 0)] = Complex64::new(1.0, 0.0);
        m[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn rejects_negative_matrix() {
        let mut m = DMatrix::<Complex64>::zeros(2, 2);
        m[(0, 0)] = Complex64::new(1.5, 0.0);
        m[(1, 1)] = Complex64::new(-0.5, 0.0);
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn density_variant_agrees_with_diagonal_path() {
        let spec = SuperpositionSpec::new(std::f64::consts::PI, 1.0, 1.0).unwrap();
        let op = superposition_operator(&spec, dim(20));
        let (th, _) = crate::thermal_state(0.9, dim(20)).unwrap();
        let (diag_out, w_diag) = apply_conditional(&op, &th).unwrap();
        let rho = DensityMatrix::from_diagonal(&th);
        let (rho_out, w_dens) = crate::apply_conditional_density(&op, &rho).unwrap();
        assert_abs_diff_eq!(w_diag, w_dens, epsilon = 1e-10);
        let out_diag = rho_out.diagonal_state().unwrap();
        assert!(diag_out.trace_distance(&out_diag).unwrap() < 1e-12);
    }
}
