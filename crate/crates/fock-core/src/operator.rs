use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{DensityMatrix, DiagonalState, FockError, TruncationDim};

/// Complex operator on the truncated Fock space.
///
/// No normalization is imposed: conditional (heralded) operators are not
/// trace-preserving.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    elements: DMatrix<Complex64>,
}

impl OperatorMatrix {
    pub fn from_matrix(elements: DMatrix<Complex64>) -> Result<Self, FockError> {
        if elements.nrows() != elements.ncols() || elements.nrows() < 2 {
            return Err(FockError::InvalidDimension(
                elements.nrows().saturating_sub(1),
            ));
        }
        if elements.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(FockError::InvalidProbabilities(
                "operator entries must be finite".into(),
            ));
        }
        Ok(Self { elements })
    }

    pub fn identity(dim: TruncationDim) -> Self {
        Self {
            elements: DMatrix::identity(dim.size(), dim.size()),
        }
    }

    /// Diagonal operator with the given complex entries.
    pub fn from_diagonal(entries: &[Complex64]) -> Result<Self, FockError> {
        let d = entries.len();
        let mut m = DMatrix::zeros(d, d);
        for (i, z) in entries.iter().enumerate() {
            m[(i, i)] = *z;
        }
        Self::from_matrix(m)
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

    /// Conjugate transpose.
    pub fn adjoint(&self) -> OperatorMatrix {
        Self {
            elements: self.elements.adjoint(),
        }
    }

    /// Matrix product `self * rhs`.
    pub fn compose(&self, rhs: &OperatorMatrix) -> Result<OperatorMatrix, FockError> {
        if self.size() != rhs.size() {
            return Err(FockError::DimensionMismatch {
                left: self.size(),
                right: rhs.size(),
            });
        }
        Ok(Self {
            elements: &self.elements * &rhs.elements,
        })
    }

    pub fn scale(&self, amplitude: Complex64) -> OperatorMatrix {
        Self {
            elements: self.elements.map(|e| e * amplitude),
        }
    }

    pub fn add(&self, rhs: &OperatorMatrix) -> Result<OperatorMatrix, FockError> {
        if self.size() != rhs.size() {
            return Err(FockError::DimensionMismatch {
                left: self.size(),
                right: rhs.size(),
            });
        }
        Ok(Self {
            elements: &self.elements + &rhs.elements,
        })
    }
}

/// Ladder operators on the truncated space: `annihilate[n-1, n] = √n` for
/// 1 ≤ n ≤ n_max, and `create` its conjugate transpose.
pub fn ladder_matrices(dim: TruncationDim) -> (OperatorMatrix, OperatorMatrix) {
    let d = dim.size();
    let mut a = DMatrix::<Complex64>::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    let create = OperatorMatrix {
        elements: a.adjoint(),
    };
    (OperatorMatrix { elements: a }, create)
}

/// Parameters of the heralded superposition â â† − e^{iφ} â†â under a
/// hypothesized commutator constant K and herald coherence v.
///
/// * `phi` — superposition phase, radians in [0, 2π);
/// * `k` — commutator constant ([â,â†] = K·1; physical value 1);
/// * `v` — herald-path indistinguishability: 1 is a fully coherent
///   superposition, 0 the equal-weight statistical mixture of the two
///   operator sequences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperpositionSpec {
    phi: f64,
    k: f64,
    v: f64,
}

impl SuperpositionSpec {
    pub fn new(phi: f64, k: f64, v: f64) -> Result<Self, FockError> {
        if !phi.is_finite() || !(0.0..TAU).contains(&phi) {
            return Err(FockError::InvalidParameter {
                name: "phi",
                value: phi,
                range: "[0, 2pi)",
            });
        }
        if !k.is_finite() || k < 0.0 {
            return Err(FockError::InvalidParameter {
                name: "K",
                value: k,
                range: "[0, inf)",
            });
        }
        if !v.is_finite() || !(0.0..=1.0).contains(&v) {
            return Err(FockError::InvalidParameter {
                name: "v",
                value: v,
                range: "[0, 1]",
            });
        }
        Ok(Self { phi, k, v })
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn v(&self) -> f64 {
        self.v
    }
}

/// The operator â â† − e^{iφ} â†â = (1 − e^{iφ}) n̂ + K·1, written directly as
/// a diagonal matrix so that no truncation artifact enters the top level.
///
/// For φ = 0 this is K times the identity; for φ = π and K = 1 the diagonal
/// entry at level n is 2n + 1.
pub fn superposition_operator(spec: &SuperpositionSpec, dim: TruncationDim) -> OperatorMatrix {
    let phase = Complex64::from_polar(1.0, spec.phi);
    let coeff = Complex64::new(1.0, 0.0) - phase;
    let entries: Vec<Complex64> = (0..dim.size())
        .map(|n| coeff * n as f64 + spec.k)
        .collect();
    OperatorMatrix::from_diagonal(&entries).expect("diagonal entries are finite")
}

/// One monomial `amplitude · (â†)^power_create · (â)^power_annihilate`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolynomialTerm {
    pub power_create: usize,
    pub power_annihilate: usize,
    pub amplitude: Complex64,
}

impl PolynomialTerm {
    pub fn new(
        power_create: usize,
        power_annihilate: usize,
        amplitude: impl Into<Complex64>,
    ) -> Self {
        Self {
            power_create,
            power_annihilate,
            amplitude: amplitude.into(),
        }
    }
}

/// Builds Σ_terms amplitude · (â†)^j (â)^k as explicit matrix products,
/// for arbitrary operator polynomials in the ladder operators.
pub fn polynomial_operator(
    terms: &[PolynomialTerm],
    dim: TruncationDim,
) -> Result<OperatorMatrix, FockError> {
    let (annihilate, create) = ladder_matrices(dim);
    let d = dim.size();
    let mut acc = DMatrix::<Complex64>::zeros(d, d);
    for term in terms {
        for power in [term.power_create, term.power_annihilate] {
            if power > dim.n_max() {
                return Err(FockError::PowerExceedsDimension {
                    power,
                    n_max: dim.n_max(),
                });
            }
        }
        let mut m = DMatrix::<Complex64>::identity(d, d);
        for _ in 0..term.power_create {
            m = &m * create.matrix();
        }
        for _ in 0..term.power_annihilate {
            m = &m * annihilate.matrix();
        }
        acc += m.map(|e| e * term.amplitude);
    }
    OperatorMatrix::from_matrix(acc)
}

/// Heralded application ρ → ÔρÔ† / Tr[ÔρÔ†] for operators that keep diagonal
/// states diagonal (every column of Ô has at most one nonzero entry; true for
/// anything built from n̂ and for single ladder monomials).
///
/// Returns the post-selected state and the success weight Tr[ÔρÔ†], the
/// relative heralding probability.
pub fn apply_conditional(
    op: &OperatorMatrix,
    state: &DiagonalState,
) -> Result<(DiagonalState, f64), FockError> {
    if op.size() != state.size() {
        return Err(FockError::DimensionMismatch {
            left: op.size(),
            right: state.size(),
        });
    }
    let d = op.size();
    let m = op.matrix();
    let scale = m.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    let nz_tol = scale * 1e-12;
    for col in 0..d {
        let nonzeros = (0..d).filter(|&row| m[(row, col)].norm() > nz_tol).count();
        if nonzeros > 1 {
            return Err(FockError::NotDiagonalPreserving {
                column: col,
                nonzeros,
            });
        }
    }
    // (ÔρÔ†)_{mm} = Σ_n |O_{mn}|² p_n
    let mut weights = vec![0.0; d];
    for (n, p) in state.probs().iter().enumerate() {
        if *p == 0.0 {
            continue;
        }
        for row in 0..d {
            let amp = m[(row, n)].norm_sqr();
            if amp > 0.0 {
                weights[row] += amp * p;
            }
        }
    }
    DiagonalState::from_weights(weights)
}

/// Heralded application for a general operator acting on a general density
/// matrix: ρ → ÔρÔ† / Tr, with the trace returned as the success weight.
pub fn apply_conditional_density(
    op: &OperatorMatrix,
    rho: &DensityMatrix,
) -> Result<(DensityMatrix, f64), FockError> {
    if op.size() != rho.size() {
        return Err(FockError::DimensionMismatch {
            left: op.size(),
            right: rho.size(),
        });
    }
    let m = op.matrix();
    let out = m * rho.matrix() * m.adjoint();
    let trace: f64 = (0..out.nrows()).map(|i| out[(i, i)].re).sum();
    if !(trace.is_finite()) || trace < 1e-14 {
        return Err(FockError::ZeroTrace { trace });
    }
    DensityMatrix::new(out.map(|z| z / trace)).map(|dm| (dm, trace))
}

/// Partial-coherence model of the heralded superposition.
///
/// With A = n̂ + K (the sequence â â† under commutator constant K) and
/// B = n̂, the unnormalized output is
///
/// ```text
/// A ρ A† + B ρ B† − v (e^{−iφ} A ρ B† + e^{iφ} B ρ A†)
/// ```
///
/// which for diagonal ρ reduces to the per-level weights
/// ((n+K)² + n² − 2 v cos φ · n (n+K)) p_n. At v = 1 this coincides with
/// [`apply_conditional`] of [`superposition_operator`]; at v = 0 the output is
/// the equal-weight mixture of the two sequences and is independent of φ.
pub fn apply_partially_coherent(
    spec: &SuperpositionSpec,
    state: &DiagonalState,
) -> Result<(DiagonalState, f64), FockError> {
    let k = spec.k();
    let cos_phi = spec.phi().cos();
    let v = spec.v();
    let weights = state
        .probs()
        .iter()
        .enumerate()
        .map(|(n, p)| {
            let n = n as f64;
            let a = n + k;
            (a * a + n * n - 2.0 * v * cos_phi * n * a) * p
        })
        .collect();
    DiagonalState::from_weights(weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn dim(n_max: usize) -> TruncationDim {
        TruncationDim::new(n_max).unwrap()
    }

    #[test]
    fn annihilation_matrix_for_two_levels() {
        let (a, _) = ladder_matrices(dim(1));
        let m = a.matrix();
        assert_eq!(m[(0, 0)], Complex64::new(0.0, 0.0));
        assert_eq!(m[(0, 1)], Complex64::new(1.0, 0.0));
        assert_eq!(m[(1, 0)], Complex64::new(0.0, 0.0));
        assert_eq!(m[(1, 1)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn creation_matrix_element() {
        let (_, c) = ladder_matrices(dim(2));
        assert_abs_diff_eq!(c.matrix()[(2, 1)].re, 2.0f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(c.matrix()[(2, 1)].im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn superposition_at_phi_zero_is_identity() {
        let spec = SuperpositionSpec::new(0.0, 1.0, 1.0).unwrap();
        let op = superposition_operator(&spec, dim(5));
        let id = OperatorMatrix::identity(dim(5));
        assert!((op.matrix() - id.matrix()).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn superposition_diagonal_entries() {
        use std::f64::consts::{FRAC_PI_2, PI};
        let spec = SuperpositionSpec::new(PI, 1.0, 1.0).unwrap();
        let op = superposition_operator(&spec, dim(5));
        assert_abs_diff_eq!(op.matrix()[(3, 3)].re, 7.0, epsilon = 1e-12);
        assert_abs_diff_eq!(op.matrix()[(3, 3)].im, 0.0, epsilon = 1e-12);

        let spec = SuperpositionSpec::new(FRAC_PI_2, 1.0, 1.0).unwrap();
        let op = superposition_operator(&spec, dim(5));
        // (1 - i)·1 + 1 = 2 - i
        assert_abs_diff_eq!(op.matrix()[(1, 1)].re, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(op.matrix()[(1, 1)].im, -1.0, epsilon = 1e-12);
    }

    #[test]
    fn spec_validates_ranges() {
        assert!(SuperpositionSpec::new(-0.1, 1.0, 1.0).is_err());
        assert!(SuperpositionSpec::new(TAU, 1.0, 1.0).is_err());
        assert!(SuperpositionSpec::new(0.0, -1.0, 1.0).is_err());
        assert!(SuperpositionSpec::new(0.0, 1.0, 1.1).is_err());
        assert!(SuperpositionSpec::new(0.0, 0.0, 0.0).is_ok());
    }

    #[test]
    fn conditional_identity_keeps_state() {
        let (th, _) = crate::thermal_state(0.5, dim(20)).unwrap();
        let id = OperatorMatrix::identity(dim(20));
        let (out, weight) = apply_conditional(&id, &th).unwrap();
        assert_abs_diff_eq!(weight, 1.0, epsilon = 1e-12);
        assert!(th.trace_distance(&out).unwrap() < 1e-14);
    }

    #[test]
    fn anticommutator_on_vacuum_is_vacuum() {
        use std::f64::consts::PI;
        let spec = SuperpositionSpec::new(PI, 1.0, 1.0).unwrap();
        let op = superposition_operator(&spec, dim(5));
        let vac = DiagonalState::vacuum(dim(5));
        let (out, weight) = apply_conditional(&op, &vac).unwrap();
        assert_abs_diff_eq!(weight, 1.0, epsilon = 1e-12);
        assert!(vac.trace_distance(&out).unwrap() < 1e-14);
    }

    #[test]
    fn conditional_rejects_non_diagonal_preserving() {
        let (a, _) = ladder_matrices(dim(20));
        let shifted = a.add(&OperatorMatrix::identity(dim(20))).unwrap();
        let (th, _) = crate::thermal_state(0.5, dim(20)).unwrap();
        assert!(matches!(
            apply_conditional(&shifted, &th),
            Err(FockError::NotDiagonalPreserving { .. })
        ));
    }

    #[test]
    fn conditional_errors_on_annihilated_state() {
        // 2n̂ + 0 kills the vacuum
        let spec = SuperpositionSpec::new(std::f64::consts::PI, 0.0, 1.0).unwrap();
        let op = superposition_operator(&spec, dim(5));
        let vac = DiagonalState::vacuum(dim(5));
        assert!(matches!(
            apply_conditional(&op, &vac),
            Err(FockError::ZeroTrace { .. })
        ));
    }

    #[test]
    fn polynomial_matches_superposition_operator() {
        let phi = 1.3;
        let k = 0.7;
        let coeff = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, phi);
        let poly = polynomial_operator(
            &[
                PolynomialTerm::new(0, 0, k),
                PolynomialTerm::new(1, 1, coeff),
            ],
            dim(8),
        )
        .unwrap();
        let spec = SuperpositionSpec::new(phi, k, 1.0).unwrap();
        let direct = superposition_operator(&spec, dim(8));
        assert!((poly.matrix() - direct.matrix())
            .iter()
            .all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn single_creation_on_vacuum_gives_one_photon() {
        let op = polynomial_operator(&[PolynomialTerm::new(1, 0, 1.0)], dim(4)).unwrap();
        let vac = DiagonalState::vacuum(dim(4));
        let (out, weight) = apply_conditional(&op, &vac).unwrap();
        assert_abs_diff_eq!(weight, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out.probs()[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn double_creation_success_weight() {
        // ⟨0|â² â†²|0⟩ = 2
        let op = polynomial_operator(&[PolynomialTerm::new(2, 0, 1.0)], dim(4)).unwrap();
        let vac = DiagonalState::vacuum(dim(4));
        let (out, weight) = apply_conditional(&op, &vac).unwrap();
        assert_abs_diff_eq!(weight, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out.probs()[2], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn polynomial_rejects_excess_power() {
        assert!(matches!(
            polynomial_operator(&[PolynomialTerm::new(5, 0, 1.0)], dim(4)),
            Err(FockError::PowerExceedsDimension { .. })
        ));
    }
}
