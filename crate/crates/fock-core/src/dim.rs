use crate::FockError;

/// Truncation of the Fock space to the span of |0⟩..|n_max⟩.
///
/// Every state and operator participating in one computation must share the
/// same `TruncationDim`; mixing dimensions is reported as an error by the
/// operations that combine values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TruncationDim {
    n_max: usize,
}

impl TruncationDim {
    /// Requires `n_max >= 1`.
    pub fn new(n_max: usize) -> Result<Self, FockError> {
        if n_max < 1 {
            return Err(FockError::InvalidDimension(n_max));
        }
        Ok(Self { n_max })
    }

    /// Highest retained Fock level.
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Hilbert-space dimension, `n_max + 1`.
    pub fn size(&self) -> usize {
        self.n_max + 1
    }
}
