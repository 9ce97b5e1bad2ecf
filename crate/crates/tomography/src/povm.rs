use fock_core::TruncationDim;
use quadrature::oscillator_eigenfunctions;

use crate::TomographyError;

/// Binned homodyne POVM with detector efficiency η_d built into the
/// measurement model.
///
/// `element(j, n)` is the probability that a quadrature sample drawn from the
/// pure Fock level n is recorded in histogram bin j. Mass falling outside the
/// histogram range is tracked per level in an explicit out-of-range row, so
/// each column sums to one up to quadrature error.
#[derive(Debug, Clone)]
pub struct BinnedPovm {
    edges: Vec<f64>,
    /// row-major (num_bins x dim)
    elements: Vec<f64>,
    out_of_range: Vec<f64>,
    dim: usize,
    eta_d: f64,
}

impl BinnedPovm {
    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn num_bins(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eta_d(&self) -> f64 {
        self.eta_d
    }

    #[inline]
    pub fn element(&self, bin: usize, level: usize) -> f64 {
        self.elements[bin * self.dim + level]
    }

    pub fn bin_row(&self, bin: usize) -> &[f64] {
        &self.elements[bin * self.dim..(bin + 1) * self.dim]
    }

    /// Per-level probability of falling outside the histogram range.
    pub fn out_of_range(&self) -> &[f64] {
        &self.out_of_range
    }

    pub fn column_sum(&self, level: usize) -> f64 {
        (0..self.num_bins())
            .map(|j| self.element(j, level))
            .sum::<f64>()
            + self.out_of_range[level]
    }
}

/// Builds the binned POVM for the given histogram edges, reconstruction
/// dimension and detector efficiency.
///
/// Per-bin integrals of ψ_m(x)² are evaluated by adaptive Simpson quadrature
/// to 1e-9 absolute accuracy; the efficiency enters as binomial mixing of the
/// ideal (η = 1) columns.
pub fn build_povm(
    edges: &[f64],
    dim: TruncationDim,
    eta_d: f64,
) -> Result<BinnedPovm, TomographyError> {
    if edges.len() < 2 || edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(TomographyError::EdgesNotIncreasing);
    }
    if !eta_d.is_finite() || !(0.0 < eta_d && eta_d <= 1.0) {
        return Err(TomographyError::InvalidEfficiency(eta_d));
    }
    let d = dim.size();
    let bins = edges.len() - 1;

    // ideal response G[j][m] = ∫_bin_j ψ_m² dx
    let mut ideal = vec![0.0; bins * d];
    for m in 0..d {
        let f = |x: f64| {
            let psi = oscillator_eigenfunctions(m, x)[m];
            psi * psi
        };
        for j in 0..bins {
            ideal[j * d + m] = adaptive_simpson(&f, edges[j], edges[j + 1], 1e-9);
        }
    }
    // total in-range mass per level; the remainder leaks outside the edges
    let mut in_range = vec![0.0; d];
    for m in 0..d {
        in_range[m] = (0..bins).map(|j| ideal[j * d + m]).sum();
    }

    // binomial efficiency mixing: column n = Σ_m C(n,m) η^m (1-η)^(n-m) G[., m]
    let mut elements = vec![0.0; bins * d];
    let mut out_of_range = vec![0.0; d];
    for n in 0..d {
        for m in 0..=n {
            let w = binomial(n, m) * eta_d.powi(m as i32) * (1.0 - eta_d).powi((n - m) as i32);
            if w == 0.0 {
                continue;
            }
            for j in 0..bins {
                elements[j * d + n] += w * ideal[j * d + m];
            }
            out_of_range[n] += w * (1.0 - in_range[m]).max(0.0);
        }
    }

    Ok(BinnedPovm {
        edges: edges.to_vec(),
        elements,
        out_of_range,
        dim: d,
        eta_d,
    })
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Adaptive Simpson integration to the requested absolute tolerance.
///
/// Wide intervals are pre-split into panels no broader than the shortest
/// oscillation scale of the integrands, so the oscillatory ψ_m² cannot vanish
/// at all initial probe points.
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    const MAX_PANEL: f64 = 0.5;
    let panels = ((b - a) / MAX_PANEL).ceil().max(1.0) as usize;
    let h = (b - a) / panels as f64;
    let panel_tol = tol / panels as f64;
    let mut acc = 0.0;
    for i in 0..panels {
        let lo = a + i as f64 * h;
        let hi = lo + h;
        let c = 0.5 * (lo + hi);
        let (fa, fb, fc) = (f(lo), f(hi), f(c));
        let whole = (hi - lo) / 6.0 * (fa + 4.0 * fc + fb);
        acc += simpson_step(f, lo, hi, c, fa, fb, fc, whole, panel_tol, 24);
    }
    acc
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    c: f64,
    fa: f64,
    fb: f64,
    fc: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let lm = 0.5 * (a + c);
    let rm = 0.5 * (c + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = (c - a) / 6.0 * (fa + 4.0 * flm + fc);
    let right = (b - c) / 6.0 * (fc + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, c, lm, fa, fc, flm, left, tol / 2.0, depth - 1)
        + simpson_step(f, c, b, rm, fc, fb, frm, right, tol / 2.0, depth - 1)
}
