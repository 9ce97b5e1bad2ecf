use fock_core::DiagonalState;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::pdf::{quadrature_pdf_on_grid, QuadratureGrid};
use crate::QuadratureError;

/// Inverse-CDF sampler for the quadrature distribution of a diagonal state.
///
/// The PDF is tabulated on the grid points, integrated to a piecewise-linear
/// CDF by the trapezoid rule, and inverted by binary search with linear
/// interpolation. Sampling for a fixed seed is bit-reproducible; samples for
/// one seed must be drawn sequentially.
#[derive(Debug, Clone)]
pub struct QuadratureSampler {
    xs: Vec<f64>,
    cdf: Vec<f64>,
}

impl QuadratureSampler {
    pub fn new(state: &DiagonalState, grid: &QuadratureGrid) -> Result<Self, QuadratureError> {
        grid.check_coverage(state)?;
        let xs = grid.xs();
        let pdf = quadrature_pdf_on_grid(state, grid);
        let h = grid.step();
        let mut cdf = Vec::with_capacity(xs.len());
        cdf.push(0.0);
        for i in 1..xs.len() {
            let inc = 0.5 * (pdf[i - 1] + pdf[i]) * h;
            cdf.push(cdf[i - 1] + inc);
        }
        let total = *cdf.last().expect("nonempty");
        if !total.is_finite() || total <= 0.0 {
            return Err(QuadratureError::DegeneratePdf(total));
        }
        for c in cdf.iter_mut() {
            *c /= total;
        }
        Ok(Self { xs, cdf })
    }

    /// Draws one sample by inverting the tabulated CDF at a uniform variate.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.gen();
        self.invert(u)
    }

    pub fn sample_many<R: Rng>(&self, count: usize, rng: &mut R) -> Vec<f64> {
        (0..count).map(|_| self.sample(rng)).collect()
    }

    fn invert(&self, u: f64) -> f64 {
        // last index with cdf[i] <= u
        let idx = match self
            .cdf
            .binary_search_by(|c| c.partial_cmp(&u).expect("cdf is finite"))
        {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        };
        let idx = idx.min(self.xs.len() - 2);
        let span = self.cdf[idx + 1] - self.cdf[idx];
        if span <= 0.0 {
            return self.xs[idx];
        }
        let frac = (u - self.cdf[idx]) / span;
        self.xs[idx] + frac * (self.xs[idx + 1] - self.xs[idx])
    }
}

/// Draws `count` i.i.d. quadrature samples for the state, deterministically
/// for a fixed `seed`.
pub fn sample_quadratures(
    state: &DiagonalState,
    count: usize,
    seed: u64,
    grid: &QuadratureGrid,
) -> Result<Vec<f64>, QuadratureError> {
    if count == 0 {
        return Err(QuadratureError::EmptySampleRequest);
    }
    let sampler = QuadratureSampler::new(state, grid)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    Ok(sampler.sample_many(count, &mut rng))
}

/// Like [`sample_quadratures`] but on an independent substream of the seed,
/// for pipelines that acquire several datasets from one configured seed.
pub fn sample_quadratures_stream(
    state: &DiagonalState,
    count: usize,
    seed: u64,
    stream: u64,
    grid: &QuadratureGrid,
) -> Result<Vec<f64>, QuadratureError> {
    if count == 0 {
        return Err(QuadratureError::EmptySampleRequest);
    }
    let sampler = QuadratureSampler::new(state, grid)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    Ok(sampler.sample_many(count, &mut rng))
}
