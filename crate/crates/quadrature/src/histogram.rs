use serde::{Deserialize, Serialize};

use crate::{QuadratureError, CONVENTION};

/// Binned homodyne quadrature outcomes.
///
/// Bins are left-closed, `[edge_i, edge_{i+1})`, over a strictly increasing
/// edge grid; samples outside `[first_edge, last_edge)` are counted in
/// `overflow` and excluded from `counts`, so `total = Σ counts`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureHistogram {
    bin_edges: Vec<f64>,
    counts: Vec<u64>,
    total: u64,
    overflow: u64,
}

impl QuadratureHistogram {
    /// Assembles a histogram from already-binned counts.
    pub fn from_parts(
        bin_edges: Vec<f64>,
        counts: Vec<u64>,
        overflow: u64,
    ) -> Result<Self, QuadratureError> {
        if counts.is_empty() {
            return Err(QuadratureError::NoBins);
        }
        if bin_edges.len() != counts.len() + 1 || bin_edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(QuadratureError::InvalidRange(
                *bin_edges.first().unwrap_or(&f64::NAN),
                *bin_edges.last().unwrap_or(&f64::NAN),
            ));
        }
        let total = counts.iter().sum();
        Ok(Self {
            bin_edges,
            counts,
            total,
            overflow,
        })
    }

    pub fn bin_edges(&self) -> &[f64] {
        &self.bin_edges
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn overflow(&self) -> u64 {
        self.overflow
    }

    pub fn num_bins(&self) -> usize {
        self.counts.len()
    }

    pub fn bin_width(&self) -> f64 {
        (self.bin_edges[self.bin_edges.len() - 1] - self.bin_edges[0]) / self.counts.len() as f64
    }

    pub fn centers(&self) -> Vec<f64> {
        self.bin_edges
            .windows(2)
            .map(|w| 0.5 * (w[0] + w[1]))
            .collect()
    }

    /// CSV export with columns `bin_left, bin_right, count`.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("bin_left,bin_right,count\n");
        for (w, c) in self.bin_edges.windows(2).zip(&self.counts) {
            out.push_str(&format!("{},{},{}\n", w[0], w[1], c));
        }
        out
    }

    /// JSON export: edges, counts, total, overflow and the quadrature
    /// convention tag.
    pub fn to_json_string(&self) -> String {
        let doc = HistogramJson {
            edges: &self.bin_edges,
            counts: &self.counts,
            total: self.total,
            overflow: self.overflow,
            convention: CONVENTION,
        };
        serde_json::to_string_pretty(&doc).expect("histogram serializes")
    }
}

#[derive(Serialize)]
struct HistogramJson<'a> {
    edges: &'a [f64],
    counts: &'a [u64],
    total: u64,
    overflow: u64,
    convention: &'static str,
}

/// Bins `samples` into `bins` uniform left-closed bins over `range`.
/// Out-of-range samples land in the overflow counter.
pub fn make_histogram(
    samples: &[f64],
    bins: usize,
    range: (f64, f64),
) -> Result<QuadratureHistogram, QuadratureError> {
    if bins == 0 {
        return Err(QuadratureError::NoBins);
    }
    let (lo, hi) = range;
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(QuadratureError::InvalidRange(lo, hi));
    }
    let width = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|i| lo + i as f64 * width).collect();
    let mut counts = vec![0u64; bins];
    let mut overflow = 0u64;
    for &x in samples {
        if x < lo || x >= hi || !x.is_finite() {
            overflow += 1;
            continue;
        }
        let mut idx = ((x - lo) / width) as usize;
        // guard against roundoff at the right edge of a bin
        if idx >= bins {
            idx = bins - 1;
        } else if x < edges[idx] {
            idx -= 1;
        } else if x >= edges[idx + 1] {
            idx += 1;
        }
        counts[idx] += 1;
    }
    let total = counts.iter().sum();
    Ok(QuadratureHistogram {
        bin_edges: edges,
        counts,
        total,
        overflow,
    })
}
