use fock_core::DiagonalState;

/// Wigner function sampled on a rectangular phase-space grid, in the
/// vacuum-variance-1/2 convention (units of 1/area, W_vac(0,0) = 1/π).
#[derive(Debug, Clone)]
pub struct WignerGrid {
    pub x_axis: Vec<f64>,
    pub p_axis: Vec<f64>,
    /// values[i][j] = W(x_axis[i], p_axis[j])
    pub values: Vec<Vec<f64>>,
}

impl WignerGrid {
    pub fn value_at(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    /// Riemann-sum integral over the grid; approaches 1 when the grid covers
    /// the state.
    pub fn integral(&self) -> f64 {
        if self.x_axis.len() < 2 || self.p_axis.len() < 2 {
            return 0.0;
        }
        let dx = self.x_axis[1] - self.x_axis[0];
        let dp = self.p_axis[1] - self.p_axis[0];
        self.values
            .iter()
            .map(|row| row.iter().sum::<f64>())
            .sum::<f64>()
            * dx
            * dp
    }

    /// CSV export: header row carries the p axis, each data row starts with
    /// its x value.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("x\\p");
        for p in &self.p_axis {
            out.push(',');
            out.push_str(&format!("{p}"));
        }
        out.push('\n');
        for (i, x) in self.x_axis.iter().enumerate() {
            out.push_str(&format!("{x}"));
            for v in &self.values[i] {
                out.push(',');
                out.push_str(&format!("{v}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Wigner function of a diagonal state:
///
/// ```text
/// W(x, p) = (1/π) Σ_n p_n (−1)^n e^{−r²} L_n(2r²),   r² = x² + p²
/// ```
///
/// evaluated through the bounded Laguerre-function recurrence
/// w_n(z) = e^{−z/2} L_n(z) at z = 2r², which never overflows. W depends on
/// (x, p) only through r², so the output is rotationally symmetric by
/// construction.
pub fn wigner_diagonal(state: &DiagonalState, x_axis: &[f64], p_axis: &[f64]) -> WignerGrid {
    let values = x_axis
        .iter()
        .map(|&x| {
            p_axis
                .iter()
                .map(|&p| wigner_point(state.probs(), x * x + p * p))
                .collect()
        })
        .collect();
    WignerGrid {
        x_axis: x_axis.to_vec(),
        p_axis: p_axis.to_vec(),
        values,
    }
}

/// W at radius² = r² for the probability vector, via the weighted recurrence
/// (k+1) w_{k+1} = (2k + 1 − z) w_k − k w_{k−1}, w_0 = e^{−z/2}.
fn wigner_point(probs: &[f64], r_sq: f64) -> f64 {
    let z = 2.0 * r_sq;
    let w0 = (-z / 2.0).exp();
    let mut prev = 0.0;
    let mut cur = w0;
    let mut acc = probs[0] * cur;
    let mut sign = -1.0;
    for k in 0..probs.len() - 1 {
        let next = ((2.0 * k as f64 + 1.0 - z) * cur - k as f64 * prev) / (k as f64 + 1.0);
        prev = cur;
        cur = next;
        acc += sign * probs[k + 1] * cur;
        sign = -sign;
    }
    acc / std::f64::consts::PI
}
