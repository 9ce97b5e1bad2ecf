use serde::{Deserialize, Serialize};

use crate::CliError;

/// Full experiment description. Parsed from JSON with unknown fields
/// rejected; all angles in radians, efficiencies as intensity fractions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Mean photon number of the thermal input.
    pub mean_n: f64,
    /// Superposition phases scanned by `scan`, radians in [0, 2π).
    pub phi_list: Vec<f64>,
    /// Hypothesized commutator constant ([â,â†] = K·1).
    pub k: f64,
    /// Herald indistinguishability: 1 = coherent superposition, 0 = mixture.
    pub v: f64,
    /// Total efficiency of the chain (preparation × detection).
    pub eta_total: f64,
    /// Homodyne detection efficiency, available to the reconstruction.
    pub eta_d: f64,
    /// Fock-space truncation (highest retained level).
    pub n_max: usize,
    /// Quadrature samples acquired per phase point.
    pub samples_per_phase: usize,
    /// Base RNG seed; every acquisition derives its stream from it.
    pub seed: u64,
    /// Histogram bin count.
    pub bins: usize,
    /// Histogram range (min, max) in normalized quadrature units.
    pub x_range: (f64, f64),
    /// Model for the conditional photon subtraction stages.
    pub subtraction_model: SubtractionModel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubtractionModel {
    /// Ideal annihilation operator â.
    Ideal,
    /// Low-reflectivity beam splitter with a non-number-resolving herald.
    Beamsplitter { reflectivity: f64 },
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            mean_n: 0.9,
            phi_list: (0..9)
                .map(|i| std::f64::consts::PI * i as f64 / 8.0)
                .collect(),
            k: 1.0,
            v: 0.97,
            eta_total: 0.61,
            eta_d: 0.7,
            n_max: 30,
            samples_per_phase: 25_000,
            seed: 1,
            bins: 100,
            x_range: (-7.0, 7.0),
            subtraction_model: SubtractionModel::Beamsplitter { reflectivity: 0.03 },
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(json: &str) -> Result<Self, CliError> {
        let config: Self =
            serde_json::from_str(json).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let field = |name: &str, message: String| -> CliError {
            CliError::Config(format!("{name}: {message}"))
        };
        if !self.mean_n.is_finite() || self.mean_n < 0.0 {
            return Err(field("mean_n", format!("{} not in [0, inf)", self.mean_n)));
        }
        if self.phi_list.is_empty() {
            return Err(field("phi_list", "must not be empty".into()));
        }
        for &phi in &self.phi_list {
            if !phi.is_finite() || !(0.0..std::f64::consts::TAU).contains(&phi) {
                return Err(field("phi_list", format!("{phi} not in [0, 2pi)")));
            }
        }
        if !self.k.is_finite() || self.k < 0.0 {
            return Err(field("k", format!("{} not in [0, inf)", self.k)));
        }
        if !(0.0..=1.0).contains(&self.v) {
            return Err(field("v", format!("{} not in [0, 1]", self.v)));
        }
        if !(0.0 < self.eta_total && self.eta_total <= 1.0) {
            return Err(field("eta_total", format!("{} not in (0, 1]", self.eta_total)));
        }
        if !(0.0 < self.eta_d && self.eta_d <= 1.0) {
            return Err(field("eta_d", format!("{} not in (0, 1]", self.eta_d)));
        }
        // the preparation stage absorbs eta_total / eta_d, which must itself
        // be a physical efficiency
        if self.eta_total > self.eta_d {
            return Err(field(
                "eta_total",
                format!(
                    "eta_prep = eta_total/eta_d = {:.4} exceeds 1; eta_total must be <= eta_d",
                    self.eta_total / self.eta_d
                ),
            ));
        }
        if self.n_max < 1 {
            return Err(field("n_max", "must be >= 1".into()));
        }
        if self.samples_per_phase == 0 {
            return Err(field("samples_per_phase", "must be >= 1".into()));
        }
        if self.bins == 0 {
            return Err(field("bins", "must be >= 1".into()));
        }
        if !self.x_range.0.is_finite()
            || !self.x_range.1.is_finite()
            || self.x_range.0 >= self.x_range.1
        {
            return Err(field(
                "x_range",
                format!("({}, {}) is not a valid interval", self.x_range.0, self.x_range.1),
            ));
        }
        if let SubtractionModel::Beamsplitter { reflectivity } = self.subtraction_model {
            if !(0.0 < reflectivity && reflectivity < 1.0) {
                return Err(field(
                    "subtraction_model",
                    format!("reflectivity {reflectivity} not in (0, 1)"),
                ));
            }
        }
        Ok(())
    }

    /// Preparation-stage efficiency: the part of eta_total not attributed to
    /// the homodyne detector.
    pub fn eta_prep(&self) -> f64 {
        self.eta_total / self.eta_d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        ExperimentConfig::default().validate().unwrap();
    }

    #[test]
    fn json_round_trip_preserves_config() {
        let config = ExperimentConfig::default();
        let parsed = ExperimentConfig::from_json(&config.to_json_string()).unwrap();
        assert_eq!(config, parsed);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let mut value: serde_json::Value =
            serde_json::from_str(&ExperimentConfig::default().to_json_string()).unwrap();
        value["surprise"] = serde_json::json!(1);
        assert!(matches!(
            ExperimentConfig::from_json(&value.to_string()),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn zero_samples_rejected() {
        let mut config = ExperimentConfig::default();
        config.samples_per_phase = 0;
        assert!(config.validate().is_err());
    }

    #[test]
    fn eta_split_must_be_physical() {
        let mut config = ExperimentConfig::default();
        config.eta_total = 0.8;
        config.eta_d = 0.7;
        assert!(config.validate().is_err());
    }
}
