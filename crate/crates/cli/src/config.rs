use std::fs;
use std::path::Path;

use mpeval_core::align::CostMetric;
use mpeval_core::eval::Preprocess;
use mpeval_core::signal::Lowpass;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Settings shared by the pipeline commands. Every field may be given in a
/// JSON file passed with `--config`; command-line flags take precedence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub metric: CostMetric,
    /// `null` disables low-pass filtering.
    pub filter: Option<Lowpass>,
    pub znorm: bool,
    pub svm_c: f64,
    pub seed: Option<u64>,
    pub alpha: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            metric: CostMetric::Euclidean,
            filter: Some(Lowpass::default()),
            znorm: true,
            svm_c: 1.0,
            seed: None,
            alpha: 0.25,
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let config: Self = serde_json::from_str(&text)
            .map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.svm_c.is_finite() && self.svm_c > 0.0) {
            return Err(CliError::parse(format!(
                "svm_c must be positive, got {}",
                self.svm_c
            )));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(CliError::parse(format!(
                "alpha must lie in [0, 1], got {}",
                self.alpha
            )));
        }
        Ok(())
    }

    pub fn preprocess(&self) -> Preprocess {
        Preprocess {
            znorm: self.znorm,
            lowpass: self.filter,
        }
    }

    /// The seed from the flag, else from the config file; one is required.
    pub fn require_seed(&mut self, flag: Option<u64>) -> Result<u64, CliError> {
        if let Some(seed) = flag {
            self.seed = Some(seed);
        }
        self.seed.ok_or_else(|| {
            CliError::parse("a seed is required: pass --seed or set \"seed\" in --config")
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_file_fills_defaults() {
        let c: RunConfig =
            serde_json::from_str(r#"{"metric": "cosine_distance", "filter": null}"#).unwrap();
        assert_eq!(c.metric, CostMetric::CosineDistance);
        assert_eq!(c.filter, None);
        assert!(c.znorm);
        assert_eq!(c.svm_c, 1.0);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"metrc": "euclidean"}"#).is_err());
    }

    #[test]
    fn seed_flag_overrides_file() {
        let mut c = RunConfig {
            seed: Some(3),
            ..RunConfig::default()
        };
        assert_eq!(c.require_seed(Some(9)).unwrap(), 9);
        assert_eq!(c.seed, Some(9));
        assert!(RunConfig::default().require_seed(None).is_err());
    }
}
