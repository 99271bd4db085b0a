use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use sdgm_core::{Algorithm, GeneratorConfig};

use crate::error::{HarnessError, Result};

/// Everything that determines the output of an experiment. The worker count
/// is deliberately absent: it cannot change results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// The `seed` field is ignored; trial seeds come from `master_seed`.
    pub generator: GeneratorConfig,
    pub horizon: u64,
    pub trials: usize,
    pub algorithms: Vec<Algorithm>,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    /// Overrides the SDGM step scale (and the DGM step).
    pub gamma: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            generator: GeneratorConfig::default(),
            horizon: 1000,
            trials: 100,
            algorithms: Algorithm::ALL.to_vec(),
            master_seed: 0,
            output_dir: PathBuf::from("results"),
            gamma: None,
        }
    }
}

impl ExperimentConfig {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(HarnessError::io(path))?;
        serde_json::from_str(&text).map_err(HarnessError::json(path))
    }

    pub fn check(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(HarnessError::Config("horizon must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(HarnessError::Config("trials must be at least 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(HarnessError::Config("select at least one algorithm".into()));
        }
        if let Some(g) = self.gamma {
            if !(g.is_finite() && g > 0.0) {
                return Err(HarnessError::Config("gamma must be positive and finite".into()));
            }
        }
        self.generator.check()?;
        Ok(())
    }

    /// Selected algorithms in canonical order, without duplicates.
    pub fn algorithms(&self) -> Vec<Algorithm> {
        let mut a = self.algorithms.clone();
        a.sort();
        a.dedup();
        a
    }
}
