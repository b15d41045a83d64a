use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::Alpha;
use crate::quantum::QEntropyKind;

/// Environment variable that overrides the seed from files and flags.
pub const SEED_ENV: &str = "RENYI_SEED";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub samples: usize,
    pub dim: usize,
    pub alphas: Vec<f64>,
    pub entropy_kinds: Vec<QEntropyKind>,
    pub tolerance: f64,
    pub output_path: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 42,
            samples: 1000,
            dim: 2,
            alphas: vec![0.5, 1.2, 1.4, 1.7, 2.0, 3.0, 5.0],
            entropy_kinds: vec![QEntropyKind::TildeDown],
            tolerance: 1e-9,
            output_path: PathBuf::from("scatter.csv"),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)?;
        Ok(cfg)
    }

    /// Replaces the seed with the value of `RENYI_SEED`, if set.
    pub fn apply_env(self) -> Result<Self> {
        self.with_seed_override(std::env::var(SEED_ENV).ok().as_deref())
    }

    pub fn with_seed_override(mut self, value: Option<&str>) -> Result<Self> {
        if let Some(v) = value {
            self.seed = v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("{SEED_ENV}={v} is not a u64")))?;
        }
        Ok(self)
    }

    /// Checks `dim ≥ 1`, `tolerance > 0` and the orders. Zero samples is
    /// allowed and produces empty output.
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Validation("dim must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) || !self.tolerance.is_finite() {
            return Err(Error::Validation(format!(
                "tolerance {} must be > 0",
                self.tolerance
            )));
        }
        self.orders().map(|_| ())
    }

    pub fn orders(&self) -> Result<Vec<Alpha>> {
        self.alphas.iter().map(|&a| Alpha::new(a)).collect()
    }
}
