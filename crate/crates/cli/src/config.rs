use std::fs;
use std::path::{Path, PathBuf};

use diskembed::dag::SplitParams;
use diskembed::model::TrainConfig;
use diskembed::{GeometryKind, QuasiMetricSpace};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Everything a run depends on. Loaded from `--config`, then overridden by flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometryKind,
    /// Ambient coordinates for the sphere, intrinsic dimension otherwise.
    pub dim: usize,
    pub train: TrainConfig,
    pub split: SplitParams,
    pub threads: usize,
    pub paths: Paths,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edges: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split_dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checkpoint: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            geometry: GeometryKind::Lorentz,
            dim: 5,
            train: TrainConfig::default(),
            split: SplitParams::default(),
            threads: 1,
            paths: Paths::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = fs::read_to_string(path).map_err(|e| {
            CliError::io("config", format!("cannot open {}: {e}", path.display()))
        })?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::config("config", format!("{}: {e}", path.display())))
    }

    pub fn space(&self) -> Result<QuasiMetricSpace, CliError> {
        let min = if self.geometry == GeometryKind::Sphere { 2 } else { 1 };
        if self.dim < min {
            return Err(CliError::config(
                "config",
                format!("--dim must be >= {min} for {} geometry, got {}", self.geometry, self.dim),
            ));
        }
        QuasiMetricSpace::from_kind(self.geometry, self.dim).map_err(|e| CliError::from_core("config", e))
    }

    pub fn validate_train(&self) -> Result<(), CliError> {
        self.train
            .validate()
            .map_err(|e| CliError::from_core("config", e))?;
        self.space().map(|_| ())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }
}
