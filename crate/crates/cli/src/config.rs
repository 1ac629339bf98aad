//! Run documents read by `--config`. Every field has a default and unknown
//! keys are rejected; command-line flags are merged on top and the
//! merged document is echoed next to the outputs.

use std::path::{Path, PathBuf};

use edae::eval::ExperimentPlan;
use edae::models::TrainConfig;
use edae::synthetic::{PowerProfileConfig, RandomSeqConfig};
use edae::{Error, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum GenerateKind {
    #[default]
    Random,
    Power,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GenerateRun {
    pub kind: GenerateKind,
    pub random: RandomSeqConfig,
    pub power: PowerProfileConfig,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CorruptRun {
    pub input: Option<PathBuf>,
    pub rho: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub mask_out: Option<PathBuf>,
}

impl Default for CorruptRun {
    fn default() -> Self {
        Self {
            input: None,
            rho: 0.2,
            seed: 0,
            out: None,
            mask_out: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainRun {
    /// Clean training series.
    pub input: Option<PathBuf>,
    /// Mask applied to `input` to form the corrupted copy that AE and IM
    /// learn from. Without it the copy is drawn at `train.rho_train`.
    pub mask: Option<PathBuf>,
    pub method: String,
    pub model_out: Option<PathBuf>,
    pub train: TrainConfig,
}

impl Default for TrainRun {
    fn default() -> Self {
        Self {
            input: None,
            mask: None,
            method: "EDAE_LSTM".into(),
            model_out: None,
            train: TrainConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReconstructRun {
    pub model: Option<PathBuf>,
    pub input: Option<PathBuf>,
    pub mask: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchRun {
    pub plan: ExperimentPlan,
    pub out_dir: Option<PathBuf>,
}

/// Reads a run document, or the defaults when no path is given.
pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

pub fn to_json<T: Serialize>(run: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(run).map_err(|e| Error::InvalidState(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// A path that must come from either the document or a flag.
pub fn required<'a>(path: &'a Option<PathBuf>, name: &str) -> Result<&'a Path> {
    path.as_deref()
        .ok_or_else(|| Error::Config(format!("missing `{name}`: pass --{} or set it in the config", name.replace('_', "-"))))
}

/// `<path>.config.json` beside an output file.
pub fn echo_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".config.json");
    out.with_file_name(name)
}
