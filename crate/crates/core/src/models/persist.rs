//! Model files are a single JSON object followed by a newline:
//!
//! ```text
//! {"format_version":1,"kind":"EDAE_LSTM","channels":3,
//!  "window":{"k_back":5,"k_fwd":5},
//!  "norm":[{"min":..,"max":..},...],
//!  "meta":{"final_loss":..,"epochs":..,"seed":..,"rho_train":..},
//!  "params":{"type":"lstm",...}}
//! ```
//!
//! Matrices are `{"rows":r,"cols":c,"data":[[row 0],[row 1],...]}` in
//! row-major order. Floats use the shortest representation that parses
//! back to the same bits.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ModelKind, ModelParams, TrainedModel, TrainingMeta};
use crate::error::{Error, Result};
use crate::io::write_atomic;
use crate::nn::ParamSet;
use crate::series::{NormParams, WindowConfig};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize)]
struct FileOut<'a> {
    format_version: u32,
    kind: ModelKind,
    channels: usize,
    window: &'a WindowConfig,
    norm: &'a NormParams,
    meta: &'a TrainingMeta,
    params: &'a ModelParams,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileIn {
    #[allow(dead_code)]
    format_version: u32,
    kind: ModelKind,
    channels: usize,
    window: WindowConfig,
    norm: NormParams,
    meta: TrainingMeta,
    params: ModelParams,
}

fn params_finite(params: &ModelParams) -> bool {
    match params {
        ModelParams::Interpolation => true,
        ModelParams::Dense(n) => n.is_finite(),
        ModelParams::Lstm(n) => n.is_finite(),
        ModelParams::Elm(e) => e.check().is_ok(),
    }
}

pub fn model_to_json(model: &TrainedModel) -> Result<Vec<u8>> {
    model.check()?;
    if !params_finite(&model.params) {
        return Err(Error::NumericFailure("refusing to save non-finite parameters".into()));
    }
    let mut bytes = serde_json::to_vec(&FileOut {
        format_version: FORMAT_VERSION,
        kind: model.kind,
        channels: model.channels,
        window: &model.window,
        norm: &model.norm,
        meta: &model.meta,
        params: &model.params,
    })
    .map_err(|e| Error::InvalidState(format!("model serialization failed: {e}")))?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn model_from_json(bytes: &[u8]) -> Result<TrainedModel> {
    let value: serde_json::Value = serde_json::from_slice(bytes).map_err(|e| Error::CorruptModel(e.to_string()))?;
    let version = value
        .get("format_version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| Error::CorruptModel("missing format_version".into()))?;
    if version != u64::from(FORMAT_VERSION) {
        return Err(Error::VersionMismatch {
            found: u32::try_from(version).unwrap_or(u32::MAX),
            expected: FORMAT_VERSION,
        });
    }
    let file: FileIn = serde_json::from_value(value).map_err(|e| Error::CorruptModel(e.to_string()))?;
    let model = TrainedModel {
        kind: file.kind,
        channels: file.channels,
        window: file.window,
        norm: file.norm,
        params: file.params,
        meta: file.meta,
    };
    model.check()?;
    Ok(model)
}

pub fn save_model(model: &TrainedModel, path: &Path) -> Result<()> {
    write_atomic(path, &model_to_json(model)?)
}

pub fn load_model(path: &Path) -> Result<TrainedModel> {
    model_from_json(&std::fs::read(path)?)
}
