//! Reconstruction methods: plain and denoising autoencoders, the
//! window-expanded denoisers (dense and LSTM), neighbor interpolation and
//! an extreme learning machine, plus persistence and a name-keyed
//! registry.

mod elm;
mod net;
mod persist;
mod registry;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use elm::{fit_elm, ElmParams};
pub use net::{Dataset, DenseAutoencoder, LstmAutoencoder, Trainable};
pub use persist::{load_model, model_from_json, model_to_json, save_model, FORMAT_VERSION};
pub use registry::{Method, MethodRegistry, TrainingData};

use crate::error::{Error, Result};
use crate::nn::{AdamConfig, LossConfig, LstmShape, Peephole};
use crate::rng::derive_seed;
use crate::series::{
    corrupt_series, expand_into, init_fake_values, CorruptedSeries, NormParams, TimeSeries, WindowConfig,
};
use net::{train_loop, LoopSettings};

/// Training corruption proportion used when neither the config nor the
/// caller provides one.
pub const DEFAULT_RHO_TRAIN: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    #[serde(rename = "AE")]
    Ae,
    #[serde(rename = "DAE")]
    Dae,
    #[serde(rename = "EDAE_NN")]
    EdaeNn,
    #[serde(rename = "EDAE_LSTM")]
    EdaeLstm,
    #[serde(rename = "IM")]
    Im,
    #[serde(rename = "ELM")]
    Elm,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] = [
        ModelKind::Ae,
        ModelKind::Dae,
        ModelKind::EdaeNn,
        ModelKind::EdaeLstm,
        ModelKind::Im,
        ModelKind::Elm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Ae => "AE",
            ModelKind::Dae => "DAE",
            ModelKind::EdaeNn => "EDAE_NN",
            ModelKind::EdaeLstm => "EDAE_LSTM",
            ModelKind::Im => "IM",
            ModelKind::Elm => "ELM",
        }
    }

    /// Whether the model reads a neighbor window rather than a single row.
    pub fn uses_window(self) -> bool {
        matches!(self, ModelKind::EdaeNn | ModelKind::EdaeLstm | ModelKind::Elm)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown method {s:?}; expected one of {}",
                    ModelKind::ALL.map(ModelKind::name).join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdaeVariant {
    Nn,
    Lstm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub window: WindowConfig,
    /// Hidden units of the dense autoencoders.
    pub hidden: usize,
    pub lstm_hidden: usize,
    /// Size of the LSTM output `y_n` fed to the window decoder.
    pub lstm_output: usize,
    pub peephole: Peephole,
    pub loss: LossConfig,
    pub optimizer: AdamConfig,
    pub epochs: usize,
    pub batch_size: usize,
    /// Corruption proportion applied to clean data during training.
    pub rho_train: Option<f64>,
    pub seed: u64,
    pub elm_hidden: usize,
    pub elm_ridge: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            window: WindowConfig::default(),
            hidden: 64,
            lstm_hidden: 32,
            lstm_output: 32,
            peephole: Peephole::Full,
            loss: LossConfig::default(),
            optimizer: AdamConfig::default(),
            epochs: 200,
            batch_size: 32,
            rho_train: None,
            seed: 0,
            elm_hidden: 100,
            elm_ridge: 1e-6,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let sizes = [
            (self.hidden, "hidden"),
            (self.lstm_hidden, "lstm_hidden"),
            (self.lstm_output, "lstm_output"),
            (self.epochs, "epochs"),
            (self.batch_size, "batch_size"),
            (self.elm_hidden, "elm_hidden"),
        ];
        if let Some((_, name)) = sizes.iter().find(|(v, _)| *v == 0) {
            return Err(Error::Config(format!("{name} must be at least 1")));
        }
        if let Some(r) = self.rho_train {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::Config(format!("rho_train must lie in [0, 1], got {r}")));
            }
        }
        if !(self.elm_ridge >= 0.0 && self.elm_ridge.is_finite()) {
            return Err(Error::Config(format!("elm_ridge must be >= 0, got {}", self.elm_ridge)));
        }
        self.loss.validate()?;
        self.optimizer.validate()
    }

    pub fn resolved_rho_train(&self) -> f64 {
        self.rho_train.unwrap_or(DEFAULT_RHO_TRAIN)
    }

    fn loop_settings(&self, loss: LossConfig) -> LoopSettings {
        LoopSettings {
            epochs: self.epochs,
            batch_size: self.batch_size,
            optimizer: self.optimizer,
            loss,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelParams {
    Interpolation,
    Dense(DenseAutoencoder),
    Lstm(LstmAutoencoder),
    Elm(ElmParams),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingMeta {
    /// Mean batch loss of the last epoch, or the training error of a
    /// closed-form fit. Absent for parameterless models.
    pub final_loss: Option<f64>,
    pub epochs: usize,
    pub seed: u64,
    pub rho_train: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub kind: ModelKind,
    pub channels: usize,
    pub window: WindowConfig,
    pub norm: NormParams,
    pub params: ModelParams,
    pub meta: TrainingMeta,
}

impl TrainedModel {
    /// Consistency of kind, window, channel count and parameter shapes.
    pub fn check(&self) -> Result<()> {
        let l = self.channels;
        let bad = |msg: String| Err(Error::ModelShape(msg));
        if l == 0 {
            return bad("model has zero channels".into());
        }
        if self.kind != ModelKind::Im && self.norm.len() != l {
            return bad(format!("{} normalization ranges for {l} channels", self.norm.len()));
        }
        let dim = self.window.dimension(l);
        match (&self.params, self.kind) {
            (ModelParams::Interpolation, ModelKind::Im) => Ok(()),
            (ModelParams::Dense(net), ModelKind::Ae | ModelKind::Dae | ModelKind::EdaeNn) => {
                net.check()?;
                if net.input_size() != dim {
                    return bad(format!("network reads {} values, window holds {dim}", net.input_size()));
                }
                Ok(())
            }
            (ModelParams::Lstm(net), ModelKind::EdaeLstm) => {
                net.check()?;
                if net.lstm.input_size() != l || net.steps() != self.window.rows() {
                    return bad(format!(
                        "lstm reads {} steps of {} values, window is {} rows of {l}",
                        net.steps(),
                        net.lstm.input_size(),
                        self.window.rows()
                    ));
                }
                Ok(())
            }
            (ModelParams::Elm(elm), ModelKind::Elm) => {
                elm.check()?;
                if elm.features() != dim - l || elm.outputs() != l {
                    return bad(format!(
                        "elm maps {} -> {}, window needs {} -> {l}",
                        elm.features(),
                        elm.outputs(),
                        dim - l
                    ));
                }
                Ok(())
            }
            (_, kind) => bad(format!("parameters do not belong to a {kind} model")),
        }
    }
}

fn row_windows(series: &TimeSeries, cfg: WindowConfig) -> Vec<Vec<f64>> {
    (0..series.len())
        .map(|t| {
            let mut w = Vec::with_capacity(cfg.dimension(series.channels()));
            expand_into(series, t, cfg, &mut w);
            w
        })
        .collect()
}

fn require_window(cfg: &TrainConfig) -> Result<()> {
    if cfg.window.k_back + cfg.window.k_fwd == 0 {
        return Err(Error::InvalidArgument("window needs k_back + k_fwd >= 1".into()));
    }
    Ok(())
}

fn epoch_seed(cfg: &TrainConfig, epoch: usize) -> u64 {
    derive_seed(derive_seed(cfg.seed, b"corrupt"), &(epoch as u64).to_le_bytes())
}

fn reject_empty_channels(series: &TimeSeries, mask: Option<&crate::series::CorruptionMask>) -> Result<()> {
    for c in 0..series.channels() {
        let observed = (0..series.len()).any(|t| mask.map_or(true, |m| !m.is_masked(t, c)));
        if !observed {
            return Err(Error::UnreconstructableChannel { channel: c });
        }
    }
    Ok(())
}

/// Trains a dense autoencoder with the corrupted rows as both input and
/// target. The window is always a single row.
pub fn train_ae(corrupted: &CorruptedSeries, cfg: &TrainConfig) -> Result<TrainedModel> {
    cfg.validate()?;
    let series = corrupted.series();
    reject_empty_channels(series, Some(corrupted.mask()))?;
    let norm = NormParams::fit(series, Some(corrupted.mask()))?;
    let rows = row_windows(&norm.apply(series)?, WindowConfig::center_only());
    let data = Dataset {
        inputs: rows.clone(),
        targets: rows,
    };
    let mut net = DenseAutoencoder::init(series.channels(), cfg.hidden, derive_seed(cfg.seed, b"init"));
    let loss = train_loop(&mut net, cfg.loop_settings(cfg.loss), |_| Ok(data.clone()))?;
    Ok(TrainedModel {
        kind: ModelKind::Ae,
        channels: series.channels(),
        window: WindowConfig::center_only(),
        norm,
        params: ModelParams::Dense(net),
        meta: TrainingMeta {
            final_loss: Some(loss),
            epochs: cfg.epochs,
            seed: cfg.seed,
            rho_train: corrupted.rho(),
        },
    })
}

/// Trains a dense autoencoder to map freshly corrupted rows back to the
/// clean rows. The window is always a single row.
pub fn train_dae(clean: &TimeSeries, cfg: &TrainConfig) -> Result<TrainedModel> {
    cfg.validate()?;
    reject_empty_channels(clean, None)?;
    let rho = cfg.resolved_rho_train();
    let norm = NormParams::fit(clean, None)?;
    let targets = row_windows(&norm.apply(clean)?, WindowConfig::center_only());
    let mut net = DenseAutoencoder::init(clean.channels(), cfg.hidden, derive_seed(cfg.seed, b"init"));
    let loss = train_loop(&mut net, cfg.loop_settings(cfg.loss), |epoch| {
        let corrupted = corrupt_series(clean, rho, epoch_seed(cfg, epoch))?;
        Ok(Dataset {
            inputs: row_windows(&norm.apply(corrupted.series())?, WindowConfig::center_only()),
            targets: targets.clone(),
        })
    })?;
    Ok(TrainedModel {
        kind: ModelKind::Dae,
        channels: clean.channels(),
        window: WindowConfig::center_only(),
        norm,
        params: ModelParams::Dense(net),
        meta: TrainingMeta {
            final_loss: Some(loss),
            epochs: cfg.epochs,
            seed: cfg.seed,
            rho_train: rho,
        },
    })
}

/// Trains a window denoiser: each epoch corrupts the clean series, fills
/// the gaps from nearest valid neighbors and learns to reproduce the
/// clean window around every time step.
pub fn train_edae(clean: &TimeSeries, cfg: &TrainConfig, variant: EdaeVariant) -> Result<TrainedModel> {
    cfg.validate()?;
    require_window(cfg)?;
    reject_empty_channels(clean, None)?;
    let rho = cfg.resolved_rho_train();
    let l = clean.channels();
    let norm = NormParams::fit(clean, None)?;
    let targets = row_windows(&norm.apply(clean)?, cfg.window);
    let epoch_data = |epoch: usize| -> Result<Dataset> {
        let corrupted = corrupt_series(clean, rho, epoch_seed(cfg, epoch))?;
        let filled = norm.apply(&init_fake_values(&corrupted)?)?;
        Ok(Dataset {
            inputs: row_windows(&filled, cfg.window),
            targets: targets.clone(),
        })
    };
    let init_seed = derive_seed(cfg.seed, b"init");
    let (kind, params, loss) = match variant {
        EdaeVariant::Nn => {
            let mut net = DenseAutoencoder::init(cfg.window.dimension(l), cfg.hidden, init_seed);
            let loss = train_loop(&mut net, cfg.loop_settings(cfg.loss), epoch_data)?;
            (ModelKind::EdaeNn, ModelParams::Dense(net), loss)
        }
        EdaeVariant::Lstm => {
            let shape = LstmShape::new(l, cfg.lstm_hidden, cfg.lstm_output).with_peephole(cfg.peephole);
            let mut net = LstmAutoencoder::init(shape, cfg.window.rows(), init_seed);
            let loss = train_loop(&mut net, cfg.loop_settings(cfg.loss), epoch_data)?;
            (ModelKind::EdaeLstm, ModelParams::Lstm(net), loss)
        }
    };
    Ok(TrainedModel {
        kind,
        channels: l,
        window: cfg.window,
        norm,
        params,
        meta: TrainingMeta {
            final_loss: Some(loss),
            epochs: cfg.epochs,
            seed: cfg.seed,
            rho_train: rho,
        },
    })
}

/// Parameterless model whose reconstruction is the nearest-valid-neighbor
/// fill.
pub fn baseline_im(corrupted: &CorruptedSeries) -> Result<TrainedModel> {
    Ok(TrainedModel {
        kind: ModelKind::Im,
        channels: corrupted.series().channels(),
        window: WindowConfig::center_only(),
        norm: NormParams { channels: Vec::new() },
        params: ModelParams::Interpolation,
        meta: TrainingMeta {
            final_loss: None,
            epochs: 0,
            seed: 0,
            rho_train: 0.0,
        },
    })
}

/// Drops the center row from a window.
fn without_center(window: &[f64], cfg: WindowConfig, channels: usize) -> Vec<f64> {
    let start = cfg.center_offset(channels);
    let mut out = Vec::with_capacity(window.len() - channels);
    out.extend_from_slice(&window[..start]);
    out.extend_from_slice(&window[start + channels..]);
    out
}

/// Features and targets the ELM is fitted on: neighbor windows (center
/// removed) of a corrupted, fake-filled copy of `clean`, against the clean
/// center rows, all normalized with `norm`.
pub fn elm_training_set(clean: &TimeSeries, cfg: &TrainConfig, norm: &NormParams) -> Result<Dataset> {
    let corrupted = corrupt_series(clean, cfg.resolved_rho_train(), epoch_seed(cfg, 0))?;
    let filled = norm.apply(&init_fake_values(&corrupted)?)?;
    let l = clean.channels();
    let inputs = row_windows(&filled, cfg.window)
        .iter()
        .map(|w| without_center(w, cfg.window, l))
        .collect();
    let targets = row_windows(&norm.apply(clean)?, WindowConfig::center_only());
    Ok(Dataset { inputs, targets })
}

pub fn baseline_elm(clean: &TimeSeries, cfg: &TrainConfig) -> Result<TrainedModel> {
    cfg.validate()?;
    require_window(cfg)?;
    reject_empty_channels(clean, None)?;
    let norm = NormParams::fit(clean, None)?;
    let data = elm_training_set(clean, cfg, &norm)?;
    let elm = fit_elm(
        &data.inputs,
        &data.targets,
        cfg.elm_hidden,
        cfg.elm_ridge,
        derive_seed(cfg.seed, b"init"),
    )?;
    let mse = data
        .inputs
        .iter()
        .zip(&data.targets)
        .map(|(x, t)| elm.predict(x).iter().zip(t).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
        .sum::<f64>()
        / (data.inputs.len() * clean.channels()) as f64;
    Ok(TrainedModel {
        kind: ModelKind::Elm,
        channels: clean.channels(),
        window: cfg.window,
        norm,
        params: ModelParams::Elm(elm),
        meta: TrainingMeta {
            final_loss: Some(mse),
            epochs: 1,
            seed: cfg.seed,
            rho_train: cfg.resolved_rho_train(),
        },
    })
}

/// Replaces every masked entry with the model's estimate; observed
/// entries are copied unchanged.
pub fn reconstruct(model: &TrainedModel, corrupted: &CorruptedSeries) -> Result<TimeSeries> {
    let series = corrupted.series();
    let mask = corrupted.mask();
    if series.channels() != model.channels {
        return Err(Error::ShapeMismatch {
            expected: format!("{} channels", model.channels),
            found: format!("{} channels", series.channels()),
        });
    }
    model.check()?;
    let l = model.channels;
    let estimate: Box<dyn Fn(&[f64]) -> Vec<f64>> = match &model.params {
        ModelParams::Interpolation => return init_fake_values(corrupted),
        ModelParams::Dense(net) => Box::new(move |x| net.predict(x)),
        ModelParams::Lstm(net) => Box::new(move |x| net.predict(x)),
        ModelParams::Elm(elm) => {
            let window = model.window;
            Box::new(move |x| elm.predict(&without_center(x, window, l)))
        }
    };
    // rows hold raw zeros at masked entries; window models read the fill
    let source = if model.kind.uses_window() {
        init_fake_values(corrupted)?
    } else {
        series.clone()
    };
    let normalized = model.norm.apply(&source)?;
    let center = if model.kind == ModelKind::Elm {
        0
    } else {
        model.window.center_offset(l)
    };

    let mut values = series.values().to_vec();
    let mut window = Vec::with_capacity(model.window.dimension(l));
    for t in 0..series.len() {
        if !mask.row_has_masked(t) {
            continue;
        }
        expand_into(&normalized, t, model.window, &mut window);
        let out = estimate(&window);
        for c in 0..l {
            if mask.is_masked(t, c) {
                values[t * l + c] = model.norm.inverse_value(c, out[center + c]);
            }
        }
    }
    series.with_values(values)
}
