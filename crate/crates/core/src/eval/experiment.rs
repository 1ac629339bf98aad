use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{nmse_with_scope, NmseScope};
use crate::error::{Error, Result};
use crate::models::{reconstruct, MethodRegistry, TrainConfig, TrainingData};
use crate::rng::{derive_seed, fnv1a, mix64};
use crate::series::{corrupt_series, csv_io, CorruptedSeries, TimeSeries};
use crate::synthetic::{generate_power_profile, generate_random_sequence, PowerProfileConfig, RandomSeqConfig};

/// Where the clean data of an experiment comes from. The `seed` field of
/// a synthetic config is replaced by per-repeat derived seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DataSource {
    Random(RandomSeqConfig),
    Power(PowerProfileConfig),
    /// A recorded series split in time: the leading `train_fraction` of
    /// the rows trains, the rest is corrupted and scored.
    Csv {
        path: PathBuf,
        #[serde(default = "default_train_fraction")]
        train_fraction: f64,
    },
}

fn default_train_fraction() -> f64 {
    0.5
}

impl Default for DataSource {
    fn default() -> Self {
        DataSource::Random(RandomSeqConfig::default())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentPlan {
    pub dataset: DataSource,
    pub methods: Vec<String>,
    pub proportions: Vec<f64>,
    pub repeats: usize,
    pub base_seed: u64,
    pub nmse_scope: NmseScope,
    /// Training settings shared by every method. An unset `rho_train`
    /// follows the proportion of each cell.
    pub train: TrainConfig,
    /// Proportion whose first repeat is kept as plot data; `None` keeps
    /// the first proportion.
    pub plot_rho: Option<f64>,
    /// Record wall-clock seconds per run. Reports stop being
    /// byte-reproducible when enabled.
    pub record_timing: bool,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        Self {
            dataset: DataSource::default(),
            methods: ["AE", "DAE", "EDAE_LSTM"].map(String::from).to_vec(),
            proportions: vec![0.1, 0.2, 0.3, 0.4, 0.5],
            repeats: 3,
            base_seed: 0,
            nmse_scope: NmseScope::Masked,
            train: TrainConfig::default(),
            plot_rho: None,
            record_timing: false,
        }
    }
}

impl ExperimentPlan {
    pub fn validate(&self, registry: &MethodRegistry) -> Result<()> {
        if self.methods.is_empty() || self.proportions.is_empty() {
            return Err(Error::Config("plan needs at least one method and one proportion".into()));
        }
        for m in &self.methods {
            registry.get(m).map_err(|e| Error::Config(e.to_string()))?;
        }
        if let Some(p) = self.proportions.iter().find(|p| !(**p > 0.0 && **p <= 1.0)) {
            return Err(Error::Config(format!("proportion {p} is outside (0, 1]")));
        }
        if self.repeats == 0 {
            return Err(Error::Config("repeats must be at least 1".into()));
        }
        if let Some(p) = self.plot_rho {
            if !self.proportions.contains(&p) {
                return Err(Error::Config(format!("plot_rho {p} is not one of the planned proportions")));
            }
        }
        match &self.dataset {
            DataSource::Random(c) => c.validate()?,
            DataSource::Power(c) => c.validate()?,
            DataSource::Csv { train_fraction, .. } => {
                if !(*train_fraction > 0.0 && *train_fraction < 1.0) {
                    return Err(Error::Config(format!("train_fraction {train_fraction} is outside (0, 1)")));
                }
            }
        }
        self.train.validate()
    }

    fn plot_proportion(&self) -> f64 {
        self.plot_rho.unwrap_or(self.proportions[0])
    }
}

/// Seed of one labelled stream for repeat `r` at proportion `rho`.
fn stream_seed(base: u64, label: &str, rho: Option<f64>, repeat: usize) -> u64 {
    let mut s = derive_seed(base, label.as_bytes());
    if let Some(rho) = rho {
        s = mix64(s ^ rho.to_bits());
    }
    mix64(s ^ fnv1a(&(repeat as u64).to_le_bytes()))
}

/// Training seed of a cell: depends on the method name, the proportion
/// and the repeat index, so adding methods leaves other cells unchanged.
pub fn cell_seed(base: u64, method: &str, rho: f64, repeat: usize) -> u64 {
    stream_seed(base, &format!("train/{}", method.to_ascii_uppercase()), Some(rho), repeat)
}

/// Corrupted training and evaluation copies seen by every method at
/// proportion `rho` in repeat `repeat`.
pub fn cell_masks(
    base: u64,
    train: &TimeSeries,
    test: &TimeSeries,
    rho: f64,
    repeat: usize,
) -> Result<(CorruptedSeries, CorruptedSeries)> {
    Ok((
        corrupt_series(train, rho, stream_seed(base, "mask/train", Some(rho), repeat))?,
        corrupt_series(test, rho, stream_seed(base, "mask/test", Some(rho), repeat))?,
    ))
}

/// Clean training and evaluation series for one repeat.
pub fn load_split(source: &DataSource, base: u64, repeat: usize) -> Result<(TimeSeries, TimeSeries)> {
    let seed = |label| stream_seed(base, label, None, repeat);
    match source {
        DataSource::Random(cfg) => {
            let gen = |s| generate_random_sequence(&RandomSeqConfig { seed: s, ..cfg.clone() });
            Ok((gen(seed("data/train"))?, gen(seed("data/test"))?))
        }
        DataSource::Power(cfg) => {
            let gen = |s| generate_power_profile(&PowerProfileConfig { seed: s, ..cfg.clone() });
            Ok((gen(seed("data/train"))?, gen(seed("data/test"))?))
        }
        DataSource::Csv { path, train_fraction } => {
            let all = csv_io::read_series(path)?;
            let cut = (all.len() as f64 * train_fraction).round() as usize;
            if cut == 0 || cut >= all.len() {
                return Err(Error::Config(format!(
                    "train_fraction {train_fraction} leaves an empty split of {} rows",
                    all.len()
                )));
            }
            Ok((all.slice_rows(0, cut)?, all.slice_rows(cut, all.len())?))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub repeat: usize,
    pub seed: u64,
    pub nmse: Option<f64>,
    pub error: Option<String>,
    pub seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub method: String,
    pub rho: f64,
    pub runs: Vec<RunResult>,
}

impl CellResult {
    /// Mean NMSE over repeats; `None` if any repeat failed.
    pub fn mean(&self) -> Option<f64> {
        let vals: Option<Vec<f64>> = self.runs.iter().map(|r| r.nmse).collect();
        vals.map(|v| v.iter().sum::<f64>() / v.len() as f64)
    }

    pub fn failed(&self) -> bool {
        self.runs.iter().any(|r| r.nmse.is_none())
    }
}

/// Clean, corrupted and reconstructed values of one channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotTrace {
    pub method: String,
    pub rho: f64,
    pub channel: String,
    pub t: Vec<f64>,
    pub clean: Vec<f64>,
    pub corrupted: Vec<f64>,
    pub reconstructed: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NmseReport {
    pub plan: ExperimentPlan,
    /// FNV-1a over the evaluation series of every repeat, hex.
    pub dataset_fingerprint: String,
    pub cells: Vec<CellResult>,
    #[serde(skip)]
    pub plots: Vec<PlotTrace>,
}

impl NmseReport {
    pub fn cell(&self, method: &str, rho: f64) -> Option<&CellResult> {
        self.cells
            .iter()
            .find(|c| c.method.eq_ignore_ascii_case(method) && c.rho == rho)
    }

    pub fn failed_cells(&self) -> impl Iterator<Item = &CellResult> {
        self.cells.iter().filter(|c| c.failed())
    }
}

struct RepeatData {
    train: TimeSeries,
    test: TimeSeries,
}

fn traces(method: &str, rho: f64, clean: &TimeSeries, corrupted: &CorruptedSeries, rec: &TimeSeries) -> Vec<PlotTrace> {
    let t: Vec<f64> = (0..clean.len()).map(|i| i as f64 * clean.dt()).collect();
    clean
        .channel_names()
        .iter()
        .enumerate()
        .map(|(c, name)| PlotTrace {
            method: method.to_string(),
            rho,
            channel: name.clone(),
            t: t.clone(),
            clean: clean.column(c).collect(),
            corrupted: corrupted.series().column(c).collect(),
            reconstructed: rec.column(c).collect(),
        })
        .collect()
}

/// One (method, proportion, repeat) run. Every random stream is derived
/// from the plan's base seed, so the result does not depend on which
/// other cells exist or in which order they run.
fn run_cell(
    plan: &ExperimentPlan,
    registry: &MethodRegistry,
    method: &str,
    rho: f64,
    repeat: usize,
    data: &RepeatData,
) -> (RunResult, Option<Vec<PlotTrace>>) {
    let seed = cell_seed(plan.base_seed, method, rho, repeat);
    let started = Instant::now();
    let outcome = (|| -> Result<(f64, Vec<PlotTrace>)> {
        let (train_corrupted, test_corrupted) = cell_masks(plan.base_seed, &data.train, &data.test, rho, repeat)?;
        let cfg = TrainConfig {
            seed,
            rho_train: plan.train.rho_train.or(Some(rho)),
            ..plan.train.clone()
        };
        let model = registry.get(method)?.fit(
            TrainingData {
                clean: &data.train,
                corrupted: &train_corrupted,
            },
            &cfg,
        )?;
        let rec = reconstruct(&model, &test_corrupted)?;
        let score = nmse_with_scope(&data.test, &rec, test_corrupted.mask(), plan.nmse_scope)?;
        Ok((score, traces(method, rho, &data.test, &test_corrupted, &rec)))
    })();
    let seconds = plan.record_timing.then(|| started.elapsed().as_secs_f64());
    match outcome {
        Ok((score, plots)) => (
            RunResult {
                repeat,
                seed,
                nmse: Some(score),
                error: None,
                seconds,
            },
            Some(plots),
        ),
        Err(e) => (
            RunResult {
                repeat,
                seed,
                nmse: None,
                error: Some(e.to_string()),
                seconds,
            },
            None,
        ),
    }
}

pub fn run_experiment(plan: &ExperimentPlan) -> Result<NmseReport> {
    run_experiment_with(plan, &MethodRegistry::builtin())
}

/// Runs every (method, proportion, repeat) cell. Failures are recorded in
/// their cell; only an invalid plan or unreadable data aborts the grid.
pub fn run_experiment_with(plan: &ExperimentPlan, registry: &MethodRegistry) -> Result<NmseReport> {
    plan.validate(registry)?;
    let repeats = (0..plan.repeats)
        .map(|r| load_split(&plan.dataset, plan.base_seed, r).map(|(train, test)| RepeatData { train, test }))
        .collect::<Result<Vec<_>>>()?;
    let mut fp = Vec::new();
    for r in &repeats {
        fp.extend_from_slice(&r.test.fingerprint().to_le_bytes());
    }

    let plot_rho = plan.plot_proportion();
    let mut cells = Vec::new();
    let mut plots = Vec::new();
    for method in &plan.methods {
        for &rho in &plan.proportions {
            let mut runs = Vec::with_capacity(plan.repeats);
            for (repeat, data) in repeats.iter().enumerate() {
                let (run, trace) = run_cell(plan, registry, method, rho, repeat, data);
                if repeat == 0 && rho == plot_rho {
                    plots.extend(trace.unwrap_or_default());
                }
                runs.push(run);
            }
            cells.push(CellResult {
                method: method.to_ascii_uppercase(),
                rho,
                runs,
            });
        }
    }
    Ok(NmseReport {
        plan: plan.clone(),
        dataset_fingerprint: format!("{:016x}", fnv1a(&fp)),
        cells,
        plots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_seeds_separate_methods_and_repeats() {
        let a = cell_seed(1, "IM", 0.1, 0);
        assert_eq!(a, cell_seed(1, "im", 0.1, 0));
        assert_ne!(a, cell_seed(1, "AE", 0.1, 0));
        assert_ne!(a, cell_seed(1, "IM", 0.2, 0));
        assert_ne!(a, cell_seed(1, "IM", 0.1, 1));
        assert_ne!(a, cell_seed(2, "IM", 0.1, 0));
    }

    #[test]
    fn plan_json_defaults_and_unknown_keys() {
        let plan: ExperimentPlan = serde_json::from_str(r#"{"methods": ["IM"], "repeats": 1}"#).unwrap();
        assert_eq!(plan.proportions.len(), 5);
        assert!(serde_json::from_str::<ExperimentPlan>(r#"{"repeat": 1}"#).is_err());
        let power: ExperimentPlan = serde_json::from_str(r#"{"dataset": {"kind": "power", "days": 3}}"#).unwrap();
        assert!(matches!(power.dataset, DataSource::Power(PowerProfileConfig { days: 3, .. })));
        assert!(serde_json::from_str::<ExperimentPlan>(r#"{"dataset": {"kind": "power", "dayz": 3}}"#).is_err());
    }

    #[test]
    fn validation() {
        let reg = MethodRegistry::builtin();
        ExperimentPlan::default().validate(&reg).unwrap();
        for bad in [
            ExperimentPlan {
                proportions: vec![0.0],
                ..Default::default()
            },
            ExperimentPlan {
                repeats: 0,
                ..Default::default()
            },
            ExperimentPlan {
                methods: vec!["KNN".into()],
                ..Default::default()
            },
            ExperimentPlan {
                plot_rho: Some(0.25),
                ..Default::default()
            },
        ] {
            assert!(matches!(bad.validate(&reg), Err(Error::Config(_))));
        }
    }
}
