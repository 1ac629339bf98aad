//! Seeded synthetic data: the noisy sinc test sequence and a three-phase
//! daily power profile sampled once a minute.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::series::TimeSeries;

/// Distribution of the draw that positions each sample on the `r` axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PositionDraw {
    #[default]
    Gaussian,
    Uniform,
}

/// Order in which generated samples are laid out in time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleOrder {
    /// Ascending `r`, so neighbors in time are neighbors on the curve.
    #[default]
    ByPosition,
    /// Draw order.
    AsDrawn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RandomSeqConfig {
    pub n: usize,
    pub seed: u64,
    pub noise_scale: f64,
    pub r_offset: f64,
    pub r_span: f64,
    pub position_draw: PositionDraw,
    pub order: SampleOrder,
}

impl Default for RandomSeqConfig {
    fn default() -> Self {
        Self {
            n: 1000,
            seed: 0,
            noise_scale: 0.4,
            r_offset: -10.0,
            r_span: 20.0,
            position_draw: PositionDraw::Gaussian,
            order: SampleOrder::ByPosition,
        }
    }
}

impl RandomSeqConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        if !(self.noise_scale >= 0.0 && self.noise_scale.is_finite()) {
            return Err(Error::Config(format!("noise_scale must be >= 0, got {}", self.noise_scale)));
        }
        if !(self.r_offset.is_finite() && self.r_span.is_finite()) {
            return Err(Error::Config("r_offset and r_span must be finite".into()));
        }
        Ok(())
    }

    /// Axis position `r = r_offset + r_span · eps2`.
    pub fn position(&self, eps2: f64) -> f64 {
        self.r_offset + self.r_span * eps2
    }

    /// `1 + 0.05 r + sin(r)/r + noise_scale · eps1`.
    pub fn value(&self, r: f64, eps1: f64) -> f64 {
        1.0 + 0.05 * r + sinc(r) + self.noise_scale * eps1
    }
}

/// Unnormalized sinc with the analytic limit `sinc(0) = 1`.
pub fn sinc(r: f64) -> f64 {
    if r == 0.0 {
        1.0
    } else {
        libm::sin(r) / r
    }
}

/// Draws `(eps1, eps2)` per sample, in that order, from one generator.
pub fn generate_random_sequence(cfg: &RandomSeqConfig) -> Result<TimeSeries> {
    cfg.validate()?;
    let mut rng = SeededRng::new(cfg.seed);
    let mut samples: Vec<(f64, f64)> = (0..cfg.n)
        .map(|_| {
            let eps1 = rng.gaussian();
            let eps2 = match cfg.position_draw {
                PositionDraw::Gaussian => rng.gaussian(),
                PositionDraw::Uniform => rng.uniform(),
            };
            (cfg.position(eps2), eps1)
        })
        .collect();
    if cfg.order == SampleOrder::ByPosition {
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    let values = samples.iter().map(|&(r, eps1)| cfg.value(r, eps1)).collect();
    TimeSeries::from_column(values)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PowerProfileConfig {
    pub days: usize,
    pub samples_per_day: usize,
    pub base_load: f64,
    pub daily_amplitude: f64,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for PowerProfileConfig {
    fn default() -> Self {
        Self {
            days: 2,
            samples_per_day: 1440,
            base_load: 1.0,
            daily_amplitude: 0.3,
            noise_sigma: 0.05,
            seed: 0,
        }
    }
}

/// Hour of the daily peak on phase A; phases B and C peak one and two
/// hours later.
const PEAK_HOUR: f64 = 18.0;
const PHASE_LAG_HOURS: f64 = 1.0;
pub const PHASE_NAMES: [&str; 3] = ["P_a", "P_b", "P_c"];

impl PowerProfileConfig {
    pub fn validate(&self) -> Result<()> {
        if self.days == 0 || self.samples_per_day == 0 {
            return Err(Error::Config("days and samples_per_day must be at least 1".into()));
        }
        for (name, v) in [
            ("base_load", self.base_load),
            ("daily_amplitude", self.daily_amplitude),
            ("noise_sigma", self.noise_sigma),
        ] {
            if !v.is_finite() {
                return Err(Error::Config(format!("{name} must be finite")));
            }
        }
        if self.noise_sigma < 0.0 {
            return Err(Error::Config("noise_sigma must be >= 0".into()));
        }
        Ok(())
    }

    /// Noise-free load of `phase` at sample `t`.
    pub fn mean_load(&self, t: usize, phase: usize) -> f64 {
        let hours = 24.0 * (t % self.samples_per_day) as f64 / self.samples_per_day as f64;
        let lag = PEAK_HOUR + PHASE_LAG_HOURS * phase as f64;
        let angle = 2.0 * std::f64::consts::PI * (hours - lag) / 24.0;
        self.base_load + self.daily_amplitude * libm::cos(angle)
    }
}

/// Three-phase real power: daily sinusoid plus white Gaussian noise.
pub fn generate_power_profile(cfg: &PowerProfileConfig) -> Result<TimeSeries> {
    cfg.validate()?;
    let len = cfg.days * cfg.samples_per_day;
    let mut rng = SeededRng::new(cfg.seed);
    let mut values = Vec::with_capacity(len * PHASE_NAMES.len());
    for t in 0..len {
        for phase in 0..PHASE_NAMES.len() {
            values.push(cfg.mean_load(t, phase) + cfg.noise_sigma * rng.gaussian());
        }
    }
    let dt = 86_400.0 / cfg.samples_per_day as f64;
    TimeSeries::new(values, PHASE_NAMES.iter().map(|s| s.to_string()).collect(), dt)
}
