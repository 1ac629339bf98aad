use serde::{Deserialize, Serialize};

use super::{init_fake_values, CorruptedSeries, TimeSeries};
use crate::error::{Error, Result};

/// Number of past (`k_back`) and future (`k_fwd`) neighbor rows placed
/// around the center row of a window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowConfig {
    pub k_back: usize,
    pub k_fwd: usize,
}

impl WindowConfig {
    pub const fn new(k_back: usize, k_fwd: usize) -> Self {
        Self { k_back, k_fwd }
    }

    /// The degenerate window holding only the center row.
    pub const fn center_only() -> Self {
        Self::new(0, 0)
    }

    pub fn rows(&self) -> usize {
        self.k_back + self.k_fwd + 1
    }

    pub fn dimension(&self, channels: usize) -> usize {
        self.rows() * channels
    }

    /// Offset of the center block inside an expanded vector.
    pub fn center_offset(&self, channels: usize) -> usize {
        self.k_back * channels
    }
}

impl Default for WindowConfig {
    fn default() -> Self {
        Self::new(5, 5)
    }
}

/// Expanded input with its clean target.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowSample {
    pub input: Vec<f64>,
    pub target: Vec<f64>,
    pub center_index: usize,
}

/// Concatenates rows `t - k_back ..= t + k_fwd`; rows outside the series
/// repeat the nearest edge row.
pub fn expand_window(series: &TimeSeries, t: usize, cfg: WindowConfig) -> Result<Vec<f64>> {
    if t >= series.len() {
        return Err(Error::InvalidArgument(format!(
            "time index {t} is outside 0..{}",
            series.len()
        )));
    }
    let mut out = Vec::with_capacity(cfg.dimension(series.channels()));
    expand_into(series, t, cfg, &mut out);
    Ok(out)
}

pub(crate) fn expand_into(series: &TimeSeries, t: usize, cfg: WindowConfig, out: &mut Vec<f64>) {
    out.clear();
    let last = series.len() as isize - 1;
    for offset in -(cfg.k_back as isize)..=cfg.k_fwd as isize {
        let row = (t as isize + offset).clamp(0, last) as usize;
        out.extend_from_slice(series.row(row));
    }
}

/// One sample per time step: input windows come from the fake-filled
/// corrupted series, targets from the clean one.
pub fn build_window_dataset(
    clean: &TimeSeries,
    corrupted: &CorruptedSeries,
    cfg: WindowConfig,
) -> Result<Vec<WindowSample>> {
    clean.check_same_shape(corrupted.series())?;
    let filled = init_fake_values(corrupted)?;
    let center_index = cfg.center_offset(clean.channels());
    (0..clean.len())
        .map(|t| {
            Ok(WindowSample {
                input: expand_window(&filled, t, cfg)?,
                target: expand_window(clean, t, cfg)?,
                center_index,
            })
        })
        .collect()
}
