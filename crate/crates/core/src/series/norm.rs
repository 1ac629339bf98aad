use serde::{Deserialize, Serialize};

use super::{CorruptionMask, TimeSeries};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelRange {
    pub min: f64,
    pub max: f64,
}

impl ChannelRange {
    fn is_degenerate(&self) -> bool {
        self.max <= self.min
    }

    pub fn forward(&self, v: f64) -> f64 {
        if self.is_degenerate() {
            0.5
        } else {
            (v - self.min) / (self.max - self.min)
        }
    }

    pub fn inverse(&self, v: f64) -> f64 {
        if self.is_degenerate() {
            self.min
        } else {
            v * (self.max - self.min) + self.min
        }
    }
}

/// Per-channel min/max over observed entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NormParams {
    pub channels: Vec<ChannelRange>,
}

impl NormParams {
    /// Fits ranges on the entries the mask leaves observed. A channel with
    /// no observed entries gets the degenerate range `[0, 0]`.
    pub fn fit(series: &TimeSeries, mask: Option<&CorruptionMask>) -> Result<Self> {
        if let Some(m) = mask {
            m.matches(series)?;
        }
        let observed = series.channel_stats(|t, c| mask.map_or(true, |m| !m.is_masked(t, c)));
        let channels = observed
            .iter()
            .map(|col| {
                let min = col.iter().copied().fold(f64::INFINITY, f64::min);
                let max = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if col.is_empty() {
                    ChannelRange { min: 0.0, max: 0.0 }
                } else {
                    ChannelRange { min, max }
                }
            })
            .collect();
        Ok(Self { channels })
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    /// Scales one row in place.
    pub fn forward_row(&self, row: &mut [f64]) {
        for (v, r) in row.iter_mut().zip(self.channels.iter().cycle()) {
            *v = r.forward(*v);
        }
    }

    /// Scales a window of whole rows in place (length a multiple of `len()`).
    pub fn forward_window(&self, window: &mut [f64]) {
        self.forward_row(window)
    }

    pub fn inverse_value(&self, channel: usize, v: f64) -> f64 {
        self.channels[channel].inverse(v)
    }

    pub fn apply(&self, series: &TimeSeries) -> Result<TimeSeries> {
        self.check(series)?;
        let mut values = series.values().to_vec();
        self.forward_window(&mut values);
        series.with_values(values)
    }

    pub fn invert(&self, series: &TimeSeries) -> Result<TimeSeries> {
        self.check(series)?;
        let values = series
            .values()
            .iter()
            .zip(self.channels.iter().cycle())
            .map(|(&v, r)| r.inverse(v))
            .collect();
        series.with_values(values)
    }

    pub(crate) fn check(&self, series: &TimeSeries) -> Result<()> {
        if self.channels.len() == series.channels() {
            Ok(())
        } else {
            Err(Error::shape(
                format!("{} channels", self.channels.len()),
                format!("{} channels", series.channels()),
            ))
        }
    }
}

/// Min–max scales each channel to `[0, 1]` using only observed entries.
pub fn normalize(series: &TimeSeries, mask: &CorruptionMask) -> Result<(TimeSeries, NormParams)> {
    let params = NormParams::fit(series, Some(mask))?;
    Ok((params.apply(series)?, params))
}

pub fn denormalize(series: &TimeSeries, params: &NormParams) -> Result<TimeSeries> {
    params.invert(series)
}
