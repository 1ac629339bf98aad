use super::TimeSeries;
use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// `T × L` flags; `true` marks a missing entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorruptionMask {
    flags: Vec<bool>,
    len: usize,
    channels: usize,
}

impl CorruptionMask {
    pub fn new(flags: Vec<bool>, len: usize, channels: usize) -> Result<Self> {
        if flags.len() != len * channels {
            return Err(Error::shape(format!("{len}x{channels}"), flags.len()));
        }
        Ok(Self { flags, len, channels })
    }

    pub fn empty(len: usize, channels: usize) -> Self {
        Self {
            flags: vec![false; len * channels],
            len,
            channels,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    pub fn is_masked(&self, t: usize, channel: usize) -> bool {
        self.flags[t * self.channels + channel]
    }

    pub fn row_has_masked(&self, t: usize) -> bool {
        self.flags[t * self.channels..(t + 1) * self.channels].iter().any(|&f| f)
    }

    pub fn corrupted_count(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }

    pub(crate) fn matches(&self, series: &TimeSeries) -> Result<()> {
        if self.len == series.len() && self.channels == series.channels() {
            Ok(())
        } else {
            Err(Error::shape(series.shape_string(), format!("{}x{}", self.len, self.channels)))
        }
    }
}

/// A series whose masked entries hold zero, together with the mask.
#[derive(Debug, Clone, PartialEq)]
pub struct CorruptedSeries {
    series: TimeSeries,
    mask: CorruptionMask,
    rho: f64,
}

impl CorruptedSeries {
    /// Pairs a series with a mask. Masked entries are forced to zero; the
    /// proportion is recomputed from the mask.
    pub fn from_parts(series: TimeSeries, mask: CorruptionMask) -> Result<Self> {
        mask.matches(&series)?;
        let values = series
            .values()
            .iter()
            .zip(mask.flags())
            .map(|(&v, &m)| if m { 0.0 } else { v })
            .collect();
        let series = series.with_values(values)?;
        let rho = mask.corrupted_count() as f64 / mask.flags().len() as f64;
        Ok(Self { series, mask, rho })
    }

    pub fn series(&self) -> &TimeSeries {
        &self.series
    }

    pub fn mask(&self) -> &CorruptionMask {
        &self.mask
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
}

/// Zeroes exactly `round(rho · T · L)` entries picked uniformly without
/// replacement over all `(t, l)` positions.
pub fn corrupt_series(clean: &TimeSeries, rho: f64, seed: u64) -> Result<CorruptedSeries> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::InvalidArgument(format!("corruption proportion {rho} is outside [0, 1]")));
    }
    let total = clean.values().len();
    let count = ((rho * total as f64).round() as usize).min(total);

    // partial Fisher–Yates: the first `count` slots end up holding the sample
    let mut rng = SeededRng::new(seed);
    let mut positions: Vec<usize> = (0..total).collect();
    for i in 0..count {
        let j = i + rng.below(total - i);
        positions.swap(i, j);
    }

    let mut flags = vec![false; total];
    let mut values = clean.values().to_vec();
    for &p in &positions[..count] {
        flags[p] = true;
        values[p] = 0.0;
    }
    let mask = CorruptionMask::new(flags, clean.len(), clean.channels())?;
    Ok(CorruptedSeries {
        series: clean.with_values(values)?,
        mask,
        rho,
    })
}
