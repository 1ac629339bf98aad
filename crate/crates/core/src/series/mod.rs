//! Multichannel measurement series and the data plumbing around them:
//! corruption masks, fake-value filling, neighbor windows and scaling.

mod corrupt;
pub mod csv_io;
mod fill;
mod norm;
mod window;

pub use corrupt::{corrupt_series, CorruptedSeries, CorruptionMask};
pub use fill::init_fake_values;
pub use norm::{denormalize, normalize, ChannelRange, NormParams};
pub use window::{build_window_dataset, expand_window, WindowConfig, WindowSample};
pub(crate) use window::expand_into;

use crate::error::{Error, Result};

/// A `T × L` matrix of finite measurements, one row per time step.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    len: usize,
    channel_names: Vec<String>,
    dt: f64,
}

impl TimeSeries {
    /// Builds a series from row-major values.
    pub fn new(values: Vec<f64>, channel_names: Vec<String>, dt: f64) -> Result<Self> {
        let channels = channel_names.len();
        if channels == 0 {
            return Err(Error::InvalidArgument("a series needs at least one channel".into()));
        }
        if values.is_empty() || values.len() % channels != 0 {
            return Err(Error::shape(
                format!("a nonzero multiple of {channels} values"),
                values.len(),
            ));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite value at row {}, channel {}",
                pos / channels,
                pos % channels
            )));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidArgument(format!("sampling interval must be positive, got {dt}")));
        }
        Ok(Self {
            len: values.len() / channels,
            values,
            channel_names,
            dt,
        })
    }

    /// Single-channel series named `x` with unit sampling interval.
    pub fn from_column(values: Vec<f64>) -> Result<Self> {
        Self::new(values, vec!["x".to_string()], 1.0)
    }

    /// Builds a series from per-channel columns of equal length.
    pub fn from_columns(columns: &[Vec<f64>], channel_names: Vec<String>, dt: f64) -> Result<Self> {
        if columns.len() != channel_names.len() {
            return Err(Error::shape(channel_names.len(), columns.len()));
        }
        let len = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != len) {
            return Err(Error::InvalidArgument("columns differ in length".into()));
        }
        let mut values = Vec::with_capacity(len * columns.len());
        for t in 0..len {
            values.extend(columns.iter().map(|c| c[t]));
        }
        Self::new(values, channel_names, dt)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn channels(&self) -> usize {
        self.channel_names.len()
    }

    pub fn channel_names(&self) -> &[String] {
        &self.channel_names
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, t: usize, channel: usize) -> f64 {
        self.values[t * self.channels() + channel]
    }

    pub fn row(&self, t: usize) -> &[f64] {
        let l = self.channels();
        &self.values[t * l..(t + 1) * l]
    }

    pub fn column(&self, channel: usize) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().skip(channel).step_by(self.channels()).copied()
    }

    pub fn same_shape(&self, other: &TimeSeries) -> bool {
        self.len == other.len && self.channels() == other.channels()
    }

    /// Returns a copy with new values; the shape must be unchanged.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(Error::shape(self.values.len(), values.len()));
        }
        Self::new(values, self.channel_names.clone(), self.dt)
    }

    /// Rows `start..end` as a new series.
    pub fn slice_rows(&self, start: usize, end: usize) -> Result<Self> {
        if start >= end || end > self.len {
            return Err(Error::InvalidArgument(format!(
                "row range {start}..{end} is empty or exceeds length {}",
                self.len
            )));
        }
        let l = self.channels();
        Self::new(self.values[start * l..end * l].to_vec(), self.channel_names.clone(), self.dt)
    }

    pub(crate) fn shape_string(&self) -> String {
        format!("{}x{}", self.len, self.channels())
    }

    pub(crate) fn check_same_shape(&self, other: &TimeSeries) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::shape(self.shape_string(), other.shape_string()))
        }
    }

    /// Order-sensitive fingerprint of shape and value bits.
    pub fn fingerprint(&self) -> u64 {
        let mut bytes = Vec::with_capacity(16 + self.values.len() * 8);
        bytes.extend_from_slice(&(self.len as u64).to_le_bytes());
        bytes.extend_from_slice(&(self.channels() as u64).to_le_bytes());
        for v in &self.values {
            bytes.extend_from_slice(&v.to_bits().to_le_bytes());
        }
        crate::rng::fnv1a(&bytes)
    }

    /// Values of every channel, with the entries the mask rejects skipped.
    pub(crate) fn channel_stats<F: Fn(usize, usize) -> bool>(&self, keep: F) -> Vec<Vec<f64>> {
        let l = self.channels();
        let mut out = vec![Vec::new(); l];
        for t in 0..self.len {
            for (c, col) in out.iter_mut().enumerate() {
                if keep(t, c) {
                    col.push(self.values[t * l + c]);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_values() {
        let err = TimeSeries::from_column(vec![1.0, f64::NAN]).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
        let err = TimeSeries::from_column(vec![f64::INFINITY]).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn rejects_empty_and_ragged() {
        assert!(TimeSeries::from_column(vec![]).is_err());
        let names = vec!["a".into(), "b".into()];
        assert!(TimeSeries::new(vec![1.0, 2.0, 3.0], names, 1.0).is_err());
        assert!(TimeSeries::new(vec![1.0], vec![], 1.0).is_err());
    }

    #[test]
    fn rows_and_columns() {
        let s = TimeSeries::from_columns(
            &[vec![1.0, 2.0, 3.0], vec![10.0, 20.0, 30.0]],
            vec!["a".into(), "b".into()],
            60.0,
        )
        .unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.channels(), 2);
        assert_eq!(s.row(1), &[2.0, 20.0]);
        assert_eq!(s.column(1).collect::<Vec<_>>(), vec![10.0, 20.0, 30.0]);
        assert_eq!(s.get(2, 0), 3.0);
    }

    #[test]
    fn fingerprint_tracks_values() {
        let a = TimeSeries::from_column(vec![1.0, 2.0]).unwrap();
        let b = TimeSeries::from_column(vec![2.0, 1.0]).unwrap();
        assert_eq!(a.fingerprint(), a.clone().fingerprint());
        assert_ne!(a.fingerprint(), b.fingerprint());
    }
}
