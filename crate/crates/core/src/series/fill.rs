use super::{CorruptedSeries, TimeSeries};
use crate::error::{Error, Result};

/// Replaces every masked entry by the mean of the nearest observed sample
/// on each side in the same channel, or copies the single side available.
/// Observed entries are returned bit-identical.
pub fn init_fake_values(corrupted: &CorruptedSeries) -> Result<TimeSeries> {
    let series = corrupted.series();
    let mask = corrupted.mask();
    let (len, channels) = (series.len(), series.channels());
    let mut values = series.values().to_vec();
    let mut left = vec![None::<f64>; len];

    for c in 0..channels {
        let mut last = None;
        for (t, slot) in left.iter_mut().enumerate() {
            if !mask.is_masked(t, c) {
                last = Some(series.get(t, c));
            }
            *slot = last;
        }
        if last.is_none() {
            return Err(Error::UnreconstructableChannel { channel: c });
        }

        let mut next = None;
        for t in (0..len).rev() {
            if !mask.is_masked(t, c) {
                next = Some(series.get(t, c));
                continue;
            }
            values[t * channels + c] = match (left[t], next) {
                (Some(a), Some(b)) => 0.5 * (a + b),
                (Some(a), None) => a,
                (None, Some(b)) => b,
                (None, None) => unreachable!("channel has at least one observed sample"),
            };
        }
    }
    series.with_values(values)
}
