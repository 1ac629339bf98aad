use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{CorruptionMask, TimeSeries};

/// Which entries the normalized error is taken over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NmseScope {
    /// `Σ_masked (x − z)² / Σ_masked x²`
    #[default]
    Masked,
    /// `Σ_all (x − z)² / Σ_all x²`
    All,
}

/// Normalized squared error over masked entries. Predicting zero at
/// every masked entry scores exactly 1.
pub fn nmse(clean: &TimeSeries, reconstructed: &TimeSeries, mask: &CorruptionMask) -> Result<f64> {
    nmse_with_scope(clean, reconstructed, mask, NmseScope::Masked)
}

pub fn nmse_with_scope(
    clean: &TimeSeries,
    reconstructed: &TimeSeries,
    mask: &CorruptionMask,
    scope: NmseScope,
) -> Result<f64> {
    clean.check_same_shape(reconstructed)?;
    mask.matches(clean)?;
    if mask.corrupted_count() == 0 {
        return Err(Error::InvalidArgument("nmse needs at least one masked entry".into()));
    }
    let (mut num, mut den) = (0.0, 0.0);
    for ((&x, &z), &masked) in clean.values().iter().zip(reconstructed.values()).zip(mask.flags()) {
        if masked || scope == NmseScope::All {
            num += (x - z) * (x - z);
            den += x * x;
        }
    }
    if den == 0.0 {
        return Err(Error::UndefinedMetric("true values are all zero".into()));
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(v: &[f64]) -> TimeSeries {
        TimeSeries::from_column(v.to_vec()).unwrap()
    }

    #[test]
    fn scalar_case() {
        let mask = CorruptionMask::new(vec![true], 1, 1).unwrap();
        assert_eq!(nmse(&col(&[2.0]), &col(&[1.0]), &mask).unwrap(), 0.25);
    }

    #[test]
    fn calibration() {
        let clean = col(&[1.0, -2.0, 3.0, 0.5]);
        let mask = CorruptionMask::new(vec![true, false, true, true], 4, 1).unwrap();
        assert_eq!(nmse(&clean, &clean, &mask).unwrap(), 0.0);
        let zeroed = col(&[0.0, -2.0, 0.0, 0.0]);
        assert_eq!(nmse(&clean, &zeroed, &mask).unwrap(), 1.0);
    }

    #[test]
    fn all_scope_divides_by_every_entry() {
        let clean = col(&[1.0, 1.0, 1.0, 1.0]);
        let rec = col(&[0.0, 1.0, 1.0, 1.0]);
        let mask = CorruptionMask::new(vec![true, false, false, false], 4, 1).unwrap();
        assert_eq!(nmse_with_scope(&clean, &rec, &mask, NmseScope::All).unwrap(), 0.25);
    }

    #[test]
    fn error_paths() {
        let a = col(&[1.0, 2.0]);
        let empty = CorruptionMask::empty(2, 1);
        assert!(matches!(nmse(&a, &a, &empty), Err(Error::InvalidArgument(_))));
        let zero = col(&[0.0, 2.0]);
        let m = CorruptionMask::new(vec![true, false], 2, 1).unwrap();
        assert!(matches!(nmse(&zero, &a, &m), Err(Error::UndefinedMetric(_))));
        assert!(matches!(nmse(&a, &col(&[1.0]), &m), Err(Error::ShapeMismatch { .. })));
    }
}
