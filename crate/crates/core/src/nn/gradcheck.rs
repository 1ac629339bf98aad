//! Central finite differences over every parameter of a [`ParamSet`].
//!
//! Only the loss closure is evaluated; no analytic derivative is used.

use super::ParamSet;

/// Numerical gradient of `loss` at `params`, one central difference
/// `(L(θ + h e_k) − L(θ − h e_k)) / 2h` per entry.
pub fn numerical_gradient<P, F>(params: &P, step: f64, mut loss: F) -> P
where
    P: ParamSet,
    F: FnMut(&P) -> f64,
{
    let mut out = params.zeroed();
    let mut probe = params.clone();
    let counts: Vec<usize> = params.tensors().iter().map(|t| t.len()).collect();
    for (ti, &len) in counts.iter().enumerate() {
        for k in 0..len {
            let original = probe.tensors()[ti][k];
            probe.tensors_mut()[ti][k] = original + step;
            let plus = loss(&probe);
            probe.tensors_mut()[ti][k] = original - step;
            let minus = loss(&probe);
            probe.tensors_mut()[ti][k] = original;
            out.tensors_mut()[ti][k] = (plus - minus) / (2.0 * step);
        }
    }
    out
}

/// Worst entry of `|a − n| / max(|a|, |n|, floor)`.
///
/// The floor keeps entries whose true gradient is ~0 from dividing
/// rounding noise by rounding noise.
pub fn max_relative_error<P: ParamSet>(analytic: &P, numeric: &P, floor: f64) -> f64 {
    analytic
        .flatten()
        .iter()
        .zip(numeric.flatten())
        .map(|(&a, n)| (a - n).abs() / a.abs().max(n.abs()).max(floor))
        .fold(0.0, f64::max)
}
