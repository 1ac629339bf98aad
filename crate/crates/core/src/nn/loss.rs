use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sparsity regularization on mean hidden activations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LossConfig {
    /// Penalty weight β; zero disables the term.
    pub sparsity_weight: f64,
    /// Target mean activation ρ_s.
    pub sparsity_target: f64,
}

impl Default for LossConfig {
    fn default() -> Self {
        Self {
            sparsity_weight: 1e-3,
            sparsity_target: 0.05,
        }
    }
}

impl LossConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sparsity_weight >= 0.0 && self.sparsity_weight.is_finite()) {
            return Err(Error::Config(format!("sparsity_weight must be >= 0, got {}", self.sparsity_weight)));
        }
        if !(self.sparsity_target > 0.0 && self.sparsity_target < 1.0) {
            return Err(Error::Config(format!(
                "sparsity_target must lie in (0, 1), got {}",
                self.sparsity_target
            )));
        }
        Ok(())
    }
}

const CLAMP: f64 = 1e-6;

/// Mean of squared entrywise differences.
pub fn reconstruction_loss(x: &[f64], z: &[f64]) -> Result<f64> {
    if x.len() != z.len() {
        return Err(Error::shape(x.len(), z.len()));
    }
    if x.is_empty() {
        return Ok(0.0);
    }
    Ok(x.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / x.len() as f64)
}

/// `∂ loss / ∂z`, accumulated into `dz` with an extra `scale` factor.
pub fn reconstruction_loss_grad(target: &[f64], z: &[f64], scale: f64, dz: &mut [f64]) {
    let k = 2.0 * scale / target.len() as f64;
    for ((d, &t), &v) in dz.iter_mut().zip(target).zip(z) {
        *d += k * (v - t);
    }
}

fn kl(target: f64, mean: f64) -> f64 {
    target * (target / mean).ln() + (1.0 - target) * ((1.0 - target) / (1.0 - mean)).ln()
}

fn batch_means(hidden: &[Vec<f64>]) -> Vec<f64> {
    let units = hidden.first().map_or(0, Vec::len);
    let mut means = vec![0.0; units];
    for h in hidden {
        for (m, &v) in means.iter_mut().zip(h) {
            *m += v;
        }
    }
    means.iter_mut().for_each(|m| *m /= hidden.len() as f64);
    means
}

/// `β · Σ_j KL(ρ_s ‖ ρ̂_j)` over the batch-mean activation `ρ̂_j` of each
/// hidden unit, with `ρ̂_j` clamped to `[1e-6, 1 - 1e-6]`.
pub fn sparsity_penalty(hidden: &[Vec<f64>], cfg: &LossConfig) -> f64 {
    if cfg.sparsity_weight == 0.0 || hidden.is_empty() {
        return 0.0;
    }
    cfg.sparsity_weight
        * batch_means(hidden)
            .into_iter()
            .map(|m| kl(cfg.sparsity_target, m.clamp(CLAMP, 1.0 - CLAMP)))
            .sum::<f64>()
}

/// `∂ penalty / ∂h_bj`, identical for every sample `b` of the batch.
/// Units whose mean sits on a clamp bound get zero.
pub fn sparsity_grad(hidden: &[Vec<f64>], cfg: &LossConfig) -> Vec<f64> {
    let means = batch_means(hidden);
    if cfg.sparsity_weight == 0.0 || hidden.is_empty() {
        return vec![0.0; means.len()];
    }
    let (rho, scale) = (cfg.sparsity_target, cfg.sparsity_weight / hidden.len() as f64);
    means
        .into_iter()
        .map(|m| {
            if m <= CLAMP || m >= 1.0 - CLAMP {
                0.0
            } else {
                scale * (-rho / m + (1.0 - rho) / (1.0 - m))
            }
        })
        .collect()
}
