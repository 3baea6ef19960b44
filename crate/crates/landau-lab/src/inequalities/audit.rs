use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{double_riesz_bound, hardy_ratio, log_sobolev_gap, lq_norm, pointwise_grad_bound_check};
use crate::error::Result;
use crate::random;
use crate::spectral::{self, Grid, ScalarField};

/// Outcome of a randomized inequality audit. `worst_margin` is the smallest
/// observed slack (bound minus measured); negative means a violation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub inequality: String,
    pub n_trials: usize,
    pub worst_margin: f64,
    pub seed: u64,
}

fn worst(margins: Vec<f64>) -> f64 {
    margins.into_iter().fold(f64::INFINITY, f64::min)
}

/// `max_{i,j} ‖Δ⁻¹∂_i∂_j f‖_r / ‖f‖_r`.
pub fn riesz_ratio(f: &ScalarField, r: f64) -> Result<f64> {
    let base = lq_norm(f, r)?;
    let mut best = 0.0f64;
    for i in 0..3 {
        for j in i..3 {
            best = best.max(lq_norm(&spectral::riesz_double(i, j, f)?, r)? / base);
        }
    }
    Ok(best)
}

/// Hardy ratio on localized random bumps; margin `1 − ratio`.
pub fn hardy_audit(grid: Grid, n_trials: usize, seed: u64) -> Result<AuditReport> {
    let margins = (0..n_trials)
        .into_par_iter()
        .map(|i| Ok(1.0 - hardy_ratio(&random::localized_scalar(grid, &mut random::rng(seed, i as u64)))?))
        .collect::<Result<Vec<_>>>()?;
    Ok(AuditReport { inequality: "hardy".into(), n_trials, worst_margin: worst(margins), seed })
}

/// Log-Sobolev gap, normalized by `‖u‖₂²`, over localized random bumps and
/// each scale in `scales`.
pub fn log_sobolev_audit(grid: Grid, scales: &[f64], n_trials: usize, seed: u64) -> Result<AuditReport> {
    let margins = (0..n_trials)
        .into_par_iter()
        .map(|i| {
            let u = random::localized_scalar(grid, &mut random::rng(seed, i as u64));
            scales.iter().map(|&a| log_sobolev_gap(&u, a)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AuditReport {
        inequality: "log_sobolev".into(),
        n_trials,
        worst_margin: worst(margins.into_iter().flatten().collect()),
        seed,
    })
}

/// Empirical double-Riesz ratios against the ledger bound `H_r` on smooth
/// periodic random fields with modes up to `band`.
pub fn riesz_audit(grid: Grid, r: f64, band: usize, n_trials: usize, seed: u64) -> Result<AuditReport> {
    let bound = double_riesz_bound(r)?;
    let margins = (0..n_trials)
        .into_par_iter()
        .map(|i| Ok(bound - riesz_ratio(&random::smooth_scalar(grid, band, &mut random::rng(seed, i as u64)), r)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(AuditReport { inequality: format!("double_riesz_r{r}"), n_trials, worst_margin: worst(margins), seed })
}

/// Pointwise `|∇|u|²|² ≤ 4|∇u|²|u|²` on random fields with modes up to
/// `band` (keep `band ≤ n/4` so `|u|²` is resolved exactly); margin is minus
/// the largest violation.
pub fn grad_bound_audit(grid: Grid, band: usize, n_trials: usize, seed: u64) -> Result<AuditReport> {
    let margins: Vec<f64> = (0..n_trials)
        .into_par_iter()
        .map(|i| -pointwise_grad_bound_check(&random::solenoidal_field(grid, band, &mut random::rng(seed, i as u64))))
        .collect();
    Ok(AuditReport { inequality: "pointwise_gradient".into(), n_trials, worst_margin: worst(margins), seed })
}
