use rayon::prelude::*;

use super::linear_stepper;
use crate::error::{invalid, Result};
use crate::evolution::{shared_background, EvolutionConfig, Mode, State, Stepper, Trajectory};
use crate::inequalities::{lq_of, ConstantsLedger};
use crate::random;
use crate::spectral::{self, Grid, ScalarField};

const SAFETY: f64 = 1.5;

/// `(‖a‖_{C_t L³} + ‖a‖_{L⁴_t L⁶}) / ‖w₀‖₃` for a semigroup trajectory.
/// At least 1, since `a(0) = w₀`.
pub fn linear_ratio(a: &Trajectory) -> f64 {
    (a.sup_l3() + a.l4_l6()) / a.records[0].l3
}

/// `(‖z‖_{C_t L³} + ‖z‖_{L⁴_t L⁶}) / (‖w₁‖_{L⁴_t L⁶} ‖w₂‖_{L⁴_t L⁶})` for
/// `z = N(w₁, w₂)`.
pub fn bilinear_ratio(z: &Trajectory, w1: &Trajectory, w2: &Trajectory) -> f64 {
    (z.sup_l3() + z.l4_l6()) / (w1.l4_l6() * w2.l4_l6())
}

/// `max_{i,j} ‖|x|^{1/3} Δ⁻¹∂_i∂_j f‖₃ / ‖|x|^{1/3} f‖₃`.
pub fn weighted_riesz_ratio(f: &ScalarField) -> Result<f64> {
    let g = *f.grid();
    let weight: Vec<f64> = (0..g.len())
        .map(|i| {
            let x = g.point(i);
            (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).powf(1.0 / 6.0)
        })
        .collect();
    let wnorm = |h: &ScalarField| -> Result<f64> {
        let v = h.physical();
        lq_of(&g, &v.iter().zip(&weight).map(|(a, w)| a.abs() * w).collect::<Vec<_>>(), 3.0)
    };
    let base = wnorm(f)?;
    let mut best = 0.0f64;
    for i in 0..3 {
        for j in i..3 {
            best = best.max(wnorm(&spectral::riesz_double(i, j, f)?)? / base);
        }
    }
    Ok(best)
}

/// Empirical `C1`, `C2`, `C3` for the background in `cfg`: the largest
/// ratio seen over `n_trials` random inputs each, times a 1.5 safety factor.
///
/// Trial `i` draws its data from stream `i` of `seed` (offset per constant),
/// so the ledger depends only on `(grid, cfg, n_trials, seed)`.
pub fn constants_estimate(grid: Grid, n_trials: usize, seed: u64, cfg: &EvolutionConfig) -> Result<ConstantsLedger> {
    if n_trials < 10 {
        return Err(invalid(format!("constants need at least 10 trials, got {n_trials}")));
    }
    let p = cfg.background.ok_or_else(|| invalid("constants are specific to a background; configure one"))?;
    let band = (grid.n() / 8).max(2);
    let bg = shared_background(cfg, grid)?;
    let lin_cfg = cfg.clone().with_mode(Mode::Linear).with_snapshot_every(usize::MAX);
    let quiet = Stepper::with_background(grid, &lin_cfg, bg.clone())?;
    let stored = linear_stepper(grid, cfg, bg)?;
    let data = |stream: u64| random::solenoidal_field(grid, band, &mut random::rng(seed, stream));

    let c1 = (0..n_trials)
        .into_par_iter()
        .map(|i| Ok(linear_ratio(&quiet.run(&State::new(data(i as u64))?)?)))
        .collect::<Result<Vec<f64>>>()?;
    // Sequential: each trial holds three stored trajectories.
    let c2 = (0..n_trials)
        .map(|i| {
            let base = 1_000_000 + 2 * i as u64;
            let w1 = stored.run(&State::new(data(base))?)?;
            let w2 = stored.run(&State::new(data(base + 1))?)?;
            let z = stored.run_forced(&w1, &w2)?;
            Ok(bilinear_ratio(&z, &w1, &w2))
        })
        .collect::<Result<Vec<f64>>>()?;
    let c3 = (0..n_trials)
        .into_par_iter()
        .map(|i| weighted_riesz_ratio(&random::smooth_scalar(grid, band, &mut random::rng(seed, 2_000_000 + i as u64))))
        .collect::<Result<Vec<f64>>>()?;

    let sup = |v: &[f64]| SAFETY * v.iter().cloned().fold(0.0, f64::max);
    let mut ledger = ConstantsLedger::new(p.c)?.with_c1_c2(sup(&c1), sup(&c2));
    ledger.c3 = Some(sup(&c3));
    ledger.k = p.k_aggregate();
    ledger.empirical = true;
    ledger.n_trials = n_trials;
    ledger.seed = seed;
    Ok(ledger)
}
