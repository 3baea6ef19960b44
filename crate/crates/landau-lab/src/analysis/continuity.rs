use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::evolution::{evolve, EvolutionConfig, State, Trajectory};
use crate::inequalities::{lq_norm, lq_of};
use crate::spectral::VectorField;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuityPoint {
    pub magnitude: f64,
    /// `‖δ₀‖₃` of the scaled perturbation.
    pub delta_l3: f64,
    /// `sup_t ‖v − u‖₃`.
    pub sup_z_l3: f64,
    /// The smallest `Ĉ` with `2Ĉ‖δ₀‖₃ exp(Ĉ ∫‖u‖⁴_{L⁶}) ≥ sup_t‖Z‖₃`.
    pub c_hat: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    /// `∫₀ᵀ ‖u‖⁴_{L⁶} dt` of the reference run.
    pub integral_l6: f64,
    pub points: Vec<ContinuityPoint>,
    /// For each pair of successive magnitudes, `(Z ratio)/(δ ratio)`; 1 is
    /// exact linear response.
    pub linearity: Vec<f64>,
    /// Largest `|Ĉ/median − 1|` over the sweep.
    pub c_hat_spread: f64,
    /// The calibrated constant: the smallest `Ĉ` valid across the sweep.
    pub c_hat: f64,
}

/// Solve `2Ĉ δ e^{Ĉ I} = z` for `Ĉ ≥ 0` by bisection; the left side is
/// increasing in `Ĉ`.
pub fn fit_c_hat(delta: f64, z: f64, integral: f64) -> Result<f64> {
    if !(delta > 0.0 && z >= 0.0 && integral >= 0.0) {
        return Err(invalid("Ĉ needs δ > 0, z >= 0 and a nonnegative integral"));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    let f = |c: f64| 2.0 * c * delta * (c * integral).exp() - z;
    let mut hi = 1.0;
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(hi)
}

fn sup_gap(u: &Trajectory, v: &Trajectory) -> Result<f64> {
    let mut best = 0.0f64;
    for (a, b) in u.snapshots.iter().zip(&v.snapshots) {
        best = best.max(lq_of(&u.grid, &b.field.sub(&a.field)?.magnitude(), 3.0)?);
    }
    Ok(best)
}

/// Run `u` from `u0` and `v` from `u0 + m·direction` for each magnitude `m`
/// and compare `sup_t ‖v − u‖₃` with the stability bound.
pub fn continuous_dependence_experiment(
    u0: &VectorField,
    direction: &VectorField,
    magnitudes: &[f64],
    cfg: &EvolutionConfig,
) -> Result<ContinuityReport> {
    if magnitudes.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
        return Err(invalid("perturbation magnitudes must be finite and nonnegative"));
    }
    let u = evolve(&State::new(u0.clone())?, cfg)?;
    let ts = u.times();
    let l6: Vec<f64> = u.snapshots.iter().map(|s| lq_norm(&s.field, 6.0)).collect::<Result<_>>()?;
    let integral_l6: f64 = ts.windows(2).zip(l6.windows(2)).map(|(t, n)| 0.5 * (t[1] - t[0]) * (n[0].powi(4) + n[1].powi(4))).sum();
    let d_l3 = lq_norm(direction, 3.0)?;

    let mut points = Vec::with_capacity(magnitudes.len());
    for &m in magnitudes {
        let v0 = u0.lincomb(1.0, m, direction)?;
        let sup_z_l3 = if m == 0.0 { 0.0 } else { sup_gap(&u, &evolve(&State::new(v0)?, cfg)?)? };
        let delta_l3 = m * d_l3;
        let c_hat = if delta_l3 > 0.0 { fit_c_hat(delta_l3, sup_z_l3, integral_l6)? } else { 0.0 };
        points.push(ContinuityPoint { magnitude: m, delta_l3, sup_z_l3, c_hat });
    }
    let live: Vec<&ContinuityPoint> = points.iter().filter(|p| p.delta_l3 > 0.0).collect();
    let linearity = live.windows(2).map(|w| (w[1].sup_z_l3 / w[0].sup_z_l3) / (w[1].delta_l3 / w[0].delta_l3)).collect();
    let mut cs: Vec<f64> = live.iter().map(|p| p.c_hat).collect();
    cs.sort_by(f64::total_cmp);
    let median = if cs.is_empty() {
        0.0
    } else if cs.len() % 2 == 1 {
        cs[cs.len() / 2]
    } else {
        0.5 * (cs[cs.len() / 2 - 1] + cs[cs.len() / 2])
    };
    let c_hat_spread = if median > 0.0 { cs.iter().map(|c| (c / median - 1.0).abs()).fold(0.0, f64::max) } else { 0.0 };
    let c_hat = cs.last().copied().unwrap_or(0.0);
    Ok(ContinuityReport { integral_l6, points, linearity, c_hat_spread, c_hat })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landau::LandauParams;
    use crate::random;
    use crate::spectral::Grid;

    #[test]
    fn bisection_solves_the_bound() {
        let c = fit_c_hat(0.01, 0.05, 0.3).unwrap();
        assert!((2.0 * c * 0.01 * (c * 0.3f64).exp() - 0.05).abs() < 1e-12);
        assert_eq!(fit_c_hat(0.01, 0.0, 0.3).unwrap(), 0.0);
        assert!(fit_c_hat(0.0, 0.1, 0.3).is_err());
    }

    #[test]
    fn zero_perturbation_and_linear_response() {
        let g = Grid::new(24, 12.0).unwrap();
        let cfg = EvolutionConfig::new(0.02, 0.2).with_background(LandauParams::for_grid(10.0, &g).unwrap()).with_snapshot_every(2);
        let u0 = random::solenoidal_field(g, 3, &mut random::rng(crate::DEFAULT_SEED, 11)).scaled(0.3);
        let d = random::solenoidal_field(g, 3, &mut random::rng(crate::DEFAULT_SEED, 12));
        let r = continuous_dependence_experiment(&u0, &d, &[0.0, 1e-4, 5e-4, 1e-3], &cfg).unwrap();
        assert_eq!(r.points[0].sup_z_l3, 0.0);
        assert!(r.linearity.iter().all(|x| (x - 1.0).abs() < 0.2), "{:?}", r.linearity);
        assert!(r.c_hat_spread < 0.5, "{r:?}");
    }
}
