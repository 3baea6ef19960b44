use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::evolution::{evolve, EvolutionConfig, State, Trajectory};
use crate::spectral::{self, Grid, VectorField};

/// `E(t) = sup_{s≤t} ‖g(s)‖₂² + ∫₀ᵗ ‖∇g‖₂²` for one resolution pair, at the
/// shared snapshot times.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapCurve {
    pub coarse: usize,
    pub fine: usize,
    pub t: Vec<f64>,
    pub e: Vec<f64>,
}

impl GapCurve {
    pub fn final_gap(&self) -> f64 {
        *self.e.last().unwrap_or(&0.0)
    }
}

/// Run `w0` at every resolution named in `pairs` (same box, same `dt`) and
/// measure the gap between each coarse run, spectrally injected, and the
/// fine one. `w0` is injected onto each grid, so all runs start from the
/// same band-limited data. The background parameters in `cfg` must be set
/// explicitly so every resolution samples the same problem.
pub fn weak_strong_experiment(w0: &VectorField, pairs: &[(usize, usize)], cfg: &EvolutionConfig) -> Result<Vec<GapCurve>> {
    let base = *w0.grid();
    if let Some(p) = pairs.iter().find(|(a, b)| a > b || *a < base.n()) {
        return Err(invalid(format!("resolution pair {p:?} must be ordered and no coarser than the data grid ({})", base.n())));
    }
    let mut runs: BTreeMap<usize, Trajectory> = BTreeMap::new();
    for n in pairs.iter().flat_map(|(a, b)| [*a, *b]) {
        if runs.contains_key(&n) {
            continue;
        }
        let g = Grid::with_dealias(n, base.l(), base.dealias_fraction())?;
        let data = spectral::inject(w0, g)?.to_physical();
        runs.insert(n, evolve(&State::new(data)?, cfg)?);
    }
    pairs.iter().map(|&(a, b)| gap_curve(&runs[&a], &runs[&b])).collect()
}

fn gap_curve(coarse: &Trajectory, fine: &Trajectory) -> Result<GapCurve> {
    if coarse.snapshots.len() != fine.snapshots.len() {
        return Err(invalid("runs in a pair must share their snapshot times"));
    }
    let mut t = Vec::with_capacity(fine.snapshots.len());
    let mut e = Vec::with_capacity(fine.snapshots.len());
    let (mut sup, mut integral, mut prev): (f64, f64, Option<(f64, f64)>) = (0.0, 0.0, None);
    for (c, f) in coarse.snapshots.iter().zip(&fine.snapshots) {
        let g = if coarse.grid == fine.grid {
            c.field.sub(&f.field)?
        } else {
            spectral::inject(&c.field, fine.grid)?.sub(&f.field.to_spectral())?
        };
        let l2 = spectral::l2_spectral(&g);
        let dg = spectral::grad_l2(&g);
        sup = sup.max(l2 * l2);
        if let Some((t0, d0)) = prev {
            integral += 0.5 * (f.t - t0) * (d0 + dg * dg);
        }
        prev = Some((f.t, dg * dg));
        t.push(f.t);
        e.push(sup + integral);
    }
    Ok(GapCurve { coarse: coarse.grid.n(), fine: fine.grid.n(), t, e })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landau::LandauParams;
    use crate::random;

    #[test]
    fn identical_resolutions_have_no_gap_and_curves_grow() {
        let g = Grid::new(24, 12.0).unwrap();
        let cfg = EvolutionConfig::new(0.02, 0.1).with_background(LandauParams::for_grid(10.0, &g).unwrap());
        let w0 = random::solenoidal_field(g, 3, &mut random::rng(crate::DEFAULT_SEED, 9)).scaled(0.3);
        let curves = weak_strong_experiment(&w0, &[(24, 24), (24, 32)], &cfg).unwrap();
        assert!(curves[0].e.iter().all(|&e| e == 0.0));
        assert!(curves[1].final_gap() > 0.0);
        assert!(curves[1].e.windows(2).all(|w| w[1] >= w[0]));
        assert!(weak_strong_experiment(&w0, &[(32, 24)], &cfg).is_err());
    }
}
