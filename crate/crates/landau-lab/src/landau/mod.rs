//! Landau's explicit stationary solutions and their periodic surrogate.
//!
//! For `|c| > 1` the Landau solution `(v_c, p_c)` is an exact,
//! (−1)-homogeneous, axisymmetric solution of the stationary Navier–Stokes
//! system driven by the point force `(b(c) δ₀, 0, 0)`. On the periodic box we
//! use a solenoidal truncation of it — smooth near the origin, windowed to
//! zero before the box boundary — together with the body force that makes
//! the truncation an exact discrete steady state.

mod background;
mod exact;
pub mod quadrature;

use serde::{Deserialize, Serialize};

pub use background::{truncated_background, TruncatedBackground};
pub use exact::{
    force_parameter, gradient_bounds, landau_pressure, landau_velocity, momentum_flux, stationary_residual,
    weighted_bound, weighted_speed_bound, weighted_speed_bound_on, MomentumFlux, WeightedSpeed,
};

use crate::error::{invalid, Result};
use crate::spectral::Grid;

/// Parameters of a Landau background on a box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LandauParams {
    pub c: f64,
    /// Force magnitude `b(c)`.
    pub b: f64,
    /// Weighted bound `2√2/(|c|−1)`.
    pub k_c: f64,
    /// Sampled `sup |x|²|∂_j v^k|`, if estimated.
    pub kjk: Option<[[f64; 3]; 3]>,
    /// Core radius below which the field is smoothed out.
    pub delta: f64,
    /// The window is 1 inside `r_in` and 0 outside `r_out`.
    pub r_in: f64,
    pub r_out: f64,
}

impl LandauParams {
    pub fn new(c: f64, delta: f64, r_in: f64, r_out: f64) -> Result<Self> {
        let b = force_parameter(c)?;
        let k_c = weighted_bound(c)?;
        if !(delta > 0.0 && delta < r_in && r_in < r_out) {
            return Err(invalid(format!("need 0 < delta < r_in < r_out, got {delta}, {r_in}, {r_out}")));
        }
        Ok(Self { c, b, k_c, kjk: None, delta, r_in, r_out })
    }

    /// Defaults for a grid: `δ = 4h`, `R_in = L/4`, `R_out = 0.45 L`.
    pub fn for_grid(c: f64, grid: &Grid) -> Result<Self> {
        Self::new(c, 4.0 * grid.h(), 0.25 * grid.l(), 0.45 * grid.l())
    }

    /// Attach sampled gradient bounds.
    pub fn with_gradient_bounds(mut self, n_samples: usize) -> Result<Self> {
        self.kjk = Some(gradient_bounds(self.c, n_samples)?);
        Ok(self)
    }

    /// `K(c) = 12 max_{j,k} K_{j,k}(c)`, when the bounds are attached.
    pub fn k_aggregate(&self) -> Option<f64> {
        self.kjk.map(|m| 12.0 * m.iter().flatten().fold(0.0f64, |a, &b| a.max(b)))
    }

    /// Check that the window fits the box and the grid resolves the core and
    /// the window ramp with at least four cells each.
    pub fn validate_for(&self, grid: &Grid) -> Result<()> {
        if self.r_out > 0.5 * grid.l() * (1.0 + 1e-12) {
            return Err(invalid(format!("window radius {} exceeds half the box {}", self.r_out, 0.5 * grid.l())));
        }
        let min = 4.0 * grid.h() * (1.0 - 1e-12);
        if self.delta < min || self.r_out - self.r_in < min {
            return Err(crate::Error::UnderResolved(format!(
                "core {} and window ramp {} must each span 4 cells of width {}",
                self.delta,
                self.r_out - self.r_in,
                grid.h()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_invariants() {
        let g = Grid::new(32, 8.0).unwrap();
        let p = LandauParams::for_grid(3.0, &g).unwrap();
        assert_eq!(p.k_c, 2.0 * 2f64.sqrt() / 2.0);
        p.validate_for(&g).unwrap();
        assert!(LandauParams::new(3.0, 1.0, 0.5, 2.0).is_err());
        let coarse = Grid::new(8, 8.0).unwrap();
        assert!(matches!(p.validate_for(&coarse), Err(crate::Error::UnderResolved(_))));
        assert!(LandauParams::new(3.0, 0.5, 1.0, 4.5).unwrap().validate_for(&g).is_err());
    }
}
