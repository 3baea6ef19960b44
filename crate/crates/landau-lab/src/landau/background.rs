use rayon::prelude::*;

use super::LandauParams;
use crate::error::Result;
use crate::spectral::{self, Grid, ScalarField, VectorField};

/// A Landau background sampled on a box, with the body force that makes it
/// an exact discrete steady state.
#[derive(Clone, Debug)]
pub struct TruncatedBackground {
    pub params: LandauParams,
    /// Solenoidal, band-limited velocity in physical representation.
    pub velocity: VectorField,
    /// `−Δ⁻¹∂_i∂_j(V_i V_j)`.
    pub pressure: ScalarField,
    /// `−ΔV + P div(V ⊗ V)` in spectral representation.
    pub compensation: VectorField,
}

impl TruncatedBackground {
    pub fn grid(&self) -> &Grid {
        self.velocity.grid()
    }

    pub fn max_speed(&self) -> f64 {
        self.velocity.max_abs()
    }
}

/// Radial profile `m(r) = W(r) (1 − e^{−(r/δ)⁴})` and its derivative.
fn profile(p: &LandauParams, r: f64) -> (f64, f64) {
    let s = (r / p.delta).powi(4);
    let core = 1.0 - (-s).exp();
    let dcore = 4.0 * s / r * (-s).exp();
    let (w, dw) = if r <= p.r_in {
        (1.0, 0.0)
    } else if r >= p.r_out {
        (0.0, 0.0)
    } else {
        let span = p.r_out - p.r_in;
        let t = (r - p.r_in) / span;
        let w = 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
        let dw = -30.0 * t * t * (1.0 - t) * (1.0 - t) / span;
        (w, dw)
    };
    (w * core, dw * core + w * dcore)
}

impl LandauParams {
    /// The truncated field before grid sampling: the curl of `m(r) A_c`,
    /// where `A_c = 2(0, −x₃, x₂)/(c|x| − x₁)` is a vector potential of `v_c`.
    /// It is divergence-free everywhere, vanishes at the origin and outside
    /// `r_out`, and equals `v_c` where `m ≡ 1`.
    pub fn windowed_velocity(&self, x: [f64; 3]) -> [f64; 3] {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        if r == 0.0 || r >= self.r_out {
            return [0.0; 3];
        }
        let (m, dm) = profile(self, r);
        let v = super::exact::landau_velocity(self.c, x).unwrap();
        let d = self.c * r - x[0];
        // x̂ × A_c
        let cross = [
            2.0 * (x[1] * x[1] + x[2] * x[2]) / (r * d),
            -2.0 * x[0] * x[1] / (r * d),
            -2.0 * x[0] * x[2] / (r * d),
        ];
        std::array::from_fn(|k| m * v[k] + dm * cross[k])
    }
}

/// Sample the truncated Landau field on `grid`, clean it spectrally (Leray
/// projection and dealiasing) and compute its pressure and compensation force.
pub fn truncated_background(params: &LandauParams, grid: Grid) -> Result<TruncatedBackground> {
    params.validate_for(&grid)?;
    let raw = VectorField::from_fn(grid, |x| params.windowed_velocity(x));
    let velocity = spectral::dealias(&spectral::leray_project(&raw)).to_physical();

    let v = velocity.values().unwrap();
    // V ⊗ V, symmetric
    let prod = |a: usize, b: usize| -> Vec<f64> { v[a].par_iter().zip(v[b].par_iter()).map(|(x, y)| x * y).collect() };
    let t = [prod(0, 0), prod(1, 1), prod(2, 2), prod(0, 1), prod(0, 2), prod(1, 2)];

    let mut pressure = ScalarField::zeros(grid).to_spectral();
    let pairs = [(0, 0, 0), (1, 1, 1), (2, 2, 2), (0, 1, 3), (0, 2, 4), (1, 2, 5)];
    for &(i, j, s) in &pairs {
        let weight = if i == j { -1.0 } else { -2.0 };
        let tij = ScalarField::from_values(grid, t[s].clone())?;
        pressure = pressure.lincomb(1.0, weight, &spectral::riesz_double(i, j, &tij)?)?;
    }

    let mut div = spectral::div_symmetric(&grid, &t);
    spectral::project_in_place(&grid, &mut div);
    let nonlinear = VectorField::from_coeffs(grid, div)?;
    let compensation = nonlinear.lincomb(1.0, -1.0, &spectral::laplacian(&velocity))?;

    Ok(TruncatedBackground { params: *params, velocity, pressure: pressure.to_physical(), compensation })
}
