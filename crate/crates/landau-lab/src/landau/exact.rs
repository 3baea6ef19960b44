//! Closed-form Landau solutions and the quantities derived from them.

use std::f64::consts::PI;
use std::ops::{Add, Div, Mul, Sub};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use super::quadrature::{fibonacci_sphere, gauss_legendre};
use crate::error::{invalid, Error, Result};

/// Arithmetic needed to evaluate the closed forms; implemented for `f64`
/// and for double-double numbers (used by finite-difference stencils).
trait Real: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + From<f64> {
    fn sqrt(self) -> Self;
}

impl Real for f64 {
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
}

impl Real for TwoFloat {
    fn sqrt(self) -> Self {
        TwoFloat::sqrt(self)
    }
}

fn check_c(c: f64) -> Result<()> {
    if c.is_finite() && c.abs() > 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("the Landau parameter needs |c| > 1, got {c}")))
    }
}

fn check_x(x: [f64; 3]) -> Result<()> {
    if x == [0.0; 3] {
        Err(Error::SingularPoint)
    } else {
        Ok(())
    }
}

fn velocity_t<T: Real>(c: f64, x: [T; 3]) -> [T; 3] {
    let c = T::from(c);
    let two = T::from(2.0);
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    let d = c * r - x[0];
    let den = r * d * d;
    let s = c * x[0] - r;
    [two * (c * r * r - two * x[0] * r + c * x[0] * x[0]) / den, two * x[1] * s / den, two * x[2] * s / den]
}

fn pressure_t<T: Real>(c: f64, x: [T; 3]) -> T {
    let c = T::from(c);
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    let d = c * r - x[0];
    T::from(4.0) * (c * x[0] - r) / (r * d * d)
}

/// Landau velocity `v_c(x)`.
pub fn landau_velocity(c: f64, x: [f64; 3]) -> Result<[f64; 3]> {
    check_c(c)?;
    check_x(x)?;
    Ok(velocity_t(c, x))
}

/// Landau pressure `p_c(x)`.
pub fn landau_pressure(c: f64, x: [f64; 3]) -> Result<f64> {
    check_c(c)?;
    check_x(x)?;
    Ok(pressure_t(c, x))
}

/// Magnitude `b(c)` of the point force `(b δ₀, 0, 0)`. Odd in `c`.
pub fn force_parameter(c: f64) -> Result<f64> {
    check_c(c)?;
    let a = c.abs();
    // bracket = 2 + 6c² − 3c(c²−1) ln((c+1)/(c−1)); for large c the direct
    // form cancels catastrophically, so use its series in 1/c².
    let bracket = if a < 4.0 {
        2.0 + 6.0 * a * a - 3.0 * a * (a * a - 1.0) * ((a + 1.0) / (a - 1.0)).ln()
    } else {
        let y = 1.0 / (a * a);
        let mut sum = 6.0;
        let mut p = 1.0;
        for j in 1..60 {
            p *= y;
            let t = 12.0 * p / (((2 * j + 1) * (2 * j + 3)) as f64);
            sum += t;
            if t < 1e-18 * sum {
                break;
            }
        }
        sum
    };
    Ok(c.signum() * 8.0 * PI * a / (3.0 * (a * a - 1.0)) * bracket)
}

/// The analytic weighted bound `2√2/(|c|−1)` on `|x||v_c(x)|`.
pub fn weighted_bound(c: f64) -> Result<f64> {
    check_c(c)?;
    Ok(2.0 * 2f64.sqrt() / (c.abs() - 1.0))
}

/// Sampled supremum of the scale-invariant quantity `|x||v_c(x)|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedSpeed {
    pub sup_estimate: f64,
    pub bound: f64,
}

impl WeightedSpeed {
    pub fn holds(&self) -> bool {
        self.sup_estimate <= self.bound + 1e-9
    }
}

/// Maximum of `|x||v_c(x)|` over `n_samples` quasi-uniform points of the
/// sphere of radius `radius`, together with the analytic bound.
pub fn weighted_speed_bound_on(c: f64, n_samples: usize, radius: f64) -> Result<WeightedSpeed> {
    check_c(c)?;
    if n_samples < 100 {
        return Err(invalid(format!("need at least 100 sphere samples, got {n_samples}")));
    }
    let sup = fibonacci_sphere(n_samples)
        .into_iter()
        .map(|p| {
            let x = p.map(|v| v * radius);
            let v = velocity_t(c, x);
            radius * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
        })
        .fold(0.0, f64::max);
    Ok(WeightedSpeed { sup_estimate: sup, bound: weighted_bound(c)? })
}

pub fn weighted_speed_bound(c: f64, n_samples: usize) -> Result<WeightedSpeed> {
    weighted_speed_bound_on(c, n_samples, 1.0)
}

/// Centered finite-difference residual `−Δv + (v·∇)v + ∇p` of the
/// stationary system at `x`, with stencil arithmetic in double-double so the
/// `O(h²)` truncation error is not masked by cancellation.
pub fn stationary_residual(c: f64, x: [f64; 3], h: f64) -> Result<[f64; 3]> {
    check_c(c)?;
    check_x(x)?;
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    if !(h > 0.0) || h > r / 10.0 {
        return Err(invalid(format!("step h = {h} must lie in (0, |x|/10] = (0, {}]", r / 10.0)));
    }
    let xt = x.map(TwoFloat::from);
    let ht = TwoFloat::from(h);
    let shifted = |j: usize, s: f64| {
        let mut y = xt;
        y[j] = y[j] + ht * TwoFloat::from(s);
        y
    };
    let v0 = velocity_t(c, xt);
    let mut lap = [TwoFloat::from(0.0); 3];
    let mut adv = [TwoFloat::from(0.0); 3];
    let mut gp = [TwoFloat::from(0.0); 3];
    let two_h = ht * TwoFloat::from(2.0);
    let hh = ht * ht;
    for j in 0..3 {
        let (p, m) = (shifted(j, 1.0), shifted(j, -1.0));
        let (vp, vm) = (velocity_t(c, p), velocity_t(c, m));
        for k in 0..3 {
            lap[k] = lap[k] + (vp[k] + vm[k] - TwoFloat::from(2.0) * v0[k]) / hh;
            adv[k] = adv[k] + v0[j] * (vp[k] - vm[k]) / two_h;
        }
        gp[j] = (pressure_t(c, p) - pressure_t(c, m)) / two_h;
    }
    Ok(std::array::from_fn(|k| f64::from(adv[k] + gp[k] - lap[k])))
}

/// Sampled `sup |x|² |∂_j v_c^k(x)|` over the unit sphere, entry `[j][k]`,
/// by centered differences with step `1e-6`.
pub fn gradient_bounds(c: f64, n_samples: usize) -> Result<[[f64; 3]; 3]> {
    check_c(c)?;
    let h = 1e-6;
    let pts = fibonacci_sphere(n_samples.max(100));
    let per: Vec<[[f64; 3]; 3]> = pts
        .par_iter()
        .map(|x| {
            let mut out = [[0.0; 3]; 3];
            for (j, row) in out.iter_mut().enumerate() {
                let mut p = *x;
                let mut m = *x;
                p[j] += h;
                m[j] -= h;
                let (vp, vm) = (velocity_t(c, p), velocity_t(c, m));
                for k in 0..3 {
                    row[k] = ((vp[k] - vm[k]) / (2.0 * h)).abs();
                }
            }
            out
        })
        .collect();
    let mut k = [[0.0f64; 3]; 3];
    for m in per {
        for j in 0..3 {
            for l in 0..3 {
                k[j][l] = k[j][l].max(m[j][l]);
            }
        }
    }
    Ok(k)
}

/// Result of the sphere quadrature of the momentum flux.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentumFlux {
    /// Flux at the requested resolution.
    pub flux: [f64; 3],
    /// Flux with the angular resolution doubled.
    pub refined: [f64; 3],
    /// Set when doubling the resolution moved the result by more than 0.1%.
    pub underresolved: bool,
}

/// Net momentum flux `∫_{|x|=r} [−∂v/∂n + v (v·n) + p n] dS` through the
/// sphere of radius `r`, by Gauss–Legendre quadrature in `cos θ` and the
/// trapezoid rule in `φ`, with `n_quad` nodes in each. The normal derivative
/// is exact: `∂v/∂n = −v/r` by (−1)-homogeneity.
pub fn momentum_flux(c: f64, r: f64, n_quad: usize) -> Result<MomentumFlux> {
    check_c(c)?;
    if !(r > 0.0) {
        return Err(invalid(format!("radius must be positive, got {r}")));
    }
    if n_quad < 32 {
        return Err(invalid(format!("need at least 32 nodes per angular direction, got {n_quad}")));
    }
    let flux = flux_at(c, r, n_quad);
    let refined = flux_at(c, r, 2 * n_quad);
    let scale = refined.iter().map(|v| v.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let change = (0..3).map(|k| (flux[k] - refined[k]).abs()).fold(0.0, f64::max) / scale;
    Ok(MomentumFlux { flux, refined, underresolved: change > 1e-3 })
}

fn flux_at(c: f64, r: f64, n: usize) -> [f64; 3] {
    let (mu, wmu) = gauss_legendre(n);
    let dphi = 2.0 * PI / n as f64;
    let rows: Vec<[f64; 3]> = (0..n)
        .into_par_iter()
        .map(|a| {
            let s = (1.0 - mu[a] * mu[a]).max(0.0).sqrt();
            let mut acc = [0.0; 3];
            for b in 0..n {
                let phi = b as f64 * dphi;
                let nrm = [mu[a], s * phi.cos(), s * phi.sin()];
                let x = nrm.map(|v| v * r);
                let v = velocity_t(c, x);
                let p = pressure_t(c, x);
                let vn = v[0] * nrm[0] + v[1] * nrm[1] + v[2] * nrm[2];
                for k in 0..3 {
                    acc[k] += v[k] / r + v[k] * vn + p * nrm[k];
                }
            }
            acc.map(|v| v * wmu[a] * dphi * r * r)
        })
        .collect();
    let mut out = [0.0; 3];
    for row in rows {
        for k in 0..3 {
            out[k] += row[k];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_values() {
        assert_eq!(landau_velocity(2.0, [1.0, 0.0, 0.0]).unwrap(), [4.0, 0.0, 0.0]);
        assert_eq!(landau_pressure(2.0, [1.0, 0.0, 0.0]).unwrap(), 4.0);
        assert!(landau_pressure(2.0, [-1.0, 0.0, 0.0]).unwrap() < 0.0);
        let v = landau_velocity(3.5, [2.7, 0.0, 0.0]).unwrap();
        assert_eq!((v[1], v[2]), (0.0, 0.0));
    }

    #[test]
    fn domain_errors() {
        assert!(landau_velocity(1.0, [1.0, 0.0, 0.0]).is_err());
        assert!(landau_velocity(0.5, [1.0, 0.0, 0.0]).is_err());
        assert!(matches!(landau_velocity(2.0, [0.0; 3]), Err(Error::SingularPoint)));
        assert!(force_parameter(-1.0).is_err());
        assert!(stationary_residual(2.0, [0.5, 0.0, 0.0], 0.1).is_err());
    }

    #[test]
    fn force_series_matches_direct_form() {
        // At c = 4 both branches are accurate; compare them.
        let c: f64 = 4.0;
        let direct = 8.0 * PI * c / (3.0 * (c * c - 1.0))
            * (2.0 + 6.0 * c * c - 3.0 * c * (c * c - 1.0) * ((c + 1.0) / (c - 1.0)).ln());
        let series = force_parameter(4.0).unwrap();
        assert!((direct - series).abs() < 1e-9 * series);
        assert!((force_parameter(4.0 - 1e-12).unwrap() - series).abs() < 1e-9);
        assert_eq!(force_parameter(-2.5).unwrap(), -force_parameter(2.5).unwrap());
    }

    #[test]
    fn residual_reflection_symmetry() {
        let a = stationary_residual(2.0, [1.0, 0.5, -0.3], 1e-3).unwrap();
        let b = stationary_residual(2.0, [1.0, -0.5, 0.3], 1e-3).unwrap();
        let n = |v: [f64; 3]| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        assert!((n(a) - n(b)).abs() <= 1e-12 * n(a).max(1e-300));
        assert!(n(a) <= 1e-4);
    }
}
