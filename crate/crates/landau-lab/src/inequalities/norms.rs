use rayon::prelude::*;

use super::zeta::lattice_zeta;
use crate::error::{invalid, Result};
use crate::spectral::{self, Grid, ScalarField, VectorField};

/// A field whose pointwise magnitude can be integrated on its grid.
pub trait Sampled {
    fn grid(&self) -> &Grid;
    /// `|f(x)|` at every node (Euclidean length for vector fields).
    fn magnitudes(&self) -> Vec<f64>;
}

impl Sampled for ScalarField {
    fn grid(&self) -> &Grid {
        ScalarField::grid(self)
    }

    fn magnitudes(&self) -> Vec<f64> {
        self.physical().iter().map(|v| v.abs()).collect()
    }
}

impl Sampled for VectorField {
    fn grid(&self) -> &Grid {
        VectorField::grid(self)
    }

    fn magnitudes(&self) -> Vec<f64> {
        self.magnitude()
    }
}

/// `(∫|f|^q)^{1/q}` by the midpoint rule; `q = ∞` gives the max norm.
pub fn lq_norm(f: &impl Sampled, q: f64) -> Result<f64> {
    lq_of(f.grid(), &f.magnitudes(), q)
}

pub(crate) fn lq_of(grid: &Grid, mags: &[f64], q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(invalid(format!("L^q norms need q >= 1, got {q}")));
    }
    let m = mags.par_iter().cloned().reduce(|| 0.0, f64::max);
    if q.is_infinite() || m == 0.0 {
        return Ok(m);
    }
    let s = crate::par::psum(mags.len(), |i| (mags[i] / m).powf(q));
    Ok(m * (s * grid.cell_volume()).powf(1.0 / q))
}

/// `(∫ |f|²/|x|^{2α})^{1/2}` with `|x|` the distance to the box centre.
///
/// The weight is singular at the centre node. Writing `F = |f|²`, the
/// punctured-lattice sum is corrected by the lattice-zeta terms
/// `−h^{3−2α} Z(α) F(0) − h^{5−2α} Z(α−1) ΔF(0)/6`, which remove the
/// leading quadrature errors for fields smooth at the centre (the second
/// term is applied for `α ≥ 1`). Requires `0 < α < 3/2`.
pub fn weighted_norm(f: &impl Sampled, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.5) {
        return Err(invalid(format!("weight exponent must lie in (0, 3/2), got {alpha}")));
    }
    let g = *f.grid();
    let mags = f.magnitudes();
    let centre = g.center_index();
    let s = crate::par::psum(mags.len(), |idx| {
        if idx == centre {
            return 0.0;
        }
        let x = g.point(idx);
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        mags[idx] * mags[idx] / r2.powf(alpha)
    });
    let h = g.h();
    let f0 = mags[centre].powi(2);
    let mut corrected = s * g.cell_volume() - h.powf(3.0 - 2.0 * alpha) * lattice_zeta(alpha) * f0;
    if alpha >= 1.0 {
        let m = g.n() / 2;
        let neighbours: f64 = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
            .iter()
            .map(|&(a, b, c)| {
                mags[g.index(m + a, m + b, m + c)].powi(2) + mags[g.index(m - a, m - b, m - c)].powi(2)
            })
            .sum();
        let lap = (neighbours - 6.0 * f0) / (h * h);
        let z = if alpha == 1.0 { -1.0 } else { lattice_zeta(alpha - 1.0) };
        corrected -= h.powf(5.0 - 2.0 * alpha) * z * lap / 6.0;
    }
    Ok(corrected.max(0.0).sqrt())
}

/// `‖f/|x|‖₂ / (2‖∇f‖₂)`, at most 1 by Hardy's inequality.
pub fn hardy_ratio(f: &ScalarField) -> Result<f64> {
    let grad = spectral::grad_l2(&scalar_as_vector(f));
    if grad == 0.0 {
        return Err(invalid("Hardy ratio undefined: the gradient vanishes identically"));
    }
    Ok(weighted_norm(f, 1.0)? / (2.0 * grad))
}

/// `(a²/π)‖∇u‖² − 2∫|u|² ln(|u|/‖u‖) − 3(1 + ln a)‖u‖²`, nonnegative by the
/// sharp logarithmic Sobolev inequality for fields decaying inside the box.
pub fn log_sobolev_gap(u: &ScalarField, a: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(invalid(format!("log-Sobolev scale must be positive, got {a}")));
    }
    let g = *u.grid();
    let vals = u.physical();
    let norm2 = crate::par::psum(vals.len(), |i| vals[i] * vals[i]) * g.cell_volume();
    if norm2 == 0.0 {
        return Err(invalid("log-Sobolev gap undefined for the zero field"));
    }
    let norm = norm2.sqrt();
    let entropy = crate::par::psum(vals.len(), |i| {
        let m = vals[i].abs();
        if m == 0.0 {
            0.0
        } else {
            m * m * (m / norm).ln()
        }
    }) * g.cell_volume();
    let grad2 = spectral::grad_l2(&scalar_as_vector(u)).powi(2);
    Ok(a * a / std::f64::consts::PI * grad2 - 2.0 * entropy - 3.0 * (1.0 + a.ln()) * norm2)
}

/// `‖∇(|w|^{p/2})‖₂`, forming `|w|^{p/2}` in physical space and
/// differentiating spectrally.
pub fn grad_power_norm(w: &VectorField, p: f64) -> Result<f64> {
    if !(p >= 2.0) {
        return Err(invalid(format!("gradient power needs p >= 2, got {p}")));
    }
    let g = *w.grid();
    let pow: Vec<f64> = w.magnitude().into_par_iter().map(|m| m.powf(p / 2.0)).collect();
    Ok(spectral::grad_l2(&scalar_as_vector(&ScalarField::from_values(g, pow)?)))
}

/// `max_x ( |∇|u|²|² − 4 |∇u|² |u|² )`, with spectral derivatives.
pub fn pointwise_grad_bound_check(u: &VectorField) -> f64 {
    let g = *u.grid();
    let v = u.physical();
    let sq = ScalarField::from_values(g, spectral::dot(&v, &v)).unwrap();
    let dsq = spectral::gradient(&sq).into_components();
    let grads: Vec<[Vec<f64>; 3]> = (0..3).map(|c| spectral::gradient(&u.component(c)).into_components()).collect();
    (0..g.len())
        .into_par_iter()
        .map(|i| {
            let lhs = dsq[0][i].powi(2) + dsq[1][i].powi(2) + dsq[2][i].powi(2);
            let du2: f64 = grads.iter().map(|gc| gc[0][i].powi(2) + gc[1][i].powi(2) + gc[2][i].powi(2)).sum();
            let u2 = v[0][i].powi(2) + v[1][i].powi(2) + v[2][i].powi(2);
            lhs - 4.0 * du2 * u2
        })
        .reduce(|| f64::NEG_INFINITY, f64::max)
}

/// Wrap a scalar as the first component of a vector so vector helpers apply.
fn scalar_as_vector(f: &ScalarField) -> VectorField {
    let g = *f.grid();
    let c = f.spectral().into_owned();
    let z = vec![num_complex::Complex64::default(); g.len()];
    VectorField::from_coeffs(g, [c, z.clone(), z]).unwrap()
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn gaussian(g: Grid) -> ScalarField {
        ScalarField::from_fn(g, |x| (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 2.0).exp())
    }

    #[test]
    fn lq_examples() {
        let g = Grid::new(16, 2.0).unwrap();
        let one = ScalarField::from_fn(g, |_| 1.5);
        assert!((lq_norm(&one, 3.0).unwrap() - 1.5 * 8f64.powf(1.0 / 3.0)).abs() < 1e-13);
        assert!(lq_norm(&one, 0.5).is_err());
        assert_eq!(lq_norm(&one, f64::INFINITY).unwrap(), 1.5);
        let big = Grid::new(48, 16.0).unwrap();
        assert!((lq_norm(&gaussian(big), 2.0).unwrap() - PI.powf(0.75)).abs() < 1e-6);
    }

    #[test]
    fn weighted_norm_away_from_centre_is_plain_quadrature() {
        let g = Grid::new(16, 4.0).unwrap();
        let f = ScalarField::from_fn(g, |x| {
            let r2 = (x[0] - 1.0).powi(2) + x[1] * x[1] + x[2] * x[2];
            if r2 < 0.5 {
                (1.0 - 2.0 * r2).powi(3)
            } else {
                0.0
            }
        });
        let direct: f64 = (0..g.len())
            .filter(|&i| i != g.center_index())
            .map(|i| {
                let x = g.point(i);
                f.values().unwrap()[i].powi(2) / (x[0] * x[0] + x[1] * x[1] + x[2] * x[2])
            })
            .sum::<f64>()
            * g.cell_volume();
        assert!((weighted_norm(&f, 1.0).unwrap() - direct.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn gaussian_weighted_norm() {
        let g = Grid::new(64, 16.0).unwrap();
        let w = weighted_norm(&gaussian(g), 1.0).unwrap();
        assert!((w - (2.0 * PI.powf(1.5)).sqrt()).abs() < 1e-3);
        assert!((hardy_ratio(&gaussian(g)).unwrap() - 1.0 / 3f64.sqrt()).abs() < 1e-4);
    }

    #[test]
    fn log_sobolev_homogeneity() {
        let g = Grid::new(32, 12.0).unwrap();
        let u = gaussian(g);
        let a = log_sobolev_gap(&u, 1.3).unwrap();
        let b = log_sobolev_gap(&u.scaled(3.0), 1.3).unwrap();
        assert!((b - 9.0 * a).abs() < 1e-10 * b.abs().max(1.0));
    }

    #[test]
    fn grad_bound_equality_for_one_component() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let u = VectorField::from_fn(g, |x| [x[0].sin() + 0.3 * (x[1] + x[2]).cos(), 0.0, 0.0]);
        assert!(pointwise_grad_bound_check(&u).abs() < 1e-8);
        let c = VectorField::from_fn(g, |_| [1.0, -2.0, 0.5]);
        assert!(pointwise_grad_bound_check(&c).abs() < 1e-20);
    }
}
