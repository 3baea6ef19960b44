//! Seeded random test fields.
//!
//! Every generator takes an explicit RNG; [`rng`] derives independent
//! streams from one master seed so that trial `i` of a sweep is the same no
//! matter how many trials run or in which order.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::spectral::{self, Grid, ScalarField, VectorField};

/// Independent stream `stream` of the master `seed`.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// A real, smooth, periodic scalar with modes `|m_axis| ≤ band` and a
/// Gaussian spectral envelope, normalized to unit `L²` norm.
pub fn smooth_scalar(grid: Grid, band: usize, rng: &mut impl Rng) -> ScalarField {
    let c = band_limited(grid, band, rng);
    let f = ScalarField::from_coeffs(grid, c).unwrap().to_physical();
    normalize_scalar(f)
}

/// A smooth divergence-free field with modes `|m_axis| ≤ band` and zero
/// mean, normalized to unit `L²` norm.
pub fn solenoidal_field(grid: Grid, band: usize, rng: &mut impl Rng) -> VectorField {
    let comps = [band_limited(grid, band, rng), band_limited(grid, band, rng), band_limited(grid, band, rng)];
    let v = VectorField::from_coeffs(grid, comps).unwrap();
    // Round-trip through physical space to make the spectrum Hermitian.
    let v = spectral::leray_project(&v.to_physical());
    let mut c = v.into_coeffs();
    for comp in c.iter_mut() {
        comp[0] = Complex64::default();
    }
    let v = VectorField::from_coeffs(grid, c).unwrap().to_physical();
    let n = spectral::l2_spectral(&v);
    v.scaled(1.0 / n)
}

/// A sum of one to four Gaussian bumps centred well inside the box, so the
/// field decays to roundoff before the boundary. Unit `L²` norm.
pub fn localized_scalar(grid: Grid, rng: &mut impl Rng) -> ScalarField {
    let l = grid.l();
    let count = rng.gen_range(1..=4);
    let bumps: Vec<([f64; 3], f64, f64)> = (0..count)
        .map(|_| {
            let c = [0, 1, 2].map(|_| rng.gen_range(-l / 10.0..l / 10.0));
            let w = rng.gen_range(l / 20.0..l / 10.0);
            let a = rng.gen_range(-1.0..1.0);
            (c, w, a)
        })
        .collect();
    let f = ScalarField::from_fn(grid, |x| {
        bumps
            .iter()
            .map(|(c, w, a)| {
                let r2 = (x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2) + (x[2] - c[2]).powi(2);
                a * (-r2 / (2.0 * w * w)).exp()
            })
            .sum()
    });
    normalize_scalar(f)
}

fn normalize_scalar(f: ScalarField) -> ScalarField {
    let h3 = f.grid().cell_volume();
    let n = (f.physical().iter().map(|v| v * v).sum::<f64>() * h3).sqrt();
    f.scaled(1.0 / n)
}

fn band_limited(grid: Grid, band: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    let b = band as f64;
    (0..grid.len())
        .map(|idx| {
            let (i, j, k) = grid.unravel(idx);
            let m = [grid.mode(i), grid.mode(j), grid.mode(k)];
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            if m.iter().any(|&a| a.unsigned_abs() as usize > band || 2 * a.unsigned_abs() as usize >= grid.n()) {
                return Complex64::default();
            }
            let m2 = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]) as f64;
            Complex64::new(re, im) * (-m2 / (b * b)).exp()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible() {
        let g = Grid::new(8, 1.0).unwrap();
        let a = solenoidal_field(g, 2, &mut rng(7, 3));
        let b = solenoidal_field(g, 2, &mut rng(7, 3));
        let c = solenoidal_field(g, 2, &mut rng(7, 4));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn solenoidal_is_divergence_free_and_banded() {
        let g = Grid::new(16, 2.0).unwrap();
        let v = solenoidal_field(g, 3, &mut rng(1, 0));
        assert!(spectral::div_max(&v) < 1e-10);
        assert!((spectral::l2_spectral(&v) - 1.0).abs() < 1e-12);
        let c = v.spectral();
        for idx in 0..g.len() {
            let (i, j, k) = g.unravel(idx);
            if [i, j, k].iter().any(|&a| g.mode(a).abs() > 3) {
                assert!(c[0][idx].norm() < 1e-14);
            }
        }
    }
}
