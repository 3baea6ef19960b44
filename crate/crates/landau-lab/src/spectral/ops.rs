use num_complex::Complex64;
use rayon::prelude::*;

use super::field::inverse3;
use super::{fft, Grid, ScalarField, VectorField};
use crate::error::{invalid, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn map_coeffs(grid: &Grid, c: &[Complex64], f: impl Fn(usize, Complex64) -> Complex64 + Sync) -> Vec<Complex64> {
    debug_assert_eq!(c.len(), grid.len());
    c.par_iter().enumerate().map(|(idx, &z)| f(idx, z)).collect()
}

pub fn gradient(f: &ScalarField) -> VectorField {
    let g = *f.grid();
    let c = f.spectral();
    let comps = std::array::from_fn(|d| map_coeffs(&g, &c, |idx, z| I * g.kvec(idx)[d] * z));
    VectorField::from_coeffs(g, comps).unwrap()
}

pub fn divergence(v: &VectorField) -> ScalarField {
    let g = *v.grid();
    let c = v.spectral();
    let out = (0..g.len())
        .into_par_iter()
        .map(|idx| {
            let k = g.kvec(idx);
            I * (k[0] * c[0][idx] + k[1] * c[1][idx] + k[2] * c[2][idx])
        })
        .collect();
    ScalarField::from_coeffs(g, out).unwrap()
}

pub fn curl(v: &VectorField) -> VectorField {
    let g = *v.grid();
    let c = v.spectral();
    // ∂_a v_b − ∂_b v_a
    let comp = |a: usize, b: usize| -> Vec<Complex64> {
        (0..g.len())
            .into_par_iter()
            .map(|idx| {
                let k = g.kvec(idx);
                I * (k[a] * c[b][idx] - k[b] * c[a][idx])
            })
            .collect()
    };
    VectorField::from_coeffs(g, [comp(1, 2), comp(2, 0), comp(0, 1)]).unwrap()
}

pub fn laplacian_scalar(f: &ScalarField) -> ScalarField {
    let g = *f.grid();
    ScalarField::from_coeffs(g, map_coeffs(&g, &f.spectral(), |idx, z| -g.k2(idx) * z)).unwrap()
}

pub fn laplacian(v: &VectorField) -> VectorField {
    let g = *v.grid();
    let c = v.spectral();
    VectorField::from_coeffs(g, std::array::from_fn(|d| map_coeffs(&g, &c[d], |idx, z| -g.k2(idx) * z))).unwrap()
}

/// Leray projection `P = I − k kᵀ/|k|²` onto divergence-free fields. The
/// mean (k = 0) is left unchanged.
pub fn leray_project(v: &VectorField) -> VectorField {
    let g = *v.grid();
    let mut c = v.spectral().into_owned();
    project_in_place(&g, &mut c);
    VectorField::from_coeffs(g, c).unwrap()
}

pub(crate) fn project_in_place(g: &Grid, c: &mut [Vec<Complex64>; 3]) {
    let [a, b, d] = c;
    a.par_iter_mut().zip(b.par_iter_mut()).zip(d.par_iter_mut()).enumerate().for_each(|(idx, ((x, y), z))| {
        let k = g.kvec(idx);
        let kk = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if kk > 0.0 {
            let s = (k[0] * *x + k[1] * *y + k[2] * *z) / kk;
            *x -= k[0] * s;
            *y -= k[1] * s;
            *z -= k[2] * s;
        }
    });
}

/// The multiplier `k_i k_j / |k|²`, the symbol of `Δ⁻¹ ∂_i ∂_j`.
/// Axis indices are 0-based.
pub fn riesz_double(i: usize, j: usize, f: &ScalarField) -> Result<ScalarField> {
    if i > 2 || j > 2 {
        return Err(invalid(format!("axis indices must be 0, 1 or 2, got ({i}, {j})")));
    }
    let g = *f.grid();
    let out = map_coeffs(&g, &f.spectral(), |idx, z| {
        let k = g.kvec(idx);
        let kk = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if kk > 0.0 {
            z * (k[i] * k[j] / kk)
        } else {
            Complex64::default()
        }
    });
    ScalarField::from_coeffs(g, out)
}

/// Zero every mode outside the dealiasing band.
pub fn dealias(v: &VectorField) -> VectorField {
    let g = *v.grid();
    let mut c = v.spectral().into_owned();
    for comp in c.iter_mut() {
        mask_in_place(&g, comp);
    }
    VectorField::from_coeffs(g, c).unwrap()
}

pub fn dealias_scalar(f: &ScalarField) -> ScalarField {
    let g = *f.grid();
    let mut c = f.spectral().into_owned();
    mask_in_place(&g, &mut c);
    ScalarField::from_coeffs(g, c).unwrap()
}

pub(crate) fn mask_in_place(g: &Grid, c: &mut [Complex64]) {
    c.par_iter_mut().enumerate().for_each(|(idx, z)| {
        if !g.kept_index(idx) {
            *z = Complex64::default();
        }
    });
}

/// Exact heat flow `e^{τΔ}`.
pub fn heat_propagate(v: &VectorField, tau: f64) -> Result<VectorField> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(invalid(format!("heat propagation time must be nonnegative, got {tau}")));
    }
    let g = *v.grid();
    let c = v.spectral();
    VectorField::from_coeffs(g, std::array::from_fn(|d| map_coeffs(&g, &c[d], |idx, z| (-g.k2(idx) * tau).exp() * z)))
}

/// Dealiased `div(u ⊗ w)`, i.e. the vector `∂_j (u_j w_i)`. Equals
/// `(u·∇)w` when `u` is divergence-free.
pub fn advect(u: &VectorField, w: &VectorField) -> Result<VectorField> {
    u.grid().same_as(w.grid())?;
    let g = *u.grid();
    let (u, w) = (u.physical(), w.physical());
    Ok(VectorField::from_coeffs(g, div_outer(&g, &[(&u, &w)])).unwrap())
}

/// Spectral `Σ_pairs ∂_j (a_j b_i)` with the dealiasing mask applied.
pub(crate) fn div_outer(g: &Grid, pairs: &[(&[Vec<f64>; 3], &[Vec<f64>; 3])]) -> [Vec<Complex64>; 3] {
    let len = g.len();
    // T[i][j] = Σ a_j b_i
    let tensor: Vec<Vec<f64>> = (0..9)
        .into_par_iter()
        .map(|ij| {
            let (i, j) = (ij / 3, ij % 3);
            let mut t = vec![0.0; len];
            for (a, b) in pairs {
                for (x, (aj, bi)) in t.iter_mut().zip(a[j].iter().zip(b[i].iter())) {
                    *x += aj * bi;
                }
            }
            t
        })
        .collect();
    let p = fft::plan(g.n());
    let mut hats: Vec<Vec<Complex64>> = Vec::with_capacity(9);
    for pair in tensor.chunks(2) {
        if pair.len() == 2 {
            let (x, y) = p.forward_pair(&pair[0], &pair[1]);
            hats.push(x);
            hats.push(y);
        } else {
            hats.push(p.forward_real(&pair[0]));
        }
    }
    std::array::from_fn(|i| {
        (0..len)
            .into_par_iter()
            .map(|idx| {
                if !g.kept_index(idx) {
                    return Complex64::default();
                }
                let k = g.kvec(idx);
                I * (k[0] * hats[3 * i][idx] + k[1] * hats[3 * i + 1][idx] + k[2] * hats[3 * i + 2][idx])
            })
            .collect()
    })
}

/// Spectral divergence of a symmetric tensor given by its six physical
/// components `[T00, T11, T22, T01, T02, T12]`, dealiased.
pub(crate) fn div_symmetric(g: &Grid, t: &[Vec<f64>; 6]) -> [Vec<Complex64>; 3] {
    let p = fft::plan(g.n());
    let (h00, h11) = p.forward_pair(&t[0], &t[1]);
    let (h22, h01) = p.forward_pair(&t[2], &t[3]);
    let (h02, h12) = p.forward_pair(&t[4], &t[5]);
    let rows = [[&h00, &h01, &h02], [&h01, &h11, &h12], [&h02, &h12, &h22]];
    std::array::from_fn(|i| {
        (0..g.len())
            .into_par_iter()
            .map(|idx| {
                if !g.kept_index(idx) {
                    return Complex64::default();
                }
                let k = g.kvec(idx);
                let r = rows[i];
                I * (k[0] * r[0][idx] + k[1] * r[1][idx] + k[2] * r[2][idx])
            })
            .collect()
    })
}

/// Largest pointwise `|div v|`.
pub fn div_max(v: &VectorField) -> f64 {
    divergence(v).max_abs()
}

/// `∫ u·w dx` by Parseval.
pub fn inner(u: &VectorField, w: &VectorField) -> Result<f64> {
    u.grid().same_as(w.grid())?;
    let g = *u.grid();
    let (a, b) = (u.spectral(), w.spectral());
    let s: f64 = (0..3)
        .map(|c| crate::par::psum(g.len(), |i| (a[c][i] * b[c][i].conj()).re))
        .sum();
    Ok(s * g.l().powi(3))
}

/// `‖v‖₂` from the coefficients: `sqrt(L³ Σ |v̂_k|²)`, which equals the
/// physical grid norm `sqrt(h³ Σ |v(x)|²)` exactly.
pub fn l2_spectral(v: &VectorField) -> f64 {
    let g = *v.grid();
    let c = v.spectral();
    let s: f64 = (0..3).map(|d| crate::par::psum(g.len(), |i| c[d][i].norm_sqr())).sum();
    (s * g.l().powi(3)).sqrt()
}

/// `‖∇v‖₂` from the coefficients.
pub fn grad_l2(v: &VectorField) -> f64 {
    let g = *v.grid();
    let c = v.spectral();
    let s: f64 = (0..3)
        .map(|d| crate::par::psum(g.len(), |idx| grad_weight(&g, idx) * c[d][idx].norm_sqr()))
        .sum();
    (s * g.l().powi(3)).sqrt()
}

#[inline]
fn grad_weight(g: &Grid, idx: usize) -> f64 {
    let k = g.kvec(idx);
    k[0] * k[0] + k[1] * k[1] + k[2] * k[2]
}

/// Zero-pad the spectrum of `v` onto a finer grid with the same box.
/// Coarse Nyquist modes are dropped.
pub fn inject(v: &VectorField, fine: Grid) -> Result<VectorField> {
    let g = *v.grid();
    if (fine.l() - g.l()).abs() > 1e-12 * g.l() || fine.n() < g.n() {
        return Err(invalid("injection needs the same box and a grid at least as fine"));
    }
    let c = v.spectral();
    let mut out: [Vec<Complex64>; 3] = std::array::from_fn(|_| vec![Complex64::default(); fine.len()]);
    let n = g.n() as i64;
    let nf = fine.n() as i64;
    let wrap = |m: i64| if m < 0 { (m + nf) as usize } else { m as usize };
    for idx in 0..g.len() {
        let (i, j, k) = g.unravel(idx);
        let (a, b, d) = (g.mode(i), g.mode(j), g.mode(k));
        if [a, b, d].iter().any(|m| 2 * m.abs() >= n) {
            continue;
        }
        let fi = fine.index(wrap(a), wrap(b), wrap(d));
        for comp in 0..3 {
            out[comp][fi] = c[comp][idx];
        }
    }
    VectorField::from_coeffs(fine, out)
}

/// Physical values of `Σ_j a_j b_j`-style pointwise helpers live here so the
/// hot paths can share them.
pub(crate) fn dot(a: &[Vec<f64>; 3], b: &[Vec<f64>; 3]) -> Vec<f64> {
    (0..a[0].len()).into_par_iter().map(|i| a[0][i] * b[0][i] + a[1][i] * b[1][i] + a[2][i] * b[2][i]).collect()
}

pub(crate) fn to_physical3(g: &Grid, c: &[Vec<Complex64>; 3]) -> [Vec<f64>; 3] {
    inverse3(g, c)
}
