use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::inequalities::lq_of;
use crate::landau::{truncated_background, LandauParams};
use crate::spectral::{fft, Grid, VectorField};

type Cfield = [Vec<Complex64>; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResolventMethod {
    FixedPoint,
    /// Fixed point relaxed by one half after the plain iteration grew.
    DampedFixedPoint,
    /// Restarted GMRES, used once the fixed point fails to converge.
    Gmres,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolventConfig {
    /// `None` switches the coupling off.
    pub background: Option<LandauParams>,
    pub coupling: f64,
    pub q: f64,
    /// Half-opening beyond the imaginary axis: `|arg λ| < π/2 + δ`.
    pub sector_delta: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for ResolventConfig {
    fn default() -> Self {
        Self { background: None, coupling: 1.0, q: 2.0, sector_delta: std::f64::consts::FRAC_PI_6, tol: 1e-10, max_iter: 400 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolventProbe {
    pub re_lambda: f64,
    pub im_lambda: f64,
    pub sector_delta: f64,
    pub q: f64,
    /// `|λ| ‖u‖_q / ‖f‖_q`.
    pub ratio: f64,
    pub iterations: usize,
    pub method: ResolventMethod,
    pub converged: bool,
    /// Relative residual of the final iterate.
    pub residual: f64,
}

impl ResolventProbe {
    pub fn lambda(&self) -> Complex64 {
        Complex64::new(self.re_lambda, self.im_lambda)
    }
}

/// The map `u ↦ (λ+|k|²)⁻¹ P(f − κ div(u⊗V + V⊗u))` on dealiased complex
/// spectra.
struct Operator {
    grid: Grid,
    lambda: Complex64,
    velocity: Option<[Vec<f64>; 3]>,
    coupling: f64,
}

impl Operator {
    fn project(&self, c: &mut Cfield) {
        let g = self.grid;
        let [a, b, d] = c;
        a.par_iter_mut().zip(b.par_iter_mut()).zip(d.par_iter_mut()).enumerate().for_each(|(idx, ((x, y), z))| {
            if !g.kept_index(idx) {
                *x = Complex64::default();
                *y = Complex64::default();
                *z = Complex64::default();
                return;
            }
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

    fn solve_diag(&self, c: &mut Cfield) {
        let g = self.grid;
        let lambda = self.lambda;
        for comp in c.iter_mut() {
            comp.par_iter_mut().enumerate().for_each(|(idx, z)| *z /= lambda + g.k2(idx));
        }
    }

    /// `κ P div(u⊗V + V⊗u)`, zero without a background.
    fn coupling_term(&self, u: &Cfield) -> Cfield {
        let g = self.grid;
        let Some(v) = &self.velocity else {
            return std::array::from_fn(|_| vec![Complex64::default(); g.len()]);
        };
        let p = fft::plan(g.n());
        let phys: Vec<Vec<Complex64>> = u
            .iter()
            .map(|c| {
                let mut b = c.clone();
                p.inverse(&mut b);
                b
            })
            .collect();
        // T_ij = u_i V_j + V_i u_j, symmetric
        let pairs = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];
        let hats: Vec<Vec<Complex64>> = pairs
            .iter()
            .map(|&(i, j)| {
                let mut t: Vec<Complex64> =
                    (0..g.len()).into_par_iter().map(|x| phys[i][x] * v[j][x] + phys[j][x] * v[i][x]).collect();
                p.forward(&mut t);
                t
            })
            .collect();
        let at = |i: usize, j: usize| -> &Vec<Complex64> {
            let slot = pairs.iter().position(|&(a, b)| (a, b) == (i.min(j), i.max(j))).unwrap();
            &hats[slot]
        };
        let kappa = self.coupling;
        let mut out: Cfield = std::array::from_fn(|i| {
            (0..g.len())
                .into_par_iter()
                .map(|idx| {
                    let k = g.kvec(idx);
                    Complex64::i() * kappa * (k[0] * at(i, 0)[idx] + k[1] * at(i, 1)[idx] + k[2] * at(i, 2)[idx])
                })
                .collect()
        });
        self.project(&mut out);
        out
    }

    /// `M P (f − C u)` where `M = (λ+|k|²)⁻¹`.
    fn apply(&self, f: &Cfield, u: &Cfield) -> Cfield {
        let cu = self.coupling_term(u);
        let mut r: Cfield = std::array::from_fn(|i| f[i].iter().zip(&cu[i]).map(|(a, b)| a - b).collect());
        self.project(&mut r);
        self.solve_diag(&mut r);
        r
    }

    /// `(I + M P C) u`.
    fn lhs(&self, u: &Cfield) -> Cfield {
        let mut cu = self.coupling_term(u);
        self.solve_diag(&mut cu);
        std::array::from_fn(|i| u[i].iter().zip(&cu[i]).map(|(a, b)| a + b).collect())
    }
}

fn norm2(c: &Cfield) -> f64 {
    c.iter().map(|v| crate::par::psum(v.len(), |i| v[i].norm_sqr())).sum::<f64>().sqrt()
}

fn combine(a: &Cfield, s: Complex64, b: &Cfield) -> Cfield {
    std::array::from_fn(|i| a[i].iter().zip(&b[i]).map(|(x, y)| x + s * y).collect())
}

fn dotc(a: &Cfield, b: &Cfield) -> Complex64 {
    // Fixed summation order keeps runs reproducible.
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p.conj() * q).sum::<Complex64>()).sum()
}

/// Restarted GMRES for `A u = b`, from `u`. Returns the iteration count and
/// the final relative residual.
fn gmres(op: &Operator, b: &Cfield, u: &mut Cfield, tol: f64, restart: usize, max_iter: usize) -> (usize, f64) {
    let bnorm = norm2(b).max(f64::MIN_POSITIVE);
    let mut iters = 0;
    loop {
        let r = combine(b, Complex64::new(-1.0, 0.0), &op.lhs(u));
        let beta = norm2(&r);
        if beta / bnorm <= tol || iters >= max_iter {
            return (iters, beta / bnorm);
        }
        let mut basis: Vec<Cfield> = vec![std::array::from_fn(|i| r[i].iter().map(|z| z / beta).collect())];
        let mut h: Vec<Vec<Complex64>> = Vec::new();
        let mut cs: Vec<(Complex64, Complex64)> = Vec::new();
        let mut gvec = vec![Complex64::new(beta, 0.0)];
        for j in 0..restart {
            iters += 1;
            let mut w = op.lhs(&basis[j]);
            let mut col = vec![Complex64::default(); j + 2];
            for (i, v) in basis.iter().enumerate() {
                col[i] = dotc(v, &w);
                w = combine(&w, -col[i], v);
            }
            let wn = norm2(&w);
            col[j + 1] = Complex64::new(wn, 0.0);
            for (i, &(c, s)) in cs.iter().enumerate() {
                let (a, bb) = (col[i], col[i + 1]);
                col[i] = c.conj() * a + s.conj() * bb;
                col[i + 1] = -s * a + c * bb;
            }
            let (a, bb) = (col[j], col[j + 1]);
            let den = (a.norm_sqr() + bb.norm_sqr()).sqrt();
            let (c, s) = if den == 0.0 { (Complex64::new(1.0, 0.0), Complex64::default()) } else { (a / den, bb / den) };
            col[j] = c.conj() * a + s.conj() * bb;
            col[j + 1] = Complex64::default();
            cs.push((c, s));
            let gj = gvec[j];
            gvec[j] = c.conj() * gj;
            gvec.push(-s * gj);
            h.push(col);
            let done = gvec[j + 1].norm() / bnorm <= tol || wn == 0.0 || iters >= max_iter;
            if !done {
                basis.push(std::array::from_fn(|i| w[i].iter().map(|z| z / wn).collect()));
            }
            if done || j + 1 == restart {
                let m = h.len();
                let mut y = vec![Complex64::default(); m];
                for i in (0..m).rev() {
                    let s: Complex64 = (i + 1..m).map(|k| h[k][i] * y[k]).sum();
                    y[i] = (gvec[i] - s) / h[i][i];
                }
                for (k, yk) in y.iter().enumerate() {
                    *u = combine(u, *yk, &basis[k]);
                }
                break;
            }
        }
    }
}

fn lq_complex(g: &Grid, c: &Cfield, q: f64) -> Result<f64> {
    let p = fft::plan(g.n());
    let mut mags = vec![0.0; g.len()];
    for comp in c {
        let mut b = comp.clone();
        p.inverse(&mut b);
        for (m, z) in mags.iter_mut().zip(&b) {
            *m += z.norm_sqr();
        }
    }
    mags.iter_mut().for_each(|m| *m = m.sqrt());
    lq_of(g, &mags, q)
}

/// Solve `λu − Δu + κ[(u·∇)V + (V·∇)u] + ∇p = f`, `div u = 0`, and report
/// `|λ| ‖u‖_q / ‖f‖_q`.
///
/// The fixed point `u ← (λ−Δ)⁻¹P(f − coupling(u))` runs first, relaxed by one
/// half if its update grows; if it still fails, restarted GMRES solves the
/// same linear system. Non-convergence is reported in the probe, not raised.
pub fn resolvent_probe(lambda: Complex64, f: &VectorField, cfg: &ResolventConfig) -> Result<ResolventProbe> {
    let g = *f.grid();
    if !(lambda.norm() > 0.0) || lambda.arg().abs() >= FRAC_PI_2 + cfg.sector_delta {
        return Err(invalid(format!("λ = {lambda} lies outside the sector |arg λ| < π/2 + {}", cfg.sector_delta)));
    }
    let f_spec: Cfield = {
        let s = f.spectral();
        std::array::from_fn(|i| s[i].to_vec())
    };
    let f_norm = lq_complex(&g, &f_spec, cfg.q)?;
    if f_norm == 0.0 {
        return Err(invalid("resolvent forcing must be nonzero"));
    }
    let velocity = match (&cfg.background, cfg.coupling) {
        (Some(p), k) if k != 0.0 => Some(truncated_background(p, g)?.velocity.physical().into_owned()),
        _ => None,
    };
    let op = Operator { grid: g, lambda, velocity, coupling: cfg.coupling };

    let mut u: Cfield = std::array::from_fn(|_| vec![Complex64::default(); g.len()]);
    let mut theta = 1.0;
    let mut method = ResolventMethod::FixedPoint;
    let mut prev = f64::INFINITY;
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    let mut growths = 0;
    while iterations < cfg.max_iter {
        iterations += 1;
        let next = op.apply(&f_spec, &u);
        let step = combine(&next, Complex64::new(-1.0, 0.0), &u);
        let size = norm2(&step) / norm2(&next).max(f64::MIN_POSITIVE);
        u = combine(&u, Complex64::new(theta, 0.0), &step);
        residual = size;
        if size <= cfg.tol {
            break;
        }
        if size > prev {
            growths += 1;
            if theta == 1.0 {
                theta = 0.5;
                method = ResolventMethod::DampedFixedPoint;
            } else if growths > 10 {
                break;
            }
        }
        prev = size;
        if !size.is_finite() {
            break;
        }
    }
    if !(residual <= cfg.tol) {
        method = ResolventMethod::Gmres;
        let mut b = f_spec.clone();
        op.project(&mut b);
        op.solve_diag(&mut b);
        u = b.clone();
        let (it, res) = gmres(&op, &b, &mut u, cfg.tol, 40, cfg.max_iter);
        iterations += it;
        residual = res;
    }
    let converged = residual <= cfg.tol;
    let ratio = lambda.norm() * lq_complex(&g, &u, cfg.q)? / f_norm;
    Ok(ResolventProbe {
        re_lambda: lambda.re,
        im_lambda: lambda.im,
        sector_delta: cfg.sector_delta,
        q: cfg.q,
        ratio,
        iterations,
        method,
        converged,
        residual,
    })
}

/// A divergence-free single Fourier mode `(0, 0, sin(k₀ x₁))` at the lowest
/// wavenumber of the box.
pub fn lowest_mode(grid: Grid) -> VectorField {
    let k0 = 2.0 * std::f64::consts::PI / grid.l();
    VectorField::from_fn(grid, |x| [0.0, 0.0, (k0 * x[0]).sin()])
}
