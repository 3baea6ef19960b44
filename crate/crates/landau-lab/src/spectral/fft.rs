//! Three-dimensional complex FFTs built from batched 1-D `rustfft` plans.
//!
//! The forward transform carries the `1/n^3` factor, so spectral
//! coefficients are Fourier-series coefficients and the inverse is a plain
//! synthesis. Each axis pass is parallel over independent lines; every line
//! is transformed by the same code path regardless of thread count, so the
//! result is bit-for-bit deterministic.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

pub struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

/// Shared plan for an `n^3` box.
pub fn plan(n: usize) -> Arc<Fft3> {
    static PLANS: OnceLock<Mutex<HashMap<usize, Arc<Fft3>>>> = OnceLock::new();
    let mut plans = PLANS.get_or_init(Default::default).lock().unwrap();
    plans
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Fft3 {
                n,
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

impl Fft3 {
    pub fn forward(&self, buf: &mut [Complex64]) {
        self.transform(buf, &self.forward);
        let s = 1.0 / buf.len() as f64;
        buf.par_iter_mut().for_each(|z| *z *= s);
    }

    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.transform(buf, &self.inverse);
    }

    /// Forward transforms of two real fields via one complex transform.
    pub fn forward_pair(&self, a: &[f64], b: &[f64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let mut z: Vec<Complex64> = a.par_iter().zip(b.par_iter()).map(|(&x, &y)| Complex64::new(x, y)).collect();
        self.forward(&mut z);
        let n = self.n;
        let mut fa = vec![Complex64::default(); z.len()];
        let mut fb = vec![Complex64::default(); z.len()];
        fa.par_iter_mut().zip(fb.par_iter_mut()).enumerate().for_each(|(idx, (pa, pb))| {
            let zk = z[idx];
            let zm = z[mirror(idx, n)].conj();
            *pa = 0.5 * (zk + zm);
            *pb = Complex64::new(0.0, -0.5) * (zk - zm);
        });
        (fa, fb)
    }

    /// Forward transform of one real field.
    pub fn forward_real(&self, a: &[f64]) -> Vec<Complex64> {
        let mut z: Vec<Complex64> = a.par_iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward(&mut z);
        z
    }

    /// Inverse transforms of two Hermitian spectra via one complex transform.
    /// Any anti-Hermitian part of the inputs is discarded.
    pub fn inverse_pair(&self, fa: &[Complex64], fb: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.n;
        // Hermitian parts only, so the real/imaginary split stays clean.
        let mut z: Vec<Complex64> = (0..fa.len())
            .into_par_iter()
            .map(|idx| {
                let m = mirror(idx, n);
                let ha = 0.5 * (fa[idx] + fa[m].conj());
                let hb = 0.5 * (fb[idx] + fb[m].conj());
                ha + Complex64::new(0.0, 1.0) * hb
            })
            .collect();
        self.inverse(&mut z);
        z.into_par_iter().map(|c| (c.re, c.im)).unzip()
    }

    /// Real part of the inverse transform of one spectrum.
    pub fn inverse_real(&self, fa: &[Complex64]) -> Vec<f64> {
        let mut z = fa.to_vec();
        self.inverse(&mut z);
        z.into_par_iter().map(|c| c.re).collect()
    }

    fn transform(&self, buf: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        assert_eq!(buf.len(), n * n * n, "buffer does not match the plan");
        let scratch_len = fft.get_inplace_scratch_len();
        let mk = || vec![Complex64::default(); scratch_len];

        // x: lines are contiguous.
        buf.par_chunks_mut(n * n).for_each_init(mk, |s, plane| fft.process_with_scratch(plane, s));

        // y: transpose each xy-plane, transform, transpose back.
        buf.par_chunks_mut(n * n).for_each_init(
            || (mk(), vec![Complex64::default(); n * n]),
            |(s, tmp), plane| {
                for j in 0..n {
                    for i in 0..n {
                        tmp[i * n + j] = plane[j * n + i];
                    }
                }
                fft.process_with_scratch(tmp, s);
                for j in 0..n {
                    for i in 0..n {
                        plane[j * n + i] = tmp[i * n + j];
                    }
                }
            },
        );

        // z: gather z-lines into a line-major buffer.
        let nn = n * n;
        let mut lines = vec![Complex64::default(); buf.len()];
        {
            let src: &[Complex64] = buf;
            lines.par_chunks_mut(n).enumerate().for_each(|(ij, line)| {
                for (k, v) in line.iter_mut().enumerate() {
                    *v = src[ij + nn * k];
                }
            });
        }
        lines.par_chunks_mut(n * n).for_each_init(mk, |s, c| fft.process_with_scratch(c, s));
        buf.par_chunks_mut(nn).enumerate().for_each(|(k, plane)| {
            for (ij, v) in plane.iter_mut().enumerate() {
                *v = lines[ij * n + k];
            }
        });
    }
}

/// Flat index of the wavevector `-k`.
#[inline]
pub(crate) fn mirror(idx: usize, n: usize) -> usize {
    let i = idx % n;
    let j = (idx / n) % n;
    let k = idx / (n * n);
    let f = |a: usize| (n - a) % n;
    f(i) + n * (f(j) + n * f(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(data: &[Complex64], n: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); data.len()];
        let w = |a: usize, b: usize| {
            let th = -2.0 * std::f64::consts::PI * (a * b % n) as f64 / n as f64;
            Complex64::new(th.cos(), th.sin())
        };
        for k3 in 0..n {
            for k2 in 0..n {
                for k1 in 0..n {
                    let mut acc = Complex64::default();
                    for x3 in 0..n {
                        for x2 in 0..n {
                            for x1 in 0..n {
                                acc += data[x1 + n * (x2 + n * x3)] * w(k1, x1) * w(k2, x2) * w(k3, x3);
                            }
                        }
                    }
                    out[k1 + n * (k2 + n * k3)] = acc / (n * n * n) as f64;
                }
            }
        }
        out
    }

    #[test]
    fn matches_naive_dft() {
        let n = 6;
        let data: Vec<Complex64> =
            (0..n * n * n).map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos())).collect();
        let want = naive_dft(&data, n);
        let mut got = data.clone();
        plan(n).forward(&mut got);
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).norm() < 1e-12);
        }
        plan(n).inverse(&mut got);
        for (a, b) in got.iter().zip(&data) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn pair_transform_matches_single() {
        let n = 8;
        let a: Vec<f64> = (0..n * n * n).map(|i| (i as f64 * 0.731).sin()).collect();
        let b: Vec<f64> = (0..n * n * n).map(|i| (i as f64 * 0.173).cos() * 2.0).collect();
        let p = plan(n);
        let (fa, fb) = p.forward_pair(&a, &b);
        let (sa, sb) = (p.forward_real(&a), p.forward_real(&b));
        for idx in 0..fa.len() {
            assert!((fa[idx] - sa[idx]).norm() < 1e-14);
            assert!((fb[idx] - sb[idx]).norm() < 1e-14);
        }
        let (ra, rb) = p.inverse_pair(&fa, &fb);
        for idx in 0..a.len() {
            assert!((ra[idx] - a[idx]).abs() < 1e-13);
            assert!((rb[idx] - b[idx]).abs() < 1e-13);
        }
    }
}
