use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Default fraction of the resolved band kept by the dealiasing mask.
pub const TWO_THIRDS: f64 = 2.0 / 3.0;

/// A uniform periodic box `[-L/2, L/2)^3` with `n` nodes per axis.
///
/// Node `(i, j, k)` sits at `(-L/2 + i h, -L/2 + j h, -L/2 + k h)`, so the
/// box centre (the origin) is the node `(n/2, n/2, n/2)`. Flat storage is
/// x-fastest: `idx = i + n (j + n k)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n: usize,
    l: f64,
    dealias: f64,
}

impl Grid {
    /// Grid with the two-thirds dealiasing rule.
    pub fn new(n: usize, l: f64) -> Result<Self> {
        Self::with_dealias(n, l, TWO_THIRDS)
    }

    pub fn with_dealias(n: usize, l: f64, dealias: f64) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(invalid(format!("grid size must be even and >= 8, got {n}")));
        }
        if !(l.is_finite() && l > 0.0) {
            return Err(invalid(format!("box length must be positive, got {l}")));
        }
        if !(dealias > 0.0 && dealias <= 1.0) {
            return Err(invalid(format!("dealias fraction must lie in (0, 1], got {dealias}")));
        }
        Ok(Self { n, l, dealias })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn h(&self) -> f64 {
        self.l / self.n as f64
    }

    pub fn dealias_fraction(&self) -> f64 {
        self.dealias
    }

    /// Number of nodes, `n^3`.
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Cell volume `h^3`.
    pub fn cell_volume(&self) -> f64 {
        self.h().powi(3)
    }

    pub fn coord(&self, i: usize) -> f64 {
        -0.5 * self.l + i as f64 * self.h()
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.n * (j + self.n * k)
    }

    #[inline]
    pub fn unravel(&self, idx: usize) -> (usize, usize, usize) {
        let n = self.n;
        (idx % n, (idx / n) % n, idx / (n * n))
    }

    /// Physical position of a flat index.
    #[inline]
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let (i, j, k) = self.unravel(idx);
        [self.coord(i), self.coord(j), self.coord(k)]
    }

    /// Flat index of the node at the origin.
    pub fn center_index(&self) -> usize {
        let m = self.n / 2;
        self.index(m, m, m)
    }

    /// Signed mode number of an FFT index; the Nyquist index maps to `+n/2`.
    #[inline]
    pub fn mode(&self, i: usize) -> i64 {
        if i <= self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Wavenumber used by odd (first-derivative) multipliers. The Nyquist
    /// wavenumber is set to zero so that real fields stay real.
    #[inline]
    pub fn k_odd(&self, i: usize) -> f64 {
        if 2 * i == self.n {
            0.0
        } else {
            2.0 * PI / self.l * self.mode(i) as f64
        }
    }

    /// Wavenumber used by even multipliers such as the Laplacian.
    #[inline]
    pub fn k_even(&self, i: usize) -> f64 {
        2.0 * PI / self.l * self.mode(i) as f64
    }

    /// Whether an FFT index survives the dealiasing mask.
    #[inline]
    pub fn kept(&self, i: usize) -> bool {
        (self.mode(i).unsigned_abs() as f64) <= self.dealias * self.n as f64 / 2.0
    }

    /// Odd wavevector of a flat spectral index.
    #[inline]
    pub fn kvec(&self, idx: usize) -> [f64; 3] {
        let (i, j, k) = self.unravel(idx);
        [self.k_odd(i), self.k_odd(j), self.k_odd(k)]
    }

    /// `|k|^2` of a flat spectral index, Laplacian convention.
    #[inline]
    pub fn k2(&self, idx: usize) -> f64 {
        let (i, j, k) = self.unravel(idx);
        let (a, b, c) = (self.k_even(i), self.k_even(j), self.k_even(k));
        a * a + b * b + c * c
    }

    #[inline]
    pub fn kept_index(&self, idx: usize) -> bool {
        let (i, j, k) = self.unravel(idx);
        self.kept(i) && self.kept(j) && self.kept(k)
    }

    /// Largest `|k|` surviving the dealiasing mask along one axis.
    pub fn k_cut(&self) -> f64 {
        let m = (self.dealias * self.n as f64 / 2.0).floor();
        2.0 * PI / self.l * m.min((self.n / 2 - 1) as f64)
    }

    pub(crate) fn same_as(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(crate::Error::GridMismatch(format!(
                "n = {}, L = {} vs n = {}, L = {}",
                self.n, self.l, other.n, other.l
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_and_small() {
        assert!(Grid::new(7, 1.0).is_err());
        assert!(Grid::new(6, 1.0).is_err());
        assert!(Grid::new(33, 1.0).is_err());
        assert!(Grid::new(48, 32.0).is_ok());
        assert!(Grid::new(16, -1.0).is_err());
    }

    #[test]
    fn centre_node_is_origin() {
        let g = Grid::new(16, 4.0).unwrap();
        assert_eq!(g.point(g.center_index()), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn two_thirds_mask() {
        let g = Grid::new(32, 1.0).unwrap();
        let kept: Vec<i64> = (0..32).filter(|&i| g.kept(i)).map(|i| g.mode(i)).collect();
        assert_eq!(kept.iter().max(), Some(&10));
        assert_eq!(kept.iter().min(), Some(&-10));
        assert_eq!(kept.len(), 21);
    }

    #[test]
    fn index_roundtrip() {
        let g = Grid::new(8, 1.0).unwrap();
        for idx in 0..g.len() {
            let (i, j, k) = g.unravel(idx);
            assert_eq!(g.index(i, j, k), idx);
        }
    }
}
