use std::borrow::Cow;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fft, Grid};
use crate::error::{invalid, Result};

/// Which space a field's samples live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    Physical,
    Spectral,
}

#[derive(Clone, Debug, PartialEq)]
enum Data {
    Physical(Vec<f64>),
    Spectral(Vec<Complex64>),
}

/// A real scalar field on a [`Grid`], stored either as nodal values or as
/// Fourier coefficients. The representation tag is the storage itself, so it
/// can never disagree with the data.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    data: Data,
}

impl ScalarField {
    pub fn zeros(grid: Grid) -> Self {
        Self { grid, data: Data::Physical(vec![0.0; grid.len()]) }
    }

    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> f64 + Sync) -> Self {
        let values = (0..grid.len()).into_par_iter().map(|idx| f(grid.point(idx))).collect();
        Self { grid, data: Data::Physical(values) }
    }

    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        check_len(&grid, values.len())?;
        Ok(Self { grid, data: Data::Physical(values) })
    }

    pub fn from_coeffs(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        check_len(&grid, coeffs.len())?;
        Ok(Self { grid, data: Data::Spectral(coeffs) })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn representation(&self) -> Representation {
        match self.data {
            Data::Physical(_) => Representation::Physical,
            Data::Spectral(_) => Representation::Spectral,
        }
    }

    pub fn values(&self) -> Option<&[f64]> {
        match &self.data {
            Data::Physical(v) => Some(v),
            Data::Spectral(_) => None,
        }
    }

    pub fn coeffs(&self) -> Option<&[Complex64]> {
        match &self.data {
            Data::Spectral(c) => Some(c),
            Data::Physical(_) => None,
        }
    }

    /// Nodal values, transforming if necessary.
    pub fn physical(&self) -> Cow<'_, [f64]> {
        match &self.data {
            Data::Physical(v) => Cow::Borrowed(v),
            Data::Spectral(c) => Cow::Owned(fft::plan(self.grid.n()).inverse_real(c)),
        }
    }

    /// Fourier coefficients, transforming if necessary.
    pub fn spectral(&self) -> Cow<'_, [Complex64]> {
        match &self.data {
            Data::Spectral(c) => Cow::Borrowed(c),
            Data::Physical(v) => Cow::Owned(fft::plan(self.grid.n()).forward_real(v)),
        }
    }

    pub fn to_physical(&self) -> Self {
        Self { grid: self.grid, data: Data::Physical(self.physical().into_owned()) }
    }

    pub fn to_spectral(&self) -> Self {
        Self { grid: self.grid, data: Data::Spectral(self.spectral().into_owned()) }
    }

    pub fn into_values(self) -> Vec<f64> {
        match self.data {
            Data::Physical(v) => v,
            Data::Spectral(c) => fft::plan(self.grid.n()).inverse_real(&c),
        }
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        match self.data {
            Data::Spectral(c) => c,
            Data::Physical(v) => fft::plan(self.grid.n()).forward_real(&v),
        }
    }

    /// `a * self + b * other`, in the representation of `self`.
    pub fn lincomb(&self, a: f64, b: f64, other: &Self) -> Result<Self> {
        self.grid.same_as(&other.grid)?;
        let data = match &self.data {
            Data::Physical(x) => {
                let y = other.physical();
                Data::Physical(x.par_iter().zip(y.par_iter()).map(|(x, y)| a * x + b * y).collect())
            }
            Data::Spectral(x) => {
                let y = other.spectral();
                Data::Spectral(x.par_iter().zip(y.par_iter()).map(|(x, y)| a * x + b * y).collect())
            }
        };
        Ok(Self { grid: self.grid, data })
    }

    pub fn scaled(&self, a: f64) -> Self {
        let data = match &self.data {
            Data::Physical(x) => Data::Physical(x.iter().map(|v| a * v).collect()),
            Data::Spectral(x) => Data::Spectral(x.iter().map(|v| a * v).collect()),
        };
        Self { grid: self.grid, data }
    }

    pub fn max_abs(&self) -> f64 {
        self.physical().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        match &self.data {
            Data::Physical(v) => v.iter().all(|x| x.is_finite()),
            Data::Spectral(c) => c.iter().all(|x| x.is_finite()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum VData {
    Physical([Vec<f64>; 3]),
    Spectral([Vec<Complex64>; 3]),
}

/// A real 3-vector field on a [`Grid`]; all three components share one
/// representation.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    grid: Grid,
    data: VData,
}

impl VectorField {
    pub fn zeros(grid: Grid) -> Self {
        let z = vec![0.0; grid.len()];
        Self { grid, data: VData::Physical([z.clone(), z.clone(), z]) }
    }

    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> [f64; 3] + Sync) -> Self {
        let pts: Vec<[f64; 3]> = (0..grid.len()).into_par_iter().map(|idx| f(grid.point(idx))).collect();
        let comp = |c: usize| pts.iter().map(|p| p[c]).collect::<Vec<_>>();
        Self { grid, data: VData::Physical([comp(0), comp(1), comp(2)]) }
    }

    pub fn from_components(grid: Grid, comps: [Vec<f64>; 3]) -> Result<Self> {
        for c in &comps {
            check_len(&grid, c.len())?;
        }
        Ok(Self { grid, data: VData::Physical(comps) })
    }

    pub fn from_coeffs(grid: Grid, comps: [Vec<Complex64>; 3]) -> Result<Self> {
        for c in &comps {
            check_len(&grid, c.len())?;
        }
        Ok(Self { grid, data: VData::Spectral(comps) })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn representation(&self) -> Representation {
        match self.data {
            VData::Physical(_) => Representation::Physical,
            VData::Spectral(_) => Representation::Spectral,
        }
    }

    pub fn values(&self) -> Option<&[Vec<f64>; 3]> {
        match &self.data {
            VData::Physical(v) => Some(v),
            VData::Spectral(_) => None,
        }
    }

    pub fn coeffs(&self) -> Option<&[Vec<Complex64>; 3]> {
        match &self.data {
            VData::Spectral(c) => Some(c),
            VData::Physical(_) => None,
        }
    }

    pub fn physical(&self) -> Cow<'_, [Vec<f64>; 3]> {
        match &self.data {
            VData::Physical(v) => Cow::Borrowed(v),
            VData::Spectral(c) => Cow::Owned(inverse3(&self.grid, c)),
        }
    }

    pub fn spectral(&self) -> Cow<'_, [Vec<Complex64>; 3]> {
        match &self.data {
            VData::Spectral(c) => Cow::Borrowed(c),
            VData::Physical(v) => Cow::Owned(forward3(&self.grid, v)),
        }
    }

    pub fn to_physical(&self) -> Self {
        Self { grid: self.grid, data: VData::Physical(self.physical().into_owned()) }
    }

    pub fn to_spectral(&self) -> Self {
        Self { grid: self.grid, data: VData::Spectral(self.spectral().into_owned()) }
    }

    pub fn into_components(self) -> [Vec<f64>; 3] {
        match self.data {
            VData::Physical(v) => v,
            VData::Spectral(c) => inverse3(&self.grid, &c),
        }
    }

    pub fn into_coeffs(self) -> [Vec<Complex64>; 3] {
        match self.data {
            VData::Spectral(c) => c,
            VData::Physical(v) => forward3(&self.grid, &v),
        }
    }

    pub fn component(&self, c: usize) -> ScalarField {
        let data = match &self.data {
            VData::Physical(v) => Data::Physical(v[c].clone()),
            VData::Spectral(s) => Data::Spectral(s[c].clone()),
        };
        ScalarField { grid: self.grid, data }
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> Vec<f64> {
        let v = self.physical();
        (0..self.grid.len())
            .into_par_iter()
            .map(|i| (v[0][i] * v[0][i] + v[1][i] * v[1][i] + v[2][i] * v[2][i]).sqrt())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.magnitude().into_iter().fold(0.0, f64::max)
    }

    /// `a * self + b * other`, in the representation of `self`.
    pub fn lincomb(&self, a: f64, b: f64, other: &Self) -> Result<Self> {
        self.grid.same_as(&other.grid)?;
        let data = match &self.data {
            VData::Physical(x) => {
                let y = other.physical();
                VData::Physical(std::array::from_fn(|c| {
                    x[c].par_iter().zip(y[c].par_iter()).map(|(x, y)| a * x + b * y).collect()
                }))
            }
            VData::Spectral(x) => {
                let y = other.spectral();
                VData::Spectral(std::array::from_fn(|c| {
                    x[c].par_iter().zip(y[c].par_iter()).map(|(x, y)| a * x + b * y).collect()
                }))
            }
        };
        Ok(Self { grid: self.grid, data })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.lincomb(1.0, 1.0, other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.lincomb(1.0, -1.0, other)
    }

    pub fn scaled(&self, a: f64) -> Self {
        let data = match &self.data {
            VData::Physical(x) => VData::Physical(std::array::from_fn(|c| x[c].iter().map(|v| a * v).collect())),
            VData::Spectral(x) => VData::Spectral(std::array::from_fn(|c| x[c].iter().map(|v| a * v).collect())),
        };
        Self { grid: self.grid, data }
    }

    pub fn is_finite(&self) -> bool {
        match &self.data {
            VData::Physical(v) => v.iter().all(|c| c.iter().all(|x| x.is_finite())),
            VData::Spectral(s) => s.iter().all(|c| c.iter().all(|x| x.is_finite())),
        }
    }
}

fn check_len(grid: &Grid, len: usize) -> Result<()> {
    if len == grid.len() {
        Ok(())
    } else {
        Err(invalid(format!("expected {} samples for an n = {} grid, got {len}", grid.len(), grid.n())))
    }
}

pub(crate) fn forward3(grid: &Grid, v: &[Vec<f64>; 3]) -> [Vec<Complex64>; 3] {
    let p = fft::plan(grid.n());
    let (a, b) = p.forward_pair(&v[0], &v[1]);
    [a, b, p.forward_real(&v[2])]
}

pub(crate) fn inverse3(grid: &Grid, c: &[Vec<Complex64>; 3]) -> [Vec<f64>; 3] {
    let p = fft::plan(grid.n());
    let (a, b) = p.inverse_pair(&c[0], &c[1]);
    [a, b, p.inverse_real(&c[2])]
}
