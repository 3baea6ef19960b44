//! Periodic-box field storage, 3-D FFTs and Fourier multipliers.
//!
//! Fields live on a uniform grid over `[-L/2, L/2)^3`. Spectral coefficients
//! use the forward normalization `f̂_k = n⁻³ Σ_x f(x) e^{-ik·x}`, so that
//! `‖f‖₂² = h³ Σ_x |f(x)|² = L³ Σ_k |f̂_k|²`.

pub mod fft;
mod field;
mod grid;
pub mod io;
mod ops;

pub use field::{Representation, ScalarField, VectorField};
pub use grid::{Grid, TWO_THIRDS};
pub use ops::{
    advect, curl, dealias, dealias_scalar, div_max, divergence, grad_l2, gradient, heat_propagate, inject, inner,
    l2_spectral, laplacian, laplacian_scalar, leray_project, riesz_double,
};

pub(crate) use ops::{div_outer, div_symmetric, dot, project_in_place, to_physical3};
