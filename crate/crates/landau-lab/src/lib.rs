//! A pseudospectral laboratory for Navier–Stokes flows perturbing the
//! explicit Landau solutions.
//!
//! The crate is organized bottom-up:
//!
//! - [`landau`] — the exact stationary solutions, their force, and a
//!   smoothly truncated periodic surrogate;
//! - [`spectral`] — periodic fields, FFTs and Fourier multipliers;
//! - [`inequalities`] — discrete Hardy, log-Sobolev, Riesz and gradient
//!   inequality audits plus the constants ledger;
//! - [`evolution`] — integrating-factor time stepping of the perturbation
//!   system and its linear, mollified and split variants;
//! - [`mild`] — the semigroup, the Duhamel bilinear term and Picard iteration;
//! - [`analysis`] — decay fits, weak–strong gaps, continuous dependence and
//!   resolvent probes;
//! - [`runner`] — config files, experiment dispatch and output writers.
//!
//! The guide in `book/` walks through each piece with runnable examples.

pub mod analysis;
pub mod evolution;
pub mod inequalities;
pub mod landau;
pub mod mild;
pub mod random;
pub mod runner;
pub mod spectral;

mod error;
mod format;
mod par;

pub use error::{Error, Result};

/// Seed used when none is supplied.
pub const DEFAULT_SEED: u64 = 20_240_917;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/landau.md")]
    mod landau {}
    #[doc = include_str!("../../../book/src/spectral.md")]
    mod spectral {}
    #[doc = include_str!("../../../book/src/evolution.md")]
    mod evolution {}
    #[doc = include_str!("../../../book/src/mild.md")]
    mod mild {}
    #[doc = include_str!("../../../book/src/inequalities.md")]
    mod inequalities {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/formats.md")]
    mod formats {}
}
