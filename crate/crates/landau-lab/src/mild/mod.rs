//! The mild formulation `w = a + N(w, w)`: the semigroup part
//! `a = e^{−tL} w₀`, the Duhamel term `N(w₁, w₂) = −∫₀ᵗ e^{−(t−s)L} P div(w₁⊗w₂) ds`,
//! Picard iteration, the smallness gate and empirical constants.
//!
//! Both `a` and `N` are computed with the evolution stepper: `a` is the
//! linearized flow and `N(w₁, w₂)` is the forced linear flow from zero, so
//! every trajectory involved shares one time mesh and stores every step.

mod constants;
mod picard;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use constants::{bilinear_ratio, constants_estimate, linear_ratio, weighted_riesz_ratio};
pub use picard::{picard_solve, picard_solve_from, PicardReport};

use crate::error::Result;
use crate::evolution::{EvolutionConfig, Mode, State, Stepper, Trajectory};
use crate::inequalities::{lq_norm, ConstantsLedger};
use crate::landau::TruncatedBackground;
use crate::spectral::{Grid, VectorField};

/// A linear-mode stepper that stores every step, as the mild operators need.
pub(crate) fn linear_stepper(grid: Grid, cfg: &EvolutionConfig, bg: Option<Arc<TruncatedBackground>>) -> Result<Stepper> {
    let cfg = cfg.clone().with_mode(Mode::Linear).with_snapshot_every(1);
    match bg {
        Some(b) => Stepper::with_background(grid, &cfg, Some(b)),
        None => Stepper::new(grid, &cfg),
    }
}

/// `e^{−tL} w₀`: the endpoint of the linearized flow at time `t`.
pub fn semigroup_apply(w0: &VectorField, t: f64, cfg: &EvolutionConfig) -> Result<VectorField> {
    if t == 0.0 {
        State::new(w0.clone())?;
        return Ok(w0.clone());
    }
    let mut cfg = cfg.clone().with_mode(Mode::Linear).with_snapshot_every(usize::MAX);
    cfg.t_end = t;
    let tr = Stepper::new(*w0.grid(), &cfg)?.run(&State::new(w0.clone())?)?;
    Ok(tr.final_field().clone())
}

/// The semigroup trajectory `a(t) = e^{−tL} w₀` on `[0, cfg.t_end]`.
pub fn semigroup_trajectory(w0: &VectorField, cfg: &EvolutionConfig) -> Result<Trajectory> {
    linear_stepper(*w0.grid(), cfg, None)?.run(&State::new(w0.clone())?)
}

/// `N(w₁, w₂)`: the solution `z` of `z_t + Lz = −P div(w₁⊗w₂)`, `z(0) = 0`.
/// Both inputs must store every step on `cfg`'s time mesh.
pub fn duhamel_bilinear(w1: &Trajectory, w2: &Trajectory, cfg: &EvolutionConfig) -> Result<Trajectory> {
    linear_stepper(w1.grid, cfg, None)?.run_forced(w1, w2)
}

/// Verdict of the smallness condition `‖w₀‖₃ < ε₀`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateRecord {
    pub norm_w0_l3: f64,
    pub epsilon0: f64,
    pub passed: bool,
}

pub fn smallness_gate(w0: &VectorField, ledger: &ConstantsLedger) -> Result<GateRecord> {
    let epsilon0 = ledger.epsilon0()?;
    let norm_w0_l3 = lq_norm(w0, 3.0)?;
    Ok(GateRecord { norm_w0_l3, epsilon0, passed: norm_w0_l3 < epsilon0 })
}

#[cfg(test)]
mod tests;
