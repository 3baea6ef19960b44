//! Time stepping of the perturbation system around a truncated Landau
//! background,
//!
//! ```text
//! w_t − Δw + P div(w⊗w + w⊗V + V⊗w) = P(ΔV − div(V⊗V)) + F,
//! ```
//!
//! where `F` is the compensation force, so the right-hand side vanishes up to
//! rounding. Diffusion is integrated exactly (integrating factor); advection
//! and coupling are explicit. Variants: the linearized flow, a mollified
//! flow, a split pair `(v1, v2)` and the forced linear flow behind the
//! Duhamel term.

mod stepper;
mod trajectory;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use stepper::{mollify, Stepper};
pub use trajectory::{energy_report, write_trajectory, EnergyRecord, Snapshot, SplitTrajectory, StepRecord, Trajectory};

use crate::error::{invalid, Result};
use crate::landau::{LandauParams, TruncatedBackground};
use crate::spectral::{self, Grid, VectorField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// First order: `w⁺ = E(w − dt N(w))`, `E = e^{dtΔ}`.
    ImexEuler,
    /// Heun's method in integrating-factor variables; second order.
    ImexRk2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Full,
    /// Drop `w⊗w`; only the background coupling remains.
    Linear,
    /// Advecting velocities are mollified, `w ↦ J_ε w`.
    Mollified,
    /// Evolve `v1` by the full system and `v2` against `V + v1`.
    Split,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    pub mode: Mode,
    /// Mollifier length `ε` (mollified mode), at least two cells.
    pub mollifier_eps: Option<f64>,
    /// Store a field every this many steps; the final state is always kept.
    pub snapshot_every: usize,
    /// Background parameters; `None` runs the bare (heat / Navier–Stokes) flow.
    pub background: Option<LandauParams>,
    /// Multiplier on the coupling terms `w⊗V + V⊗w`; `0` switches them off
    /// while keeping the background in the CFL bound.
    pub coupling: f64,
    /// Also record `‖∇|w|^{3/2}‖₂` each step (one extra FFT).
    pub track_grad_power: bool,
}

impl EvolutionConfig {
    pub fn new(dt: f64, t_end: f64) -> Self {
        Self {
            dt,
            t_end,
            scheme: Scheme::ImexRk2,
            mode: Mode::Full,
            mollifier_eps: None,
            snapshot_every: 1,
            background: None,
            coupling: 1.0,
            track_grad_power: false,
        }
    }

    pub fn with_background(mut self, p: LandauParams) -> Self {
        self.background = Some(p);
        self
    }

    pub fn with_scheme(mut self, s: Scheme) -> Self {
        self.scheme = s;
        self
    }

    pub fn with_mode(mut self, m: Mode) -> Self {
        self.mode = m;
        self
    }

    pub fn with_snapshot_every(mut self, k: usize) -> Self {
        self.snapshot_every = k;
        self
    }

    /// Number of steps; `t_end` must be a whole number of steps.
    pub fn n_steps(&self) -> Result<usize> {
        let n = (self.t_end / self.dt).round();
        if (n * self.dt - self.t_end).abs() > 1e-9 * self.t_end.max(self.dt) {
            return Err(invalid(format!("t_end = {} is not a multiple of dt = {}", self.t_end, self.dt)));
        }
        Ok(n as usize)
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(invalid(format!("t_end must be nonnegative, got {}", self.t_end)));
        }
        if self.snapshot_every == 0 {
            return Err(invalid("snapshot_every must be at least 1"));
        }
        if !self.coupling.is_finite() {
            return Err(invalid("coupling factor must be finite"));
        }
        if self.mode == Mode::Mollified {
            match self.mollifier_eps {
                Some(e) if e >= 2.0 * grid.h() * (1.0 - 1e-12) => {}
                Some(e) => {
                    return Err(crate::Error::UnderResolved(format!(
                        "mollifier length {e} is below two cells ({})",
                        2.0 * grid.h()
                    )))
                }
                None => return Err(invalid("mollified mode needs mollifier_eps")),
            }
        }
        if let Some(p) = &self.background {
            p.validate_for(grid)?;
        }
        self.n_steps().map(|_| ())
    }
}

/// Evolving perturbation with its clock. In split mode `w` holds `v1` and
/// `v2` the second component.
#[derive(Clone, Debug)]
pub struct State {
    pub t: f64,
    pub step: usize,
    pub w: VectorField,
    pub v2: Option<VectorField>,
}

impl State {
    /// Initial state at `t = 0`. The field must already be divergence-free.
    pub fn new(w: VectorField) -> Result<Self> {
        check_solenoidal(&w)?;
        Ok(Self { t: 0.0, step: 0, w: w.to_spectral(), v2: None })
    }

    pub fn split(v1: VectorField, v2: VectorField) -> Result<Self> {
        v1.grid().same_as(v2.grid())?;
        check_solenoidal(&v1)?;
        check_solenoidal(&v2)?;
        Ok(Self { t: 0.0, step: 0, w: v1.to_spectral(), v2: Some(v2.to_spectral()) })
    }
}

fn check_solenoidal(w: &VectorField) -> Result<()> {
    let d = spectral::div_max(w);
    let scale = spectral::grad_l2(w) / w.grid().l().powf(1.5);
    if d > 1e-10 * scale.max(1.0) {
        return Err(invalid(format!("initial field is not divergence-free (max |div| = {d:e}); project it first")));
    }
    Ok(())
}

/// Full-system trajectory from `state0.w`.
pub fn evolve(state0: &State, cfg: &EvolutionConfig) -> Result<Trajectory> {
    Stepper::new(*state0.w.grid(), cfg)?.run(state0)
}

/// Linearized flow `a_t − Δa + P div(a⊗V + V⊗a) = 0`: the semigroup `e^{−tL}`.
pub fn evolve_linear(a0: &VectorField, cfg: &EvolutionConfig) -> Result<Trajectory> {
    let cfg = cfg.clone().with_mode(Mode::Linear);
    Stepper::new(*a0.grid(), &cfg)?.run(&State::new(a0.clone())?)
}

/// Full system with every advecting velocity replaced by `J_ε w`.
pub fn evolve_mollified(w0: &VectorField, eps: f64, cfg: &EvolutionConfig) -> Result<Trajectory> {
    let mut cfg = cfg.clone().with_mode(Mode::Mollified);
    cfg.mollifier_eps = Some(eps);
    Stepper::new(*w0.grid(), &cfg)?.run(&State::new(w0.clone())?)
}

/// `v1` by the full system, `v2` by `v2_t − Δv2 + P div(v2⊗v2 + v2⊗U + U⊗v2) = 0`
/// with `U = V + v1`. Their sum is the full solution from `v10 + v20`.
pub fn evolve_split(v10: &VectorField, v20: &VectorField, cfg: &EvolutionConfig) -> Result<SplitTrajectory> {
    let cfg = cfg.clone().with_mode(Mode::Split);
    Stepper::new(*v10.grid(), &cfg)?.run_split(&State::split(v10.clone(), v20.clone())?)
}

/// Build the truncated background once for reuse across many steppers.
pub fn shared_background(cfg: &EvolutionConfig, grid: Grid) -> Result<Option<Arc<TruncatedBackground>>> {
    cfg.background.as_ref().map(|p| crate::landau::truncated_background(p, grid).map(Arc::new)).transpose()
}

#[cfg(test)]
mod tests;
