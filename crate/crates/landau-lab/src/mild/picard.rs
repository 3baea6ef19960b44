use serde::{Deserialize, Serialize};

use super::{linear_stepper, smallness_gate, GateRecord};
use crate::error::{invalid, Result};
use crate::evolution::{shared_background, EvolutionConfig, State, Trajectory};
use crate::inequalities::{lq_of, ConstantsLedger};
use crate::spectral::VectorField;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PicardReport {
    pub iterates: usize,
    /// `sup_t ‖w⁽ᵏ⁺¹⁾ − w⁽ᵏ⁾‖₃` per iteration.
    pub residual_history: Vec<f64>,
    /// Geometric mean of successive residual ratios; needs three iterates
    /// and nonzero residuals.
    pub contraction_ratio: Option<f64>,
    pub converged: bool,
    /// Set when the residual grew three iterations in a row.
    pub diverged: bool,
    pub gate: Option<GateRecord>,
}

/// `sup_n ‖a_n − b_n‖₃` over two trajectories stored at every step.
pub(crate) fn sup_l3_gap(a: &Trajectory, b: &Trajectory) -> Result<f64> {
    if a.snapshots.len() != b.snapshots.len() {
        return Err(invalid("trajectories have different lengths"));
    }
    let mut best = 0.0f64;
    for (x, y) in a.snapshots.iter().zip(&b.snapshots) {
        let d = x.field.sub(&y.field)?;
        best = best.max(lq_of(&a.grid, &d.magnitude(), 3.0)?);
    }
    Ok(best)
}

fn assemble(a: &Trajectory, z: &Trajectory) -> Result<Trajectory> {
    let fields = a.snapshots.iter().zip(&z.snapshots).map(|(x, y)| x.field.add(&y.field)).collect::<Result<Vec<_>>>()?;
    Trajectory::from_fields(a.grid, a.dt, fields)
}

/// Iterate `w⁽⁰⁾ = a`, `w⁽ᵏ⁺¹⁾ = a + N(w⁽ᵏ⁾, w⁽ᵏ⁾)` on `[0, cfg.t_end]`.
///
/// Stops when the residual drops to `tol`, after `max_iter` iterations, or
/// once the residual has grown three times in a row. Non-convergence is
/// reported, not raised.
pub fn picard_solve(
    w0: &VectorField,
    tol: f64,
    max_iter: usize,
    cfg: &EvolutionConfig,
    ledger: Option<&ConstantsLedger>,
) -> Result<(Trajectory, PicardReport)> {
    picard_impl(w0, None, tol, max_iter, cfg, ledger)
}

/// As [`picard_solve`] but starting from a given first iterate.
pub fn picard_solve_from(
    w0: &VectorField,
    initial: &Trajectory,
    tol: f64,
    max_iter: usize,
    cfg: &EvolutionConfig,
    ledger: Option<&ConstantsLedger>,
) -> Result<(Trajectory, PicardReport)> {
    picard_impl(w0, Some(initial), tol, max_iter, cfg, ledger)
}

fn picard_impl(
    w0: &VectorField,
    initial: Option<&Trajectory>,
    tol: f64,
    max_iter: usize,
    cfg: &EvolutionConfig,
    ledger: Option<&ConstantsLedger>,
) -> Result<(Trajectory, PicardReport)> {
    if !(tol > 0.0) || max_iter == 0 {
        return Err(invalid("Picard iteration needs tol > 0 and max_iter >= 1"));
    }
    let grid = *w0.grid();
    let gate = ledger.map(|l| smallness_gate(w0, l)).transpose()?;
    let stepper = linear_stepper(grid, cfg, shared_background(cfg, grid)?)?;
    let a = stepper.run(&State::new(w0.clone())?)?;
    let mut cur = match initial {
        Some(t) => {
            if t.snapshots.len() != a.snapshots.len() || t.snapshot_every != 1 {
                return Err(invalid("initial iterate must store every step on the same mesh"));
            }
            t.clone()
        }
        None => a.clone(),
    };
    let mut history = Vec::new();
    let mut converged = false;
    let mut diverged = false;
    for _ in 0..max_iter {
        let z = stepper.run_forced(&cur, &cur)?;
        let next = assemble(&a, &z)?;
        history.push(sup_l3_gap(&next, &cur)?);
        cur = next;
        let r = *history.last().unwrap();
        if r <= tol {
            converged = true;
            break;
        }
        let k = history.len();
        if k >= 4 && history[k - 1] > history[k - 2] && history[k - 2] > history[k - 3] && history[k - 3] > history[k - 4] {
            diverged = true;
            break;
        }
    }
    let contraction_ratio = (history.len() >= 3 && history.iter().all(|&r| r > 0.0))
        .then(|| (history[history.len() - 1] / history[0]).powf(1.0 / (history.len() - 1) as f64));
    let report = PicardReport { iterates: history.len(), residual_history: history, contraction_ratio, converged, diverged, gate };
    Ok((cur, report))
}
