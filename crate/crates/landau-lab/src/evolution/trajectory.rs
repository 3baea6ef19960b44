use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::stepper::{Eval, Stepper};
use crate::error::{Error, Result};
use crate::inequalities::{lq_of, sup_in_time, time_lp};
use crate::par::psum;
use crate::spectral::{self, fft, io, Grid, VectorField};

/// Diagnostics of one time level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub t: f64,
    pub l2: f64,
    pub l3: f64,
    pub l6: f64,
    pub grad_l2: f64,
    /// `∫₀ᵗ ‖∇w‖₂²`.
    pub dissipation: f64,
    /// `∫₀ᵗ ∫ w·N(w)`, the energy moved by the explicit terms.
    pub work: f64,
    /// `½‖w(t)‖₂² − ½‖w₀‖₂² + dissipation + work`; zero for an exact solution.
    pub energy_residual: f64,
    /// `‖∇|w|^{3/2}‖₂` when tracked.
    pub grad_power: Option<f64>,
    /// Max pointwise divergence, on snapshot steps only.
    pub div_max: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct Snapshot {
    pub step: usize,
    pub t: f64,
    /// Physical representation.
    pub field: VectorField,
}

/// Diagnostics at every step plus fields every `snapshot_every` steps.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub grid: Grid,
    pub dt: f64,
    pub snapshot_every: usize,
    pub snapshots: Vec<Snapshot>,
    pub records: Vec<StepRecord>,
}

#[derive(Clone, Debug)]
pub struct SplitTrajectory {
    pub v1: Trajectory,
    pub v2: Trajectory,
}

/// Running time integrals. Dissipation over a step is integrated exactly
/// for the heat part of the flow; the explicit work by the trapezoid rule.
#[derive(Clone, Debug, Default)]
pub(crate) struct Accumulator {
    e0: f64,
    dissipation: f64,
    work: f64,
    prev_work: f64,
    pending: f64,
}

impl Trajectory {
    pub(crate) fn empty(grid: Grid, dt: f64, snapshot_every: usize) -> Self {
        Self { grid, dt, snapshot_every, snapshots: Vec::new(), records: Vec::new() }
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn record(
        &mut self,
        acc: &mut Accumulator,
        stepper: &Stepper,
        n: usize,
        t: f64,
        w: &[Vec<Complex64>; 3],
        ev: Eval,
        keep: bool,
    ) -> Result<()> {
        let g = self.grid;
        let vol = g.l().powi(3);
        let len = g.len();
        let l2sq = vol * psum(len, |i| w[0][i].norm_sqr() + w[1][i].norm_sqr() + w[2][i].norm_sqr());
        let grad_sq = vol
            * psum(len, |i| {
                let k = g.kvec(i);
                (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) * (w[0][i].norm_sqr() + w[1][i].norm_sqr() + w[2][i].norm_sqr())
            });
        let work = vol * psum(len, |i| (0..3).map(|d| (w[d][i] * ev.n[d][i].conj()).re).sum::<f64>());
        let diss = stepper.dissipated();
        let inc = vol * psum(len, |i| diss[i] * (w[0][i].norm_sqr() + w[1][i].norm_sqr() + w[2][i].norm_sqr()));
        if n == 0 {
            acc.e0 = 0.5 * l2sq;
        } else {
            acc.work += 0.5 * self.dt * (acc.prev_work + work);
            acc.dissipation += acc.pending;
        }
        acc.prev_work = work;
        acc.pending = inc;

        let p = &ev.phys;
        let mags: Vec<f64> = (0..len).map(|i| (p[0][i] * p[0][i] + p[1][i] * p[1][i] + p[2][i] * p[2][i]).sqrt()).collect();
        let grad_power = if stepper.config().track_grad_power {
            let pow: Vec<f64> = mags.iter().map(|m| m.powf(1.5)).collect();
            let c = fft::plan(g.n()).forward_real(&pow);
            Some(
                (vol * psum(len, |i| {
                    let k = g.kvec(i);
                    (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) * c[i].norm_sqr()
                }))
                .sqrt(),
            )
        } else {
            None
        };
        let div_max = keep.then(|| spectral::div_max(&VectorField::from_coeffs(g, w.clone()).unwrap()));
        self.records.push(StepRecord {
            step: n,
            t,
            l2: l2sq.sqrt(),
            l3: lq_of(&g, &mags, 3.0)?,
            l6: lq_of(&g, &mags, 6.0)?,
            grad_l2: grad_sq.sqrt(),
            dissipation: acc.dissipation,
            work: acc.work,
            energy_residual: 0.5 * l2sq - acc.e0 + acc.dissipation + acc.work,
            grad_power,
            div_max,
        });
        if keep {
            self.snapshots.push(Snapshot { step: n, t, field: VectorField::from_components(g, ev.phys)? });
        }
        Ok(())
    }

    /// Trajectory assembled from fields given at every step (e.g. a sum of
    /// two runs). Energy bookkeeping is not available and is set to NaN.
    pub(crate) fn from_fields(grid: Grid, dt: f64, fields: Vec<VectorField>) -> Result<Self> {
        let mut out = Self::empty(grid, dt, 1);
        for (n, field) in fields.into_iter().enumerate() {
            grid.same_as(field.grid())?;
            let field = field.to_physical();
            let mags = field.magnitude();
            let t = n as f64 * dt;
            out.records.push(StepRecord {
                step: n,
                t,
                l2: spectral::l2_spectral(&field),
                l3: lq_of(&grid, &mags, 3.0)?,
                l6: lq_of(&grid, &mags, 6.0)?,
                grad_l2: spectral::grad_l2(&field),
                dissipation: f64::NAN,
                work: f64::NAN,
                energy_residual: f64::NAN,
                grad_power: None,
                div_max: Some(spectral::div_max(&field)),
            });
            out.snapshots.push(Snapshot { step: n, t, field });
        }
        Ok(out)
    }

    /// Physical field at step `idx`; needs every step stored.
    pub(crate) fn phys_at(&self, idx: usize) -> Result<&[Vec<f64>; 3]> {
        match self.snapshots.get(idx) {
            Some(s) if s.step == idx => Ok(s.field.values().expect("snapshots are physical")),
            _ => Err(Error::GridMismatch(format!("no stored field at step {idx}"))),
        }
    }

    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    pub fn final_field(&self) -> &VectorField {
        &self.snapshots.last().expect("a trajectory stores at least its final state").field
    }

    pub fn final_time(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.t)
    }

    /// `sup_t ‖w‖₃`.
    pub fn sup_l3(&self) -> f64 {
        sup_in_time(&self.records.iter().map(|r| r.l3).collect::<Vec<_>>())
    }

    /// `‖w‖_{L⁴_t L⁶_x}`.
    pub fn l4_l6(&self) -> f64 {
        time_lp(&self.times(), &self.records.iter().map(|r| r.l6).collect::<Vec<_>>(), 4.0)
    }

    /// `‖∇|w|^{3/2}‖_{L²_t L²_x}`, if tracked.
    pub fn grad_power_l2(&self) -> Option<f64> {
        let v: Option<Vec<f64>> = self.records.iter().map(|r| r.grad_power).collect();
        v.map(|v| time_lp(&self.times(), &v, 2.0))
    }

    /// Records on snapshot steps (the ones carrying `div_max`).
    pub fn snapshot_records(&self) -> impl Iterator<Item = &StepRecord> {
        self.records.iter().filter(|r| r.div_max.is_some())
    }
}

/// Energy bookkeeping per snapshot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyRecord {
    pub step: usize,
    pub t: f64,
    /// `‖w‖₂²`.
    pub energy: f64,
    /// `∫₀ᵗ ‖∇w‖₂²`.
    pub dissipation: f64,
    /// `∫₀ᵗ ∫ w·N(w)`; for the second split field this is `−∫∫ v2⊗(V+v1):∇v2`.
    pub work: f64,
    pub residual: f64,
}

pub fn energy_report(traj: &Trajectory) -> Vec<EnergyRecord> {
    traj.snapshot_records()
        .map(|r| EnergyRecord {
            step: r.step,
            t: r.t,
            energy: r.l2 * r.l2,
            dissipation: r.dissipation,
            work: r.work,
            residual: r.energy_residual,
        })
        .collect()
}

/// Write `config.txt`, `snapshots/NNNN.field` and `diagnostics.csv`.
pub fn write_trajectory(dir: &Path, traj: &Trajectory, config_echo: &str) -> Result<()> {
    std::fs::create_dir_all(dir.join("snapshots"))?;
    std::fs::write(dir.join("config.txt"), config_echo)?;
    for s in &traj.snapshots {
        io::write_field(&dir.join("snapshots").join(format!("{:04}.field", s.step)), io::Snapshot::Vector(&s.field))?;
    }
    let mut w = csv::Writer::from_path(dir.join("diagnostics.csv"))?;
    w.write_record(["step", "t", "l2", "l3", "l6", "grad_l2", "div_max", "energy_residual"])?;
    for r in traj.snapshot_records() {
        let f = crate::format::num;
        w.write_record([
            r.step.to_string(),
            f(r.t),
            f(r.l2),
            f(r.l3),
            f(r.l6),
            f(r.grad_l2),
            f(r.div_max.unwrap_or(f64::NAN)),
            f(r.energy_residual),
        ])?;
    }
    w.flush()?;
    Ok(())
}
