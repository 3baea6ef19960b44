use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use super::trajectory::{Accumulator, SplitTrajectory, Trajectory};
use super::{shared_background, EvolutionConfig, Mode, Scheme, State};
use crate::error::{invalid, Error, Result};
use crate::landau::TruncatedBackground;
use crate::spectral::{self, Grid, VectorField};

type Coeffs = [Vec<Complex64>; 3];
type Phys = [Vec<f64>; 3];

/// Which right-hand side to advance.
#[derive(Clone, Copy)]
pub(crate) enum System<'a> {
    Full,
    Linear,
    Mollified,
    Split,
    /// `z_t − Δz + P div(κ(z⊗V + V⊗z) + w1⊗w2) = 0`, forcing read per step.
    Forced(&'a Trajectory, &'a Trajectory),
}

/// Explicit part `N(w)` at one state, so that `w_t = Δw − N(w)`.
pub(crate) struct Eval {
    pub n: Coeffs,
    pub phys: Phys,
    pub speed: f64,
}

/// Owns everything that is fixed during a run: the background, its
/// imbalance and the per-mode multipliers. Cheap to clone.
#[derive(Clone)]
pub struct Stepper {
    grid: Grid,
    cfg: EvolutionConfig,
    background: Option<Arc<TruncatedBackground>>,
    bg: Option<Arc<Phys>>,
    /// `ΔV − P div(V⊗V) + F`: zero up to rounding.
    imbalance: Option<Arc<Coeffs>>,
    bg_speed: f64,
    decay: Arc<Vec<f64>>,
    /// `(1 − e^{−2k²dt})/2 = ∫₀^dt k² e^{−2k²s} ds`.
    dissipated: Arc<Vec<f64>>,
    mollifier: Option<Arc<Vec<f64>>>,
}

impl Stepper {
    pub fn new(grid: Grid, cfg: &EvolutionConfig) -> Result<Self> {
        cfg.validate(&grid)?;
        Self::with_background(grid, cfg, shared_background(cfg, grid)?)
    }

    /// Reuse an already built background (it must match `cfg.background`).
    pub fn with_background(grid: Grid, cfg: &EvolutionConfig, bg: Option<Arc<TruncatedBackground>>) -> Result<Self> {
        cfg.validate(&grid)?;
        if let Some(b) = &bg {
            grid.same_as(b.grid())?;
        }
        let dt = cfg.dt;
        let decay = (0..grid.len()).into_par_iter().map(|i| (-grid.k2(i) * dt).exp()).collect();
        let dissipated = (0..grid.len()).into_par_iter().map(|i| -0.5 * (-2.0 * grid.k2(i) * dt).exp_m1()).collect();
        let mollifier = match (cfg.mode, cfg.mollifier_eps) {
            (Mode::Mollified, Some(eps)) => Some(Arc::new(mollifier_symbol(&grid, eps))),
            _ => None,
        };
        let (bg_phys, imbalance, bg_speed) = match &bg {
            Some(b) => {
                let v = b.velocity.physical().into_owned();
                let mut nl = spectral::div_symmetric(&grid, &sym_tensor(&[(1.0, &v, &v)]));
                spectral::project_in_place(&grid, &mut nl);
                let vc = b.velocity.spectral();
                let f = b.compensation.spectral();
                let r: Coeffs = std::array::from_fn(|d| {
                    (0..grid.len()).into_par_iter().map(|i| -grid.k2(i) * vc[d][i] - nl[d][i] + f[d][i]).collect()
                });
                (Some(Arc::new(v)), Some(Arc::new(r)), b.max_speed())
            }
            None => (None, None, 0.0),
        };
        Ok(Self {
            grid,
            cfg: cfg.clone(),
            background: bg,
            bg: bg_phys,
            imbalance,
            bg_speed,
            decay: Arc::new(decay),
            dissipated: Arc::new(dissipated),
            mollifier,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn config(&self) -> &EvolutionConfig {
        &self.cfg
    }

    pub fn background(&self) -> Option<&Arc<TruncatedBackground>> {
        self.background.as_ref()
    }

    /// One step in the configured mode. The input is untouched, so on error
    /// it is the last good state.
    pub fn step(&self, state: &State) -> Result<State> {
        let (sys, ws) = self.system_of(state)?;
        let (next, _) = self.advance(sys, &ws, state.step)?;
        let step = state.step + 1;
        let t = step as f64 * self.cfg.dt;
        check_finite(&next, step, t)?;
        let mut it = next.into_iter().map(|c| VectorField::from_coeffs(self.grid, c).unwrap());
        let w = it.next().unwrap();
        Ok(State { t, step, w, v2: it.next() })
    }

    /// Run from `state0` for `cfg.t_end` (single-field modes).
    pub fn run(&self, state0: &State) -> Result<Trajectory> {
        let (sys, ws) = self.system_of(state0)?;
        if matches!(sys, System::Split) {
            return Err(invalid("split mode produces two trajectories; use run_split"));
        }
        Ok(self.run_system(sys, ws)?.pop().unwrap())
    }

    pub fn run_split(&self, state0: &State) -> Result<SplitTrajectory> {
        let (sys, ws) = self.system_of(state0)?;
        if !matches!(sys, System::Split) {
            return Err(invalid("run_split needs split mode and a two-field state"));
        }
        let mut out = self.run_system(sys, ws)?;
        let v2 = out.pop().unwrap();
        let v1 = out.pop().unwrap();
        Ok(SplitTrajectory { v1, v2 })
    }

    /// Forced linear flow from `z(0) = 0` with forcing `P div(w1⊗w2)` taken
    /// from two trajectories stored at every step on the same mesh.
    pub fn run_forced(&self, w1: &Trajectory, w2: &Trajectory) -> Result<Trajectory> {
        let n = self.cfg.n_steps()?;
        for w in [w1, w2] {
            self.grid.same_as(&w.grid)?;
            if (w.dt - self.cfg.dt).abs() > 1e-15 * self.cfg.dt || w.snapshot_every != 1 || w.snapshots.len() < n + 1 {
                return Err(Error::GridMismatch(format!(
                    "forcing trajectory needs every step stored on dt = {} over {} steps",
                    self.cfg.dt, n
                )));
            }
        }
        let zero: Coeffs = std::array::from_fn(|_| vec![Complex64::default(); self.grid.len()]);
        Ok(self.run_system(System::Forced(w1, w2), vec![zero])?.pop().unwrap())
    }

    fn system_of(&self, s: &State) -> Result<(System<'static>, Vec<Coeffs>)> {
        self.grid.same_as(s.w.grid())?;
        let w = s.w.spectral().into_owned();
        Ok(match (self.cfg.mode, &s.v2) {
            (Mode::Split, Some(v2)) => (System::Split, vec![w, v2.spectral().into_owned()]),
            (Mode::Split, None) => return Err(invalid("split mode needs a state built with State::split")),
            (_, Some(_)) => return Err(invalid("two-field state given to a single-field mode")),
            (Mode::Full, None) => (System::Full, vec![w]),
            (Mode::Linear, None) => (System::Linear, vec![w]),
            (Mode::Mollified, None) => (System::Mollified, vec![w]),
        })
    }

    pub(crate) fn run_system(&self, sys: System, init: Vec<Coeffs>) -> Result<Vec<Trajectory>> {
        let n_steps = self.cfg.n_steps()?;
        let dt = self.cfg.dt;
        let mut trajs: Vec<Trajectory> =
            init.iter().map(|_| Trajectory::empty(self.grid, dt, self.cfg.snapshot_every)).collect();
        let mut accs = vec![Accumulator::default(); init.len()];
        let mut ws = init;
        for n in 0..=n_steps {
            let t = n as f64 * dt;
            let (evals, next) = if n < n_steps {
                let (next, ev) = self.advance(sys, &ws, n)?;
                (ev, Some(next))
            } else {
                (self.eval(sys, &ws, n)?, None)
            };
            let keep = n % self.cfg.snapshot_every == 0 || n == n_steps;
            for (i, ev) in evals.into_iter().enumerate() {
                trajs[i].record(&mut accs[i], self, n, t, &ws[i], ev, keep)?;
            }
            if let Some(next) = next {
                check_finite(&next, n + 1, t + dt)?;
                ws = next;
            }
        }
        Ok(trajs)
    }

    fn advance(&self, sys: System, ws: &[Coeffs], idx: usize) -> Result<(Vec<Coeffs>, Vec<Eval>)> {
        let dt = self.cfg.dt;
        let t = idx as f64 * dt;
        let k1 = self.eval(sys, ws, idx)?;
        self.cfl(&k1, t)?;
        let next = match self.cfg.scheme {
            Scheme::ImexEuler => ws.iter().zip(&k1).map(|(w, k)| self.propagate(w, &k.n, dt, None)).collect(),
            Scheme::ImexRk2 => {
                let star: Vec<Coeffs> = ws.iter().zip(&k1).map(|(w, k)| self.propagate(w, &k.n, dt, None)).collect();
                let k2 = self.eval(sys, &star, idx + 1)?;
                self.cfl(&k2, t + dt)?;
                ws.iter()
                    .zip(k1.iter().zip(&k2))
                    .map(|(w, (a, b))| self.propagate(w, &a.n, 0.5 * dt, Some(&b.n)))
                    .collect()
            }
        };
        Ok((next, k1))
    }

    /// `E(w − s·n) − s·after`.
    fn propagate(&self, w: &Coeffs, n: &Coeffs, s: f64, after: Option<&Coeffs>) -> Coeffs {
        let e = &self.decay;
        std::array::from_fn(|d| {
            (0..self.grid.len())
                .into_par_iter()
                .map(|i| {
                    let v = e[i] * (w[d][i] - s * n[d][i]);
                    match after {
                        Some(a) => v - s * a[d][i],
                        None => v,
                    }
                })
                .collect()
        })
    }

    fn cfl(&self, evals: &[Eval], t: f64) -> Result<()> {
        let speed = evals.iter().map(|e| e.speed).fold(0.0, f64::max);
        let limit = 0.5 * self.grid.h() / speed;
        if self.cfg.dt > limit {
            return Err(Error::Cfl { t, dt: self.cfg.dt, limit });
        }
        Ok(())
    }

    pub(crate) fn eval(&self, sys: System, ws: &[Coeffs], idx: usize) -> Result<Vec<Eval>> {
        let g = self.grid;
        let k = self.cfg.coupling;
        let bg = self.bg.as_deref();
        let coupled = bg.filter(|_| k != 0.0);
        let phys0 = spectral::to_physical3(&g, &ws[0]);
        let speed0 = max_speed(&phys0) + self.bg_speed;
        let first = match sys {
            System::Full | System::Split => {
                let mut terms = vec![(1.0, &phys0, &phys0)];
                if let Some(v) = coupled {
                    terms.push((2.0 * k, &phys0, v));
                }
                self.finish(spectral::div_symmetric(&g, &sym_tensor(&terms)), true)
            }
            System::Linear => match coupled {
                Some(v) => self.finish(spectral::div_symmetric(&g, &sym_tensor(&[(2.0 * k, &phys0, v)])), false),
                None => zero_coeffs(&g),
            },
            System::Mollified => {
                let m = self.mollifier.as_ref().expect("mollifier built for mollified mode");
                let jw: Coeffs = std::array::from_fn(|d| ws[0][d].par_iter().zip(m.par_iter()).map(|(z, s)| z * s).collect());
                let u = spectral::to_physical3(&g, &jw);
                let mut n = spectral::div_outer(&g, &[(&u, &phys0)]);
                if let Some(v) = coupled {
                    // κ((Jw·∇)V + (V·∇)w)
                    let c = spectral::div_outer(&g, &[(&u, v), (v, &phys0)]);
                    add_scaled(&mut n, k, &c);
                }
                let out = self.finish(n, true);
                let speed = max_speed(&u) + self.bg_speed;
                return Ok(vec![Eval { n: out, phys: phys0, speed }]);
            }
            System::Forced(w1, w2) => {
                let a = w1.phys_at(idx)?;
                if std::ptr::eq(w1, w2) {
                    let mut terms = vec![(1.0, a, a)];
                    if let Some(v) = coupled {
                        terms.push((2.0 * k, &phys0, v));
                    }
                    self.finish(spectral::div_symmetric(&g, &sym_tensor(&terms)), false)
                } else {
                    let b = w2.phys_at(idx)?;
                    let mut n = spectral::div_outer(&g, &[(a, b)]);
                    if let Some(v) = coupled {
                        let c = spectral::div_symmetric(&g, &sym_tensor(&[(2.0, &phys0, v)]));
                        add_scaled(&mut n, k, &c);
                    }
                    self.finish(n, false)
                }
            }
        };
        let mut out = vec![Eval { n: first, phys: phys0, speed: speed0 }];
        if let System::Split = sys {
            let v1 = &out[0].phys;
            let v2 = spectral::to_physical3(&g, &ws[1]);
            // U = κV + v1
            let u: Phys = match coupled {
                Some(v) => std::array::from_fn(|d| v1[d].par_iter().zip(v[d].par_iter()).map(|(a, b)| a + k * b).collect()),
                None => v1.clone(),
            };
            let n = self.finish(spectral::div_symmetric(&g, &sym_tensor(&[(1.0, &v2, &v2), (2.0, &v2, &u)])), false);
            let speed = max_speed(&v2) + max_speed(v1) + self.bg_speed;
            out.push(Eval { n, phys: v2, speed });
        }
        Ok(out)
    }

    /// Project, then remove the background imbalance where the background
    /// self-interaction belongs to the equation.
    fn finish(&self, mut n: Coeffs, with_imbalance: bool) -> Coeffs {
        spectral::project_in_place(&self.grid, &mut n);
        if with_imbalance {
            if let Some(r) = &self.imbalance {
                add_scaled(&mut n, -1.0, r);
            }
        }
        n
    }

    pub(crate) fn dissipated(&self) -> &[f64] {
        &self.dissipated
    }
}

fn zero_coeffs(g: &Grid) -> Coeffs {
    std::array::from_fn(|_| vec![Complex64::default(); g.len()])
}

fn add_scaled(n: &mut Coeffs, s: f64, other: &Coeffs) {
    for (a, b) in n.iter_mut().zip(other) {
        a.par_iter_mut().zip(b.par_iter()).for_each(|(x, y)| *x += s * y);
    }
}

fn max_speed(v: &Phys) -> f64 {
    (0..v[0].len())
        .into_par_iter()
        .map(|i| (v[0][i] * v[0][i] + v[1][i] * v[1][i] + v[2][i] * v[2][i]).sqrt())
        .reduce(|| 0.0, f64::max)
}

/// `T_ij = Σ coef (a_i b_j + a_j b_i)/2` as `[T00, T11, T22, T01, T02, T12]`.
fn sym_tensor(terms: &[(f64, &Phys, &Phys)]) -> [Vec<f64>; 6] {
    const IJ: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];
    let len = terms[0].1[0].len();
    std::array::from_fn(|s| {
        let (i, j) = IJ[s];
        (0..len)
            .into_par_iter()
            .map(|x| terms.iter().map(|(c, a, b)| 0.5 * c * (a[i][x] * b[j][x] + a[j][x] * b[i][x])).sum())
            .collect()
    })
}

fn check_finite(ws: &[Coeffs], step: usize, t: f64) -> Result<()> {
    let ok = ws.iter().all(|w| w.iter().all(|c| c.par_iter().all(|z| z.re.is_finite() && z.im.is_finite())));
    if ok {
        Ok(())
    } else {
        Err(Error::NonFinite { step, t })
    }
}

fn mollifier_symbol(g: &Grid, eps: f64) -> Vec<f64> {
    (0..g.len()).into_par_iter().map(|i| (-0.5 * eps * eps * g.k2(i)).exp()).collect()
}

/// `J_ε w`: convolution with a unit-mass Gaussian of width `ε`, i.e. the
/// multiplier `e^{−ε²|k|²/2}`.
pub fn mollify(w: &VectorField, eps: f64) -> Result<VectorField> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(invalid(format!("mollifier length must be nonnegative, got {eps}")));
    }
    let g = *w.grid();
    let m = mollifier_symbol(&g, eps);
    let c = w.spectral();
    VectorField::from_coeffs(g, std::array::from_fn(|d| c[d].par_iter().zip(m.par_iter()).map(|(z, s)| z * s).collect()))
}
