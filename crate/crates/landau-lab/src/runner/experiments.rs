use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::config::{Experiment, RunConfig};
use super::output::{Metric, Table};
use crate::analysis::{
    continuous_dependence_experiment, decay_study, lowest_mode, resolvent_probe, swirl_data, weak_strong_experiment,
    DecayWindow, ResolventConfig,
};
use crate::error::Result;
use crate::evolution::{evolve, evolve_split, Mode, State};
use crate::format::num;
use crate::inequalities::{
    double_riesz_bound, grad_bound_audit, hardy_audit, hardy_ratio, lq_norm, riesz_audit, riesz_norm_constant,
};
use crate::landau::{force_parameter, momentum_flux, stationary_residual, weighted_speed_bound};
use crate::mild::{constants_estimate, picard_solve};
use crate::random;
use crate::spectral::{self, Grid, ScalarField, VectorField};

/// What an experiment produced: audited metrics and CSV tables.
#[derive(Debug, Default)]
pub struct Outcome {
    pub metrics: BTreeMap<String, Metric>,
    pub tables: Vec<Table>,
}

impl Outcome {
    fn metric(&mut self, name: impl Into<String>, m: Metric) {
        self.metrics.insert(name.into(), m);
    }
}

pub fn dispatch(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.experiment() {
        Experiment::LandauVerify => landau_verify(cfg),
        Experiment::Inequalities => inequalities(cfg),
        Experiment::LinearDecay => linear_decay(cfg),
        Experiment::Picard => picard(cfg),
        Experiment::Decay => decay(cfg),
        Experiment::Split => split(cfg),
        Experiment::WeakStrong => weakstrong(cfg),
        Experiment::Continuity => continuity(cfg),
        Experiment::Resolvent => resolvent(cfg),
    }
}

/// Random solenoidal data (unit L² times `data.amplitude`) from `stream`, or
/// the swirl profile.
fn initial_data(cfg: &RunConfig, grid: Grid, stream: u64) -> Result<VectorField> {
    let amp = cfg.real("data.amplitude");
    match cfg.text("data.kind") {
        "swirl" => swirl_data(grid, amp, cfg.real("data.core"), cfg.real("data.r_in"), cfg.real("data.r_out")),
        _ => Ok(random::solenoidal_field(grid, cfg.usize("data.band"), &mut random::rng(cfg.seed(), stream)).scaled(amp)),
    }
}

fn l3_gap(a: &VectorField, b: &VectorField) -> Result<f64> {
    lq_norm(&a.sub(b)?, 3.0)
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn landau_verify(cfg: &RunConfig) -> Result<Outcome> {
    let mut out = Outcome::default();
    let c = cfg.real("landau.c");
    let h = cfg.real("verify.h");
    let mut rng = random::rng(cfg.seed(), 0);
    let mut pts = Table::new("residuals.csv", &["x1", "x2", "x3", "residual_h", "residual_half_h"]);
    let (mut worst, mut order_dev) = (0.0f64, 0.0f64);
    for _ in 0..cfg.usize("verify.points") {
        let d: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let r: f64 = rng.gen_range(0.5..=2.0);
        let x = d.map(|v| v * r / norm3(d));
        let a = norm3(stationary_residual(c, x, h)?);
        let b = norm3(stationary_residual(c, x, h / 2.0)?);
        worst = worst.max(a);
        order_dev = order_dev.max((a / b / 4.0 - 1.0).abs());
        pts.push(vec![num(x[0]), num(x[1]), num(x[2]), num(a), num(b)]);
    }
    out.metric("fd_residual", Metric::at_most(worst, 1e-4));
    out.metric("fd_order_deviation", Metric::at_most(order_dev, 0.25));

    let n_quad = cfg.usize("verify.n_quad");
    let fluxes = [0.5, 1.0, 2.0].map(|r| momentum_flux(c, r, n_quad).map(|m| m.flux[0]));
    let fluxes: Vec<f64> = fluxes.into_iter().collect::<Result<_>>()?;
    let scale = fluxes.iter().map(|f| f.abs()).fold(0.0, f64::max);
    let spread = fluxes.iter().flat_map(|a| fluxes.iter().map(move |b| (a - b).abs())).fold(0.0, f64::max) / scale;
    let b = force_parameter(c)?;
    let mismatch = fluxes.iter().map(|f| (f - b).abs() / b.abs()).fold(0.0, f64::max);
    out.metric("flux_spread", Metric::at_most(spread, 0.005));
    out.metric("flux_check", Metric::at_most(mismatch, 0.01));
    out.metric("force_parameter", Metric::report(b));

    for &cc in cfg.reals("verify.c_list") {
        let w = weighted_speed_bound(cc, cfg.usize("verify.samples"))?;
        out.metric(format!("weighted_bound_c{cc}"), Metric::at_most(w.sup_estimate, w.bound + 1e-9));
    }
    out.tables.push(pts);
    Ok(out)
}

fn inequalities(cfg: &RunConfig) -> Result<Outcome> {
    let mut out = Outcome::default();
    let g = cfg.grid()?;
    let seed = cfg.seed();
    let gaussian = ScalarField::from_fn(g, |x| (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 2.0).exp());
    out.metric("hardy_gaussian", Metric::at_most((hardy_ratio(&gaussian)? - 1.0 / 3f64.sqrt()).abs(), 1e-3));
    let hardy = hardy_audit(g, cfg.usize("audit.trials"), seed)?;
    out.metric("hardy_random_max_ratio", Metric::at_most(1.0 - hardy.worst_margin, 1.0 + 1e-3));

    out.metric("riesz_constant_r2", Metric::at_most((riesz_norm_constant(2.0)? - 1.0).abs(), 0.0));
    out.metric("riesz_constant_r4", Metric::at_most((riesz_norm_constant(4.0)? - 1.0 - 2f64.sqrt()).abs(), 1e-12));
    let band = cfg.usize("data.band");
    for r in [1.5, 2.0, 3.0, 4.0] {
        let a = riesz_audit(g, r, band, 20, seed.wrapping_add(1))?;
        out.metric(format!("riesz_ratio_r{r}"), Metric::at_most(double_riesz_bound(r)? - a.worst_margin, double_riesz_bound(r)?));
    }

    let v = random::solenoidal_field(g, band, &mut random::rng(seed, 2));
    let raw = VectorField::from_components(g, std::array::from_fn(|c| {
        random::smooth_scalar(g, band, &mut random::rng(seed, 3 + c as u64)).physical().into_owned()
    }))?;
    let p = spectral::leray_project(&raw);
    let idem = spectral::leray_project(&p).sub(&p)?.max_abs();
    out.metric("leray_idempotence", Metric::at_most(idem, 1e-12));
    out.metric("leray_divergence", Metric::at_most(spectral::div_max(&p).max(spectral::div_max(&v)), 1e-12));
    let gb = grad_bound_audit(g, band.min(g.n() / 4), cfg.usize("audit.trials"), seed.wrapping_add(4))?;
    out.metric("gradient_bound_violation", Metric::at_most(-gb.worst_margin, 1e-6));
    Ok(out)
}

fn linear_decay(cfg: &RunConfig) -> Result<Outcome> {
    let mut out = Outcome::default();
    let g = cfg.grid()?;
    let ecfg = cfg.evolution()?.with_mode(Mode::Linear).with_snapshot_every(usize::MAX);
    let mut table = Table::new("linear.csv", &["trial", "t", "l2", "l3", "l6"]);
    let mut worst: BTreeMap<u64, f64> = BTreeMap::new();
    for trial in 0..cfg.int("linear.trials") {
        let a0 = random::solenoidal_field(g, cfg.usize("data.band"), &mut random::rng(cfg.seed(), trial));
        let tr = evolve(&State::new(a0)?, &ecfg)?;
        for r in &tr.records {
            table.push(vec![trial.to_string(), num(r.t), num(r.l2), num(r.l3), num(r.l6)]);
        }
        for &p in cfg.reals("linear.p_list") {
            let get = |r: &crate::evolution::StepRecord| match p as u32 {
                2 => r.l2,
                3 => r.l3,
                _ => r.l6,
            };
            let growth = tr.records.windows(2).map(|w| (get(&w[1]) - get(&w[0])) / get(&w[0])).fold(f64::NEG_INFINITY, f64::max);
            let e = worst.entry(p as u64).or_insert(f64::NEG_INFINITY);
            *e = e.max(growth);
        }
    }
    for (p, g) in worst {
        out.metric(format!("max_step_growth_l{p}"), Metric::at_most(g, 1e-10));
    }
    out.tables.push(table);
    Ok(out)
}

fn picard(cfg: &RunConfig) -> Result<Outcome> {
    let mut out = Outcome::default();
    let g = cfg.grid()?;
    let ecfg = cfg.evolution()?.with_mode(Mode::Full);
    let ledger = constants_estimate(g, cfg.usize("picard.trials"), cfg.seed(), &ecfg)?;
    let eps0 = ledger.epsilon0()?;
    let raw = random::solenoidal_field(g, cfg.usize("data.band"), &mut random::rng(cfg.seed(), 5_000_000));
    let w0 = raw.scaled(cfg.real("picard.gate_fraction") * eps0 / lq_norm(&raw, 3.0)?);
    let max_iter = cfg.usize("picard.max_iter");
    let (limit, rep) = picard_solve(&w0, cfg.real("picard.tol"), max_iter, &ecfg, Some(&ledger))?;
    let direct = evolve(&State::new(w0)?, &ecfg.clone().with_snapshot_every(usize::MAX))?;
    let gap = l3_gap(limit.final_field(), direct.final_field())?;

    let gate = rep.gate.expect("gate is evaluated when a ledger is given");
    out.metric("gate", Metric { value: Some(gate.norm_w0_l3), threshold: Some(gate.epsilon0), passed: gate.passed });
    out.metric("c1", Metric::report(ledger.c1.unwrap()));
    out.metric("c2", Metric::report(ledger.c2.unwrap()));
    out.metric(
        "picard_iterations",
        Metric { value: Some(rep.iterates as f64), threshold: Some(max_iter as f64), passed: rep.converged },
    );
    out.metric("picard_contraction", Metric::at_most(rep.contraction_ratio.unwrap_or(f64::NAN), 0.5));
    out.metric("picard_vs_direct_l3", Metric::at_most(gap, 1e-3));
    let mut table = Table::new("picard.csv", &["iteration", "residual"]);
    for (i, r) in rep.residual_history.iter().enumerate() {
        table.push(vec![(i + 1).to_string(), num(*r)]);
    }
    out.tables.push(table);
    Ok(out)
}

fn decay(cfg: &RunConfig) -> Result<Outcome> {
    let mut out = Outcome::default();
    let g = cfg.grid()?;
    let w0 = initial_data(cfg, g, 0)?;
    let window = DecayWindow {
        t_min: Some(cfg.real("decay.t_min")).filter(|t| *t > 0.0),
        t_sat: Some(cfg.real("decay.t_sat")).filter(|t| *t > 0.0),
    };
    let study = decay_study(&w0, cfg.reals("decay.q_list"), &cfg.evolution()?.with_mode(Mode::Full), window)?;
    let mut table = Table::new("decay.csv", &["t", "q", "norm", "envelope", "ratio"]);
    for r in &study.records {
        table.push(vec![num(r.t), num(r.q), num(r.norm), num(r.envelope), num(r.ratio)]);
    }
    out.metric("w0_l3", Metric::report(study.w0_l3));
    for f in &study.fits {
        let q = f.q;
        if q > 3.0 {
            let dev = f.exponent.map_or(f64::NAN, |e| (e - f.theory).abs());
            out.metric(format!("exponent_deviation_q{q}"), Metric::at_most(dev, 0.15));
        }
        out.metric(format!("exponent_q{q}"), Metric::report(f.exponent.unwrap_or(f64::NAN)));
        out.metric(format!("envelope_ratio_q{q}"), Metric::at_most(f.max_ratio, 1.25));
        out.metric(format!("saturation_time_q{q}"), Metric::report(f.t_sat));
        out.metric(format!("saturation_detected_q{q}"), Metric::report(if f.saturation_detected { 1.0 } else { 0.0 }));
    }
    if let Some(f) = study.fits.first() {
        out.metric("t_min", Metric::report(f.t_min));
    }
    out.tables.push(table);
    Ok(out)
}

fn split(cfg: &RunConfig) -> Result<Outcome> {
    let mut out = Outcome::default();
    let g = cfg.grid()?;
    let w0 = initial_data(cfg, g, 0)?;
    let k_cut = cfg.real("split.k_cut");
    let c = w0.spectral();
    let low: [Vec<Complex64>; 3] =
        std::array::from_fn(|d| (0..g.len()).map(|i| if g.k2(i) <= k_cut * k_cut { c[d][i] } else { Complex64::default() }).collect());
    let v10 = VectorField::from_coeffs(g, low)?.to_physical();
    let v20 = w0.sub(&v10)?.to_physical();
    let ecfg = cfg.evolution()?.with_mode(Mode::Full);
    let full = evolve(&State::new(w0)?, &ecfg)?;
    let pair = evolve_split(&v10, &v20, &ecfg)?;
    let sum = pair.v1.final_field().add(pair.v2.final_field())?;
    out.metric("split_vs_full_l3", Metric::at_most(l3_gap(&sum, full.final_field())?, 1e-8));
    let rate = pair.v2.records.iter().filter(|r| r.t > 0.0).map(|r| r.energy_residual.abs() / r.t).fold(0.0, f64::max);
    out.metric("v2_energy_residual_rate", Metric::at_most(rate, 1e-6));
    let mut table = Table::new("split.csv", &["t", "v1_l3", "v2_l3", "v2_energy_residual"]);
    for (a, b) in pair.v1.records.iter().zip(&pair.v2.records) {
        table.push(vec![num(a.t), num(a.l3), num(b.l3), num(b.energy_residual)]);
    }
    out.tables.push(table);
    Ok(out)
}

fn weakstrong(cfg: &RunConfig) -> Result<Outcome> {
    let mut out = Outcome::default();
    let g = cfg.grid()?;
    let w0 = initial_data(cfg, g, 0)?;
    let pairs = cfg.pairs("weakstrong.pairs");
    let curves = weak_strong_experiment(&w0, pairs, &cfg.evolution()?.with_mode(Mode::Full))?;
    let mut table = Table::new("weakstrong.csv", &["t", "E", "res_pair"]);
    for c in &curves {
        let label = format!("{}:{}", c.coarse, c.fine);
        for (t, e) in c.t.iter().zip(&c.e) {
            table.push(vec![num(*t), num(*e), label.clone()]);
        }
        out.metric(format!("gap_{}_{}", c.coarse, c.fine), Metric::report(c.final_gap()));
    }
    let worst = curves.windows(2).map(|w| w[1].final_gap() / w[0].final_gap()).fold(0.0, f64::max);
    if curves.len() >= 2 {
        out.metric("gap_refinement_ratio", Metric::at_most(worst, 1.0 - f64::EPSILON));
    }
    out.tables.push(table);
    Ok(out)
}

fn continuity(cfg: &RunConfig) -> Result<Outcome> {
    let mut out = Outcome::default();
    let g = cfg.grid()?;
    let u0 = initial_data(cfg, g, 0)?;
    let dir = random::solenoidal_field(g, cfg.usize("data.band"), &mut random::rng(cfg.seed(), 1));
    let rep = continuous_dependence_experiment(&u0, &dir, cfg.reals("continuity.magnitudes"), &cfg.evolution()?.with_mode(Mode::Full))?;
    let lin = rep.linearity.iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max);
    out.metric("linearity_deviation", Metric::at_most(lin, 0.2));
    out.metric("c_hat_spread", Metric::at_most(rep.c_hat_spread, 0.5));
    out.metric("c_hat", Metric::report(rep.c_hat));
    out.metric("integral_l6", Metric::report(rep.integral_l6));
    let mut table = Table::new("continuity.csv", &["magnitude", "delta_l3", "sup_z_l3", "c_hat"]);
    for p in &rep.points {
        table.push(vec![num(p.magnitude), num(p.delta_l3), num(p.sup_z_l3), num(p.c_hat)]);
    }
    out.tables.push(table);
    Ok(out)
}

fn resolvent(cfg: &RunConfig) -> Result<Outcome> {
    let mut out = Outcome::default();
    let g = cfg.grid()?;
    let f = lowest_mode(g);
    let coupling = cfg.real("evolution.coupling");
    let mut table = Table::new("resolvent.csv", &["re_lambda", "im_lambda", "q", "ratio", "iters"]);
    for &q in cfg.reals("resolvent.q_list") {
        let rcfg = ResolventConfig {
            background: (coupling > 0.0).then(|| cfg.landau()).transpose()?,
            coupling,
            q,
            sector_delta: cfg.real("resolvent.sector_delta"),
            tol: cfg.real("resolvent.tol"),
            max_iter: cfg.usize("resolvent.max_iter"),
        };
        let mut probes = Vec::new();
        for &rho in cfg.reals("resolvent.rho") {
            for &theta in cfg.reals("resolvent.theta") {
                let p = resolvent_probe(Complex64::from_polar(rho, theta), &f, &rcfg)?;
                table.push(vec![num(p.re_lambda), num(p.im_lambda), num(q), num(p.ratio), p.iterations.to_string()]);
                probes.push((rho, theta, p));
            }
        }
        let unconverged = probes.iter().filter(|(_, _, p)| !p.converged).count();
        out.metric(format!("unconverged_q{q}"), Metric::at_most(unconverged as f64, 0.0));
        if coupling == 0.0 && q == 2.0 {
            let worst = probes.iter().map(|(_, _, p)| p.ratio).fold(0.0, f64::max);
            out.metric("max_ratio_q2", Metric::at_most(worst, 1.0 + 1e-6));
        }
        if coupling > 0.0 {
            let reference = probes.iter().find(|(r, t, _)| *r == 1.0 && *t == 0.0).map(|(_, _, p)| p.ratio);
            let spread = match reference {
                Some(r0) => probes
                    .iter()
                    .map(|(_, _, p)| if p.ratio.is_finite() && p.ratio > 0.0 { (p.ratio / r0).max(r0 / p.ratio) } else { f64::INFINITY })
                    .fold(0.0, f64::max),
                None => f64::NAN,
            };
            out.metric(format!("sector_spread_q{q}"), Metric::at_most(spread, 10.0));
        }
    }
    out.tables.push(table);
    Ok(out)
}
