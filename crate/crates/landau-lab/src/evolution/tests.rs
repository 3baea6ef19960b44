use std::f64::consts::PI;

use super::*;
use crate::random;
use crate::spectral::{l2_spectral, VectorField};

fn box32() -> Grid {
    Grid::new(32, 16.0).unwrap()
}

fn data(g: Grid, band: usize, amp: f64, stream: u64) -> VectorField {
    random::solenoidal_field(g, band, &mut random::rng(crate::DEFAULT_SEED, stream)).scaled(amp)
}

fn l3_diff(a: &VectorField, b: &VectorField) -> f64 {
    crate::inequalities::lq_norm(&a.sub(b).unwrap(), 3.0).unwrap()
}

#[test]
fn zero_perturbation_stays_zero() {
    let g = box32();
    let cfg = EvolutionConfig::new(0.02, 2.0).with_background(LandauParams::for_grid(10.0, &g).unwrap());
    let stepper = Stepper::new(g, &cfg).unwrap();
    let mut s = State::new(VectorField::zeros(g)).unwrap();
    for _ in 0..100 {
        let next = stepper.step(&s).unwrap();
        assert!(next.w.sub(&s.w).unwrap().max_abs() <= 1e-12);
        s = next;
    }
    assert_eq!(s.step, 100);
    assert!((s.t - 2.0).abs() < 1e-12);
}

#[test]
fn uncoupled_linear_flow_is_exact_heat_decay() {
    let g = Grid::new(32, 4.0 * PI).unwrap();
    let a0 = VectorField::from_fn(g, |x| [0.0, (2.0 * x[0]).sin(), 0.0]);
    let mut cfg = EvolutionConfig::new(0.01, 0.5)
        .with_background(LandauParams::for_grid(5.0, &g).unwrap())
        .with_scheme(Scheme::ImexEuler);
    cfg.coupling = 0.0;
    let tr = evolve_linear(&a0, &cfg).unwrap();
    for r in &tr.records {
        let expect = (-4.0 * r.t).exp() * l2_spectral(&a0);
        assert!((r.l2 - expect).abs() < 1e-13, "t = {}", r.t);
        assert!(r.energy_residual.abs() < 1e-8 * expect * expect);
    }
}

#[test]
fn linear_flow_is_linear() {
    let g = box32();
    let cfg = EvolutionConfig::new(0.02, 0.4).with_background(LandauParams::for_grid(5.0, &g).unwrap());
    let (a, b) = (data(g, 3, 0.5, 1), data(g, 3, 0.3, 2));
    let sum = evolve_linear(&a.add(&b).unwrap(), &cfg).unwrap();
    let ta = evolve_linear(&a, &cfg).unwrap();
    let tb = evolve_linear(&b, &cfg).unwrap();
    let combo = ta.final_field().add(tb.final_field()).unwrap();
    assert!(sum.final_field().sub(&combo).unwrap().max_abs() < 1e-10);
}

#[test]
fn scheme_orders_by_step_halving() {
    let g = Grid::new(16, 2.0 * PI).unwrap();
    let w0 = data(g, 2, 2.0, 3);
    let order = |scheme: Scheme| {
        let run = |dt: f64| {
            let cfg = EvolutionConfig::new(dt, 0.4).with_scheme(scheme).with_snapshot_every(1000);
            evolve(&State::new(w0.clone()).unwrap(), &cfg).unwrap().final_field().clone()
        };
        let (a, b, c) = (run(0.02), run(0.01), run(0.005));
        (l2_spectral(&a.sub(&b).unwrap()) / l2_spectral(&b.sub(&c).unwrap())).log2()
    };
    let p1 = order(Scheme::ImexEuler);
    let p2 = order(Scheme::ImexRk2);
    assert!((p1 - 1.0).abs() < 0.2, "euler order {p1}");
    assert!((p2 - 2.0).abs() < 0.2, "rk2 order {p2}");
}

#[test]
fn runs_are_bit_identical() {
    let g = box32();
    let cfg = EvolutionConfig::new(0.02, 0.2).with_background(LandauParams::for_grid(10.0, &g).unwrap());
    let s = State::new(data(g, 3, 0.1, 4)).unwrap();
    let (a, b) = (evolve(&s, &cfg).unwrap(), evolve(&s, &cfg).unwrap());
    assert_eq!(a.records, b.records);
    assert_eq!(a.final_field().values(), b.final_field().values());
}

#[test]
fn split_reproduces_full_run() {
    let g = box32();
    let cfg = EvolutionConfig::new(0.02, 0.4).with_background(LandauParams::for_grid(10.0, &g).unwrap());
    let (v1, v2) = (data(g, 3, 0.05, 5), data(g, 3, 0.2, 6));
    let full = evolve(&State::new(v1.add(&v2).unwrap()).unwrap(), &cfg).unwrap();
    let split = evolve_split(&v1, &v2, &cfg).unwrap();
    let sum = split.v1.final_field().add(split.v2.final_field()).unwrap();
    assert!(l3_diff(&sum, full.final_field()) < 1e-12);

    let degenerate = evolve_split(&VectorField::zeros(g), &v2, &cfg).unwrap();
    assert!(degenerate.v1.final_field().max_abs() < 1e-12);
    assert!(l3_diff(degenerate.v2.final_field(), &evolve(&State::new(v2.clone()).unwrap(), &cfg).unwrap().final_field().clone()) < 1e-12);

    let quiet = evolve_split(&v1, &VectorField::zeros(g), &cfg).unwrap();
    assert!(quiet.v2.final_field().max_abs() < 1e-10);
    assert!(quiet.v2.records.iter().all(|r| r.energy_residual.abs() < 1e-20));
}

#[test]
fn energy_residual_is_small_for_small_data() {
    let g = box32();
    let cfg = EvolutionConfig::new(0.01, 1.0).with_background(LandauParams::for_grid(10.0, &g).unwrap());
    let w0 = data(g, 3, 0.1, 7);
    let tr = evolve(&State::new(w0.clone()).unwrap(), &cfg).unwrap();
    let e0 = l2_spectral(&w0).powi(2);
    let report = energy_report(&tr);
    assert_eq!(report.first().unwrap().residual, 0.0);
    let last = report.last().unwrap();
    assert!(last.residual.abs() <= 1e-6 * e0.max(1.0) * last.t, "{last:?}");
    // Energy does not grow.
    assert!(tr.records.windows(2).all(|w| w[1].l2 <= w[0].l2));
    assert!(tr.snapshot_records().all(|r| r.div_max.unwrap() <= 1e-10));
}

#[test]
fn zero_field_has_zero_energy_report() {
    let g = Grid::new(8, 1.0).unwrap();
    let tr = evolve(&State::new(VectorField::zeros(g)).unwrap(), &EvolutionConfig::new(0.01, 0.05)).unwrap();
    for r in energy_report(&tr) {
        assert_eq!((r.energy, r.dissipation, r.work, r.residual), (0.0, 0.0, 0.0, 0.0));
    }
}

#[test]
fn mollifier_properties() {
    let g = box32();
    let w = data(g, 4, 1.0, 8);
    let shifted = VectorField::from_fn(g, |_| [0.3, -0.1, 0.2]).add(&w).unwrap();
    let j = mollify(&shifted, 4.0 * g.h()).unwrap();
    assert!(crate::spectral::div_max(&j) < 1e-12);
    let (a, b) = (j.spectral(), shifted.spectral());
    for d in 0..3 {
        assert!((a[d][0] - b[d][0]).norm() < 1e-14);
    }
    assert!(l2_spectral(&j) <= l2_spectral(&shifted));
}

#[test]
fn mollified_runs_approach_the_unmollified_one() {
    let g = box32();
    let cfg = EvolutionConfig::new(0.02, 0.4).with_background(LandauParams::for_grid(10.0, &g).unwrap());
    let w0 = data(g, 4, 0.5, 9);
    let exact = evolve(&State::new(w0.clone()).unwrap(), &cfg).unwrap();
    let gaps: Vec<f64> = [8.0, 4.0, 2.0]
        .iter()
        .map(|cells| l3_diff(evolve_mollified(&w0, cells * g.h(), &cfg).unwrap().final_field(), exact.final_field()))
        .collect();
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
    assert!(matches!(evolve_mollified(&w0, g.h(), &cfg), Err(crate::Error::UnderResolved(_))));
}

#[test]
fn cfl_violation_is_reported() {
    let g = Grid::new(16, 2.0 * PI).unwrap();
    let w0 = data(g, 2, 50.0, 10);
    let err = evolve(&State::new(w0).unwrap(), &EvolutionConfig::new(0.5, 1.0)).unwrap_err();
    assert!(matches!(err, crate::Error::Cfl { .. }));
}

#[test]
fn rejects_divergent_initial_data() {
    let g = Grid::new(16, 2.0 * PI).unwrap();
    let grad = VectorField::from_fn(g, |x| [x[0].cos(), 0.0, 0.0]);
    assert!(State::new(grad).is_err());
}

#[test]
fn trajectory_directory_layout() {
    let g = Grid::new(8, 1.0).unwrap();
    let tr = evolve(&State::new(data(g, 2, 0.1, 11)).unwrap(), &EvolutionConfig::new(0.001, 0.004).with_snapshot_every(2))
        .unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_trajectory(dir.path(), &tr, "experiment = split\n").unwrap();
    let csv = std::fs::read_to_string(dir.path().join("diagnostics.csv")).unwrap();
    assert!(csv.starts_with("step,t,l2,l3,l6,grad_l2,div_max,energy_residual\n"));
    assert_eq!(csv.lines().count(), 4);
    for s in ["0000", "0002", "0004"] {
        assert!(dir.path().join("snapshots").join(format!("{s}.field")).exists());
    }
}
