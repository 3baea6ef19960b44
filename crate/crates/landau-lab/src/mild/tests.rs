use super::*;
use crate::evolution::{evolve, Scheme};
use crate::landau::LandauParams;
use crate::random;

fn grid() -> Grid {
    Grid::new(24, 12.0).unwrap()
}

fn cfg(g: &Grid, t_end: f64) -> EvolutionConfig {
    EvolutionConfig::new(0.01, t_end).with_background(LandauParams::for_grid(10.0, g).unwrap()).with_scheme(Scheme::ImexEuler)
}

fn data(g: Grid, amp: f64, stream: u64) -> VectorField {
    random::solenoidal_field(g, 3, &mut random::rng(crate::DEFAULT_SEED, stream)).scaled(amp)
}

#[test]
fn semigroup_identity_law_and_contraction() {
    let g = grid();
    let c = cfg(&g, 0.2);
    let w0 = data(g, 1.0, 1);
    assert_eq!(semigroup_apply(&w0, 0.0, &c).unwrap(), w0);
    let once = semigroup_apply(&w0, 0.3, &c).unwrap();
    let twice = semigroup_apply(&semigroup_apply(&w0, 0.1, &c).unwrap(), 0.2, &c).unwrap();
    assert!(once.sub(&twice).unwrap().max_abs() < 1e-12);
    assert!(lq_norm(&once, 3.0).unwrap() <= lq_norm(&w0, 3.0).unwrap() * (1.0 + 1e-8));
}

#[test]
fn duhamel_zero_and_bilinearity() {
    let g = grid();
    let c = cfg(&g, 0.1);
    let w1 = semigroup_trajectory(&data(g, 1.0, 2), &c).unwrap();
    let w2 = semigroup_trajectory(&data(g, 1.0, 3), &c).unwrap();
    let zero = semigroup_trajectory(&VectorField::zeros(g), &c).unwrap();
    assert_eq!(duhamel_bilinear(&zero, &w2, &c).unwrap().sup_l3(), 0.0);

    let w1x = semigroup_trajectory(&data(g, 2.5, 2), &c).unwrap();
    let z = duhamel_bilinear(&w1, &w2, &c).unwrap();
    let zx = duhamel_bilinear(&w1x, &w2, &c).unwrap();
    let gap = zx.final_field().sub(&z.final_field().scaled(2.5)).unwrap().max_abs();
    assert!(gap <= 1e-10 * zx.final_field().max_abs(), "{gap}");

    let mismatched = semigroup_trajectory(&data(g, 1.0, 3), &cfg(&g, 0.05)).unwrap();
    assert!(duhamel_bilinear(&w1, &mismatched, &c).is_err());
}

#[test]
fn picard_on_zero_data_converges_at_once() {
    let g = grid();
    let (tr, rep) = picard_solve(&VectorField::zeros(g), 1e-8, 10, &cfg(&g, 0.05), None).unwrap();
    assert!(rep.converged && rep.iterates == 1);
    assert_eq!(tr.sup_l3(), 0.0);
}

#[test]
fn picard_contracts_and_matches_direct_evolution() {
    let g = grid();
    let c = cfg(&g, 0.1);
    let w0 = data(g, 0.5, 4);
    let (tr, rep) = picard_solve(&w0, 1e-10, 10, &c, None).unwrap();
    assert!(rep.converged && rep.iterates >= 3, "{rep:?}");
    assert!(rep.contraction_ratio.unwrap() < 0.5, "{rep:?}");
    let direct = evolve(&crate::evolution::State::new(w0.clone()).unwrap(), &c).unwrap();
    assert!(picard::sup_l3_gap(&tr, &direct).unwrap() < 1e-8);

    // Starting from the zero trajectory reaches the same fixed point.
    let zero = semigroup_trajectory(&VectorField::zeros(g), &c).unwrap();
    let (other, rep0) = picard_solve_from(&w0, &zero, 1e-10, 12, &c, None).unwrap();
    assert!(rep0.converged);
    assert!(picard::sup_l3_gap(&tr, &other).unwrap() < 5e-10);
}

#[test]
fn gate_threshold_semantics() {
    let g = grid();
    let ledger = ConstantsLedger::new(10.0).unwrap().with_c1_c2(2.0, 4.0);
    let eps0 = ledger.epsilon0().unwrap();
    assert!(smallness_gate(&VectorField::zeros(g), &ledger).unwrap().passed);
    let w = data(g, 1.0, 5);
    let n3 = lq_norm(&w, 3.0).unwrap();
    let at_twice = smallness_gate(&w.scaled(2.0 * eps0 / n3), &ledger).unwrap();
    assert!(!at_twice.passed);
    assert!((at_twice.norm_w0_l3 - 2.0 * eps0).abs() < 1e-12);
    assert!(smallness_gate(&w, &ConstantsLedger::new(10.0).unwrap()).is_err());
}

#[test]
fn constants_are_deterministic_and_monotone_in_trials() {
    let g = grid();
    let c = cfg(&g, 0.05);
    let a = constants_estimate(g, 10, 7, &c).unwrap();
    let b = constants_estimate(g, 10, 7, &c).unwrap();
    assert_eq!(a, b);
    assert!(a.c1.unwrap() >= 1.0 && a.empirical);
    assert_eq!(a.epsilon0.unwrap(), 1.0 / (4.0 * a.c1.unwrap() * a.c2.unwrap()));
    let more = constants_estimate(g, 20, 7, &c).unwrap();
    assert!(more.c1 >= a.c1 && more.c2 >= a.c2 && more.c3 >= a.c3);
    assert!(constants_estimate(g, 5, 7, &c).is_err());
}
