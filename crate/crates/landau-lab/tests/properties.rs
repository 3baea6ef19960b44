//! Property tests over randomized inputs.

use landau_lab::analysis::{decay_constant, fit_c_hat, rt_schedule};
use landau_lab::inequalities::{lq_norm, ConstantsLedger};
use landau_lab::landau::{landau_pressure, landau_velocity};
use landau_lab::mild::smallness_gate;
use landau_lab::random;
use landau_lab::runner::RunConfig;
use landau_lab::spectral::{heat_propagate, inner, l2_spectral, leray_project, Grid, VectorField};
use proptest::prelude::*;

fn field(seed: u64, stream: u64) -> VectorField {
    let g = Grid::new(16, 8.0).unwrap();
    let raw = VectorField::from_components(
        g,
        std::array::from_fn(|c| random::smooth_scalar(g, 3, &mut random::rng(seed, 3 * stream + c as u64)).physical().into_owned()),
    )
    .unwrap();
    raw
}

fn physical_l2(v: &VectorField) -> f64 {
    let g = v.grid();
    let dv = (g.l() / g.n() as f64).powi(3);
    let s: f64 = v.physical().iter().flat_map(|c| c.iter()).map(|x| x * x).sum();
    (s * dv).sqrt()
}

fn unit_direction() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-1.0f64..1.0).prop_filter("nonzero", |d| d.iter().map(|x| x * x).sum::<f64>() > 1e-2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn landau_solutions_are_scale_invariant(
        c in prop_oneof![1.5f64..20.0, -20.0f64..-1.5],
        d in unit_direction(),
        r in 0.1f64..10.0,
        lambda in 0.05f64..20.0,
    ) {
        let s = r / d.iter().map(|x| x * x).sum::<f64>().sqrt();
        let x = d.map(|v| v * s);
        let v = landau_velocity(c, x).unwrap();
        let vl = landau_velocity(c, x.map(|y| y * lambda)).unwrap();
        let diff = (0..3).map(|i| (lambda * vl[i] - v[i]).powi(2)).sum::<f64>().sqrt();
        let size = v.iter().map(|y| y * y).sum::<f64>().sqrt();
        prop_assert!(diff <= 1e-12 * size);
        let p = landau_pressure(c, x).unwrap();
        let pl = landau_pressure(c, x.map(|y| y * lambda)).unwrap();
        prop_assert!((lambda * lambda * pl - p).abs() <= 1e-12 * p.abs());
    }

    #[test]
    fn schedule_runs_monotonically_from_three_to_q(
        q in 3.0f64..12.0,
        t_end in 0.01f64..100.0,
        a in 0.0f64..1.0,
        b in 0.0f64..1.0,
    ) {
        prop_assert_eq!(rt_schedule(t_end, q, 0.0).unwrap(), 3.0);
        prop_assert_eq!(rt_schedule(t_end, q, t_end).unwrap(), q);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(rt_schedule(t_end, q, lo * t_end).unwrap() <= rt_schedule(t_end, q, hi * t_end).unwrap());
        prop_assert!(rt_schedule(t_end, q, t_end * 1.01).is_err());
    }

    #[test]
    fn decay_constants_lie_in_unit_interval(q in 3.0f64..1e6) {
        let c = decay_constant(q);
        prop_assert!(c > 0.0 && c <= 1.0);
    }

    #[test]
    fn c_hat_fit_inverts_its_defining_relation(delta in 1e-8f64..1.0, c in 1e-3f64..10.0, integral in 0.0f64..2.0) {
        let z = 2.0 * c * delta * (c * integral).exp();
        let fitted = fit_c_hat(delta, z, integral).unwrap();
        prop_assert!((fitted / c - 1.0).abs() < 1e-9);
    }

    #[test]
    fn config_echo_round_trips(dt in 1e-6f64..1.0, amp in 0.0f64..10.0, seed in any::<u64>(), n in 4usize..64) {
        let text = format!(
            "run.experiment = split\nrun.seed = {seed}\ngrid.n = {}\ngrid.l = 16\nevolution.dt = {dt}\ndata.amplitude = {amp}\n",
            2 * n
        );
        let cfg = RunConfig::parse(&text).unwrap();
        prop_assert_eq!(cfg.real("evolution.dt"), dt);
        prop_assert_eq!(cfg.real("data.amplitude"), amp);
        let echo = cfg.echo();
        prop_assert_eq!(RunConfig::parse(&echo).unwrap().echo(), echo);
    }

    #[test]
    fn gate_is_monotone_under_shrinking(c1 in 0.5f64..5.0, c2 in 0.01f64..5.0, scale in 0.01f64..10.0, lambda in 0.0f64..1.0, seed in 0u64..1000) {
        let ledger = ConstantsLedger::new(10.0).unwrap().with_c1_c2(c1, c2);
        let w = random::solenoidal_field(Grid::new(8, 4.0).unwrap(), 2, &mut random::rng(seed, 0)).scaled(scale);
        if smallness_gate(&w, &ledger).unwrap().passed {
            prop_assert!(smallness_gate(&w.scaled(lambda), &ledger).unwrap().passed);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn parseval_holds(seed in any::<u64>()) {
        let v = field(seed, 0);
        prop_assert!((physical_l2(&v) - l2_spectral(&v)).abs() <= 1e-12 * physical_l2(&v).max(1.0));
    }

    #[test]
    fn leray_is_an_orthogonal_projection(seed in any::<u64>()) {
        let (u, w) = (field(seed, 0), field(seed, 1));
        let pu = leray_project(&u);
        prop_assert!(leray_project(&pu).sub(&pu).unwrap().max_abs() <= 1e-12 * u.max_abs());
        let lhs = inner(&pu, &w).unwrap();
        let rhs = inner(&u, &leray_project(&w)).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (physical_l2(&u) * physical_l2(&w)));
    }

    #[test]
    fn heat_flow_never_increases_lq_norms(seed in any::<u64>(), tau in 0.0f64..2.0) {
        let v = field(seed, 0);
        let h = heat_propagate(&v, tau).unwrap();
        for q in [2.0, 3.0, 6.0] {
            prop_assert!(lq_norm(&h, q).unwrap() <= lq_norm(&v, q).unwrap() * (1.0 + 1e-12));
        }
    }
}
