//! The full acceptance sweep. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::time::Instant;

use landau_lab::evolution::{EvolutionConfig, State, Stepper};
use landau_lab::landau::LandauParams;
use landau_lab::runner::{dispatch, Metric, RunConfig};
use landau_lab::spectral::{Grid, VectorField};

type Metrics = BTreeMap<String, Metric>;

fn run(conf: &str, overrides: &[(&str, &str)]) -> Metrics {
    let mut cfg = RunConfig::parse(conf).expect("shipped config parses");
    for (k, v) in overrides {
        cfg.set(k, v).unwrap();
    }
    dispatch(&cfg).expect("experiment runs").metrics
}

fn conf(name: &str) -> String {
    let path = format!("{}/../../configs/{name}.conf", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

/// Passes when every named metric passed; the detail lists their values.
fn check(m: &Metrics, names: &[&str]) -> (bool, String) {
    let mut ok = true;
    let mut detail = Vec::new();
    for name in names {
        let metric = m.get(*name).unwrap_or_else(|| panic!("missing metric {name}"));
        ok &= metric.passed;
        let v = metric.value.map_or("nan".into(), |v| format!("{v:.4e}"));
        match metric.threshold {
            Some(t) => detail.push(format!("{name}={v} (≤ {t:.4e}{})", if metric.passed { "" } else { " ✗" })),
            None => detail.push(format!("{name}={v}")),
        }
    }
    (ok, detail.join(", "))
}

fn steady_background() -> (bool, String) {
    let g = Grid::new(32, 16.0).unwrap();
    let cfg = EvolutionConfig::new(0.01, 1.0).with_background(LandauParams::for_grid(10.0, &g).unwrap());
    let stepper = Stepper::new(g, &cfg).unwrap();
    let mut s = State::new(VectorField::zeros(g)).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let next = stepper.step(&s).unwrap();
        worst = worst.max(next.w.sub(&s.w).unwrap().max_abs());
        s = next;
    }
    (worst <= 1e-12, format!("max per-step change {worst:.3e} over 100 steps (≤ 1e-12)"))
}

fn main() {
    let mut results: Vec<(u32, &str, bool, String)> = Vec::new();
    let mut record = |id, name, (ok, detail): (bool, String)| {
        println!("{} criterion {id:2} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        results.push((id, name, ok, detail));
    };
    let start = Instant::now();

    let verify = run(&conf("landau-verify"), &[]);
    record(1, "landau exactness", check(&verify, &["fd_residual", "fd_order_deviation"]));
    record(2, "force identity", check(&verify, &["flux_spread", "flux_check", "force_parameter"]));
    record(
        3,
        "weighted speed bound",
        check(&verify, &["weighted_bound_c1.5", "weighted_bound_c2", "weighted_bound_c3", "weighted_bound_c10"]),
    );

    let ineq = run(&conf("inequalities"), &[]);
    record(4, "hardy", check(&ineq, &["hardy_gaussian", "hardy_random_max_ratio"]));
    record(
        5,
        "riesz constants",
        check(
            &ineq,
            &["riesz_constant_r2", "riesz_constant_r4", "riesz_ratio_r1.5", "riesz_ratio_r2", "riesz_ratio_r3", "riesz_ratio_r4"],
        ),
    );
    record(6, "projection algebra", check(&ineq, &["leray_idempotence", "leray_divergence", "gradient_bound_violation"]));

    record(7, "steady background", steady_background());

    let linear = ["max_step_growth_l2", "max_step_growth_l3", "max_step_growth_l6"];
    let (a, da) = check(&run(&conf("linear-decay"), &[("landau.c", "5")]), &linear);
    let (b, db) = check(&run(&conf("linear-decay"), &[("landau.c", "10")]), &linear);
    record(8, "linear monotonicity", (a && b, format!("c=5: {da}; c=10: {db}")));

    let picard = run(&conf("picard"), &[]);
    record(9, "picard", check(&picard, &["gate", "picard_iterations", "picard_contraction", "picard_vs_direct_l3"]));

    let decay = run(&conf("decay"), &[]);
    record(
        10,
        "decay",
        check(&decay, &["exponent_q6", "exponent_deviation_q6", "envelope_ratio_q6", "t_min", "saturation_time_q6"]),
    );

    record(11, "split consistency", check(&run(&conf("split"), &[]), &["split_vs_full_l3", "v2_energy_residual_rate"]));

    record(
        12,
        "weak-strong",
        check(&run(&conf("weakstrong"), &[]), &["gap_32_48", "gap_48_64", "gap_refinement_ratio"]),
    );

    record(
        13,
        "continuity",
        check(&run(&conf("continuity"), &[]), &["linearity_deviation", "c_hat_spread", "c_hat"]),
    );

    let (a, da) = check(&run(&conf("resolvent-uncoupled"), &[]), &["unconverged_q2", "max_ratio_q2"]);
    let (b, db) = check(
        &run(&conf("resolvent"), &[]),
        &["unconverged_q2", "unconverged_q3", "sector_spread_q2", "sector_spread_q3"],
    );
    record(14, "resolvent", (a && b, format!("uncoupled: {da}; coupled: {db}")));

    let failed: Vec<_> = results.iter().filter(|r| !r.2).map(|r| r.0).collect();
    println!(
        "{} of {} criteria passed in {:.0}s",
        results.len() - failed.len(),
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if !failed.is_empty() {
        println!("failed: {failed:?}");
        std::process::exit(1);
    }
}
