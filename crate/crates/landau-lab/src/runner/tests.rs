use super::*;

fn run(text: &str) -> (tempfile::TempDir, Summary) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::parse(text).unwrap();
    let s = run_experiment(&cfg, dir.path()).unwrap();
    (dir, s)
}

#[test]
fn landau_verify_at_c2_passes_flux_check() {
    let (dir, s) = run("run.experiment = landau-verify\ngrid.n = 16\ngrid.l = 8\nlandau.c = 2\nverify.c_list = 2\nverify.samples = 1000\n");
    assert!(s.metrics["flux_check"].passed, "{s:?}");
    assert!(s.metrics["fd_residual"].passed && s.metrics["fd_order_deviation"].passed, "{s:?}");
    let echo = std::fs::read_to_string(dir.path().join("config.txt")).unwrap();
    assert_eq!(RunConfig::parse(&echo).unwrap(), RunConfig::parse(&echo).unwrap());
    assert!(dir.path().join("residuals.csv").exists());
}

#[test]
fn reruns_are_byte_identical() {
    let text = "run.experiment = resolvent\ngrid.n = 24\ngrid.l = 12.566370614359172\nresolvent.rho = 1\nresolvent.theta = 0, 0.5\n";
    let (a, sa) = run(text);
    let (b, sb) = run(text);
    for f in ["resolvent.csv", "config.txt"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap());
    }
    assert_eq!(sa.metrics, sb.metrics);
    let header = std::fs::read_to_string(a.path().join("resolvent.csv")).unwrap();
    assert!(header.starts_with("re_lambda,im_lambda,q,ratio,iters\n"));
}

#[test]
fn summary_has_the_documented_shape() {
    let (dir, _) = run("run.experiment = resolvent\ngrid.n = 16\ngrid.l = 12.566370614359172\nevolution.coupling = 0\nresolvent.q_list = 2\n");
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    let obj = json.as_object().unwrap();
    let mut keys: Vec<_> = obj.keys().cloned().collect();
    keys.sort();
    assert_eq!(keys, ["experiment", "metrics", "params", "seed", "wallclock"]);
    let m = &obj["metrics"]["max_ratio_q2"];
    assert_eq!(m["passed"], serde_json::Value::Bool(true));
    assert!(m["value"].is_number() && m["threshold"].is_number());
}
