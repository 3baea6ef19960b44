//! Time-integral norms of sampled trajectories (trapezoid rule).

/// `(∫ v(t)^p dt)^{1/p}` from samples `(t_i, v_i)`.
pub fn time_lp(ts: &[f64], vals: &[f64], p: f64) -> f64 {
    assert_eq!(ts.len(), vals.len());
    let s: f64 = ts.windows(2).zip(vals.windows(2)).map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0].powf(p) + v[1].powf(p))).sum();
    s.powf(1.0 / p)
}

/// `max_i v_i`.
pub fn sup_in_time(vals: &[f64]) -> f64 {
    vals.iter().cloned().fold(0.0, f64::max)
}
