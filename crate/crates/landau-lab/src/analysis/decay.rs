use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::evolution::{evolve, EvolutionConfig, State};
use crate::inequalities::lq_norm;
use crate::spectral::{self, Grid, VectorField};

/// `C_q = (1/3 − 1/q)^{(3/2)(1/3 − 1/q)}`, with the limit `C_3 = 1`.
pub fn decay_constant(q: f64) -> f64 {
    let s = 1.0 / 3.0 - 1.0 / q;
    if s == 0.0 {
        1.0
    } else {
        s.powf(1.5 * s)
    }
}

/// Theoretical exponent `3/(2q) − 1/2`.
pub fn decay_exponent(q: f64) -> f64 {
    1.5 / q - 0.5
}

/// `C_q t^{3/(2q)−1/2} ‖w₀‖₃`.
pub fn envelope(q: f64, t: f64, w0_l3: f64) -> f64 {
    if q == 3.0 {
        w0_l3
    } else {
        decay_constant(q) * t.powf(decay_exponent(q)) * w0_l3
    }
}

/// Moving exponent `r(t) = 1 / ((1/T)(1/q − 1/3) t + 1/3)`, from 3 at `t = 0`
/// to `q` at `t = T`.
pub fn rt_schedule(t_end: f64, q: f64, t: f64) -> Result<f64> {
    if !(t_end > 0.0) || !(q >= 3.0) || !(0.0..=t_end).contains(&t) {
        return Err(invalid(format!("need T > 0, q >= 3 and 0 <= t <= T; got T = {t_end}, q = {q}, t = {t}")));
    }
    if t == t_end {
        return Ok(q);
    }
    Ok(1.0 / ((1.0 / q - 1.0 / 3.0) * t / t_end + 1.0 / 3.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayRecord {
    pub t: f64,
    pub q: f64,
    pub norm: f64,
    pub envelope: f64,
    pub ratio: f64,
}

/// Least-squares slope of `log ‖w‖_q` against `log t` over the window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub q: f64,
    pub exponent: Option<f64>,
    pub theory: f64,
    pub t_min: f64,
    pub t_sat: f64,
    /// Whether `t_sat` came from the saturation detector; otherwise it is the
    /// end of the run.
    pub saturation_detected: bool,
    pub n_points: usize,
    /// Largest `norm/envelope` inside the window.
    pub max_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayStudy {
    pub w0_l3: f64,
    pub k_max: f64,
    pub records: Vec<DecayRecord>,
    pub fits: Vec<DecayFit>,
}

/// Fit window. `t_min` defaults to one diffusion time `1/k_max²` of the
/// data's largest mode; `t_sat` to the saturation detector.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DecayWindow {
    pub t_min: Option<f64>,
    pub t_sat: Option<f64>,
}

/// Largest `|k|` carrying at least `10⁻¹²` of the peak spectral energy.
pub fn largest_mode(w: &VectorField) -> f64 {
    let g = *w.grid();
    let c = w.spectral();
    let e: Vec<f64> = (0..g.len()).map(|i| c[0][i].norm_sqr() + c[1][i].norm_sqr() + c[2][i].norm_sqr()).collect();
    let peak = e.iter().cloned().fold(0.0, f64::max);
    (0..g.len()).filter(|&i| e[i] > 1e-12 * peak).map(|i| g.k2(i)).fold(0.0, f64::max).sqrt()
}

/// First time after `t_min` at which the local log-log decay rate
/// `−d log‖w‖_q / d log t` drops below 10% of its value at `t_min`.
fn detect_saturation(ts: &[f64], norms: &[f64], t_min: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        ts.iter().zip(norms).filter(|(t, n)| **t >= t_min && **n > 0.0).map(|(t, n)| (t.ln(), n.ln())).collect();
    let rates: Vec<(f64, f64)> = pts.windows(2).map(|w| ((w[1].0 + w[0].0) / 2.0, -(w[1].1 - w[0].1) / (w[1].0 - w[0].0))).collect();
    let initial = rates.first()?.1;
    if initial <= 0.0 {
        return None;
    }
    rates.iter().find(|(_, r)| *r < 0.1 * initial).map(|(lt, _)| lt.exp())
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Evolve `w0` by the full system and compare `‖w(t)‖_q` with the decay
/// envelope at every snapshot; fit the decay exponent inside the window.
pub fn decay_study(w0: &VectorField, q_list: &[f64], cfg: &EvolutionConfig, window: DecayWindow) -> Result<DecayStudy> {
    if let Some(q) = q_list.iter().find(|q| !(3.0..=12.0).contains(*q)) {
        return Err(invalid(format!("decay exponents q must lie in [3, 12], got {q}")));
    }
    let w0_l3 = lq_norm(w0, 3.0)?;
    let k_max = largest_mode(w0);
    let tr = evolve(&State::new(w0.clone())?, cfg)?;
    let ts: Vec<f64> = tr.snapshots.iter().map(|s| s.t).collect();
    let t_end = tr.final_time();
    let t_min = window.t_min.unwrap_or(if k_max > 0.0 { 1.0 / (k_max * k_max) } else { 0.0 });

    let mut records = Vec::new();
    let mut fits = Vec::new();
    for &q in q_list {
        let norms = tr.snapshots.iter().map(|s| lq_norm(&s.field, q)).collect::<Result<Vec<_>>>()?;
        for (&t, &norm) in ts.iter().zip(&norms) {
            if t == 0.0 && q > 3.0 {
                continue;
            }
            let env = envelope(q, t, w0_l3);
            records.push(DecayRecord { t, q, norm, envelope: env, ratio: if env > 0.0 { norm / env } else { 0.0 } });
        }
        let detected = detect_saturation(&ts, &norms, t_min);
        let t_sat = window.t_sat.or(detected).unwrap_or(t_end);
        let inside: Vec<(f64, f64)> =
            ts.iter().zip(&norms).filter(|(t, n)| **t >= t_min && **t <= t_sat && **t > 0.0 && **n > 0.0).map(|(t, n)| (*t, *n)).collect();
        let exponent = (inside.len() >= 2).then(|| {
            let lx: Vec<f64> = inside.iter().map(|p| p.0.ln()).collect();
            let ly: Vec<f64> = inside.iter().map(|p| p.1.ln()).collect();
            slope(&lx, &ly)
        });
        let max_ratio = inside.iter().map(|(t, n)| n / envelope(q, *t, w0_l3)).fold(0.0, f64::max);
        fits.push(DecayFit {
            q,
            exponent,
            theory: decay_exponent(q),
            t_min,
            t_sat,
            saturation_detected: window.t_sat.is_none() && detected.is_some(),
            n_points: inside.len(),
            max_ratio,
        });
    }
    Ok(DecayStudy { w0_l3, k_max, records, fits })
}

/// Small smooth swirl `ε (1 − e^{−(r/δ)²}) W(r) (0, −x₃, x₂)/r²`, Leray
/// projected and dealiased; `W` ramps from 1 at `r_in` to 0 at `r_out`.
pub fn swirl_data(grid: Grid, eps: f64, core: f64, r_in: f64, r_out: f64) -> Result<VectorField> {
    if !(core > 0.0 && r_in < r_out && r_out <= 0.5 * grid.l()) {
        return Err(invalid("swirl needs core > 0 and r_in < r_out <= L/2"));
    }
    let raw = VectorField::from_fn(grid, |x| {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        if r2 == 0.0 {
            return [0.0; 3];
        }
        let r = r2.sqrt();
        let t = ((r - r_in) / (r_out - r_in)).clamp(0.0, 1.0);
        let w = 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
        let m = eps * (1.0 - (-r2 / (core * core)).exp()) * w / r2;
        [0.0, -m * x[2], m * x[1]]
    });
    Ok(spectral::dealias(&spectral::leray_project(&raw)).to_physical())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_and_envelopes() {
        assert_eq!(decay_constant(3.0), 1.0);
        assert!((decay_constant(6.0) - (1.0f64 / 6.0).powf(0.25)).abs() < 1e-15);
        assert!((decay_constant(6.0) - 0.6389).abs() < 1e-4);
        assert_eq!(decay_exponent(6.0), -0.25);
        assert_eq!(envelope(3.0, 7.0, 0.3), 0.3);
        assert!(envelope(4.0, 2.0, 1.0) > 0.0);
    }

    #[test]
    fn schedule_endpoints() {
        assert_eq!(rt_schedule(2.0, 6.0, 0.0).unwrap(), 3.0);
        assert_eq!(rt_schedule(2.0, 6.0, 2.0).unwrap(), 6.0);
        assert!(rt_schedule(2.0, 6.0, 2.5).is_err());
        assert!(rt_schedule(2.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn saturation_detector() {
        let ts: Vec<f64> = (1..200).map(|i| i as f64 * 0.05).collect();
        let power: Vec<f64> = ts.iter().map(|t| t.powf(-0.25)).collect();
        assert_eq!(detect_saturation(&ts, &power, 0.1), None);
        let flat: Vec<f64> = ts.iter().map(|t| if *t < 3.0 { t.powf(-0.25) } else { 3f64.powf(-0.25) }).collect();
        let t = detect_saturation(&ts, &flat, 0.1).unwrap();
        assert!((2.9..3.1).contains(&t), "{t}");
    }

    #[test]
    fn zero_data_skips_fit() {
        let g = Grid::new(8, 4.0).unwrap();
        let s = decay_study(&VectorField::zeros(g), &[3.0, 6.0], &EvolutionConfig::new(0.01, 0.05), DecayWindow::default())
            .unwrap();
        assert!(s.records.iter().all(|r| r.norm == 0.0));
        assert!(s.fits.iter().all(|f| f.exponent.is_none()));
        assert!(decay_study(&VectorField::zeros(g), &[2.0], &EvolutionConfig::new(0.01, 0.05), DecayWindow::default()).is_err());
    }
}
