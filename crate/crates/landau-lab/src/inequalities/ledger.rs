use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// `‖R_l‖_{L^r}`: `tan(π/2r)` for `r ≤ 2`, `cot(π/2r)` for `r ≥ 2`.
pub fn riesz_norm_constant(r: f64) -> Result<f64> {
    if !(r > 1.0 && r.is_finite()) {
        return Err(invalid(format!("Riesz norm defined for 1 < r < ∞, got {r}")));
    }
    let a = PI / (2.0 * r);
    Ok(if r == 2.0 {
        1.0
    } else if r < 2.0 {
        a.tan()
    } else {
        1.0 / a.tan()
    })
}

/// Bound for the double transform `Δ⁻¹∂_i∂_j` on `L^r`: the product bound
/// `‖R_i‖ ‖R_j‖`.
pub fn double_riesz_bound(r: f64) -> Result<f64> {
    Ok(riesz_norm_constant(r)?.powi(2))
}

/// Constants entering the small-data and decay arguments.
///
/// `c1`, `c2`, `c3` are empirical (observed suprema times a safety factor)
/// when produced by `mild::constants_estimate`; `epsilon0 = 1/(4 C1 C2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantsLedger {
    /// Landau parameter the empirical constants were measured for.
    pub c: f64,
    /// Linear estimate constant.
    pub c1: Option<f64>,
    /// Bilinear estimate constant.
    pub c2: Option<f64>,
    /// Weighted double-Riesz constant.
    pub c3: Option<f64>,
    /// Smallness threshold `1/(4 C1 C2)`.
    pub epsilon0: Option<f64>,
    /// Constant `C` of the a-priori bound `‖w‖ ≤ C ‖w₀‖₃`; defaults to `2 C1`.
    pub c_apriori: Option<f64>,
    /// Weighted bound `K_c = 2√2/(|c|−1)`.
    pub k_c: f64,
    /// `K(c) = 12 max K_{j,k}(c)`, if the gradient bounds were sampled.
    pub k: Option<f64>,
    /// Whether the values are sampled rather than proven.
    pub empirical: bool,
    pub n_trials: usize,
    pub seed: u64,
}

impl ConstantsLedger {
    pub fn new(c: f64) -> Result<Self> {
        Ok(Self {
            c,
            c1: None,
            c2: None,
            c3: None,
            epsilon0: None,
            c_apriori: None,
            k_c: crate::landau::weighted_bound(c)?,
            k: None,
            empirical: false,
            n_trials: 0,
            seed: 0,
        })
    }

    /// Set the linear and bilinear constants and everything derived from them.
    pub fn with_c1_c2(mut self, c1: f64, c2: f64) -> Self {
        self.c1 = Some(c1);
        self.c2 = Some(c2);
        self.epsilon0 = Some(1.0 / (4.0 * c1 * c2));
        self.c_apriori = Some(2.0 * c1);
        self
    }

    pub fn epsilon0(&self) -> Result<f64> {
        self.epsilon0.ok_or(Error::Unpopulated("epsilon0"))
    }

    /// `H_r`, the double-Riesz table (product bound).
    pub fn h_r(&self, r: f64) -> Result<f64> {
        double_riesz_bound(r)
    }

    /// `C_r`, the weighted-norm constant; defaults to `H_r`.
    pub fn c_r(&self, r: f64) -> Result<f64> {
        double_riesz_bound(r)
    }
}

/// Value of the decay-gate constant and where the infimum is attained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuReport {
    pub mu: f64,
    pub r_at_inf: f64,
    /// `μ > 1/2`.
    pub passed: bool,
}

/// `μ = inf_{3≤r≤q} [1 − ¼Cε₀ − ½K_c − K_c − 2C_r K_c − H_{3r/(r+1)} C ε₀]`
/// on a dense grid of `r`.
pub fn mu_constant(q: f64, ledger: &ConstantsLedger, k_c: f64) -> Result<MuReport> {
    if !(q >= 3.0 && q.is_finite()) {
        return Err(invalid(format!("decay gate needs finite q >= 3, got {q}")));
    }
    let eps0 = ledger.epsilon0()?;
    let c = ledger.c_apriori.ok_or(Error::Unpopulated("c_apriori"))?;
    let n = 2001;
    let mut best = MuReport { mu: f64::INFINITY, r_at_inf: 3.0, passed: false };
    for i in 0..n {
        let r = if q == 3.0 { 3.0 } else { 3.0 + (q - 3.0) * i as f64 / (n - 1) as f64 };
        let mu = 1.0 - 0.25 * c * eps0 - 1.5 * k_c - 2.0 * ledger.c_r(r)? * k_c
            - ledger.h_r(3.0 * r / (r + 1.0))? * c * eps0;
        if mu < best.mu {
            best = MuReport { mu, r_at_inf: r, passed: mu > 0.5 };
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn riesz_constants() {
        assert_eq!(riesz_norm_constant(2.0).unwrap(), 1.0);
        assert!((riesz_norm_constant(4.0).unwrap() - (1.0 + 2f64.sqrt())).abs() < 1e-12);
        let below = riesz_norm_constant(2.0 - 1e-9).unwrap();
        let above = riesz_norm_constant(2.0 + 1e-9).unwrap();
        assert!((below - above).abs() < 1e-8);
        // Conjugate exponents share the constant.
        assert!((riesz_norm_constant(1.5).unwrap() - riesz_norm_constant(3.0).unwrap()).abs() < 1e-12);
        assert!(riesz_norm_constant(1.0).is_err());
    }

    #[test]
    fn mu_trivial_and_monotone() {
        let mut l = ConstantsLedger::new(10.0).unwrap().with_c1_c2(1.0, 1.0);
        l.epsilon0 = Some(0.0);
        assert_eq!(mu_constant(6.0, &l, 0.0).unwrap().mu, 1.0);
        let a = mu_constant(6.0, &l, 0.01).unwrap().mu;
        let b = mu_constant(6.0, &l, 0.02).unwrap().mu;
        assert!(b < a);
        assert!(matches!(mu_constant(6.0, &ConstantsLedger::new(10.0).unwrap(), 0.1), Err(Error::Unpopulated(_))));
    }

    #[test]
    fn epsilon0_is_derived() {
        let l = ConstantsLedger::new(5.0).unwrap().with_c1_c2(2.0, 3.0);
        assert_eq!(l.epsilon0.unwrap(), 1.0 / 24.0);
        assert!(l.h_r(2.0).unwrap() == 1.0 && l.h_r(3.0).unwrap() > 1.0 && l.h_r(1.5).unwrap() > 1.0);
    }
}
