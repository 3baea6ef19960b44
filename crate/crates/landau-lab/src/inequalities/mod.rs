//! Discrete norms and the functional inequalities behind the estimates:
//! Hardy, sharp log-Sobolev, Riesz-transform bounds and the pointwise
//! gradient inequality, plus the ledger of constants they feed.

mod audit;
mod ledger;
mod norms;
mod time;
pub mod zeta;

pub use audit::{grad_bound_audit, hardy_audit, log_sobolev_audit, riesz_audit, riesz_ratio, AuditReport};
pub use ledger::{double_riesz_bound, mu_constant, riesz_norm_constant, ConstantsLedger, MuReport};
pub use norms::{
    grad_power_norm, hardy_ratio, log_sobolev_gap, lq_norm, pointwise_grad_bound_check, weighted_norm, Sampled,
};
pub use time::{sup_in_time, time_lp};

pub(crate) use norms::lq_of;
