//! Quantitative experiments built on the evolution and mild-solution
//! layers: L^q decay against its envelope, the weak–strong gap under grid
//! refinement, continuous dependence on data, and a resolvent sector probe.

mod continuity;
mod decay;
mod resolvent;
mod weakstrong;

pub use continuity::{continuous_dependence_experiment, fit_c_hat, ContinuityPoint, ContinuityReport};
pub use decay::{
    decay_constant, decay_exponent, decay_study, envelope, largest_mode, rt_schedule, swirl_data, DecayFit, DecayRecord,
    DecayStudy, DecayWindow,
};
pub use resolvent::{lowest_mode, resolvent_probe, ResolventConfig, ResolventMethod, ResolventProbe};
pub use weakstrong::{weak_strong_experiment, GapCurve};
