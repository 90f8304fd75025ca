//! Data-generating mechanisms for which a Fleming-Harrington test is optimal.
//!
//! Control survival is exponential, `S1(t) = exp(-lambda1 t)`, in both
//! families. [`diminishing`] has a closed-form treatment arm; [`delayed`] is
//! built on the special functions in [`gares`].

pub mod delayed;
pub mod diminishing;
pub mod gares;

use crate::data::{Arm, Dataset, Observation};
use crate::error::{NphError, Result};
use crate::rng::{uniform_open, SimRng};

pub use delayed::{generate_delayed, s2_delayed, true_hr_delayed, DelayedParams, DelayedSampler};
pub use diminishing::{
    generate_diminishing, s2_diminishing, sample_diminishing, true_hr_diminishing, DiminishingParams,
};

pub fn s1(t: f64, lambda1: f64) -> f64 {
    (-lambda1 * t).exp()
}

pub(crate) fn positive(what: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(NphError::domain(what, v, "finite and > 0"))
    }
}

/// Applies administrative censoring at `horizon`.
pub(crate) fn censor_at(time: f64, horizon: f64, arm: Arm) -> Observation {
    if time > horizon {
        Observation::new(horizon, false, arm)
    } else {
        Observation::new(time, true, arm)
    }
}

/// Control arm draws: exponential with rate `lambda1`, censored at `horizon`.
pub(crate) fn control_arm(rng: &mut SimRng, n: usize, lambda1: f64, horizon: f64) -> Vec<Observation> {
    (0..n)
        .map(|_| censor_at(-uniform_open(rng).ln() / lambda1, horizon, Arm::Control))
        .collect()
}

pub(crate) fn finish(obs: Vec<Observation>) -> Result<Dataset> {
    Dataset::new(obs)
}
