//! Delayed effect: no effect at `t = 0`, maximal effect at `tau`.
//!
//! Treatment survival is `S2(t) = LL^-1(LL(S1(t)) + phi)` and the hazard
//! ratio is `L(S2(t)) / L(S1(t))`, the alternative under which `G^gamma` is
//! the most powerful test. `phi` is fixed by a target value of `S2(tau)`.
//! Treatment times are drawn on a precomputed grid of `S2`, taking the grid
//! time whose survival is closest to a uniform draw.

use rayon::prelude::*;
use serde::Serialize;

use super::gares::{big_l_at_hazard, phi_from_target, shifted_hazard};
use super::{censor_at, control_arm, finish, positive};
use crate::data::{Arm, Dataset, Observation};
use crate::error::{NphError, Result};
use crate::rng::{uniform_open, SimRng};

pub const DEFAULT_GRID_STEP: f64 = 0.0005;
const MIN_GRID_POINTS: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DelayedParams {
    pub gamma: f64,
    pub lambda1: f64,
    /// Time of maximal effect.
    pub tau: f64,
    /// Target treatment survival at `tau`.
    pub s2_tau: f64,
    /// Shift on the `LL` scale implied by `s2_tau`.
    pub phi: f64,
    pub grid_step: f64,
}

impl DelayedParams {
    pub fn new(gamma: f64, lambda1: f64, tau: f64, s2_tau: f64, grid_step: f64) -> Result<Self> {
        let (gamma, lambda1, tau) = (
            positive("gamma", gamma)?,
            positive("lambda1", lambda1)?,
            positive("tau", tau)?,
        );
        check_grid(tau, grid_step)?;
        let target = phi_from_target(super::s1(tau, lambda1), s2_tau, gamma)?;
        Ok(DelayedParams {
            gamma,
            lambda1,
            tau,
            s2_tau,
            phi: target.phi,
            grid_step,
        })
    }

    /// Parameters given directly by `phi`; `s2_tau` is derived.
    pub fn from_phi(gamma: f64, lambda1: f64, tau: f64, phi: f64, grid_step: f64) -> Result<Self> {
        let (gamma, lambda1, tau) = (
            positive("gamma", gamma)?,
            positive("lambda1", lambda1)?,
            positive("tau", tau)?,
        );
        check_grid(tau, grid_step)?;
        if !phi.is_finite() {
            return Err(NphError::domain("phi", phi, "finite"));
        }
        let u = shifted_hazard(lambda1 * tau, phi, gamma)?;
        Ok(DelayedParams {
            gamma,
            lambda1,
            tau,
            s2_tau: (-u).exp(),
            phi,
            grid_step,
        })
    }

    /// Discrepancy rate `(S2(tau) - S1(tau)) / (1 - S1(tau))`.
    pub fn discrepancy_rate(&self) -> f64 {
        let s1 = super::s1(self.tau, self.lambda1);
        (self.s2_tau - s1) / (1.0 - s1)
    }
}

fn check_grid(tau: f64, step: f64) -> Result<()> {
    if !(step > 0.0 && tau / step >= MIN_GRID_POINTS) {
        return Err(NphError::domain("grid_step", step, "tau / grid_step >= 100"));
    }
    Ok(())
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(NphError::domain("t", t, "t >= 0"))
    }
}

/// Treatment cumulative hazard at `t`.
pub(crate) fn hazard2(t: f64, lambda1: f64, phi: f64, gamma: f64) -> Result<f64> {
    shifted_hazard(lambda1 * t, phi, gamma).map_err(|e| NphError::Numerical(format!("S2 at t = {t}: {e}")))
}

pub fn s2_delayed(t: f64, p: &DelayedParams) -> Result<f64> {
    check_time(t)?;
    Ok((-hazard2(t, p.lambda1, p.phi, p.gamma)?).exp())
}

/// `L(S2(t)) / L(S1(t))`, with the limit 1 at `t = 0`.
pub fn true_hr_delayed(t: f64, p: &DelayedParams) -> Result<f64> {
    check_time(t)?;
    hr_from_phi(t, p.lambda1, p.phi, p.gamma)
}

pub(crate) fn hr_from_phi(t: f64, lambda1: f64, phi: f64, gamma: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(1.0);
    }
    let u1 = lambda1 * t;
    let u2 = hazard2(t, lambda1, phi, gamma)?;
    Ok(big_l_at_hazard(u2, gamma)? / big_l_at_hazard(u1, gamma)?)
}

/// `S2` tabulated on `0, step, 2 step, ..., tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayedSampler {
    times: Vec<f64>,
    s2: Vec<f64>,
}

impl DelayedSampler {
    pub fn new(p: &DelayedParams) -> Result<Self> {
        let k = (p.tau / p.grid_step).round() as usize;
        let times: Vec<f64> = (0..=k)
            .map(|i| if i == k { p.tau } else { i as f64 * p.grid_step })
            .collect();
        let s2 = times
            .par_iter()
            .map(|&t| s2_delayed(t, p))
            .collect::<Result<Vec<f64>>>()?;
        Ok(DelayedSampler { times, s2 })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn survival(&self) -> &[f64] {
        &self.s2
    }

    pub fn tau(&self) -> f64 {
        *self.times.last().expect("grid is non-empty")
    }

    /// `(time, event)`. Draws below `S2(tau)` survive past follow-up and are
    /// censored at `tau`; otherwise the grid time with `S2` closest to `u`.
    pub fn sample(&self, u: f64) -> (f64, bool) {
        let last = self.s2.len() - 1;
        if u < self.s2[last] {
            return (self.times[last], false);
        }
        // s2 is decreasing: first index with s2 <= u
        let k = self.s2.partition_point(|&s| s > u);
        let idx = if k == 0 {
            0
        } else if k > last || (self.s2[k - 1] - u).abs() <= (u - self.s2[k]).abs() {
            k - 1
        } else {
            k
        };
        (self.times[idx], true)
    }
}

pub fn generate_delayed(
    sampler: &DelayedSampler,
    lambda1: f64,
    n_per_arm: usize,
    horizon: f64,
    rng: &mut SimRng,
) -> Result<Dataset> {
    let mut obs = control_arm(rng, n_per_arm, lambda1, horizon);
    for _ in 0..n_per_arm {
        let (t, event) = sampler.sample(uniform_open(rng));
        obs.push(if event {
            censor_at(t, horizon, Arm::Treatment)
        } else {
            Observation::new(t.min(horizon), false, Arm::Treatment)
        });
    }
    finish(obs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgm::gares::{script_l, script_l_inv};
    use crate::dgm::s1;
    use crate::rng::replicate_rng;

    fn params(gamma: f64, s2_tau: f64) -> DelayedParams {
        DelayedParams::new(gamma, 0.5, 2.0, s2_tau, DEFAULT_GRID_STEP).unwrap()
    }

    #[test]
    fn null_shift_collapses_arms() {
        let p = DelayedParams::from_phi(1.0, 0.5, 2.0, 0.0, DEFAULT_GRID_STEP).unwrap();
        for t in [0.0, 0.3, 1.0, 2.0] {
            assert_eq!(s2_delayed(t, &p).unwrap(), s1(t, 0.5));
            assert_eq!(true_hr_delayed(t, &p).unwrap(), 1.0);
        }
    }

    #[test]
    fn hits_target_at_tau() {
        for g in [0.5, 1.0, 2.0] {
            for s in [0.25, 0.1] {
                let p = params(g, s);
                assert!((s2_delayed(2.0, &p).unwrap() - s).abs() < 1e-9);
                assert!(p.phi < 0.0);
                for k in 1..=20 {
                    let t = 0.1 * f64::from(k);
                    assert!(s2_delayed(t, &p).unwrap() < s1(t, 0.5));
                }
            }
        }
    }

    #[test]
    fn difference_form_matches_literal_inverse() {
        for g in [0.5, 1.0, 2.0] {
            let p = params(g, 0.25);
            for t in [0.2, 0.5, 1.0, 1.7] {
                let literal = script_l_inv(script_l(s1(t, 0.5), g).unwrap() + p.phi, g).unwrap();
                assert!((s2_delayed(t, &p).unwrap() - literal).abs() < 1e-8, "g={g} t={t}");
            }
        }
    }

    #[test]
    fn survival_is_valid_and_hr_monotone() {
        for g in [0.5, 1.0, 2.0] {
            for s in [0.25, 0.1] {
                let p = params(g, s);
                let sampler = DelayedSampler::new(&p).unwrap();
                assert_eq!(sampler.survival()[0], 1.0);
                for w in sampler.survival().windows(2) {
                    assert!(w[1] < w[0] && w[1] > 0.0);
                }
                let mut prev = 1.0;
                for k in 1..=40 {
                    let hr = true_hr_delayed(0.05 * f64::from(k), &p).unwrap();
                    assert!(hr >= prev - 1e-12);
                    prev = hr;
                }
            }
        }
    }

    #[test]
    fn hazard_is_consistent_with_survival() {
        for g in [0.5, 1.0, 2.0] {
            let p = params(g, 0.1);
            for k in 1..20 {
                let t = 0.1 * f64::from(k);
                let h = 1e-4;
                let fd = -(s2_delayed(t + h, &p).unwrap().ln() - s2_delayed(t - h, &p).unwrap().ln()) / (2.0 * h);
                let hz = 0.5 * true_hr_delayed(t, &p).unwrap();
                assert!(((fd - hz) / hz).abs() < 1e-4, "g={g} t={t}: {fd} vs {hz}");
            }
        }
    }

    #[test]
    fn sampler_edges() {
        let p = params(1.0, 0.25);
        let sampler = DelayedSampler::new(&p).unwrap();
        assert_eq!(sampler.sample(1.0 - 1e-9), (0.0, true));
        assert_eq!(sampler.sample(0.2), (2.0, false));
        let (t, e) = sampler.sample(s2_delayed(1.0, &p).unwrap());
        assert!(e && (t - 1.0).abs() < 1e-12);
    }

    #[test]
    fn generation_is_deterministic() {
        let p = params(1.0, 0.25);
        let sampler = DelayedSampler::new(&p).unwrap();
        let a = generate_delayed(&sampler, 0.5, 50, 2.0, &mut replicate_rng(3, 9)).unwrap();
        let b = generate_delayed(&sampler, 0.5, 50, 2.0, &mut replicate_rng(3, 9)).unwrap();
        assert_eq!(a, b);
        assert!(a.observations().iter().all(|o| o.time <= 2.0));
    }

    #[test]
    fn params_validation() {
        assert!(DelayedParams::new(1.0, 0.5, 2.0, 0.25, 0.05).is_err());
        assert!(DelayedParams::new(1.0, 0.5, 2.0, 1.2, DEFAULT_GRID_STEP).is_err());
        assert!(DelayedParams::new(-1.0, 0.5, 2.0, 0.25, DEFAULT_GRID_STEP).is_err());
        let p = params(1.0, 0.25);
        assert!((p.discrepancy_rate() + 0.187).abs() < 0.005);
        let q = DelayedParams::from_phi(1.0, 0.5, 2.0, p.phi, DEFAULT_GRID_STEP).unwrap();
        assert!((q.s2_tau - 0.25).abs() < 1e-9);
    }
}
