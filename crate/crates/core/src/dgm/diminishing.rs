//! Diminishing effect: the hazard ratio starts at `e_delta` and decays to 1,
//!
//! `HR(t) = e_delta / (S1(t)^rho + e_delta (1 - S1(t)^rho))`,
//!
//! which is the alternative under which `G^rho` is the most powerful test.
//! With a constant control hazard the treatment survival has the closed form
//! `S2(t) = [1 - e_delta + e_delta exp(rho lambda1 t)]^(-1/rho)`.

use serde::Serialize;

use super::{censor_at, control_arm, finish, positive};
use crate::data::{Arm, Dataset};
use crate::error::{NphError, Result};
use crate::rng::{uniform_open, SimRng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiminishingParams {
    /// Hazard ratio at `t = 0`.
    pub e_delta: f64,
    pub rho: f64,
    pub lambda1: f64,
}

impl DiminishingParams {
    pub fn new(e_delta: f64, rho: f64, lambda1: f64) -> Result<Self> {
        Ok(DiminishingParams {
            e_delta: positive("e_delta", e_delta)?,
            rho: positive("rho", rho)?,
            lambda1: positive("lambda1", lambda1)?,
        })
    }
}

pub fn true_hr_diminishing(t: f64, p: &DiminishingParams) -> f64 {
    let s_rho = (-p.rho * p.lambda1 * t).exp();
    p.e_delta / (s_rho + p.e_delta * (1.0 - s_rho))
}

pub fn s2_diminishing(t: f64, p: &DiminishingParams) -> f64 {
    let bracket = 1.0 + p.e_delta * (p.rho * p.lambda1 * t).exp_m1();
    bracket.powf(-1.0 / p.rho)
}

/// Inverse of [`s2_diminishing`]: the time at which treatment survival
/// equals `u`.
pub fn sample_diminishing(u: f64, p: &DiminishingParams) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(NphError::domain("u", u, "0 < u < 1"));
    }
    // u^-rho - 1, kept accurate for u near 1
    let excess = (-p.rho * u.ln()).exp_m1();
    Ok((excess / p.e_delta).ln_1p() / (p.rho * p.lambda1))
}

pub fn generate_diminishing(
    p: &DiminishingParams,
    n_per_arm: usize,
    horizon: f64,
    rng: &mut SimRng,
) -> Result<Dataset> {
    let mut obs = control_arm(rng, n_per_arm, p.lambda1, horizon);
    for _ in 0..n_per_arm {
        let t = sample_diminishing(uniform_open(rng), p)?;
        obs.push(censor_at(t, horizon, Arm::Treatment));
    }
    finish(obs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, Tolerance};
    use crate::rng::replicate_rng;

    fn p(e: f64, rho: f64) -> DiminishingParams {
        DiminishingParams::new(e, rho, 0.5).unwrap()
    }

    #[test]
    fn hazard_ratio_examples() {
        assert_eq!(true_hr_diminishing(0.0, &p(4.0, 1.0)), 4.0);
        // S1(t) = 0.5
        let t = 2.0 * std::f64::consts::LN_2;
        assert!((true_hr_diminishing(t, &p(4.0, 1.0)) - 1.6).abs() < 1e-14);
        assert!((true_hr_diminishing(100.0, &p(4.0, 1.0)) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn survival_examples() {
        assert_eq!(s2_diminishing(0.0, &p(4.0, 1.0)), 1.0);
        let expected = 1.0 / (4.0 * std::f64::consts::E - 3.0);
        assert!((s2_diminishing(2.0, &p(4.0, 1.0)) - expected).abs() < 1e-14);
        assert!((expected - 0.12702).abs() < 1e-5);
        for t in [0.3, 1.0, 2.5] {
            assert!((s2_diminishing(t, &p(1.0, 2.0)) - (-0.5 * t).exp()).abs() < 1e-14);
        }
    }

    #[test]
    fn survival_matches_integrated_hazard() {
        for (e, rho) in [(4.0, 1.0), (1.4, 0.5), (8.0, 2.0)] {
            let q = p(e, rho);
            let cum = integrate(|x| 0.5 * true_hr_diminishing(x, &q), 0.0, 2.0, Tolerance::default()).unwrap();
            assert!(((-cum).exp() - s2_diminishing(2.0, &q)).abs() < 1e-12);
        }
    }

    #[test]
    fn sampler_inverts_survival() {
        for (e, rho) in [(4.0, 1.0), (1.4, 0.5), (8.0, 2.0)] {
            let q = p(e, rho);
            for u in [0.1, 0.5, 0.9] {
                let t = sample_diminishing(u, &q).unwrap();
                assert!((s2_diminishing(t, &q) - u).abs() < 1e-10);
            }
            let t = sample_diminishing(1.0 - 1e-12, &q).unwrap();
            assert!(t > 0.0 && t < 1e-10);
        }
        for u in [0.2, 0.7] {
            let t = sample_diminishing(u, &p(1.0, 0.5)).unwrap();
            assert!((t + u.ln() / 0.5).abs() < 1e-12);
        }
        assert!(sample_diminishing(0.0, &p(2.0, 1.0)).is_err());
        assert!(sample_diminishing(1.0, &p(2.0, 1.0)).is_err());
    }

    #[test]
    fn hazard_is_consistent_with_survival() {
        for (e, rho) in [(1.4, 0.5), (4.0, 1.0), (8.0, 2.0)] {
            let q = p(e, rho);
            for k in 1..30 {
                let t = 0.1 * f64::from(k);
                let h = 1e-5;
                let fd = -(s2_diminishing(t + h, &q).ln() - s2_diminishing(t - h, &q).ln()) / (2.0 * h);
                let hz = 0.5 * true_hr_diminishing(t, &q);
                assert!(((fd - hz) / hz).abs() < 1e-5, "t={t}: {fd} vs {hz}");
            }
        }
    }

    #[test]
    fn generation_is_deterministic_and_censors() {
        let q = p(2.0, 1.0);
        let a = generate_diminishing(&q, 100, 3.0, &mut replicate_rng(11, 0)).unwrap();
        let b = generate_diminishing(&q, 100, 3.0, &mut replicate_rng(11, 0)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.count(Arm::Control), 100);
        assert!(a.observations().iter().all(|o| o.time <= 3.0));
        assert!(a.observations().iter().filter(|o| !o.event).all(|o| o.time == 3.0));
    }
}
