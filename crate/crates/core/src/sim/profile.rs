use serde::Serialize;

use super::{ScenarioConfig, ScenarioFamily, SimSummary};
use crate::dgm::{s1, s2_delayed, s2_diminishing, true_hr_delayed, true_hr_diminishing};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfilePoint {
    pub t: f64,
    pub hr_true: f64,
    pub hr_ll: f64,
}

/// True hazard ratio against `exp(mean_beta A(t))`, with `A` built from the
/// true pooled survival `(S1 + S2) / 2`: `S^rho` for the diminishing family,
/// `(1 - S)^gamma / (1 - S(tau))^gamma` for the delayed one.
///
/// The grid has `points` equally spaced times from 0 to the censoring
/// horizon (diminishing) or `tau` (delayed).
pub fn profile_comparison(summary: &SimSummary, config: &ScenarioConfig, points: usize) -> Result<Vec<ProfilePoint>> {
    let points = points.max(2);
    let b = summary.mean_beta;
    match config.family {
        ScenarioFamily::Diminishing(p) => {
            let end = config.censor_horizon;
            let rho = config.analysis.rho;
            Ok(grid(end, points)
                .map(|t| {
                    let pooled = 0.5 * s1(t, p.lambda1) + 0.5 * s2_diminishing(t, &p);
                    ProfilePoint {
                        t,
                        hr_true: true_hr_diminishing(t, &p),
                        hr_ll: (b * pooled.powf(rho)).exp(),
                    }
                })
                .collect())
        }
        ScenarioFamily::Delayed(p) => {
            let gamma = config.analysis.gamma;
            let pooled = |t: f64| -> Result<f64> { Ok(0.5 * s1(t, p.lambda1) + 0.5 * s2_delayed(t, &p)?) };
            let anchor = (1.0 - pooled(p.tau)?).powf(gamma);
            grid(p.tau, points)
                .map(|t| {
                    let a = (1.0 - pooled(t)?).powf(gamma) / anchor;
                    Ok(ProfilePoint {
                        t,
                        hr_true: true_hr_delayed(t, &p)?,
                        hr_ll: (b * a).exp(),
                    })
                })
                .collect()
        }
    }
}

fn grid(end: f64, points: usize) -> impl Iterator<Item = f64> {
    let last = points - 1;
    (0..points).map(move |i| if i == last { end } else { end * i as f64 / last as f64 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgm::delayed::DEFAULT_GRID_STEP;
    use crate::dgm::{DelayedParams, DiminishingParams};

    fn summary(mean: f64) -> SimSummary {
        SimSummary::from_estimates(&[Some(mean - 0.1), Some(mean + 0.1)])
    }

    #[test]
    fn anchors_equal_exp_mean_beta() {
        let s = summary(0.37);
        let p = DiminishingParams::new(1.4, 0.5, 0.5).unwrap();
        let c = ScenarioConfig::new(ScenarioFamily::Diminishing(p), 100, 3.0, 1, 0, None).unwrap();
        let prof = profile_comparison(&s, &c, 31).unwrap();
        assert_eq!(prof[0].t, 0.0);
        assert_eq!(prof[0].hr_ll, s.exp_mean_beta);
        assert_eq!(prof[30].t, 3.0);

        let p = DelayedParams::new(1.0, 0.5, 2.0, 0.25, DEFAULT_GRID_STEP).unwrap();
        let c = ScenarioConfig::new(ScenarioFamily::Delayed(p), 100, 2.0, 1, 0, None).unwrap();
        let prof = profile_comparison(&s, &c, 21).unwrap();
        assert_eq!(prof[20].t, 2.0);
        assert_eq!(prof[20].hr_ll, s.exp_mean_beta);
        assert_eq!(prof[0].hr_ll, 1.0);
        assert_eq!(prof[0].hr_true, 1.0);
    }
}
