//! Log-rank and Fleming-Harrington `G^{rho,gamma}` weighted log-rank tests.
//!
//! The weight at event time `t_j` is `S(t_j-)^rho (1 - S(t_j-))^gamma`, with
//! `S` the pooled Kaplan-Meier curve evaluated from the left. The statistic
//! is standardized by the weighted hypergeometric variance.

use serde::Serialize;

use crate::data::{build_event_table, km_from_table, Dataset, EventTable, KmScope, SurvivalCurve};
use crate::error::{NphError, Result};

/// Fleming-Harrington exponents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightSpec {
    pub rho: f64,
    pub gamma: f64,
}

impl WeightSpec {
    pub const LOG_RANK: WeightSpec = WeightSpec { rho: 0.0, gamma: 0.0 };

    pub fn new(rho: f64, gamma: f64) -> Result<Self> {
        if !(rho.is_finite() && rho >= 0.0) {
            return Err(NphError::domain("rho", rho, "rho >= 0"));
        }
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(NphError::domain("gamma", gamma, "gamma >= 0"));
        }
        Ok(WeightSpec { rho, gamma })
    }

    pub fn is_log_rank(&self) -> bool {
        self.rho == 0.0 && self.gamma == 0.0
    }
}

/// `s^rho (1 - s)^gamma` with `0^0 = 1`.
pub fn fh_weight(spec: WeightSpec, s: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&s) {
        return Err(NphError::domain("survival probability", s, "0 <= s <= 1"));
    }
    Ok(s.powf(spec.rho) * (1.0 - s).powf(spec.gamma))
}

/// Weights at each event time of `table`, using the left limit of the
/// pooled curve.
pub fn event_weights(table: &EventTable, pooled_km: &SurvivalCurve, spec: WeightSpec) -> Vec<f64> {
    table
        .times()
        .map(|t| {
            let s = pooled_km.eval_left(t).clamp(0.0, 1.0);
            s.powf(spec.rho) * (1.0 - s).powf(spec.gamma)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WlrtResult {
    /// `sum_j w_j (d1_j - e1_j)`
    pub numerator: f64,
    pub variance: f64,
    pub z: f64,
    pub p_two_sided: f64,
}

pub fn weighted_logrank(table: &EventTable, pooled_km: &SurvivalCurve, spec: WeightSpec) -> Result<WlrtResult> {
    let w = event_weights(table, pooled_km, spec);
    weighted_logrank_with(table, &w)
}

pub fn logrank(table: &EventTable) -> Result<WlrtResult> {
    accumulate(table, std::iter::repeat(1.0))
}

/// Weighted log-rank statistic with caller-supplied weights, one per row.
pub fn weighted_logrank_with(table: &EventTable, weights: &[f64]) -> Result<WlrtResult> {
    assert_eq!(weights.len(), table.len(), "one weight per event time");
    accumulate(table, weights.iter().copied())
}

/// Builds the event table and pooled KM, then runs the weighted test.
pub fn test_dataset(ds: &Dataset, spec: WeightSpec) -> Result<WlrtResult> {
    let table = build_event_table(ds);
    let km = km_from_table(&table, KmScope::Pooled);
    weighted_logrank(&table, &km, spec)
}

fn accumulate(table: &EventTable, weights: impl Iterator<Item = f64>) -> Result<WlrtResult> {
    let mut numerator = 0.0;
    let mut variance = 0.0;
    for (r, w) in table.rows().iter().zip(weights) {
        let (d1, d, n1, n2, n) = (
            f64::from(r.d1),
            f64::from(r.d()),
            f64::from(r.n1),
            f64::from(r.n2),
            f64::from(r.n()),
        );
        numerator += w * (d1 - n1 * d / n);
        if r.n() > 1 {
            variance += w * w * (n1 * n2 * d * (n - d)) / (n * n * (n - 1.0));
        }
    }
    if variance.is_nan() || variance <= 0.0 {
        return Err(NphError::DegenerateVariance);
    }
    let z = numerator / variance.sqrt();
    Ok(WlrtResult {
        numerator,
        variance,
        z,
        p_two_sided: two_sided_p(z),
    })
}

pub fn two_sided_p(z: f64) -> f64 {
    libm::erfc(z.abs() / std::f64::consts::SQRT_2).clamp(0.0, 1.0)
}
