//! Weighted hazard ratio Cox model.
//!
//! The hazard is `lambda0(t) exp(A(t) beta X)` where `X` is the treatment
//! indicator and `A(t) = w(t) / max_s w(s)` is the Fleming-Harrington weight
//! normalized over the observed event times. `beta` is fitted by Newton-Raphson
//! on the Breslow partial likelihood, and `exp(beta A(t))` is the implied
//! time-varying hazard ratio. At `beta = 0` the score test reproduces the
//! weighted log-rank test on tie-free data.

use serde::Serialize;

use crate::data::{build_event_table, km_from_table, Dataset, EventTable, KmScope, SurvivalCurve};
use crate::error::{NphError, Result};
use crate::wlrt::{event_weights, WeightSpec};

pub const SCORE_TOL: f64 = 1e-8;
pub const STEP_TOL: f64 = 1e-10;
pub const MAX_ITER: usize = 50;
const MAX_HALVINGS: usize = 40;

/// `A(t_j)` at each event time; the maximum is exactly 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdjustmentFactor {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl AdjustmentFactor {
    pub fn from_weights(times: Vec<f64>, weights: &[f64]) -> Result<Self> {
        assert_eq!(times.len(), weights.len());
        let max = weights.iter().copied().fold(0.0, f64::max);
        if max.is_nan() || max <= 0.0 {
            return Err(NphError::AllZeroWeights);
        }
        let values = weights.iter().map(|w| w / max).collect();
        Ok(AdjustmentFactor { times, values })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Step interpolation between event times: the value at the most recent
    /// event time `<= t`, or the first value before any event.
    pub fn at(&self, t: f64) -> f64 {
        let k = self.times.partition_point(|&x| x <= t);
        self.values[k.saturating_sub(1)]
    }
}

pub fn adjustment_factor(table: &EventTable, pooled_km: &SurvivalCurve, spec: WeightSpec) -> Result<AdjustmentFactor> {
    let w = event_weights(table, pooled_km, spec);
    AdjustmentFactor::from_weights(table.times().collect(), &w)
}

/// `ln(n2 + n1 e^x)` without overflow.
fn log_risk_sum(n1: f64, n2: f64, x: f64) -> f64 {
    if n1 == 0.0 {
        n2.ln()
    } else if n2 == 0.0 {
        n1.ln() + x
    } else {
        let a = n1.ln() + x;
        let b = n2.ln();
        let m = a.max(b);
        m + ((a - m).exp() + (b - m).exp()).ln()
    }
}

/// Share of the risk-set weight carried by the treatment arm.
fn treated_share(n1: f64, n2: f64, x: f64) -> f64 {
    if n1 == 0.0 {
        0.0
    } else if n2 == 0.0 {
        1.0
    } else {
        1.0 / (1.0 + (n2 / n1) * (-x).exp())
    }
}

/// Breslow partial log-likelihood with covariate `A(t_j) X`.
pub fn partial_loglik(beta: f64, table: &EventTable, adj: &AdjustmentFactor) -> f64 {
    table
        .rows()
        .iter()
        .zip(adj.values())
        .map(|(r, &a)| {
            let x = beta * a;
            x * f64::from(r.d1) - f64::from(r.d()) * log_risk_sum(f64::from(r.n1), f64::from(r.n2), x)
        })
        .sum()
}

/// Score and observed information at `beta`.
pub fn score_and_info(beta: f64, table: &EventTable, adj: &AdjustmentFactor) -> (f64, f64) {
    let mut score = 0.0;
    let mut info = 0.0;
    for (r, &a) in table.rows().iter().zip(adj.values()) {
        let p = treated_share(f64::from(r.n1), f64::from(r.n2), beta * a);
        let d = f64::from(r.d());
        score += a * (f64::from(r.d1) - d * p);
        info += a * a * d * p * (1.0 - p);
    }
    (score, info)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WhrFit {
    /// Log of the maximal hazard ratio.
    pub beta_hat: f64,
    pub se: f64,
    pub iterations: usize,
    pub converged: bool,
    pub adjustment: AdjustmentFactor,
}

impl WhrFit {
    pub fn max_hazard_ratio(&self) -> f64 {
        self.beta_hat.exp()
    }

    /// `exp(beta_hat A(t))` with `A` step-interpolated from the fit.
    pub fn hr_at(&self, t: f64) -> f64 {
        (self.beta_hat * self.adjustment.at(t)).exp()
    }
}

/// True when the likelihood has no finite maximizer: at every row with
/// `A_j > 0` one arm accounts for all events while the other is at risk
/// (or symmetrically for `beta -> -inf`).
fn monotone_likelihood(table: &EventTable, adj: &AdjustmentFactor) -> bool {
    let active = || table.rows().iter().zip(adj.values()).filter(|(_, &a)| a > 0.0);
    let up = active().all(|(r, _)| r.n1 == 0 || r.d2 == 0);
    let down = active().all(|(r, _)| r.n2 == 0 || r.d1 == 0);
    up || down
}

pub fn fit_table(table: &EventTable, adj: AdjustmentFactor) -> Result<WhrFit> {
    let mut beta = 0.0;
    let mut ll = partial_loglik(beta, table, &adj);
    let mut converged = false;
    let mut iterations = 0;

    while iterations < MAX_ITER {
        let (score, info) = score_and_info(beta, table, &adj);
        if score.abs() < SCORE_TOL {
            converged = true;
            break;
        }
        if info.is_nan() || info <= 0.0 {
            return Err(NphError::NonConvergence {
                iterations,
                last_beta: beta,
                reason: "information is zero",
            });
        }
        iterations += 1;
        let mut step = score / info;
        let mut next = beta + step;
        let mut next_ll = partial_loglik(next, table, &adj);
        let mut halvings = 0;
        // rounding noise near the optimum must not trigger halving
        let floor = ll - 1e-12 * (1.0 + ll.abs());
        while next_ll < floor && halvings < MAX_HALVINGS {
            step *= 0.5;
            next = beta + step;
            next_ll = partial_loglik(next, table, &adj);
            halvings += 1;
        }
        beta = next;
        ll = next_ll;
        if step.abs() < STEP_TOL {
            converged = true;
            break;
        }
    }

    if converged && monotone_likelihood(table, &adj) {
        return Err(NphError::NonConvergence {
            iterations,
            last_beta: beta,
            reason: "monotone likelihood, the estimate is infinite",
        });
    }
    if !converged {
        return Err(NphError::NonConvergence {
            iterations,
            last_beta: beta,
            reason: "iteration limit reached",
        });
    }
    let (_, info) = score_and_info(beta, table, &adj);
    if info.is_nan() || info <= 0.0 {
        return Err(NphError::NonConvergence {
            iterations,
            last_beta: beta,
            reason: "information is zero at the estimate",
        });
    }
    Ok(WhrFit {
        beta_hat: beta,
        se: info.sqrt().recip(),
        iterations,
        converged,
        adjustment: adj,
    })
}

pub fn fit_whr(ds: &Dataset, spec: WeightSpec) -> Result<WhrFit> {
    let table = build_event_table(ds);
    let km = km_from_table(&table, KmScope::Pooled);
    let adj = adjustment_factor(&table, &km, spec)?;
    fit_table(&table, adj)
}

/// `U(0) / sqrt(I(0))`.
pub fn score_test(ds: &Dataset, spec: WeightSpec) -> Result<f64> {
    let table = build_event_table(ds);
    let km = km_from_table(&table, KmScope::Pooled);
    let adj = adjustment_factor(&table, &km, spec)?;
    score_test_table(&table, &adj)
}

pub fn score_test_table(table: &EventTable, adj: &AdjustmentFactor) -> Result<f64> {
    let (u, i) = score_and_info(0.0, table, adj);
    if i.is_nan() || i <= 0.0 {
        return Err(NphError::DegenerateVariance);
    }
    Ok(u / i.sqrt())
}

pub fn hr_profile(beta_hat: f64, times: &[f64], a_of_t: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
    times.iter().map(|&t| (t, (beta_hat * a_of_t(t)).exp())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Arm, Observation};
    use crate::wlrt;
    use proptest::prelude::*;

    use Arm::{Control as C, Treatment as T};

    fn ds(v: &[(f64, u8, Arm)]) -> Dataset {
        Dataset::new(v.iter().map(|&(t, s, a)| Observation::new(t, s == 1, a)).collect()).unwrap()
    }

    fn parts(d: &Dataset, spec: WeightSpec) -> (EventTable, AdjustmentFactor) {
        let tab = build_event_table(d);
        let km = km_from_table(&tab, KmScope::Pooled);
        let adj = adjustment_factor(&tab, &km, spec).unwrap();
        (tab, adj)
    }

    fn alternating() -> Dataset {
        ds(&[(1.0, 1, T), (2.0, 1, C), (3.0, 1, T), (4.0, 1, C)])
    }

    /// Grid search over [-5, 5] in steps of 1e-4.
    fn grid_argmax(f: impl Fn(f64) -> f64) -> f64 {
        (0..=100_000)
            .map(|k| -5.0 + 1e-4 * f64::from(k))
            .map(|b| (b, f(b)))
            .fold((0.0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc })
            .0
    }

    #[test]
    fn adjustment_examples() {
        let adj = AdjustmentFactor::from_weights(vec![1.0, 2.0], &[0.8, 0.4]).unwrap();
        assert_eq!(adj.values(), &[1.0, 0.5]);
        let (_, adj) = parts(&alternating(), WeightSpec::LOG_RANK);
        assert!(adj.values().iter().all(|&a| a == 1.0));
        let (_, adj) = parts(&alternating(), WeightSpec::new(1.0, 0.0).unwrap());
        assert_eq!(adj.values()[0], 1.0);
        assert!(matches!(
            AdjustmentFactor::from_weights(vec![1.0], &[0.0]),
            Err(NphError::AllZeroWeights)
        ));
        // gamma > 0 with one event time: the only weight is zero.
        let single = ds(&[(1.0, 1, T), (2.0, 0, C)]);
        assert!(matches!(
            fit_whr(&single, WeightSpec::new(0.0, 1.0).unwrap()),
            Err(NphError::AllZeroWeights)
        ));
    }

    #[test]
    fn adjustment_step_interpolation() {
        let adj = AdjustmentFactor::from_weights(vec![1.0, 2.0, 3.0], &[1.0, 0.5, 0.25]).unwrap();
        assert_eq!(adj.at(0.5), 1.0);
        assert_eq!(adj.at(1.0), 1.0);
        assert_eq!(adj.at(2.5), 0.5);
        assert_eq!(adj.at(10.0), 0.25);
    }

    #[test]
    fn null_loglik() {
        let (tab, adj) = parts(&alternating(), WeightSpec::LOG_RANK);
        let expected: f64 = tab
            .rows()
            .iter()
            .map(|r| -f64::from(r.d()) * f64::from(r.n()).ln())
            .sum();
        assert!((partial_loglik(0.0, &tab, &adj) - expected).abs() < 1e-14);
    }

    #[test]
    fn symmetric_ties_fit_zero() {
        let d = ds(&[(1.0, 1, T), (1.0, 1, C)]);
        let fit = fit_whr(&d, WeightSpec::LOG_RANK).unwrap();
        assert!(fit.beta_hat.abs() < 1e-8);
        let (tab, adj) = parts(&d, WeightSpec::LOG_RANK);
        let ll0 = partial_loglik(0.0, &tab, &adj);
        assert!(ll0 > partial_loglik(0.1, &tab, &adj));
        assert!(ll0 > partial_loglik(-0.1, &tab, &adj));
    }

    #[test]
    fn alternating_matches_grid_search() {
        let (tab, adj) = parts(&alternating(), WeightSpec::LOG_RANK);
        let best = grid_argmax(|b| partial_loglik(b, &tab, &adj));
        let fit = fit_whr(&alternating(), WeightSpec::LOG_RANK).unwrap();
        assert!(fit.converged);
        assert!((fit.beta_hat - best).abs() <= 1e-4, "{} vs {}", fit.beta_hat, best);
        let (score, _) = score_and_info(fit.beta_hat, &tab, &adj);
        assert!(score.abs() < SCORE_TOL);
    }

    #[test]
    fn single_event_score_by_hand() {
        let (tab, adj) = parts(&ds(&[(1.0, 1, T), (2.0, 0, C)]), WeightSpec::LOG_RANK);
        let (u, i) = score_and_info(0.0, &tab, &adj);
        assert_eq!(u, 0.5);
        assert_eq!(i, 0.25);
    }

    #[test]
    fn separated_data_does_not_converge() {
        let d = ds(&[(1.0, 1, T), (2.0, 1, T), (3.0, 1, C), (4.0, 1, C)]);
        let (tab, adj) = parts(&d, WeightSpec::LOG_RANK);
        // Oracle: the likelihood keeps increasing over [0, 20].
        let mut prev = f64::NEG_INFINITY;
        for k in 0..=200 {
            let ll = partial_loglik(0.1 * f64::from(k), &tab, &adj);
            assert!(ll >= prev);
            prev = ll;
        }
        assert!(matches!(
            fit_whr(&d, WeightSpec::LOG_RANK),
            Err(NphError::NonConvergence { .. })
        ));
        assert!(matches!(
            fit_whr(&d.swap_arms(), WeightSpec::LOG_RANK),
            Err(NphError::NonConvergence { .. })
        ));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let d = ds(&[
            (0.5, 1, T),
            (1.0, 1, C),
            (1.0, 1, T),
            (1.7, 0, C),
            (2.0, 1, C),
            (2.2, 1, T),
            (3.0, 1, C),
            (3.5, 0, T),
            (4.0, 1, T),
        ]);
        for spec in [WeightSpec::LOG_RANK, WeightSpec::new(1.0, 0.5).unwrap()] {
            let (tab, adj) = parts(&d, spec);
            for beta in [-1.0, 0.0, 0.4, 2.0] {
                let h = 1e-6;
                let (u, i) = score_and_info(beta, &tab, &adj);
                let fd_u = (partial_loglik(beta + h, &tab, &adj) - partial_loglik(beta - h, &tab, &adj)) / (2.0 * h);
                assert!((fd_u - u).abs() <= 1e-6 * u.abs().max(1.0), "{fd_u} vs {u}");
                let fd_i =
                    -(score_and_info(beta + h, &tab, &adj).0 - score_and_info(beta - h, &tab, &adj).0) / (2.0 * h);
                assert!((fd_i - i).abs() <= 1e-5 * i.abs().max(1.0), "{fd_i} vs {i}");
            }
        }
    }

    #[test]
    fn profile_examples() {
        let p = hr_profile(0.3, &[0.0, 1.0], |_| 1.0);
        assert!(p.iter().all(|&(_, hr)| (hr - 0.3f64.exp()).abs() < 1e-15));
        assert_eq!(hr_profile(0.3, &[2.0], |_| 0.0)[0].1, 1.0);
        assert!((hr_profile(4f64.ln(), &[1.0], |_| 0.5)[0].1 - 2.0).abs() < 1e-15);
    }

    fn tie_free() -> impl Strategy<Value = Dataset> {
        (prop::collection::vec((any::<bool>(), any::<bool>(), 0.05..1.0f64), 4..60)).prop_filter_map("valid", |v| {
            let mut t = 0.0;
            let obs = v
                .into_iter()
                .map(|(tr, e, gap)| {
                    t += gap;
                    Observation::new(t, e, if tr { T } else { C })
                })
                .collect();
            Dataset::new(obs).ok()
        })
    }

    proptest! {
        #[test]
        fn score_test_equals_wlrt_without_ties(d in tie_free(), rho in 0.0..2.0f64, gamma in 0.0..2.0f64) {
            let spec = WeightSpec::new(rho, gamma).unwrap();
            if let (Ok(z), Ok(w)) = (score_test(&d, spec), wlrt::test_dataset(&d, spec)) {
                prop_assert!((z - w.z).abs() < 1e-8, "{} vs {}", z, w.z);
                let zs = score_test(&d.swap_arms(), spec).unwrap();
                prop_assert!((z + zs).abs() < 1e-10);
            }
        }

        #[test]
        fn normalization_is_scale_free(d in tie_free(), c in 0.01..50.0f64, rho in 0.0..2.0f64) {
            let spec = WeightSpec::new(rho, 0.0).unwrap();
            let tab = build_event_table(&d);
            let km = km_from_table(&tab, KmScope::Pooled);
            let w = event_weights(&tab, &km, spec);
            let wc: Vec<f64> = w.iter().map(|x| x * c).collect();
            let a = AdjustmentFactor::from_weights(tab.times().collect(), &w).unwrap();
            let b = AdjustmentFactor::from_weights(tab.times().collect(), &wc).unwrap();
            for (x, y) in a.values().iter().zip(b.values()) {
                prop_assert!((x - y).abs() < 1e-14);
            }
            let za = score_test_table(&tab, &a);
            let zb = score_test_table(&tab, &b);
            if let (Ok(za), Ok(zb)) = (za, zb) {
                prop_assert!((za - zb).abs() < 1e-12);
            }
            if let (Ok(fa), Ok(fb)) = (fit_table(&tab, a), fit_table(&tab, b)) {
                prop_assert!((fa.beta_hat - fb.beta_hat).abs() < 1e-8, "{} vs {}", fa.beta_hat, fb.beta_hat);
            }
        }

        #[test]
        fn information_positive_and_converged_score_small(d in tie_free()) {
            if let Ok(fit) = fit_whr(&d, WeightSpec::LOG_RANK) {
                let tab = build_event_table(&d);
                let (u, i) = score_and_info(fit.beta_hat, &tab, &fit.adjustment);
                prop_assert!(i > 0.0 && fit.se > 0.0);
                prop_assert!(u.abs() < 1e-6);
            }
        }
    }
}
