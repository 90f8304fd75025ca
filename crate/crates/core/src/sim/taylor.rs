//! First-order agreement of the true and fitted hazard ratio curves.
//!
//! With `f = HR / HR_LL`, `f(0) = 1` and the first derivatives of `HR` and
//! `HR_LL` at the null coincide, so `f - 1` is second order in the effect
//! size. Derivatives are taken by central differences.

use serde::Serialize;

use crate::dgm::delayed::{hazard2, hr_from_phi};
use crate::dgm::{s1, s2_diminishing, true_hr_diminishing, DiminishingParams};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivativeRow {
    pub t: f64,
    /// `S1(t)^rho` or `(1 - S1(t))^gamma`.
    pub expected: f64,
    pub d_true: f64,
    pub d_ll: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaylorReport {
    /// `rho` or `gamma`.
    pub parameter: f64,
    pub rows: Vec<DerivativeRow>,
    /// Largest derivative error over both curves and all rows.
    pub max_derivative_error: f64,
    pub f_at_zero_is_one: bool,
    /// Effect sizes compared by the remainder test, large then small.
    pub effects: (f64, f64),
    /// `max_t |f - 1|` at each effect size.
    pub remainders: (f64, f64),
    /// `remainders.1 / remainders.0`.
    pub ratio: f64,
}

impl TaylorReport {
    fn build(parameter: f64, rows: Vec<DerivativeRow>, f0: bool, effects: (f64, f64), remainders: (f64, f64)) -> Self {
        let max_derivative_error = rows
            .iter()
            .map(|r| (r.d_true - r.expected).abs().max((r.d_ll - r.expected).abs()))
            .fold(0.0, f64::max);
        TaylorReport {
            parameter,
            rows,
            max_derivative_error,
            f_at_zero_is_one: f0,
            effects,
            remainders,
            ratio: remainders.1 / remainders.0,
        }
    }
}

fn central(f: impl Fn(f64) -> Result<f64>, h: f64) -> Result<f64> {
    Ok((f(h)? - f(-h)?) / (2.0 * h))
}

fn max_abs_dev(mut values: impl Iterator<Item = Result<f64>>) -> Result<f64> {
    values.try_fold(0.0, |m: f64, f| Ok(m.max((f? - 1.0).abs())))
}

/// Diminishing family with `beta = Delta`. The remainder test compares
/// `delta` with `delta / 10`, for which quadratic decay gives a ratio of
/// about 0.01.
pub fn taylor_check_diminishing(t_grid: &[f64], rho: f64, lambda1: f64, delta: f64) -> Result<TaylorReport> {
    let params = |d: f64| DiminishingParams::new(d.exp(), rho, lambda1);
    let hr = |t: f64, d: f64| -> Result<f64> { Ok(true_hr_diminishing(t, &params(d)?)) };
    let hr_ll = |t: f64, d: f64| -> Result<f64> {
        let pooled = 0.5 * s1(t, lambda1) + 0.5 * s2_diminishing(t, &params(d)?);
        Ok((d * pooled.powf(rho)).exp())
    };
    let f = |t: f64, d: f64| -> Result<f64> { Ok(hr(t, d)? / hr_ll(t, d)?) };

    let h = 1e-5;
    let rows = t_grid
        .iter()
        .map(|&t| {
            Ok(DerivativeRow {
                t,
                expected: s1(t, lambda1).powf(rho),
                d_true: central(|d| hr(t, d), h)?,
                d_ll: central(|d| hr_ll(t, d), h)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let f0 = t_grid
        .iter()
        .map(|&t| f(t, 0.0))
        .collect::<Result<Vec<_>>>()?
        .iter()
        .all(|&v| v == 1.0);
    let small = delta / 10.0;
    let r_big = max_abs_dev(t_grid.iter().map(|&t| f(t, delta)))?;
    let r_small = max_abs_dev(t_grid.iter().map(|&t| f(t, small)))?;
    Ok(TaylorReport::build(rho, rows, f0, (delta, small), (r_big, r_small)))
}

/// Delayed family with `beta = g(phi) = ln(L(S2(tau)) / L(S1(tau)))`.
///
/// The effect is measured by `psi = -phi`, which is positive when treatment
/// survival is below control; in that orientation both derivatives equal
/// `(1 - S1(t))^gamma`. The remainder test compares `psi` with `psi / 2`,
/// for which quadratic decay gives a ratio of about 1/4.
pub fn taylor_check_delayed(t_grid: &[f64], gamma: f64, lambda1: f64, tau: f64, psi: f64) -> Result<TaylorReport> {
    let hr = |t: f64, psi: f64| hr_from_phi(t, lambda1, -psi, gamma);
    let pooled_event = |t: f64, psi: f64| -> Result<f64> {
        let s2 = (-hazard2(t, lambda1, -psi, gamma)?).exp();
        Ok(1.0 - 0.5 * s1(t, lambda1) - 0.5 * s2)
    };
    let hr_ll = |t: f64, psi: f64| -> Result<f64> {
        let g = hr(tau, psi)?.ln();
        let a = (pooled_event(t, psi)? / pooled_event(tau, psi)?).powf(gamma);
        Ok((g * a).exp())
    };
    let f = |t: f64, psi: f64| -> Result<f64> { Ok(hr(t, psi)? / hr_ll(t, psi)?) };

    let h = 1e-4;
    let rows = t_grid
        .iter()
        .map(|&t| {
            Ok(DerivativeRow {
                t,
                expected: (1.0 - s1(t, lambda1)).powf(gamma),
                d_true: central(|p| hr(t, p), h)?,
                d_ll: central(|p| hr_ll(t, p), h)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let f0 = t_grid
        .iter()
        .map(|&t| f(t, 0.0))
        .collect::<Result<Vec<_>>>()?
        .iter()
        .all(|&v| v == 1.0);
    let small = psi / 2.0;
    let r_big = max_abs_dev(t_grid.iter().map(|&t| f(t, psi)))?;
    let r_small = max_abs_dev(t_grid.iter().map(|&t| f(t, small)))?;
    Ok(TaylorReport::build(gamma, rows, f0, (psi, small), (r_big, r_small)))
}
