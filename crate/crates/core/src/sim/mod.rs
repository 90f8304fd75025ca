//! Monte Carlo replication of the weighted hazard ratio fit.
//!
//! Replicate `k` of a scenario draws from [`replicate_rng`]`(base_seed, k)`
//! and the per-replicate estimates are collected in replicate order, so a
//! summary is bitwise identical for any number of workers.

mod config;
mod figure;
mod profile;
mod svg;
mod taylor;

use rayon::prelude::*;
use serde::Serialize;

pub use config::{ConfigFile, FamilyName, ScenarioConfig, ScenarioFamily};
pub use figure::{reproduce_figure, FigureId, FigureReport, ScenarioOutcome};
pub use profile::{profile_comparison, ProfilePoint};
pub use svg::profile_svg;
pub use taylor::{taylor_check_delayed, taylor_check_diminishing, DerivativeRow, TaylorReport};

use crate::dgm::{generate_delayed, generate_diminishing, DelayedSampler};
use crate::error::{NphError, Result};
use crate::rng::replicate_rng;
use crate::whr::fit_whr;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimSummary {
    /// Estimates of the converged replicates, in replicate order.
    pub betas: Vec<f64>,
    pub mean_beta: f64,
    pub exp_mean_beta: f64,
    pub convergence_failures: usize,
    /// `sd(beta_hat) / sqrt(converged)`.
    pub mc_se: f64,
}

impl SimSummary {
    pub fn from_estimates(estimates: &[Option<f64>]) -> Self {
        let betas: Vec<f64> = estimates.iter().flatten().copied().collect();
        let m = betas.len() as f64;
        let mean_beta = betas.iter().sum::<f64>() / m;
        let ss: f64 = betas.iter().map(|b| (b - mean_beta).powi(2)).sum();
        let mc_se = if betas.len() > 1 {
            (ss / (m - 1.0)).sqrt() / m.sqrt()
        } else {
            f64::NAN
        };
        SimSummary {
            mean_beta,
            exp_mean_beta: mean_beta.exp(),
            convergence_failures: estimates.len() - betas.len(),
            mc_se,
            betas,
        }
    }

    pub fn converged(&self) -> usize {
        self.betas.len()
    }
}

pub fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    if workers == 0 {
        return Err(NphError::Config("workers must be >= 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| NphError::Config(format!("cannot start {workers} workers: {e}")))
}

/// Runs every replicate of `config` on `workers` threads.
pub fn run_scenario(config: &ScenarioConfig, workers: usize) -> Result<SimSummary> {
    thread_pool(workers)?.install(|| run_scenario_here(config))
}

/// As [`run_scenario`], on the current rayon pool.
pub fn run_scenario_here(config: &ScenarioConfig) -> Result<SimSummary> {
    let estimates: Vec<Option<f64>> = match config.family {
        ScenarioFamily::Diminishing(p) => replicate(config, |rng| {
            generate_diminishing(&p, config.n_per_arm, config.censor_horizon, rng)
        }),
        ScenarioFamily::Delayed(p) => {
            let sampler = DelayedSampler::new(&p)?;
            replicate(config, |rng| {
                generate_delayed(&sampler, p.lambda1, config.n_per_arm, config.censor_horizon, rng)
            })
        }
    };
    Ok(SimSummary::from_estimates(&estimates))
}

fn replicate(
    config: &ScenarioConfig,
    generate: impl Fn(&mut crate::rng::SimRng) -> Result<crate::data::Dataset> + Sync,
) -> Vec<Option<f64>> {
    (0..config.n_reps as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = replicate_rng(config.base_seed, k);
            let ds = generate(&mut rng).ok()?;
            fit_whr(&ds, config.analysis).ok().map(|f| f.beta_hat)
        })
        .collect()
}
