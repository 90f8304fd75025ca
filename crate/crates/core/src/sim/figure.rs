use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use super::{
    profile_comparison, profile_svg, run_scenario_here, thread_pool, ProfilePoint, ScenarioConfig, ScenarioFamily,
    SimSummary,
};
use crate::dgm::delayed::DEFAULT_GRID_STEP;
use crate::dgm::{DelayedParams, DiminishingParams};
use crate::error::{NphError, Result};
use crate::io::write_atomic;
use crate::rng::derive_seed;

pub const MIN_REPS: usize = 100;
const N_PER_ARM: usize = 100;
const LAMBDA1: f64 = 0.5;
const PROFILE_POINTS: usize = 201;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FigureId {
    /// Diminishing effect, `rho` x `e_delta`.
    Fig1,
    /// Delayed effect, `gamma` x `S2(tau)`.
    Fig2,
}

impl FromStr for FigureId {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "1" | "fig1" => Ok(FigureId::Fig1),
            "2" | "fig2" => Ok(FigureId::Fig2),
            _ => Err(format!("unknown figure `{s}`, expected 1 or 2")),
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FigureId::Fig1 => "1",
            FigureId::Fig2 => "2",
        })
    }
}

impl FigureId {
    /// Named sub-scenarios; scenario `i` is seeded with `derive_seed(seed, i)`.
    pub fn scenarios(self, reps: usize, seed: u64) -> Result<Vec<(String, ScenarioConfig)>> {
        let mut out = Vec::new();
        match self {
            FigureId::Fig1 => {
                for rho in [0.5, 1.0, 2.0] {
                    for e_delta in [1.4, 4.0, 8.0] {
                        let p = DiminishingParams::new(e_delta, rho, LAMBDA1)?;
                        let seed = derive_seed(seed, out.len() as u64);
                        let c = ScenarioConfig::new(ScenarioFamily::Diminishing(p), N_PER_ARM, 3.0, reps, seed, None)?;
                        out.push((format!("rho{rho}_edelta{e_delta}"), c));
                    }
                }
            }
            FigureId::Fig2 => {
                for s2_tau in [0.25, 0.1] {
                    for gamma in [0.5, 1.0, 2.0] {
                        let p = DelayedParams::new(gamma, LAMBDA1, 2.0, s2_tau, DEFAULT_GRID_STEP)?;
                        let seed = derive_seed(seed, out.len() as u64);
                        let c = ScenarioConfig::new(ScenarioFamily::Delayed(p), N_PER_ARM, 2.0, reps, seed, None)?;
                        out.push((format!("gamma{gamma}_s2tau{s2_tau}"), c));
                    }
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioOutcome {
    pub name: String,
    pub config: ScenarioConfig,
    /// Error message when the scenario could not be run.
    pub result: std::result::Result<(SimSummary, Vec<ProfilePoint>), String>,
}

impl ScenarioOutcome {
    pub fn summary(&self) -> Option<&SimSummary> {
        self.result.as_ref().ok().map(|(s, _)| s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureReport {
    pub figure: FigureId,
    pub outcomes: Vec<ScenarioOutcome>,
}

impl FigureReport {
    pub fn get(&self, name: &str) -> Option<&ScenarioOutcome> {
        self.outcomes.iter().find(|o| o.name == name)
    }

    /// `summary.csv`, plus `profile_<scenario>.csv` and `.svg` for every
    /// scenario that ran.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        write_atomic(&dir.join("summary.csv"), |w| {
            let mut csv = csv::Writer::from_writer(w);
            csv.write_record(["scenario", "mean_beta", "exp_mean_beta", "mc_se", "failures"])?;
            for o in &self.outcomes {
                let (mean, exp_mean, se, failures) = match &o.result {
                    Ok((s, _)) => (s.mean_beta, s.exp_mean_beta, s.mc_se, s.convergence_failures),
                    Err(_) => (f64::NAN, f64::NAN, f64::NAN, o.config.n_reps),
                };
                csv.write_record([
                    o.name.clone(),
                    mean.to_string(),
                    exp_mean.to_string(),
                    se.to_string(),
                    failures.to_string(),
                ])?;
            }
            csv.flush()?;
            Ok(())
        })?;
        for o in &self.outcomes {
            let Ok((_, profile)) = &o.result else { continue };
            write_atomic(&dir.join(format!("profile_{}.csv", o.name)), |w| {
                let mut csv = csv::Writer::from_writer(w);
                csv.write_record(["t", "hr_true", "hr_ll"])?;
                for p in profile {
                    csv.write_record([p.t.to_string(), p.hr_true.to_string(), p.hr_ll.to_string()])?;
                }
                csv.flush()?;
                Ok(())
            })?;
            let svg = profile_svg(&format!("Figure {} {}", self.figure, o.name), profile);
            write_atomic(&dir.join(format!("profile_{}.svg", o.name)), |w| {
                Ok(w.write_all(svg.as_bytes())?)
            })?;
        }
        Ok(())
    }
}

/// Runs every sub-scenario of a figure. A scenario that fails to run is
/// recorded in its outcome and the rest continue.
pub fn reproduce_figure(id: FigureId, reps: usize, seed: u64, workers: usize) -> Result<FigureReport> {
    if reps < MIN_REPS {
        return Err(NphError::Config(format!("reps must be >= {MIN_REPS}, got {reps}")));
    }
    let pool = thread_pool(workers)?;
    let outcomes = id
        .scenarios(reps, seed)?
        .into_iter()
        .map(|(name, config)| {
            let result = pool
                .install(|| {
                    let s = run_scenario_here(&config)?;
                    let prof = profile_comparison(&s, &config, PROFILE_POINTS)?;
                    Ok::<_, NphError>((s, prof))
                })
                .map_err(|e| e.to_string());
            ScenarioOutcome { name, config, result }
        })
        .collect();
    Ok(FigureReport { figure: id, outcomes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_grid() {
        let f1 = FigureId::Fig1.scenarios(100, 1).unwrap();
        assert_eq!(f1.len(), 9);
        assert_eq!(f1[0].0, "rho0.5_edelta1.4");
        assert_eq!(f1[8].0, "rho2_edelta8");
        assert!(f1.iter().all(|(_, c)| c.n_per_arm == 100 && c.censor_horizon == 3.0));
        let f2 = FigureId::Fig2.scenarios(100, 1).unwrap();
        assert_eq!(f2.len(), 6);
        assert_eq!(f2[1].0, "gamma1_s2tau0.25");
        let mut seeds: Vec<u64> = f1.iter().map(|(_, c)| c.base_seed).collect();
        seeds.dedup();
        assert_eq!(seeds.len(), 9);
    }

    #[test]
    fn too_few_reps_rejected() {
        assert!(reproduce_figure(FigureId::Fig1, 99, 1, 1).is_err());
        assert_eq!("2".parse::<FigureId>().unwrap(), FigureId::Fig2);
        assert!("3".parse::<FigureId>().is_err());
    }
}
