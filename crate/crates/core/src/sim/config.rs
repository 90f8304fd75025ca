use serde::{Deserialize, Serialize};

use crate::dgm::delayed::DEFAULT_GRID_STEP;
use crate::dgm::{DelayedParams, DiminishingParams};
use crate::error::{NphError, Result};
use crate::wlrt::WeightSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ScenarioFamily {
    Diminishing(DiminishingParams),
    Delayed(DelayedParams),
}

impl ScenarioFamily {
    /// Weight matching the generating mechanism: `G^rho` or `G^gamma`.
    pub fn matched_spec(&self) -> WeightSpec {
        match self {
            ScenarioFamily::Diminishing(p) => WeightSpec { rho: p.rho, gamma: 0.0 },
            ScenarioFamily::Delayed(p) => WeightSpec {
                rho: 0.0,
                gamma: p.gamma,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub family: ScenarioFamily,
    pub n_per_arm: usize,
    pub censor_horizon: f64,
    pub n_reps: usize,
    pub base_seed: u64,
    /// Weight used for fitting.
    pub analysis: WeightSpec,
}

impl ScenarioConfig {
    pub fn new(
        family: ScenarioFamily,
        n_per_arm: usize,
        censor_horizon: f64,
        n_reps: usize,
        base_seed: u64,
        analysis: Option<WeightSpec>,
    ) -> Result<Self> {
        if n_per_arm < 2 {
            return Err(NphError::Config(format!("n_per_arm must be >= 2, got {n_per_arm}")));
        }
        if n_reps < 1 {
            return Err(NphError::Config("n_reps must be >= 1".into()));
        }
        if !(censor_horizon.is_finite() && censor_horizon > 0.0) {
            return Err(NphError::Config(format!(
                "censor horizon must be > 0, got {censor_horizon}"
            )));
        }
        Ok(ScenarioConfig {
            family,
            n_per_arm,
            censor_horizon,
            n_reps,
            base_seed,
            analysis: analysis.unwrap_or_else(|| family.matched_spec()),
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.base_seed = seed;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyName {
    Diminishing,
    Delayed,
}

/// On-disk scenario description.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub family: Option<FamilyName>,
    pub rho: Option<f64>,
    pub gamma: Option<f64>,
    pub e_delta: Option<f64>,
    pub s2_tau: Option<f64>,
    pub lambda1: Option<f64>,
    pub tau: Option<f64>,
    pub horizon: Option<f64>,
    pub n_per_arm: Option<usize>,
    pub n_reps: Option<usize>,
    pub seed: Option<u64>,
    pub grid_step: Option<f64>,
    pub analysis_rho: Option<f64>,
    pub analysis_gamma: Option<f64>,
}

fn need<T>(v: Option<T>, field: &str) -> Result<T> {
    v.ok_or_else(|| NphError::Config(format!("missing field `{field}`")))
}

fn unused(v: Option<f64>, field: &str, family: &str) -> Result<()> {
    match v {
        Some(_) => Err(NphError::Config(format!(
            "`{field}` does not apply to the {family} family"
        ))),
        None => Ok(()),
    }
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Builds the scenario. `seed` fills in a missing `seed` field; a
    /// present field must agree with it.
    pub fn into_config(self, seed: Option<u64>) -> Result<ScenarioConfig> {
        let base_seed = match (self.seed, seed) {
            (Some(a), Some(b)) if a != b => {
                return Err(NphError::Config(format!(
                    "seed {b} conflicts with seed {a} in the config file"
                )))
            }
            (Some(a), _) | (None, Some(a)) => a,
            (None, None) => return Err(NphError::Config("a seed is required".into())),
        };
        let lambda1 = self.lambda1.unwrap_or(0.5);
        let n_per_arm = need(self.n_per_arm, "n_per_arm")?;
        let n_reps = need(self.n_reps, "n_reps")?;

        let (family, horizon) = match need(self.family, "family")? {
            FamilyName::Diminishing => {
                unused(self.gamma, "gamma", "diminishing")?;
                unused(self.s2_tau, "s2_tau", "diminishing")?;
                unused(self.tau, "tau", "diminishing")?;
                unused(self.grid_step, "grid_step", "diminishing")?;
                let p = DiminishingParams::new(need(self.e_delta, "e_delta")?, need(self.rho, "rho")?, lambda1)?;
                (ScenarioFamily::Diminishing(p), need(self.horizon, "horizon")?)
            }
            FamilyName::Delayed => {
                unused(self.rho, "rho", "delayed")?;
                unused(self.e_delta, "e_delta", "delayed")?;
                let tau = need(self.tau, "tau")?;
                let p = DelayedParams::new(
                    need(self.gamma, "gamma")?,
                    lambda1,
                    tau,
                    need(self.s2_tau, "s2_tau")?,
                    self.grid_step.unwrap_or(DEFAULT_GRID_STEP),
                )?;
                (ScenarioFamily::Delayed(p), self.horizon.unwrap_or(tau))
            }
        };

        let analysis = match (self.analysis_rho, self.analysis_gamma) {
            (None, None) => None,
            (r, g) => {
                let m = family.matched_spec();
                Some(WeightSpec::new(r.unwrap_or(m.rho), g.unwrap_or(m.gamma))?)
            }
        };
        ScenarioConfig::new(family, n_per_arm, horizon, n_reps, base_seed, analysis)
    }
}
