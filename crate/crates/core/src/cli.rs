//! The `nph` command line.
//!
//! Exit status is 0 on success, 1 when an operation fails on valid input and
//! 2 for usage errors. [`run`] takes its output streams as arguments so the
//! binary stays a one-line wrapper.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::data::{Arm, Dataset, KmScope, SurvivalCurve};
use crate::dgm::delayed::DEFAULT_GRID_STEP;
use crate::dgm::{self, DelayedParams, DelayedSampler, DiminishingParams};
use crate::error::NphError;
use crate::io::write_atomic;
use crate::rng::replicate_rng;
use crate::sim::{self, ConfigFile, FigureId, ScenarioConfig, ScenarioFamily, ScenarioOutcome};
use crate::whr::{self, WhrFit};
use crate::wlrt::{self, WeightSpec};

#[derive(Debug, Parser)]
#[command(
    name = "nph",
    version,
    about = "Weighted log-rank tests and weighted hazard ratios under non-proportional hazards"
)]
#[command(propagate_version = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Kaplan-Meier estimate from a dataset CSV.
    Km(KmArgs),
    /// Fleming-Harrington weighted log-rank test.
    Wlrt(WlrtArgs),
    /// Weighted hazard ratio Cox fit.
    Whr(WhrArgs),
    /// Simulate one dataset, or tabulate the true curves with --emit-truth.
    Dgm(DgmArgs),
    /// Monte Carlo run of a scenario described by a JSON config file.
    Simulate(SimulateArgs),
    /// Rerun all scenarios of a figure and write summaries, profiles and plots.
    Reproduce(ReproduceArgs),
    /// Check that true and fitted hazard ratios agree to first order.
    VerifyTaylor(TaylorArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScopeArg {
    Pooled,
    Control,
    Treatment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Diminishing,
    Delayed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TaylorFamily {
    Diminishing,
    Delayed,
    Both,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Dataset CSV with header `id,time,status,arm` (`-` for stdin).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct KmArgs {
    #[command(flatten)]
    pub io: InputArgs,
    /// Which subjects the curve is estimated from.
    #[arg(long, value_enum, default_value = "pooled")]
    pub arm: ScopeArg,
}

#[derive(Debug, Args)]
pub struct WeightArgs {
    /// Exponent of S(t-) in the weight.
    #[arg(long, allow_negative_numbers = true, default_value = "0", value_parser = non_negative("rho"))]
    pub rho: f64,
    /// Exponent of 1 - S(t-) in the weight.
    #[arg(long, allow_negative_numbers = true, default_value = "0", value_parser = non_negative("gamma"))]
    pub gamma: f64,
}

#[derive(Debug, Args)]
pub struct WlrtArgs {
    #[command(flatten)]
    pub io: InputArgs,
    #[command(flatten)]
    pub weight: WeightArgs,
}

#[derive(Debug, Args)]
pub struct WhrArgs {
    #[command(flatten)]
    pub io: InputArgs,
    #[command(flatten)]
    pub weight: WeightArgs,
    /// Also report A(t) and exp(beta A(t)) on this many times from 0 to the
    /// last observed time.
    #[arg(long, value_name = "POINTS", value_parser = clap::value_parser!(u32).range(2..))]
    pub profile_grid: Option<u32>,
}

#[derive(Debug, Args)]
pub struct DgmArgs {
    #[arg(long, value_enum)]
    pub scenario: FamilyArg,
    /// Hazard ratio at t = 0 (diminishing).
    #[arg(long, allow_negative_numbers = true, value_parser = positive("e-delta"))]
    pub e_delta: Option<f64>,
    /// Decay exponent (diminishing).
    #[arg(long, allow_negative_numbers = true, value_parser = positive("rho"))]
    pub rho: Option<f64>,
    /// Delay exponent (delayed).
    #[arg(long, allow_negative_numbers = true, value_parser = positive("gamma"))]
    pub gamma: Option<f64>,
    /// Target treatment survival at tau (delayed).
    #[arg(long, allow_negative_numbers = true, value_parser = positive("s2-tau"))]
    pub s2_tau: Option<f64>,
    /// Control hazard.
    #[arg(long, allow_negative_numbers = true, default_value = "0.5", value_parser = positive("lambda1"))]
    pub lambda1: f64,
    /// Administrative censoring time (diminishing; defaults to 3).
    #[arg(long, allow_negative_numbers = true, value_parser = positive("horizon"))]
    pub horizon: Option<f64>,
    /// Time of maximal effect, also the end of follow-up (delayed; defaults to 2).
    #[arg(long, allow_negative_numbers = true, value_parser = positive("tau"))]
    pub tau: Option<f64>,
    /// Spacing of the sampling grid (delayed).
    #[arg(long, allow_negative_numbers = true, value_parser = positive("grid-step"))]
    pub grid_step: Option<f64>,
    /// Subjects per arm.
    #[arg(long, default_value = "100")]
    pub n: usize,
    #[arg(long, required_unless_present = "emit_truth")]
    pub seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write `t,s1,s2,hr_true` on a grid instead of a dataset.
    #[arg(long)]
    pub emit_truth: bool,
    /// Grid size for --emit-truth.
    #[arg(long, default_value = "101", value_parser = clap::value_parser!(u32).range(2..))]
    pub truth_points: u32,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// JSON scenario config.
    #[arg(long)]
    pub config: PathBuf,
    /// Base seed; must match the config's `seed` if it has one.
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = default_workers(), value_parser = clap::value_parser!(u32).range(1..))]
    pub workers: u32,
    /// Directory for summary.csv and the profile CSV and SVG.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(long, value_parser = ["1", "2"])]
    pub figure: String,
    /// Replicates per scenario (at least 100).
    #[arg(long, default_value = "500", value_parser = clap::value_parser!(u32).range(100..))]
    pub reps: u32,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = default_workers(), value_parser = clap::value_parser!(u32).range(1..))]
    pub workers: u32,
}

#[derive(Debug, Args)]
pub struct TaylorArgs {
    #[arg(long, value_enum, default_value = "both")]
    pub family: TaylorFamily,
    #[arg(long, allow_negative_numbers = true, default_value = "0.5", value_parser = positive("lambda1"))]
    pub lambda1: f64,
    /// Largest effect used in the remainder test.
    #[arg(long, allow_negative_numbers = true, default_value = "0.1", value_parser = positive("effect"))]
    pub effect: f64,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

fn default_workers() -> u32 {
    std::thread::available_parallelism().map_or(1, |n| n.get() as u32)
}

fn non_negative(name: &'static str) -> impl Fn(&str) -> Result<f64, String> + Clone {
    move |s| match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 => Ok(v),
        Ok(_) => Err(format!("{name} must be ≥ 0")),
        Err(_) => Err(format!("{name} must be a number")),
    }
}

fn positive(name: &'static str) -> impl Fn(&str) -> Result<f64, String> + Clone {
    move |s| match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        Ok(_) => Err(format!("{name} must be > 0")),
        Err(_) => Err(format!("{name} must be a number")),
    }
}

/// Why a command stopped.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failed { op: &'static str, source: NphError },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed { .. } => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Failed { op, source } => write!(f, "{op}: {source}"),
        }
    }
}

trait Context<T> {
    fn op(self, op: &'static str) -> Result<T, CliError>;
}

impl<T, E: Into<NphError>> Context<T> for Result<T, E> {
    fn op(self, op: &'static str) -> Result<T, CliError> {
        self.map_err(|e| CliError::Failed { op, source: e.into() })
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "nph: {e}");
            e.exit_code()
        }
    }
}

pub fn dispatch(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Km(a) => km(a, out),
        Command::Wlrt(a) => wlrt_cmd(a, out),
        Command::Whr(a) => whr_cmd(a, out),
        Command::Dgm(a) => dgm_cmd(a, out),
        Command::Simulate(a) => simulate(a, out),
        Command::Reproduce(a) => reproduce(a, out),
        Command::VerifyTaylor(a) => verify_taylor(a, out),
    }
}

fn read_dataset(path: &Path) -> Result<Dataset, CliError> {
    if path.as_os_str() == "-" {
        Dataset::read_csv(io::stdin().lock()).op("data::read_csv")
    } else {
        let f = File::open(path).op("data::read_csv")?;
        Dataset::read_csv(f).op("data::read_csv")
    }
}

fn emit_json(out: &mut dyn Write, v: &impl Serialize) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, v).op("output")?;
    writeln!(out).op("output")
}

#[derive(Serialize)]
struct KmJson<'a> {
    scope: &'static str,
    times: &'a [f64],
    survival: &'a [f64],
}

fn km(a: KmArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let ds = read_dataset(&a.io.input)?;
    let (scope, name) = match a.arm {
        ScopeArg::Pooled => (KmScope::Pooled, "pooled"),
        ScopeArg::Control => (KmScope::Arm(Arm::Control), "control"),
        ScopeArg::Treatment => (KmScope::Arm(Arm::Treatment), "treatment"),
    };
    let curve: SurvivalCurve = crate::data::km_estimate(&ds, scope);
    match a.io.format {
        Format::Json => emit_json(
            out,
            &KmJson {
                scope: name,
                times: curve.times(),
                survival: curve.values(),
            },
        ),
        Format::Text => {
            writeln!(out, "t,survival").op("output")?;
            for (t, s) in curve.times().iter().zip(curve.values()) {
                writeln!(out, "{t},{s}").op("output")?;
            }
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct WlrtJson {
    rho: f64,
    gamma: f64,
    numerator: f64,
    variance: f64,
    z: f64,
    p_two_sided: f64,
}

fn wlrt_cmd(a: WlrtArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = WeightSpec::new(a.weight.rho, a.weight.gamma).map_err(|e| usage(e.to_string()))?;
    let ds = read_dataset(&a.io.input)?;
    let r = wlrt::test_dataset(&ds, spec).op("wlrt::weighted_logrank")?;
    let j = WlrtJson {
        rho: spec.rho,
        gamma: spec.gamma,
        numerator: r.numerator,
        variance: r.variance,
        z: r.z,
        p_two_sided: r.p_two_sided,
    };
    match a.io.format {
        Format::Json => emit_json(out, &j),
        Format::Text => {
            let name = if spec.is_log_rank() {
                "log-rank".to_string()
            } else {
                format!("G(rho={}, gamma={})", spec.rho, spec.gamma)
            };
            writeln!(out, "{name} test").op("output")?;
            writeln!(out, "  numerator  {:.6}", j.numerator).op("output")?;
            writeln!(out, "  variance   {:.6}", j.variance).op("output")?;
            writeln!(out, "  z          {:.6}", j.z).op("output")?;
            writeln!(out, "  p (2-side) {:.6e}", j.p_two_sided).op("output")
        }
    }
}

#[derive(Serialize)]
struct ProfileRow {
    t: f64,
    a: f64,
    hr: f64,
}

#[derive(Serialize)]
struct WhrJson {
    rho: f64,
    gamma: f64,
    beta_hat: f64,
    se: f64,
    hr_max: f64,
    iterations: usize,
    converged: bool,
    score_z: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    profile: Option<Vec<ProfileRow>>,
}

fn whr_cmd(a: WhrArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = WeightSpec::new(a.weight.rho, a.weight.gamma).map_err(|e| usage(e.to_string()))?;
    let ds = read_dataset(&a.io.input)?;
    let fit: WhrFit = whr::fit_whr(&ds, spec).op("whr::fit_whr")?;
    let score_z = whr::score_test(&ds, spec).op("whr::score_test")?;
    let profile = a.profile_grid.map(|k| {
        let end = ds.observations().iter().map(|o| o.time).fold(0.0, f64::max);
        let last = k - 1;
        (0..k)
            .map(|i| {
                let t = if i == last {
                    end
                } else {
                    end * f64::from(i) / f64::from(last)
                };
                let adj = fit.adjustment.at(t);
                ProfileRow {
                    t,
                    a: adj,
                    hr: fit.hr_at(t),
                }
            })
            .collect::<Vec<_>>()
    });
    let j = WhrJson {
        rho: spec.rho,
        gamma: spec.gamma,
        beta_hat: fit.beta_hat,
        se: fit.se,
        hr_max: fit.max_hazard_ratio(),
        iterations: fit.iterations,
        converged: fit.converged,
        score_z,
        profile,
    };
    match a.io.format {
        Format::Json => emit_json(out, &j),
        Format::Text => {
            writeln!(out, "weighted hazard ratio fit (rho={}, gamma={})", j.rho, j.gamma).op("output")?;
            writeln!(out, "  beta_hat   {:.6}  (se {:.6})", j.beta_hat, j.se).op("output")?;
            writeln!(out, "  max HR     {:.6}", j.hr_max).op("output")?;
            writeln!(out, "  score z    {:.6}", j.score_z).op("output")?;
            writeln!(out, "  iterations {}", j.iterations).op("output")?;
            if let Some(p) = &j.profile {
                writeln!(out, "t,a,hr").op("output")?;
                for r in p {
                    writeln!(out, "{},{},{}", r.t, r.a, r.hr).op("output")?;
                }
            }
            Ok(())
        }
    }
}

/// Writes to `path` atomically, or to `out` when there is no path.
fn to_file_or(
    out: &mut dyn Write,
    path: Option<&Path>,
    op: &'static str,
    body: impl FnOnce(&mut dyn Write) -> crate::Result<()>,
) -> Result<(), CliError> {
    match path {
        Some(p) => write_atomic(p, body).op(op),
        None => body(out).op(op),
    }
}

fn dgm_cmd(a: DgmArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let need = |v: Option<f64>, flag: &str| {
        v.ok_or_else(|| {
            usage(format!(
                "--{flag} is required for --scenario {}",
                scenario_name(a.scenario)
            ))
        })
    };
    let reject = |v: Option<f64>, flag: &str| match v {
        Some(_) => Err(usage(format!(
            "--{flag} does not apply to --scenario {}",
            scenario_name(a.scenario)
        ))),
        None => Ok(()),
    };
    match a.scenario {
        FamilyArg::Diminishing => {
            reject(a.gamma, "gamma")?;
            reject(a.s2_tau, "s2-tau")?;
            reject(a.tau, "tau")?;
            reject(a.grid_step, "grid-step")?;
            let p = DiminishingParams::new(need(a.e_delta, "e-delta")?, need(a.rho, "rho")?, a.lambda1)
                .map_err(|e| usage(e.to_string()))?;
            let horizon = a.horizon.unwrap_or(3.0);
            if a.emit_truth {
                let k = a.truth_points - 1;
                return to_file_or(out, a.out.as_deref(), "dgm::true_hr_diminishing", |w| {
                    writeln!(w, "t,s1,s2,hr_true")?;
                    for i in 0..=k {
                        let t = horizon * f64::from(i) / f64::from(k);
                        writeln!(
                            w,
                            "{t},{},{},{}",
                            dgm::s1(t, p.lambda1),
                            dgm::s2_diminishing(t, &p),
                            dgm::true_hr_diminishing(t, &p)
                        )?;
                    }
                    Ok(())
                });
            }
            let seed = a.seed.ok_or_else(|| usage("--seed is required"))?;
            let ds = dgm::generate_diminishing(&p, a.n, horizon, &mut replicate_rng(seed, 0))
                .op("dgm::generate_diminishing")?;
            to_file_or(out, a.out.as_deref(), "data::write_csv", |w| ds.write_csv(w))
        }
        FamilyArg::Delayed => {
            reject(a.e_delta, "e-delta")?;
            reject(a.rho, "rho")?;
            reject(a.horizon, "horizon")?;
            let tau = a.tau.unwrap_or(2.0);
            let p = DelayedParams::new(
                need(a.gamma, "gamma")?,
                a.lambda1,
                tau,
                need(a.s2_tau, "s2-tau")?,
                a.grid_step.unwrap_or(DEFAULT_GRID_STEP),
            )
            .map_err(|e| usage(e.to_string()))?;
            if a.emit_truth {
                let k = a.truth_points - 1;
                let rows = (0..=k)
                    .map(|i| {
                        let t = if i == k { tau } else { tau * f64::from(i) / f64::from(k) };
                        Ok((
                            t,
                            dgm::s1(t, p.lambda1),
                            dgm::s2_delayed(t, &p)?,
                            dgm::true_hr_delayed(t, &p)?,
                        ))
                    })
                    .collect::<crate::Result<Vec<_>>>()
                    .op("dgm::true_hr_delayed")?;
                return to_file_or(out, a.out.as_deref(), "dgm::true_hr_delayed", |w| {
                    writeln!(w, "t,s1,s2,hr_true")?;
                    for (t, s1, s2, hr) in rows {
                        writeln!(w, "{t},{s1},{s2},{hr}")?;
                    }
                    Ok(())
                });
            }
            let seed = a.seed.ok_or_else(|| usage("--seed is required"))?;
            let sampler = DelayedSampler::new(&p).op("dgm::sample_delayed")?;
            let ds = dgm::generate_delayed(&sampler, p.lambda1, a.n, tau, &mut replicate_rng(seed, 0))
                .op("dgm::generate_delayed")?;
            to_file_or(out, a.out.as_deref(), "data::write_csv", |w| ds.write_csv(w))
        }
    }
}

fn scenario_name(f: FamilyArg) -> &'static str {
    match f {
        FamilyArg::Diminishing => "diminishing",
        FamilyArg::Delayed => "delayed",
    }
}

#[derive(Serialize)]
struct SimJson<'a> {
    scenario: &'a str,
    config: &'a ScenarioConfig,
    n_reps: usize,
    mean_beta: f64,
    exp_mean_beta: f64,
    mc_se: f64,
    convergence_failures: usize,
}

fn simulate(a: SimulateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&a.config).op("sim::read_config")?;
    let file = ConfigFile::parse(&text).map_err(|e| usage(format!("{}: {e}", a.config.display())))?;
    let config = file.into_config(Some(a.seed)).map_err(|e| usage(e.to_string()))?;
    let name = a
        .config
        .file_stem()
        .map_or_else(|| "scenario".to_string(), |s| s.to_string_lossy().into_owned());

    let summary = sim::run_scenario(&config, a.workers as usize).op("sim::run_scenario")?;
    let profile = sim::profile_comparison(&summary, &config, 201).op("sim::profile_comparison")?;
    if let Some(dir) = &a.out {
        let report = sim::FigureReport {
            figure: match config.family {
                ScenarioFamily::Diminishing(_) => FigureId::Fig1,
                ScenarioFamily::Delayed(_) => FigureId::Fig2,
            },
            outcomes: vec![ScenarioOutcome {
                name: name.clone(),
                config,
                result: Ok((summary.clone(), profile)),
            }],
        };
        report.write(dir).op("sim::write_outputs")?;
    }
    let j = SimJson {
        scenario: &name,
        config: &config,
        n_reps: config.n_reps,
        mean_beta: summary.mean_beta,
        exp_mean_beta: summary.exp_mean_beta,
        mc_se: summary.mc_se,
        convergence_failures: summary.convergence_failures,
    };
    match a.format {
        Format::Json => emit_json(out, &j),
        Format::Text => {
            writeln!(
                out,
                "{name}: {} replicates, {} failed",
                j.n_reps, j.convergence_failures
            )
            .op("output")?;
            writeln!(out, "  mean beta      {:.6}  (mc se {:.6})", j.mean_beta, j.mc_se).op("output")?;
            writeln!(out, "  exp(mean beta) {:.6}", j.exp_mean_beta).op("output")
        }
    }
}

fn reproduce(a: ReproduceArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let figure: FigureId = a.figure.parse().map_err(usage)?;
    let report =
        sim::reproduce_figure(figure, a.reps as usize, a.seed, a.workers as usize).op("sim::reproduce_figure")?;
    report.write(&a.out).op("sim::write_outputs")?;
    for o in &report.outcomes {
        match &o.result {
            Ok((s, _)) => writeln!(
                out,
                "{:<20} exp(mean beta) {:>8.4}  mc se {:.4}  failures {}",
                o.name, s.exp_mean_beta, s.mc_se, s.convergence_failures
            ),
            Err(e) => writeln!(out, "{:<20} failed: {e}", o.name),
        }
        .op("output")?;
    }
    writeln!(out, "wrote {}", a.out.display()).op("output")
}

#[derive(Serialize)]
struct TaylorJson {
    family: &'static str,
    report: sim::TaylorReport,
    /// Decay order implied by the remainder ratio.
    order: f64,
    pass: bool,
}

fn verify_taylor(a: TaylorArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut results = Vec::new();
    let dim = matches!(a.family, TaylorFamily::Diminishing | TaylorFamily::Both);
    let del = matches!(a.family, TaylorFamily::Delayed | TaylorFamily::Both);
    if dim {
        let grid: Vec<f64> = (1..=20).map(|k| 3.0 * f64::from(k) / 20.0).collect();
        for rho in [0.5, 1.0, 2.0] {
            let r =
                sim::taylor_check_diminishing(&grid, rho, a.lambda1, a.effect).op("sim::taylor_check_diminishing")?;
            let order = r.ratio.ln() / (0.1f64).ln();
            let pass = r.f_at_zero_is_one && r.max_derivative_error < 1e-6 && order >= 1.9;
            results.push(TaylorJson {
                family: "diminishing",
                report: r,
                order,
                pass,
            });
        }
    }
    if del {
        let grid: Vec<f64> = (1..=20).map(|k| 2.0 * f64::from(k) / 20.0).collect();
        for gamma in [0.5, 1.0, 2.0] {
            let r =
                sim::taylor_check_delayed(&grid, gamma, a.lambda1, 2.0, a.effect).op("sim::taylor_check_delayed")?;
            let order = r.ratio.ln() / (0.5f64).ln();
            let pass = r.f_at_zero_is_one && r.max_derivative_error < 1e-5 && order >= 1.9;
            results.push(TaylorJson {
                family: "delayed",
                report: r,
                order,
                pass,
            });
        }
    }
    match a.format {
        Format::Json => emit_json(out, &results)?,
        Format::Text => {
            for r in &results {
                writeln!(
                    out,
                    "{} {:<11} param {:<3}  max derivative error {:.2e}  remainder ratio {:.4}  order {:.2}",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.family,
                    r.report.parameter,
                    r.report.max_derivative_error,
                    r.report.ratio,
                    r.order
                )
                .op("output")?;
            }
        }
    }
    let failed = results.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        return Err(CliError::Failed {
            op: "sim::taylor_check",
            source: NphError::Numerical(format!("{failed} check(s) failed")),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("nph").chain(args.iter().copied()), &mut o, &mut e);
        (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
    }

    #[test]
    fn negative_rho_is_a_usage_error() {
        let (code, _, err) = run_str(&["wlrt", "--input", "x.csv", "--rho", "-1", "--gamma", "0"]);
        assert_eq!(code, 2);
        assert!(err.contains("rho must be ≥ 0"), "{err}");
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_str(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("verify-taylor"));
    }

    #[test]
    fn seed_is_required_for_random_commands() {
        assert_eq!(
            run_str(&["dgm", "--scenario", "diminishing", "--e-delta", "2", "--rho", "1"]).0,
            2
        );
        assert_eq!(run_str(&["reproduce", "--figure", "1", "--out", "x"]).0, 2);
        assert_eq!(run_str(&["simulate", "--config", "c.json"]).0, 2);
    }

    #[test]
    fn missing_input_is_a_domain_error() {
        let (code, _, err) = run_str(&["km", "--input", "/nonexistent/file.csv"]);
        assert_eq!(code, 1);
        assert!(err.starts_with("nph: data::read_csv:"), "{err}");
    }
}
