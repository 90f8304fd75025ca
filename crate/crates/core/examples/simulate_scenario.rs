//! Monte Carlo run of one scenario from a JSON description, compared with
//! the true hazard ratio profile.

use nph::sim::{profile_comparison, run_scenario, ConfigFile};

const CONFIG: &str = r#"{
    "family": "diminishing",
    "rho": 1,
    "e_delta": 4,
    "lambda1": 0.5,
    "horizon": 3,
    "n_per_arm": 100,
    "n_reps": 1000,
    "seed": 99
}"#;

fn main() -> nph::Result<()> {
    let config = ConfigFile::parse(CONFIG)?.into_config(None)?;
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let summary = run_scenario(&config, workers)?;
    println!(
        "{} replicates: mean beta {:.4} (mc se {:.4}), exp(mean beta) {:.3}, failures {}",
        config.n_reps, summary.mean_beta, summary.mc_se, summary.exp_mean_beta, summary.convergence_failures
    );

    println!("\n{:>5} {:>8} {:>8}", "t", "true", "fitted");
    for p in profile_comparison(&summary, &config, 7)? {
        println!("{:>5.1} {:>8.4} {:>8.4}", p.t, p.hr_true, p.hr_ll);
    }
    Ok(())
}
