//! Reproduces one of the two hazard ratio figures and writes the CSV and SVG
//! bundle.
//!
//! ```text
//! cargo run --release --example reproduce_figure -- 1 500 42 out/fig1
//! ```

use std::path::PathBuf;

use nph::sim::{reproduce_figure, FigureId};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let figure: FigureId = args.next().unwrap_or_else(|| "1".into()).parse()?;
    let reps: usize = args.next().map_or(Ok(200), |s| s.parse())?;
    let seed: u64 = args.next().map_or(Ok(42), |s| s.parse())?;
    let out = args.next().map(PathBuf::from);

    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let report = reproduce_figure(figure, reps, seed, workers)?;

    println!(
        "{:<22} {:>10} {:>10} {:>9} {:>8}",
        "scenario", "mean_beta", "exp_mean", "mc_se", "failures"
    );
    for o in &report.outcomes {
        match &o.result {
            Ok((s, profile)) => {
                let hr_end = profile.last().map_or(f64::NAN, |p| p.hr_true);
                println!(
                    "{:<22} {:>10.4} {:>10.4} {:>9.4} {:>8}   true HR at end {:.4}",
                    o.name, s.mean_beta, s.exp_mean_beta, s.mc_se, s.convergence_failures, hr_end
                );
            }
            Err(e) => println!("{:<22} failed: {e}", o.name),
        }
    }
    if let Some(dir) = out {
        report.write(&dir)?;
        println!("wrote {}", dir.display());
    }
    Ok(())
}
