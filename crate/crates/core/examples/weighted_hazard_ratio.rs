//! Fits the weighted hazard ratio model to data with a fading effect and
//! prints the implied hazard ratio over time.

use nph::dgm::{generate_diminishing, true_hr_diminishing, DiminishingParams};
use nph::rng::replicate_rng;
use nph::whr::{fit_whr, score_test};
use nph::wlrt::{test_dataset, WeightSpec};

fn main() -> nph::Result<()> {
    let truth = DiminishingParams::new(4.0, 1.0, 0.5)?;
    let ds = generate_diminishing(&truth, 300, 3.0, &mut replicate_rng(2024, 0))?;
    let spec = WeightSpec::new(1.0, 0.0)?;

    let fit = fit_whr(&ds, spec)?;
    println!(
        "beta_hat = {:.4} (se {:.4}), max HR = {:.3}",
        fit.beta_hat,
        fit.se,
        fit.max_hazard_ratio()
    );
    println!("Newton iterations: {}", fit.iterations);

    // the score test at beta = 0 is the weighted log-rank test
    println!(
        "score z = {:.6}, G(1,0) z = {:.6}",
        score_test(&ds, spec)?,
        test_dataset(&ds, spec)?.z
    );

    println!("\n{:>5} {:>8} {:>8} {:>8}", "t", "A(t)", "HR fit", "HR true");
    for k in 0..=6 {
        let t = 0.5 * f64::from(k);
        println!(
            "{t:>5.1} {:>8.4} {:>8.4} {:>8.4}",
            fit.adjustment.at(t),
            fit.hr_at(t),
            true_hr_diminishing(t, &truth)
        );
    }
    Ok(())
}
