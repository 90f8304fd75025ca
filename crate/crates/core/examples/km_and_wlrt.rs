//! Kaplan-Meier curves and Fleming-Harrington tests on a small trial.

use nph::data::{km_estimate, Arm, Dataset, KmScope, Observation};
use nph::wlrt::{test_dataset, WeightSpec};

fn main() -> nph::Result<()> {
    // (time in months, event, arm)
    let raw = [
        (3.0, true, Arm::Control),
        (5.0, true, Arm::Control),
        (6.0, false, Arm::Control),
        (8.0, true, Arm::Control),
        (9.0, true, Arm::Control),
        (12.0, true, Arm::Control),
        (4.0, true, Arm::Treatment),
        (7.0, false, Arm::Treatment),
        (10.0, true, Arm::Treatment),
        (14.0, true, Arm::Treatment),
        (16.0, false, Arm::Treatment),
        (18.0, false, Arm::Treatment),
    ];
    let ds = Dataset::new(raw.iter().map(|&(t, e, a)| Observation::new(t, e, a)).collect())?;

    for scope in [KmScope::Arm(Arm::Control), KmScope::Arm(Arm::Treatment)] {
        let km = km_estimate(&ds, scope);
        println!("{scope:?}");
        for (t, s) in km.times().iter().zip(km.values()) {
            println!("  S({t:>4}) = {s:.4}");
        }
    }

    println!("\n{:>5} {:>5} {:>9} {:>8}", "rho", "gamma", "z", "p");
    for (rho, gamma) in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
        let r = test_dataset(&ds, WeightSpec::new(rho, gamma)?)?;
        println!("{rho:>5} {gamma:>5} {:>9.4} {:>8.4}", r.z, r.p_two_sided);
    }
    Ok(())
}
