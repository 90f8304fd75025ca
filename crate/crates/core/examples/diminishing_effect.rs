//! Diminishing effect: hazard ratio starting at e_delta and decaying to 1.

use nph::data::Arm;
use nph::dgm::{generate_diminishing, s1, s2_diminishing, sample_diminishing, true_hr_diminishing, DiminishingParams};
use nph::rng::replicate_rng;

fn main() -> nph::Result<()> {
    let p = DiminishingParams::new(4.0, 1.0, 0.5)?;

    println!("{:>5} {:>8} {:>8} {:>8}", "t", "S1", "S2", "HR");
    for k in 0..=6 {
        let t = 0.5 * f64::from(k);
        println!(
            "{t:>5.1} {:>8.4} {:>8.4} {:>8.4}",
            s1(t, p.lambda1),
            s2_diminishing(t, &p),
            true_hr_diminishing(t, &p)
        );
    }

    let t = sample_diminishing(0.5, &p)?;
    println!(
        "\ntreatment median survival {t:.4} (S2 there = {:.6})",
        s2_diminishing(t, &p)
    );

    let ds = generate_diminishing(&p, 100, 3.0, &mut replicate_rng(1, 0))?;
    for arm in [Arm::Control, Arm::Treatment] {
        let obs = ds.observations().iter().filter(|o| o.arm == arm);
        let (n, events) = obs.fold((0, 0), |(n, e), o| (n + 1, e + usize::from(o.event)));
        println!("{arm}: {n} subjects, {events} events before t = 3");
    }
    Ok(())
}
