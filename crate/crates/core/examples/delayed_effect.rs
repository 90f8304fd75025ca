//! Delayed effect built on the L and LL special functions: no effect at the
//! start, maximal effect at tau.

use nph::dgm::delayed::DEFAULT_GRID_STEP;
use nph::dgm::gares::{big_l, phi_from_target, script_l, script_l_inv};
use nph::dgm::{generate_delayed, s1, s2_delayed, true_hr_delayed, DelayedParams, DelayedSampler};
use nph::rng::replicate_rng;

fn main() -> nph::Result<()> {
    println!("L(0.5) for gamma = 1: {:.5}", big_l(0.5, 1.0)?);
    let y = script_l(0.3, 2.0)?;
    println!(
        "LL(0.3) for gamma = 2: {y:.6}, inverted back to {:.10}",
        script_l_inv(y, 2.0)?
    );

    let target = phi_from_target(s1(2.0, 0.5), 0.25, 1.0)?;
    println!(
        "S2(2) = 0.25 needs phi = {:.5}, discrepancy rate r = {:.4}",
        target.phi, target.r
    );

    for gamma in [0.5, 1.0, 2.0] {
        let p = DelayedParams::new(gamma, 0.5, 2.0, 0.1, DEFAULT_GRID_STEP)?;
        print!("gamma {gamma}: HR at t = 0.5, 1, 1.5, 2:");
        for t in [0.5, 1.0, 1.5, 2.0] {
            print!(" {:.3}", true_hr_delayed(t, &p)?);
        }
        println!("   S2(1) = {:.4}", s2_delayed(1.0, &p)?);
    }

    let p = DelayedParams::new(1.0, 0.5, 2.0, 0.25, DEFAULT_GRID_STEP)?;
    let sampler = DelayedSampler::new(&p)?;
    println!("\nsampling grid has {} points", sampler.times().len());
    let ds = generate_delayed(&sampler, p.lambda1, 100, p.tau, &mut replicate_rng(5, 0))?;
    let censored = ds.observations().iter().filter(|o| !o.event).count();
    println!("{} subjects, {censored} censored at tau = {}", ds.len(), p.tau);
    Ok(())
}
