//! Checks that the true and fitted hazard ratio curves agree to first order
//! in the effect size, for both effect shapes.

use nph::sim::{taylor_check_delayed, taylor_check_diminishing};

fn main() -> nph::Result<()> {
    let grid: Vec<f64> = (1..=20).map(|k| 0.1 * f64::from(k)).collect();

    for rho in [0.5, 1.0, 2.0] {
        let r = taylor_check_diminishing(&grid, rho, 0.5, 0.1)?;
        println!(
            "diminishing rho={rho}: derivative error {:.1e}, |f-1| at delta 0.1 / 0.01: {:.2e} / {:.2e}",
            r.max_derivative_error, r.remainders.0, r.remainders.1
        );
    }
    for gamma in [0.5, 1.0, 2.0] {
        let r = taylor_check_delayed(&grid, gamma, 0.5, 2.0, 0.1)?;
        println!(
            "delayed gamma={gamma}: derivative error {:.1e}, |f-1| at psi 0.1 / 0.05: {:.2e} / {:.2e}",
            r.max_derivative_error, r.remainders.0, r.remainders.1
        );
    }

    let r = taylor_check_delayed(&grid, 1.0, 0.5, 2.0, 0.1)?;
    println!("\n{:>5} {:>10} {:>10} {:>10}", "t", "(1-S1)^g", "dHR", "dHR_LL");
    for row in r.rows.iter().step_by(4) {
        println!(
            "{:>5.1} {:>10.6} {:>10.6} {:>10.6}",
            row.t, row.expected, row.d_true, row.d_ll
        );
    }
    Ok(())
}
