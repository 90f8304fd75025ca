//! Special functions of the delayed-effect family.
//!
//! ```text
//! L(x)  = int_x^1   (1 - s)^gamma / s ds          (decreasing, L(1) = 0)
//! LL(x) = int_0.5^x 1 / (s L(s)) ds               (increasing, LL(0.5) = 0)
//! ```
//!
//! `LL` diverges at both ends of (0, 1), so most of the work here happens in
//! cumulative-hazard coordinates `u = -ln x`, where
//! `L(e^-u) = int_0^u (1 - e^-v)^gamma dv` and
//! `LL(e^-u1) - LL(e^-u2) = int_u1^u2 dv / L(e^-v)`.
//! The latter is integrated in `ln v`, which turns the `v^-(gamma+1)`
//! blow-up at small `v` into a smooth exponential tail.

use serde::Serialize;

use crate::error::{NphError, Result};
use crate::quad::{integrate, solve_increasing, Tolerance};

/// Smallest and largest arguments accepted by [`script_l_inv`].
pub const LL_INV_LO: f64 = 1e-12;
pub const LL_INV_HI: f64 = 1.0 - 1e-12;
/// Beyond this, [`script_l`] reports `PrecisionLoss`.
pub const LL_PRECISION_LIMIT: f64 = 1.0 - 1e-6;

const INNER_TOL: Tolerance = Tolerance {
    abs: 1e-14,
    rel: 1e-14,
    max_intervals: 400,
};
const OUTER_TOL: Tolerance = Tolerance {
    abs: 1e-13,
    rel: 1e-13,
    max_intervals: 2000,
};

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma >= 0.0 {
        Ok(())
    } else {
        Err(NphError::domain("gamma", gamma, "gamma >= 0"))
    }
}

/// `int_0^a v^gamma / (1 - v) dv`, i.e. `L(1 - a)`, for `0 <= a <= 0.5`.
fn near_one(a: f64, gamma: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let mut power = a.powf(gamma + 1.0);
    let mut sum = 0.0;
    for k in 0..400 {
        let term = power / (gamma + 1.0 + f64::from(k));
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
        power *= a;
    }
    sum
}

/// `L(x)` given both `x` and `a = 1 - x`, each computed accurately by the
/// caller.
pub(crate) fn big_l_split(x: f64, a: f64, gamma: f64) -> Result<f64> {
    if gamma == 1.0 {
        // x - 1 - ln x; below a = 0.01 the subtraction cancels, so use its
        // expansion a^2/2 + a^3/3 + ...
        return Ok(if a < 0.01 {
            near_one(a, 1.0)
        } else if x >= 0.5 {
            -a - (-a).ln_1p()
        } else {
            x - 1.0 - x.ln()
        });
    }
    if x >= 0.5 {
        return Ok(near_one(a, gamma));
    }
    let head = near_one(0.5, gamma);
    let tail = integrate(
        |v: f64| (-(-v).exp_m1()).powf(gamma),
        std::f64::consts::LN_2,
        -x.ln(),
        INNER_TOL,
    )?;
    Ok(head + tail)
}

/// `L(e^-u)`.
pub(crate) fn big_l_at_hazard(u: f64, gamma: f64) -> Result<f64> {
    big_l_split((-u).exp(), -(-u).exp_m1(), gamma)
}

pub fn big_l(x: f64, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if !(x > 0.0 && x <= 1.0) {
        return Err(NphError::domain("x", x, "0 < x <= 1"));
    }
    big_l_split(x, 1.0 - x, gamma)
}

/// `int_{u_lo}^{u_hi} dv / L(e^-v)` for positive limits; equals
/// `LL(e^-u_lo) - LL(e^-u_hi)`.
pub(crate) fn script_l_between(u_lo: f64, u_hi: f64, gamma: f64) -> Result<f64> {
    if !(u_lo > 0.0 && u_hi > 0.0) {
        return Err(NphError::Numerical(format!(
            "cumulative hazards must be positive, got [{u_lo}, {u_hi}]"
        )));
    }
    if u_lo == u_hi {
        return Ok(0.0);
    }
    integrate(
        |w: f64| {
            let v = w.exp();
            big_l_at_hazard(v, gamma).map_or(f64::NAN, |l| v / l)
        },
        u_lo.ln(),
        u_hi.ln(),
        OUTER_TOL,
    )
}

fn script_l_unchecked(x: f64, gamma: f64) -> Result<f64> {
    if x == 0.5 {
        return Ok(0.0);
    }
    script_l_between(-x.ln(), std::f64::consts::LN_2, gamma)
}

pub fn script_l(x: f64, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if !(x > 0.0 && x < 1.0) {
        return Err(NphError::domain("x", x, "0 < x < 1"));
    }
    if x > LL_PRECISION_LIMIT {
        return Err(NphError::PrecisionLoss { x });
    }
    script_l_unchecked(x, gamma)
}

/// Inverse of [`script_l`] on `[LL_INV_LO, LL_INV_HI]`.
pub fn script_l_inv(y: f64, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let lo_val = script_l_unchecked(LL_INV_LO, gamma)?;
    let hi_val = script_l_unchecked(LL_INV_HI, gamma)?;
    if !(y >= lo_val && y <= hi_val) {
        return Err(NphError::OutOfRange {
            value: y,
            lo: lo_val,
            hi: hi_val,
        });
    }
    solve_increasing(
        |x| {
            let fx = script_l_unchecked(x, gamma)? - y;
            let slope = 1.0 / (x * big_l(x, gamma)?);
            Ok((fx, Some(slope)))
        },
        LL_INV_LO,
        LL_INV_HI,
        1e-10,
        1e-16,
        200,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiTarget {
    /// `LL(S2(tau)) - LL(S1(tau))`
    pub phi: f64,
    /// Discrepancy rate `(S2(tau) - S1(tau)) / (1 - S1(tau))`.
    pub r: f64,
}

pub fn phi_from_target(s1_tau: f64, s2_tau: f64, gamma: f64) -> Result<PhiTarget> {
    check_gamma(gamma)?;
    for (what, v) in [("s1_tau", s1_tau), ("s2_tau", s2_tau)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(NphError::domain(what, v, "0 < s < 1"));
        }
    }
    let phi = script_l_between(-s2_tau.ln(), -s1_tau.ln(), gamma)?;
    Ok(PhiTarget {
        phi,
        r: (s2_tau - s1_tau) / (1.0 - s1_tau),
    })
}

/// Cumulative hazard `u2` of the arm shifted by `phi`: the solution of
/// `LL(e^-u2) = LL(e^-u1) + phi`, found from `int_u1^u2 dv / L(e^-v) = -phi`
/// so `LL` itself is never evaluated near 1.
pub(crate) fn shifted_hazard(u1: f64, phi: f64, gamma: f64) -> Result<f64> {
    if u1 == 0.0 || phi == 0.0 {
        return Ok(u1);
    }
    let target = -phi;
    let g = |w: f64| -> Result<f64> { Ok(script_l_between(u1, w.exp(), gamma)? - target) };
    let w1 = u1.ln();
    let (mut lo, mut hi) = (w1, w1);
    let mut step = 0.25;
    let mut expansions = 0;
    if target > 0.0 {
        loop {
            hi = lo + step;
            if g(hi)? >= 0.0 {
                break;
            }
            lo = hi;
            step *= 2.0;
            expansions += 1;
            if expansions > 60 || hi > 10.0 {
                return Err(NphError::Numerical(format!(
                    "no bracket for shifted hazard: u1 = {u1}, phi = {phi}, searched up to u = {}",
                    hi.exp()
                )));
            }
        }
    } else {
        loop {
            lo = hi - step;
            if g(lo)? <= 0.0 {
                break;
            }
            hi = lo;
            step *= 2.0;
            expansions += 1;
            if expansions > 60 || lo < -60.0 {
                return Err(NphError::Numerical(format!(
                    "no bracket for shifted hazard: u1 = {u1}, phi = {phi}, searched down to u = {}",
                    lo.exp()
                )));
            }
        }
    }
    let (blo, bhi) = (lo, hi);
    let w = solve_increasing(
        |w| {
            let u = w.exp();
            let gw = g(w)?;
            let slope = u / big_l_at_hazard(u, gamma)?;
            Ok((gw, Some(slope)))
        },
        lo,
        hi,
        1e-14 * target.abs().max(1.0),
        1e-14,
        200,
    )
    .map_err(|e| {
        NphError::Numerical(format!(
            "shifted hazard for u1 = {u1}, phi = {phi} on bracket [{}, {}]: {e}",
            blo.exp(),
            bhi.exp()
        ))
    })?;
    Ok(w.exp())
}
