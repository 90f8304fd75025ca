//! Adaptive Gauss-Kronrod quadrature and bracketed root finding.

#![allow(clippy::excessive_precision)]

use crate::error::{NphError, Result};

// 15-point Kronrod abscissae and weights, with the embedded 7-point Gauss rule
// on the odd-indexed nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-10,
            rel: 1e-12,
            max_intervals: 4000,
        }
    }
}

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Globally adaptive G7-K15 integration of `f` over `[a, b]` (signed, so
/// `b < a` is allowed). Stops when the summed error estimate is below
/// `max(tol.abs, tol.rel * |I|)`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: Tolerance) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(NphError::Numerical(format!("non-finite integration limits [{a}, {b}]")));
    }
    let (sign, lo, hi) = if a < b { (1.0, a, b) } else { (-1.0, b, a) };

    // (lo, hi, value, error)
    let mut parts: Vec<(f64, f64, f64, f64)> = Vec::with_capacity(64);
    let (v, e) = gk15(&f, lo, hi);
    parts.push((lo, hi, v, e));
    let mut total = v;
    let mut err = e;
    loop {
        if !total.is_finite() {
            return Err(NphError::Numerical(format!("integrand is not finite on [{lo}, {hi}]")));
        }
        if err <= tol.abs.max(tol.rel * total.abs()) {
            return Ok(sign * total);
        }
        if parts.len() >= tol.max_intervals {
            return Err(NphError::Numerical(format!(
                "quadrature on [{lo}, {hi}] did not reach tolerance (error estimate {err:e})"
            )));
        }
        let (k, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (x0, x1, v, e) = parts.swap_remove(k);
        let mid = 0.5 * (x0 + x1);
        if mid <= x0 || mid >= x1 {
            return Err(NphError::Numerical(format!(
                "interval [{x0}, {x1}] cannot be split further"
            )));
        }
        let (v0, e0) = gk15(&f, x0, mid);
        let (v1, e1) = gk15(&f, mid, x1);
        parts.push((x0, mid, v0, e0));
        parts.push((mid, x1, v1, e1));
        // periodic full re-sum bounds rounding drift
        total += v0 + v1 - v;
        err += e0 + e1 - e;
        if parts.len().is_multiple_of(64) {
            total = parts.iter().map(|p| p.2).sum();
            err = parts.iter().map(|p| p.3).sum();
        }
    }
}

/// Root of an increasing function on `[lo, hi]` with `f(lo) <= 0 <= f(hi)`.
///
/// Newton steps are taken when `df` is available and the step stays inside
/// the current bracket; otherwise the bracket is bisected. Stops when
/// `|f(x)| < ftol` or the bracket is narrower than `xtol`.
pub fn solve_increasing(
    mut f: impl FnMut(f64) -> Result<(f64, Option<f64>)>,
    mut lo: f64,
    mut hi: f64,
    ftol: f64,
    xtol: f64,
    max_iter: usize,
) -> Result<f64> {
    let mut x = 0.5 * (lo + hi);
    for _ in 0..max_iter {
        let (fx, dfx) = f(x)?;
        if fx.abs() < ftol {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let mid = 0.5 * (lo + hi);
        if hi - lo < xtol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let newton = dfx.filter(|d| *d > 0.0 && d.is_finite()).map(|d| x - fx / d);
        x = match newton {
            Some(n) if n > lo && n < hi => n,
            _ => mid,
        };
    }
    Err(NphError::Numerical(format!(
        "root finding did not converge in {max_iter} iterations on [{lo}, {hi}]"
    )))
}
