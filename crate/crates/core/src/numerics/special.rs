//! Scaled error-function combinations used by the Gaussian-regularized loop
//! integral. `erfcx` and Dawson's function come from the Faddeeva-package port
//! in `errorfunctions`; the combinations below switch to their asymptotic
//! series where the direct form would cancel.

use errorfunctions::RealErrorFunctions;
use std::f64::consts::PI;

/// Switch-over argument for the asymptotic series.
const ASYMPTOTIC_FROM: f64 = 12.0;

pub fn erfcx(x: f64) -> f64 {
    x.erfcx()
}

pub fn dawson(x: f64) -> f64 {
    x.dawson()
}

/// Σ_{n≥1} sign^n (2n-1)!! / (2x²)^n, summed until the terms stop mattering.
fn asymptotic_tail(x: f64, alternating: bool) -> f64 {
    let inv = 1.0 / (2.0 * x * x);
    let mut term = 1.0;
    let mut sum = 0.0;
    for n in 1..40 {
        term *= (2 * n - 1) as f64 * inv;
        let signed = if alternating && n % 2 == 1 { -term } else { term };
        sum += signed;
        if term < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// `√π·x·erfcx(x) − 1` for `x ≥ 0`; tends to `−1/(2x²)` for large `x`.
pub fn sqrt_pi_x_erfcx_minus_one(x: f64) -> f64 {
    if x > ASYMPTOTIC_FROM {
        asymptotic_tail(x, true)
    } else {
        PI.sqrt() * x * erfcx(x) - 1.0
    }
}

/// `2·x·F(x) − 1` with `F` Dawson's function; tends to `+1/(2x²)` for large `x`.
pub fn two_x_dawson_minus_one(x: f64) -> f64 {
    if x > ASYMPTOTIC_FROM {
        asymptotic_tail(x, false)
    } else {
        2.0 * x * dawson(x) - 1.0
    }
}
