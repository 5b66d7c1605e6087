//! The Gaussian-regularized loop integral
//! `I(E) = ∫ d³k/(2π)³ χ_ε(k)² / (E − ħ²k²/m + i0⁺)`, with `χ_ε(k)² = e^{−αk²}`
//! and `α = ε²/2`.
//!
//! Closed forms (ħ = 1, `P = (m/2π²)·√π/(2√α)`):
//! * `E < 0`, `x = κ√α`, `κ = √(−mE)`: `I = P (√π x erfcx(x) − 1)`
//! * `E = 0`: `I = −P`
//! * `E > 0`, `x = k₀√α`, `k₀ = √(mE)`: `Re I = P (2x F(x) − 1)` with `F` Dawson's
//!   function, `Im I = −m k₀ e^{−x²} / 4π`.
//!
//! [`loop_integral_quadrature`] evaluates the defining integral directly and
//! serves as the independent check of the closed forms.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::TwoChannelParams;
use crate::error::Result;
use crate::numerics::quadrature::{integrate, integrate_to_infinity, Tolerance};
use crate::numerics::special::{sqrt_pi_x_erfcx_minus_one, two_x_dawson_minus_one};

/// `|I(0)| = m √(2π) / (4π² ε)`, the natural magnitude of the loop integral.
pub fn loop_scale(p: &TwoChannelParams) -> f64 {
    p.mass / (2.0 * PI * PI) * PI.sqrt() / (2.0 * p.alpha().sqrt())
}

pub fn loop_integral(p: &TwoChannelParams, energy: f64) -> Complex64 {
    let m = p.mass;
    let sqrt_alpha = p.alpha().sqrt();
    let scale = loop_scale(p);
    if energy < 0.0 {
        let x = (-m * energy).sqrt() * sqrt_alpha;
        Complex64::new(scale * sqrt_pi_x_erfcx_minus_one(x), 0.0)
    } else if energy == 0.0 {
        Complex64::new(-scale, 0.0)
    } else {
        let k0 = (m * energy).sqrt();
        let x = k0 * sqrt_alpha;
        let im = -m * k0 * (-x * x).exp() / (4.0 * PI);
        Complex64::new(scale * two_x_dawson_minus_one(x), im)
    }
}

/// dI/dE for `E < 0`: `−∫ d³k/(2π)³ χ² / (E − k²/m)²`, closed form.
///
/// Differentiating `P(√π x erfcx(x) − 1)` with `x = √(−mEα)` and
/// `erfcx′ = 2x erfcx − 2/√π` gives `P·√π (1 + 2x²) erfcx(x) − 2x)·dx/dE`
/// with `dx/dE = −mα/(2x)`.
pub fn loop_integral_derivative(p: &TwoChannelParams, energy: f64) -> f64 {
    assert!(energy < 0.0, "derivative is provided below threshold only");
    let m = p.mass;
    let alpha = p.alpha();
    let x = (-m * energy * alpha).sqrt();
    let d_dx = PI.sqrt() * (1.0 + 2.0 * x * x) * crate::numerics::special::erfcx(x) - 2.0 * x;
    loop_scale(p) * d_dx * (-m * alpha / (2.0 * x))
}

/// Direct adaptive quadrature of the defining integral. For `E > 0` the
/// principal value is taken by pairing `k₀ ± t`, and the `i0⁺` part is the
/// exact delta-function contribution.
pub fn loop_integral_quadrature(p: &TwoChannelParams, energy: f64, rel_tol: f64) -> Result<Complex64> {
    let m = p.mass;
    let alpha = p.alpha();
    let pref = m / (2.0 * PI * PI);
    let cutoff = 1.0 / p.eps;
    let tol = Tolerance { abs: 1e-300, rel: rel_tol };
    if energy <= 0.0 {
        let kappa2 = -m * energy;
        let integrand = |k: f64| -k * k * (-alpha * k * k).exp() / (kappa2 + k * k);
        let mut breaks = vec![kappa2.sqrt(), cutoff, 4.0 * cutoff];
        breaks.retain(|&b| b > 0.0);
        breaks.sort_by(f64::total_cmp);
        let r = integrate_to_infinity(integrand, 0.0, &breaks, tol)?;
        return Ok(Complex64::new(pref * r.value, 0.0));
    }
    let k0 = (m * energy).sqrt();
    let g = |k: f64| k * k * (-alpha * k * k).exp() / (k0 * k0 - k * k);
    let paired = |t: f64| g(k0 - t) + g(k0 + t);
    let near = integrate(paired, 0.0, k0, tol)?;
    let mut breaks = vec![cutoff, 4.0 * cutoff];
    breaks.retain(|&b| b > 2.0 * k0);
    let far = integrate_to_infinity(g, 2.0 * k0, &breaks, tol)?;
    let im = -m * k0 * (-alpha * k0 * k0).exp() / (4.0 * PI);
    Ok(Complex64::new(pref * (near.value + far.value), im))
}
