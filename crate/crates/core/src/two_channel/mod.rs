//! Two-channel model: an open channel coupled to a closed-channel molecule
//! `|m⟩` through a Gaussian form factor `χ_ε(k) = e^{−k²ε²/4}` with strength
//! `Λ`. Units with ħ = 1; the mass `m` is a parameter (relative energy
//! `E = k²/m`).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::fit::polyfit;
use crate::phase_shift::PhaseShiftModel;
use crate::MASS;

mod bound;
mod loop_integral;

pub use bound::{bound_state_2ch, product_identity_check, IdentityReport, TwoChannelBoundState, TAIL_RATIOS};
pub use loop_integral::{loop_integral, loop_integral_derivative, loop_integral_quadrature, loop_scale};

/// Relative agreement required between the closed-form and fitted
/// low-energy parameters.
pub const EXPANSION_TOL: f64 = 1e-6;
/// Energy window and point count of the low-energy fit.
pub const FIT_WINDOW: (f64, f64) = (1e-6, 1e-3);
pub const FIT_POINTS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoChannelParams {
    pub lambda: f64,
    pub e_mol: f64,
    pub eps: f64,
    pub mass: f64,
}

impl TwoChannelParams {
    pub fn new(lambda: f64, e_mol: f64, eps: f64, mass: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidInput(format!("coupling Λ must be positive, got {lambda}")));
        }
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::InvalidInput(format!("form-factor width ε must be positive, got {eps}")));
        }
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::InvalidInput(format!("mass must be positive, got {mass}")));
        }
        if !e_mol.is_finite() {
            return Err(Error::InvalidInput(format!("E_mol must be finite, got {e_mol}")));
        }
        Ok(Self { lambda, e_mol, eps, mass })
    }

    /// `α = ε²/2`, so that `χ_ε(k)² = e^{−αk²}`.
    pub fn alpha(&self) -> f64 {
        0.5 * self.eps * self.eps
    }

    pub fn chi(&self, k: f64) -> f64 {
        (-0.25 * k * k * self.eps * self.eps).exp()
    }

    /// Same Λ, ε and mass (E_mol may differ).
    pub fn same_coupling(&self, other: &Self) -> bool {
        self.lambda == other.lambda && self.eps == other.eps && self.mass == other.mass
    }
}

/// `(E − E_mol)/(2Λ²) − I(E)`; the amplitude has a pole where this vanishes.
pub fn pole_bracket(p: &TwoChannelParams, energy: f64) -> Complex64 {
    Complex64::new((energy - p.e_mol) / (2.0 * p.lambda * p.lambda), 0.0) - loop_integral(p, energy)
}

/// `1/f(E) = −(4π/m) e^{αmE} [(E − E_mol)/(2Λ²) − I(E)]`.
pub fn inverse_amplitude(p: &TwoChannelParams, energy: f64) -> Complex64 {
    -(4.0 * PI / p.mass) * (p.alpha() * p.mass * energy).exp() * pole_bracket(p, energy)
}

/// `f(E) = −(m/4π) χ(k)² / [(E − E_mol)/(2Λ²) − I(E)]`.
pub fn amplitude(p: &TwoChannelParams, energy: f64) -> Result<Complex64> {
    if !energy.is_finite() {
        return Err(Error::InvalidInput(format!("energy must be finite, got {energy}")));
    }
    let detuning = (energy - p.e_mol) / (2.0 * p.lambda * p.lambda);
    let loop_value = loop_integral(p, energy);
    let bracket = Complex64::new(detuning, 0.0) - loop_value;
    if bracket.norm() <= 1e-14 * (detuning.abs() + loop_value.norm()) {
        return Err(Error::PoleHit { energy });
    }
    Ok(-(p.mass / (4.0 * PI)) * (-p.alpha() * p.mass * energy).exp() / bracket)
}

/// Low-energy parameters of the two-channel amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveParams {
    /// `1/a_ε = √(2/π)/ε − 2πE_mol/(Λ²m)`.
    pub inv_a: f64,
    pub a: f64,
    /// `R*_ε = −√(2/π)ε + 2π/(Λ²m²) + ε²/(2a_ε)`.
    pub rstar: f64,
    /// `2π/(Λ²m²)`, the ε → 0 limit of R*.
    pub lambda_term: f64,
    pub fit_inv_a: f64,
    pub fit_rstar: f64,
}

impl EffectiveParams {
    /// One-channel model `g = −1/a − R* k²` with these parameters; defined for
    /// the unit mass of the one-channel conventions only.
    pub fn model(&self, mass: f64) -> Result<PhaseShiftModel> {
        if mass != MASS {
            return Err(Error::InvalidInput(format!(
                "one-channel models use m = {MASS}, the two-channel mass is {mass}"
            )));
        }
        PhaseShiftModel::new(vec![-self.inv_a, -self.rstar * mass])
    }
}

pub fn closed_form_params(p: &TwoChannelParams) -> (f64, f64, f64) {
    let s = (2.0 / PI).sqrt();
    let inv_a = s / p.eps - 2.0 * PI * p.e_mol / (p.lambda * p.lambda * p.mass);
    let lambda_term = 2.0 * PI / (p.lambda * p.lambda * p.mass * p.mass);
    let rstar = -s * p.eps + lambda_term + 0.5 * p.eps * p.eps * inv_a;
    (inv_a, rstar, lambda_term)
}

/// Closed-form `a_ε`, `R*_ε`, checked against a quadratic fit of `Re(1/f)`
/// on `E ∈ [1e-6, 1e-3]`. A disagreement beyond [`EXPANSION_TOL`] (relative
/// to the size of the terms) is reported as `InconsistentExpansion`.
pub fn effective_params(p: &TwoChannelParams) -> Result<EffectiveParams> {
    let (inv_a, rstar, lambda_term) = closed_form_params(p);
    let (lo, hi) = FIT_WINDOW;
    let es: Vec<f64> = (0..FIT_POINTS).map(|i| lo + (hi - lo) * i as f64 / (FIT_POINTS - 1) as f64).collect();
    let ys: Vec<f64> = es.iter().map(|&e| inverse_amplitude(p, e).re).collect();
    let c = polyfit(&es, &ys, 2)?;
    // Re(1/f) = −1/a − R* m E + O(E²)
    let fit_inv_a = -c[0];
    let fit_rstar = -c[1] / p.mass;

    let s = (2.0 / PI).sqrt();
    let scale_a = inv_a.abs().max(s / p.eps).max((2.0 * PI * p.e_mol / (p.lambda * p.lambda * p.mass)).abs());
    if (fit_inv_a - inv_a).abs() > EXPANSION_TOL * scale_a {
        return Err(Error::InconsistentExpansion { quantity: "1/a", closed: inv_a, fit: fit_inv_a });
    }
    let scale_r = rstar.abs().max(s * p.eps).max(lambda_term).max(0.5 * p.eps * p.eps * inv_a.abs());
    if (fit_rstar - rstar).abs() > EXPANSION_TOL * scale_r {
        return Err(Error::InconsistentExpansion { quantity: "R*", closed: rstar, fit: fit_rstar });
    }
    Ok(EffectiveParams { inv_a, a: 1.0 / inv_a, rstar, lambda_term, fit_inv_a, fit_rstar })
}

/// Coupling whose ε → 0 limit gives `R*`: `Λ = √(2π/(m² R*))`.
pub fn lambda_from_rstar(rstar: f64, mass: f64) -> Result<f64> {
    if !(rstar > 0.0) || !(mass > 0.0) {
        return Err(Error::InvalidInput(format!("need R* > 0 and m > 0, got R* = {rstar}, m = {mass}")));
    }
    Ok((2.0 * PI / (mass * mass * rstar)).sqrt())
}

/// Detuning that gives scattering length `a` at the given Λ, ε, m:
/// `E_mol = (Λ²m/2π)(√(2/π)/ε − 1/a)`.
pub fn emol_for_target_a(a: f64, lambda: f64, eps: f64, mass: f64) -> Result<f64> {
    if a == 0.0 || !a.is_finite() {
        return Err(Error::InvalidInput(format!("target scattering length must be finite and nonzero, got {a}")));
    }
    Ok(lambda * lambda * mass / (2.0 * PI) * ((2.0 / PI).sqrt() / eps - 1.0 / a))
}

/// Parameters reproducing `a` with the Λ chosen from `R*` at width ε.
pub fn params_for_target(a: f64, rstar: f64, eps: f64, mass: f64) -> Result<TwoChannelParams> {
    let lambda = lambda_from_rstar(rstar, mass)?;
    let e_mol = emol_for_target_a(a, lambda, eps, mass)?;
    TwoChannelParams::new(lambda, e_mol, eps, mass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(TwoChannelParams::new(0.0, 0.0, 0.1, 1.0).is_err());
        assert!(TwoChannelParams::new(1.0, 0.0, -0.1, 1.0).is_err());
        assert!(TwoChannelParams::new(1.0, 0.0, 0.1, 0.0).is_err());
        assert!(TwoChannelParams::new(1.0, f64::NAN, 0.1, 1.0).is_err());
    }

    // 40-digit reference: Λ² = 2π, E_mol = 0, ε = 0.1, E = 0.01.
    #[test]
    fn amplitude_reference() {
        let p = TwoChannelParams::new((2.0 * PI).sqrt(), 0.0, 0.1, 1.0).unwrap();
        let f = amplitude(&p, 0.01).unwrap();
        let expected = Complex64::new(-0.125_161_161_106_645_1, 0.001_566_777_104_005_722);
        assert!((f - expected).norm() < 1e-14, "{f}");
        let eff = effective_params(&p).unwrap();
        assert!((eff.a - 0.125_331_413_731_550_0).abs() < 1e-14);
    }

    #[test]
    fn amplitude_is_unitary_above_threshold() {
        let p = TwoChannelParams::new(1.7, 0.4, 0.3, 1.0).unwrap();
        for e in [1e-6, 0.01, 1.0, 30.0] {
            let k = (p.mass * e).sqrt();
            let f = amplitude(&p, e).unwrap();
            assert!((f.inv().im + k).abs() < 1e-12 * k);
        }
    }

    #[test]
    fn pole_is_hit_exactly() {
        // E_mol chosen so the bracket vanishes at E = −1
        let base = TwoChannelParams::new(1.0, 0.0, 0.5, 1.0).unwrap();
        let e = -1.0;
        let e_mol = e - 2.0 * loop_integral(&base, e).re;
        let p = TwoChannelParams { e_mol, ..base };
        assert!(matches!(amplitude(&p, e), Err(Error::PoleHit { .. })));
    }

    #[test]
    fn closed_form_matches_fit() {
        for (lambda, e_mol, eps) in [(2.5, 0.0, 0.1), (1.0, 3.0, 0.5), (0.7, -2.0, 1.0), (4.0, 50.0, 0.02)] {
            let p = TwoChannelParams::new(lambda, e_mol, eps, 1.0).unwrap();
            let eff = effective_params(&p).unwrap();
            assert!((eff.fit_inv_a - eff.inv_a).abs() < 1e-7 * eff.inv_a.abs().max(0.8 / eps));
        }
    }

    #[test]
    fn general_mass() {
        let p = TwoChannelParams::new(1.2, 0.3, 0.2, 2.5).unwrap();
        let eff = effective_params(&p).unwrap();
        assert!(eff.model(p.mass).is_err());
        let f = amplitude(&p, 1e-8).unwrap();
        assert!((f.re + eff.a).abs() < 1e-3 * eff.a.abs());
    }

    #[test]
    fn target_mapping_round_trip() {
        for eps in [0.2, 0.05, 0.01] {
            let p = params_for_target(1.0, 1.0, eps, 1.0).unwrap();
            let eff = effective_params(&p).unwrap();
            assert!((eff.a - 1.0).abs() < 1e-12);
            assert!((eff.lambda_term - 1.0).abs() < 1e-14);
            // R*_ε = 1 − √(2/π) ε + ε²/2
            let expected = 1.0 - (2.0 / PI).sqrt() * eps + 0.5 * eps * eps;
            assert!((eff.rstar - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_width_limit_approaches_one_channel_model() {
        let model = PhaseShiftModel::from_effective_range(1.0, 1.0).unwrap();
        let e: f64 = 0.2;
        let k = e.sqrt();
        let target = crate::scattering::amplitude(&model, k).unwrap();
        let err = |eps: f64| (amplitude(&params_for_target(1.0, 1.0, eps, 1.0).unwrap(), e).unwrap() - target).norm();
        let (e1, e2) = (err(0.02), err(0.01));
        assert!(e2 < e1 && e1 / e2 > 1.9, "{e1} {e2}");
    }

    #[test]
    fn inconsistent_fit_is_reported() {
        // ε so large that the O(E²) terms leak into the fitted slope
        let p = TwoChannelParams::new(1.0, 0.0, 60.0, 1.0).unwrap();
        assert!(matches!(effective_params(&p), Err(Error::InconsistentExpansion { .. })));
    }
}
