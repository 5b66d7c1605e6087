//! Scattering observables of a one-channel contact model:
//! `f(k) = −1 / (−g(E) + i k)` with `E = ħ²k²/m`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::phase_shift::PhaseShiftModel;
use crate::{HBAR, MASS};

pub fn energy_of_k(k: f64) -> f64 {
    HBAR * HBAR * k * k / MASS
}

/// One point of a scattering sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringPoint {
    pub k: f64,
    pub energy: f64,
    pub f: Complex64,
    pub delta: f64,
    pub sigma: f64,
}

impl ScatteringPoint {
    pub fn evaluate(model: &PhaseShiftModel, k: f64, identical: bool) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::InvalidInput(format!("scattering points need k > 0, got {k}")));
        }
        let f = amplitude(model, k)?;
        Ok(Self {
            k,
            energy: energy_of_k(k),
            f,
            delta: phase_shift(model, k)?,
            sigma: cross_section_of(f, identical),
        })
    }
}

pub fn amplitude(model: &PhaseShiftModel, k: f64) -> Result<Complex64> {
    if !(k >= 0.0) {
        return Err(Error::InvalidInput(format!("amplitude needs k ≥ 0, got {k}")));
    }
    let g = model.g(energy_of_k(k));
    if k == 0.0 {
        if g == 0.0 {
            return Err(Error::DivergentAmplitude);
        }
        return Ok(Complex64::new(1.0 / g, 0.0));
    }
    Ok(-Complex64::new(-g, k).inv())
}

/// δ ∈ (0, π) with `cot δ = g(E)/k`; the limits g/k → ±∞ map to 0⁺ and π.
pub fn phase_shift(model: &PhaseShiftModel, k: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::InvalidInput(format!("phase shift needs k > 0, got {k}")));
    }
    Ok(k.atan2(model.g(energy_of_k(k))))
}

fn cross_section_of(f: Complex64, identical: bool) -> f64 {
    let factor = if identical { 8.0 } else { 4.0 };
    factor * PI * f.norm_sqr()
}

/// 4π|f|², or 8π|f|² for identical bosons.
pub fn cross_section(model: &PhaseShiftModel, k: f64, identical: bool) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::InvalidInput(format!("cross section needs k > 0, got {k}")));
    }
    Ok(cross_section_of(amplitude(model, k)?, identical))
}

/// `|Im(1/f) + k| / k`, computed from the amplitude itself.
pub fn unitarity_residual(model: &PhaseShiftModel, k: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::InvalidInput(format!("unitarity residual needs k > 0, got {k}")));
    }
    let f = amplitude(model, k)?;
    Ok((f.inv().im + k).abs() / k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn wbp() -> PhaseShiftModel {
        PhaseShiftModel::wbp(1.0).unwrap()
    }

    #[test]
    fn amplitude_examples() {
        assert_eq!(amplitude(&wbp(), 0.0).unwrap(), Complex64::new(-1.0, 0.0));
        let f = amplitude(&wbp(), 1.0).unwrap();
        assert!((f - Complex64::new(-0.5, 0.5)).norm() < 1e-16);
        // 40-digit reference
        let er = PhaseShiftModel::from_effective_range(1.0, 1.0).unwrap();
        let f = amplitude(&er, 0.7).unwrap();
        let expected = Complex64::new(-0.549_795_210_508_837_3, 0.258_293_051_916_903_4);
        assert!((f - expected).norm() < 1e-14);
    }

    #[test]
    fn zero_energy_pole() {
        let unitary = PhaseShiftModel::new(vec![0.0, 1.0]).unwrap();
        assert_eq!(amplitude(&unitary, 0.0), Err(Error::DivergentAmplitude));
    }

    #[test]
    fn phase_shift_examples() {
        assert!((phase_shift(&wbp(), 1.0).unwrap() - 0.75 * PI).abs() < 1e-15);
        let unitary = PhaseShiftModel::new(vec![0.0]).unwrap();
        assert!((phase_shift(&unitary, 0.3).unwrap() - FRAC_PI_2).abs() < 1e-15);
        let er = PhaseShiftModel::from_effective_range(1.0, 1.0).unwrap();
        assert!((phase_shift(&er, 0.5).unwrap() - 2.761_086_276_477_428_4).abs() < 1e-14);
    }

    #[test]
    fn phase_shift_passes_pi_over_two_at_a_zero_of_g() {
        // g(E) = 1 - E vanishes at k = 1
        let m = PhaseShiftModel::new(vec![1.0, -1.0]).unwrap();
        let before = phase_shift(&m, 1.0 - 1e-9).unwrap();
        let after = phase_shift(&m, 1.0 + 1e-9).unwrap();
        assert!(before < FRAC_PI_2 && after > FRAC_PI_2);
        assert!((after - before).abs() < 1e-8);
    }

    #[test]
    fn cross_section_examples() {
        let unitary = PhaseShiftModel::new(vec![0.0]).unwrap();
        let k = 0.37;
        let s = cross_section(&unitary, k, false).unwrap();
        assert!((s - 4.0 * PI / (k * k)).abs() < 1e-13 * s);
        assert_eq!(cross_section(&unitary, k, true).unwrap(), 2.0 * s);
        assert!((cross_section(&wbp(), 1.0, false).unwrap() - 2.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn low_energy_limit_is_minus_a_at_order_k_squared() {
        let er = PhaseShiftModel::from_effective_range(1.3, 0.4).unwrap();
        let err = |k: f64| (amplitude(&er, k).unwrap() + 1.3).norm();
        // halving k divides the error by ~2 (leading imaginary term −i a² k)
        let (e1, e2) = (err(1e-3), err(5e-4));
        assert!((e1 / e2 - 2.0).abs() < 1e-2);
        // the real part converges quadratically
        let re = |k: f64| (amplitude(&er, k).unwrap().re + 1.3).abs();
        assert!((re(1e-3) / re(5e-4) - 4.0).abs() < 1e-2);
    }

    #[test]
    fn unitarity_for_wbp_at_large_k() {
        assert!(unitarity_residual(&wbp(), 10.0).unwrap() < 1e-13);
    }

    proptest! {
        #[test]
        fn unitarity_holds_for_random_models(
            coeffs in proptest::collection::vec(-2.0f64..2.0, 1..8),
            k in prop_oneof![Just(0.1f64), Just(1.0), Just(10.0), 1e-3f64..10.0],
        ) {
            let m = PhaseShiftModel::new(coeffs).unwrap();
            prop_assert!(unitarity_residual(&m, k).unwrap() < 1e-13);
            let f = amplitude(&m, k).unwrap();
            prop_assert!(f.norm() <= 1.0 / k * (1.0 + 1e-15));
        }
    }
}
