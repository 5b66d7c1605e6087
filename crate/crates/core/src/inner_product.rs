//! The modified scalar product of energy-dependent contact models.
//!
//! For two eigenstates with source amplitudes `A₁`, `A₂` the usual product of
//! zero-range solutions equals `(2πħ²/μ) A₁* A₂ D`, with `D` the difference
//! quotient of `g` between the two energies. The modified product subtracts
//! that term, making non-degenerate states orthogonal. It is available in two
//! equivalent forms: the difference-quotient subtraction and the double sum
//! over regularized momentum-space matrix elements.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::bound_states::BoundState;
use crate::error::{Error, Result};
use crate::phase_shift::PhaseShiftModel;
use crate::{HBAR, MASS, REDUCED_MASS};

/// Relative energy separation below which two states count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-8;
/// Energy floor (natural units) for the degeneracy test near E = 0.
pub const ENERGY_FLOOR: f64 = 1e-12;

/// `2πħ²/μ`.
const SOURCE_FACTOR: f64 = 2.0 * PI * HBAR * HBAR / REDUCED_MASS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Bound,
    Scattering,
}

/// An eigenstate of a contact model, seen through its energy and its source
/// amplitude (the coefficient of the `1/r` singularity).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactEigenstate {
    pub energy: f64,
    pub amplitude: Complex64,
    pub kind: StateKind,
}

impl ContactEigenstate {
    pub fn bound(energy: f64, amplitude: Complex64) -> Result<Self> {
        if !(energy < 0.0) {
            return Err(Error::InvalidInput(format!("bound states need E < 0, got {energy}")));
        }
        Ok(Self { energy, amplitude, kind: StateKind::Bound })
    }

    pub fn scattering(energy: f64, amplitude: Complex64) -> Result<Self> {
        if !(energy >= 0.0) {
            return Err(Error::InvalidInput(format!("scattering states need E ≥ 0, got {energy}")));
        }
        Ok(Self { energy, amplitude, kind: StateKind::Scattering })
    }

    /// Decay constant `q = √(−mE)/ħ` of a bound state.
    pub fn q(&self) -> Option<f64> {
        match self.kind {
            StateKind::Bound => Some((-MASS * self.energy).sqrt() / HBAR),
            StateKind::Scattering => None,
        }
    }
}

impl From<&BoundState> for ContactEigenstate {
    fn from(s: &BoundState) -> Self {
        Self { energy: s.energy, amplitude: Complex64::new(s.amplitude(), 0.0), kind: StateKind::Bound }
    }
}

/// `⟨Φ|Ψ⟩ = A₁* A₂ 4π / (q₁ + q₂)` for two functions `−A e^{−qr}/r`.
pub fn plain_overlap_bound(s1: &ContactEigenstate, s2: &ContactEigenstate) -> Result<Complex64> {
    match (s1.q(), s2.q()) {
        (Some(q1), Some(q2)) => Ok(s1.amplitude.conj() * s2.amplitude * (4.0 * PI / (q1 + q2))),
        _ => Err(Error::KindMismatch("plain_overlap_bound needs two bound states".into())),
    }
}

/// `Σ_n |c_n| (falling factorial) |x|^{n−order}`: magnitude of the terms
/// entering `g^{(order)}(x)`, for rounding estimates.
fn derivative_magnitude(model: &PhaseShiftModel, order: usize, x: f64) -> f64 {
    let mut acc = 0.0;
    for (n, &c) in model.coeffs().iter().enumerate().skip(order).rev() {
        let falling: f64 = (0..order).map(|i| (n - i) as f64).product();
        acc = acc * x.abs() + falling * c.abs();
    }
    acc
}

/// `D = (g(E₁) − g(E₂)) / (E₁ − E₂)`, or `g′` at the midpoint when the
/// energies are degenerate within [`DEGENERACY_TOL`].
///
/// Close (but non-degenerate) energies use the central expansion
/// `Σ_j g^{(2j+1)}(Ē) h^{2j} / (2j+1)!` with `h = (E₁ − E₂)/2`, which is exact
/// for polynomials and avoids the cancellation in the plain quotient; the
/// branch with the smaller rounding estimate wins.
pub fn difference_quotient(model: &PhaseShiftModel, e1: f64, e2: f64) -> f64 {
    let scale = e1.abs().max(e2.abs()).max(ENERGY_FLOOR);
    let mid = 0.5 * (e1 + e2);
    let diff = e1 - e2;
    if diff.abs() < DEGENERACY_TOL * scale {
        return model.g_prime(mid);
    }
    let half = 0.5 * diff;

    let mut central = 0.0;
    let mut central_err = 0.0;
    let mut factorial = 1.0;
    let mut power = 1.0;
    let mut order = 1;
    while order <= model.degree() {
        factorial *= if order == 1 { 1.0 } else { (order * (order - 1)) as f64 };
        central += model.derivative(order, mid) * power / factorial;
        central_err += derivative_magnitude(model, order, mid) * power.abs() / factorial;
        power *= half * half;
        order += 2;
    }

    let naive = (model.g(e1) - model.g(e2)) / diff;
    let naive_err = (derivative_magnitude(model, 0, e1) + derivative_magnitude(model, 0, e2)) / diff.abs();
    if central_err <= naive_err {
        central
    } else {
        naive
    }
}

/// `(Φ|Ψ)₀ = ⟨Φ|Ψ⟩ − (2πħ²/μ) A₁* A₂ D`, with `plain = ⟨Φ|Ψ⟩`.
pub fn modified_product(
    model: &PhaseShiftModel,
    s1: &ContactEigenstate,
    s2: &ContactEigenstate,
    plain: Complex64,
) -> Complex64 {
    let d = difference_quotient(model, s1.energy, s2.energy);
    plain - s1.amplitude.conj() * s2.amplitude * (SOURCE_FACTOR * d)
}

/// Regular part of `⟨k|(p²/2μ)ⁿ|Ψ⟩` as `k → ∞`: `−(2πħ²A/μ) E^{n−1}`, and 0
/// for `n = 0`.
pub fn reg_matrix_element(s: &ContactEigenstate, n: u32) -> Complex64 {
    if n == 0 {
        return Complex64::new(0.0, 0.0);
    }
    -s.amplitude * (SOURCE_FACTOR * s.energy.powi(n as i32 - 1))
}

/// The double-sum form
/// `⟨Φ|Ψ⟩ − (μ/2πħ²) Σ_{n≥1} c_n Σ_{p=1..n} Reg⟨Φ|(p²/2μ)^{n−p+1}|k⟩ · Reg⟨k|(p²/2μ)^p|Ψ⟩`.
pub fn modified_product_series(
    model: &PhaseShiftModel,
    s1: &ContactEigenstate,
    s2: &ContactEigenstate,
    plain: Complex64,
) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    for (n, &c) in model.coeffs().iter().enumerate().skip(1) {
        let n = n as u32;
        let inner: Complex64 = (1..=n)
            .map(|p| reg_matrix_element(s1, n - p + 1).conj() * reg_matrix_element(s2, p))
            .sum();
        sum += inner * c;
    }
    plain - sum / SOURCE_FACTOR
}

/// The degree-1 model with bound-state poles at `q1` and `q2`:
/// solves `g(−ħ²q_i²/m) = −q_i` for `(c0, c1)`.
pub fn construct_two_pole_model(q1: f64, q2: f64) -> Result<PhaseShiftModel> {
    if !(q1 > 0.0 && q2 > 0.0) {
        return Err(Error::InvalidInput(format!("decay constants must be positive, got {q1}, {q2}")));
    }
    let e1 = -HBAR * HBAR * q1 * q1 / MASS;
    let e2 = -HBAR * HBAR * q2 * q2 / MASS;
    // [1 e1; 1 e2] (c0, c1)ᵀ = (−q1, −q2)ᵀ
    let det = e2 - e1;
    if det == 0.0 || det.abs() < 4.0 * f64::EPSILON * e1.abs().max(e2.abs()) {
        return Err(Error::SingularSystem(format!("poles at q = {q1} and q = {q2} share an energy")));
    }
    let c0 = (-q1 * e2 + q2 * e1) / det;
    let c1 = (-q2 + q1) / det;
    PhaseShiftModel::new(vec![c0, c1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bound_states::find_bound_states;
    use crate::numerics::quadrature::{integrate_to_infinity, Tolerance};
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn plain_overlap_examples() {
        let s1 = ContactEigenstate::bound(-1.0, c(1.0)).unwrap();
        assert!((plain_overlap_bound(&s1, &s1).unwrap() - c(2.0 * PI)).norm() < 1e-15);
        let s05 = ContactEigenstate::bound(-0.25, c(1.0)).unwrap();
        let v = plain_overlap_bound(&s05, &s1).unwrap();
        assert!((v.re - 8.377_580_409_572_781).abs() < 1e-14);
        let scat = ContactEigenstate::scattering(1.0, c(1.0)).unwrap();
        assert!(matches!(plain_overlap_bound(&s1, &scat), Err(Error::KindMismatch(_))));
    }

    #[test]
    fn plain_overlap_matches_radial_quadrature() {
        let (q1, q2) = (0.37, 1.9);
        let (a1, a2) = (Complex64::new(0.3, -0.8), Complex64::new(-1.1, 0.25));
        let s1 = ContactEigenstate::bound(-q1 * q1, a1).unwrap();
        let s2 = ContactEigenstate::bound(-q2 * q2, a2).unwrap();
        // 4π ∫ r² (A1 e^{-q1 r}/r)(A2 e^{-q2 r}/r) dr
        let radial = integrate_to_infinity(|r| 4.0 * PI * (-(q1 + q2) * r).exp(), 0.0, &[1.0], Tolerance::relative(1e-13))
            .unwrap()
            .value;
        let oracle = a1.conj() * a2 * radial;
        let v = plain_overlap_bound(&s1, &s2).unwrap();
        assert!((v - oracle).norm() < 1e-10 * oracle.norm());
    }

    #[test]
    fn wbp_leaves_plain_product_unchanged() {
        let m = PhaseShiftModel::wbp(0.7).unwrap();
        let s1 = ContactEigenstate::bound(-1.0, c(0.4)).unwrap();
        let s2 = ContactEigenstate::scattering(2.0, Complex64::new(0.1, 0.3)).unwrap();
        let plain = Complex64::new(0.3, -0.2);
        assert_eq!(modified_product(&m, &s1, &s2, plain), plain);
        assert_eq!(modified_product_series(&m, &s1, &s2, plain), plain);
    }

    #[test]
    fn effective_range_subtraction_is_four_pi_rstar() {
        let m = PhaseShiftModel::from_effective_range(1.0, 1.0).unwrap();
        let s1 = ContactEigenstate::bound(-1.0, c(1.0)).unwrap();
        let s2 = ContactEigenstate::bound(-2.0, c(1.0)).unwrap();
        let v = modified_product(&m, &s1, &s2, c(0.0));
        assert!((v - c(4.0 * PI)).norm() < 1e-14);
    }

    #[test]
    fn bound_states_of_one_model_are_orthogonal() {
        let m = PhaseShiftModel::from_effective_range(1.0, -0.2).unwrap();
        let states = find_bound_states(&m, 100.0).unwrap().states;
        assert_eq!(states.len(), 2);
        let (s1, s2) = (ContactEigenstate::from(&states[0]), ContactEigenstate::from(&states[1]));
        let plain = plain_overlap_bound(&s1, &s2).unwrap();
        assert!(modified_product(&m, &s1, &s2, plain).norm() < 1e-12 * plain.norm());
    }

    #[test]
    fn reg_matrix_elements() {
        let s = ContactEigenstate::bound(-0.5, c(1.0)).unwrap();
        assert_eq!(reg_matrix_element(&s, 0), c(0.0));
        assert!((reg_matrix_element(&s, 1) - c(-4.0 * PI)).norm() < 1e-15);
        assert!((reg_matrix_element(&s, 3) - c(-PI)).norm() < 1e-15);
    }

    #[test]
    fn two_pole_model() {
        assert!(matches!(construct_two_pole_model(1.0, 1.0), Err(Error::SingularSystem(_))));
        let m = construct_two_pole_model(0.5, 1.0).unwrap();
        let qs: Vec<f64> = find_bound_states(&m, 10.0).unwrap().states.iter().map(|s| s.q).collect();
        assert_eq!(qs.len(), 2);
        assert!((qs[0] - 0.5).abs() < 1e-14 && (qs[1] - 1.0).abs() < 1e-14);
        let states = find_bound_states(&m, 10.0).unwrap().states;
        let (s1, s2) = (ContactEigenstate::from(&states[0]), ContactEigenstate::from(&states[1]));
        let plain = plain_overlap_bound(&s1, &s2).unwrap();
        assert!(modified_product(&m, &s1, &s2, plain).norm() < 1e-12 * plain.norm());
    }

    #[test]
    fn degenerate_limit_is_first_order() {
        let m = PhaseShiftModel::new(vec![-1.0, 0.3, 0.8, -0.2]).unwrap();
        let s = ContactEigenstate::bound(-0.6, c(0.9)).unwrap();
        let plain = c(1.3);
        let at = |h: f64| {
            let t = ContactEigenstate::bound(-0.6 + h, c(0.9)).unwrap();
            (modified_product(&m, &s, &t, plain) - modified_product(&m, &s, &s, plain)).norm()
        };
        let (d1, d2, d3) = (at(1e-3), at(5e-4), at(2.5e-4));
        assert!((d1 / d2 - 2.0).abs() < 0.01);
        assert!((d2 / d3 - 2.0).abs() < 0.01);
    }

    #[test]
    fn quotient_is_accurate_near_degeneracy() {
        let m = PhaseShiftModel::new(vec![0.4, -1.2, 0.7, 1.1, -0.3]).unwrap();
        let e = -0.8;
        for h in [1e-9, 1e-7, 1e-5, 1e-3] {
            let d = difference_quotient(&m, e, e + h);
            // Σ c_n (E1ⁿ − E2ⁿ)/(E1 − E2) via the complete homogeneous sums
            let e2 = e + h;
            let exact: f64 = m
                .coeffs()
                .iter()
                .enumerate()
                .skip(1)
                .map(|(n, cn)| cn * (0..n).map(|p| e.powi((n - 1 - p) as i32) * e2.powi(p as i32)).sum::<f64>())
                .sum();
            assert!((d - exact).abs() < 1e-13 * exact.abs(), "h = {h}");
        }
    }

    proptest! {
        #[test]
        fn series_equals_quotient(
            coeffs in proptest::collection::vec(-2.0f64..2.0, 1..10),
            e1 in -3.0f64..3.0,
            gap in prop_oneof![-3.0f64..3.0, -1e-6f64..1e-6, -1e-10f64..1e-10],
            a1 in (-1.0f64..1.0, -1.0f64..1.0),
            a2 in (-1.0f64..1.0, -1.0f64..1.0),
        ) {
            let m = PhaseShiftModel::new(coeffs).unwrap();
            let e2 = e1 + gap;
            let mk = |e: f64, a: (f64, f64)| ContactEigenstate {
                energy: e,
                amplitude: Complex64::new(a.0, a.1),
                kind: if e < 0.0 { StateKind::Bound } else { StateKind::Scattering },
            };
            let (s1, s2) = (mk(e1, a1), mk(e2, a2));
            let plain = Complex64::new(0.7, -0.4);
            let q = modified_product(&m, &s1, &s2, plain);
            let s = modified_product_series(&m, &s1, &s2, plain);
            prop_assert!((q - s).norm() <= 1e-12 * q.norm().max(plain.norm()));
        }

        #[test]
        fn hermitian_symmetry(
            coeffs in proptest::collection::vec(-2.0f64..2.0, 1..6),
            e1 in -3.0f64..-0.01,
            e2 in -3.0f64..3.0,
            a1 in (-1.0f64..1.0, -1.0f64..1.0),
            a2 in (-1.0f64..1.0, -1.0f64..1.0),
        ) {
            let m = PhaseShiftModel::new(coeffs).unwrap();
            let s1 = ContactEigenstate::bound(e1, Complex64::new(a1.0, a1.1)).unwrap();
            let kind = if e2 < 0.0 { StateKind::Bound } else { StateKind::Scattering };
            let s2 = ContactEigenstate { energy: e2, amplitude: Complex64::new(a2.0, a2.1), kind };
            let plain = Complex64::new(0.2, 0.9);
            let forward = modified_product(&m, &s1, &s2, plain);
            let backward = modified_product(&m, &s2, &s1, plain.conj());
            prop_assert!((forward - backward.conj()).norm() <= 1e-14 * forward.norm().max(1.0));
        }
    }
}
