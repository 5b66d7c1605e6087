//! Bound states of one-channel contact models: poles of `f(k)` at `k = iq`,
//! their wavefunctions `φ(r) = −A e^{−qr}/r`, and the normalization fixed by
//! the modified scalar product.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::roots::{brent, geometric_grid, sign_change_brackets};
use crate::phase_shift::PhaseShiftModel;
use crate::{HBAR, MASS, REDUCED_MASS};

/// Lower end of the decay-constant scan.
pub const SCAN_Q_MIN: f64 = 1e-8;
pub const SCAN_POINTS_PER_DECADE: usize = 512;
/// Relative accuracy of every returned decay constant (the refiner is run
/// tighter than this).
pub const ROOT_REL_TOL: f64 = 1e-12;
const REFINE_REL_TOL: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormSign {
    Positive,
    Negative,
}

impl std::fmt::Display for NormSign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NormSign::Positive => "positive",
            NormSign::Negative => "negative",
        })
    }
}

/// A pole on the positive imaginary k axis. `a2` is the formal |A|² from the
/// modified-product normalization; it is negative exactly when `norm_sign`
/// is negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundState {
    pub q: f64,
    pub energy: f64,
    pub a2: f64,
    pub norm_sign: NormSign,
}

impl BoundState {
    /// Real, positive source amplitude `A = √|A2|`.
    pub fn amplitude(&self) -> f64 {
        self.a2.abs().sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ScanWarning {
    /// A root lies on the upper end of the scan window; a larger `q_max`
    /// may reveal more structure.
    RootAtGridBoundary { q: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundStateScan {
    pub states: Vec<BoundState>,
    pub warnings: Vec<ScanWarning>,
}

pub fn energy_of_q(q: f64) -> f64 {
    -HBAR * HBAR * q * q / MASS
}

/// Pole condition `g(−ħ²q²/m) + q`.
pub fn pole_function(model: &PhaseShiftModel, q: f64) -> f64 {
    model.g(energy_of_q(q)) + q
}

/// All roots of the pole condition on `(0, q_max]`, sorted by increasing `q`.
pub fn find_bound_states(model: &PhaseShiftModel, q_max: f64) -> Result<BoundStateScan> {
    if !(q_max > 0.0) || !q_max.is_finite() {
        return Err(Error::InvalidInput(format!("q_max must be positive, got {q_max}")));
    }
    let q_min = SCAN_Q_MIN.min(q_max * 1e-3);
    let grid = geometric_grid(q_min, q_max, SCAN_POINTS_PER_DECADE);
    let values: Vec<f64> = grid.iter().map(|&q| pole_function(model, q)).collect();
    let mut states = Vec::new();
    let mut warnings = Vec::new();
    for (i, j) in sign_change_brackets(&grid, &values) {
        let q = if i == j {
            grid[i]
        } else {
            brent(|q| pole_function(model, q), grid[i], grid[j], values[i], values[j], REFINE_REL_TOL)?
        };
        if (q_max - q).abs() <= ROOT_REL_TOL * q_max {
            warnings.push(ScanWarning::RootAtGridBoundary { q });
        }
        let (a2, norm_sign) = normalization(model, q);
        states.push(BoundState { q, energy: energy_of_q(q), a2, norm_sign });
    }
    states.sort_by(|a, b| a.q.total_cmp(&b.q));
    states.dedup_by(|a, b| (a.q - b.q).abs() <= ROOT_REL_TOL * b.q);
    Ok(BoundStateScan { states, warnings })
}

/// Denominator `1/q − (ħ²/μ) g′(E)` of the bound-state normalization.
pub fn normalization_denominator(model: &PhaseShiftModel, q: f64) -> f64 {
    1.0 / q - HBAR * HBAR / REDUCED_MASS * model.g_prime(energy_of_q(q))
}

/// `|A|² = (1/4π)·2 / (1/q − (ħ²/μ) g′(E))` and the sign of the denominator.
pub fn normalization(model: &PhaseShiftModel, q: f64) -> (f64, NormSign) {
    let denom = normalization_denominator(model, q);
    let a2 = 2.0 / (4.0 * PI * denom);
    let sign = if denom > 0.0 { NormSign::Positive } else { NormSign::Negative };
    (a2, sign)
}

/// `φ(r) = −A e^{−qr}/r` with `A = √|A2|`.
pub fn wavefunction(state: &BoundState, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidInput(format!("wavefunction needs r > 0, got {r}")));
    }
    Ok(-state.amplitude() * (-state.q * r).exp() / r)
}

/// `∫ d³r |φ|² = 4π |A|² / (2q)`, closed form.
pub fn plain_norm(state: &BoundState) -> f64 {
    4.0 * PI * state.a2 / (2.0 * state.q)
}

/// `|(φ|φ)₀ − 1|` with `(φ|φ)₀ = ⟨φ|φ⟩ − (2πħ²/μ)|A|² g′(E)`, the
/// coincident-energy limit of the modified product.
pub fn modified_norm_check(model: &PhaseShiftModel, state: &BoundState) -> f64 {
    let subtraction = 2.0 * PI * HBAR * HBAR / REDUCED_MASS * state.a2 * model.g_prime(state.energy);
    (plain_norm(state) - subtraction - 1.0).abs()
}
