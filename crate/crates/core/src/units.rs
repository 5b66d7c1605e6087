//! Unit systems, physical constants and the magnetic Feshbach parameterization.
//!
//! Everything downstream of this module works in natural units: ħ = 1 and atom
//! mass m = 1, so the reduced mass is μ = 1/2 and the relative energy is E = k².
//! Physical inputs (species files, SI or atomic-unit values) are converted
//! here, at the boundary.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// CODATA 2018 values, SI.
pub mod constants {
    /// h/2π with the exact SI value of h.
    pub const HBAR: f64 = 1.054_571_817_646_156_5e-34;
    pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
    pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
    pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;
    pub const HARTREE: f64 = 4.359_744_722_207_1e-18;
    pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;
    /// ħ / (e a0²), the atomic unit of magnetic flux density.
    pub const ATOMIC_FIELD: f64 = 2.350_517_567_58e5;
    pub const GAUSS: f64 = 1e-4;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitMode {
    Natural,
    Si,
    Atomic,
}

impl std::str::FromStr for UnitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "natural" => Ok(UnitMode::Natural),
            "si" => Ok(UnitMode::Si),
            "atomic" | "au" => Ok(UnitMode::Atomic),
            other => Err(Error::Unit(format!("unknown unit system '{other}'"))),
        }
    }
}

/// A unit system: the SI value of its units of length, energy, magnetic
/// field and mass, and the value of ħ expressed in the system itself.
///
/// The natural system is dimensionless (ħ = m = 1); all of its conversion
/// factors are exactly one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem {
    pub mode: UnitMode,
    pub length: f64,
    pub energy: f64,
    pub field: f64,
    pub mass: f64,
    pub hbar: f64,
}

impl UnitSystem {
    pub const fn natural() -> Self {
        Self { mode: UnitMode::Natural, length: 1.0, energy: 1.0, field: 1.0, mass: 1.0, hbar: 1.0 }
    }

    pub const fn si() -> Self {
        Self { mode: UnitMode::Si, length: 1.0, energy: 1.0, field: 1.0, mass: 1.0, hbar: constants::HBAR }
    }

    pub const fn atomic() -> Self {
        Self {
            mode: UnitMode::Atomic,
            length: constants::BOHR_RADIUS,
            energy: constants::HARTREE,
            field: constants::ATOMIC_FIELD,
            mass: constants::ELECTRON_MASS,
            hbar: 1.0,
        }
    }

    pub fn from_mode(mode: UnitMode) -> Self {
        match mode {
            UnitMode::Natural => Self::natural(),
            UnitMode::Si => Self::si(),
            UnitMode::Atomic => Self::atomic(),
        }
    }

    pub fn length_to_si(&self, v: f64) -> f64 {
        v * self.length
    }
    pub fn length_from_si(&self, v: f64) -> f64 {
        v / self.length
    }
    pub fn energy_to_si(&self, v: f64) -> f64 {
        v * self.energy
    }
    pub fn energy_from_si(&self, v: f64) -> f64 {
        v / self.energy
    }
    pub fn field_to_si(&self, v: f64) -> f64 {
        v * self.field
    }
    pub fn field_from_si(&self, v: f64) -> f64 {
        v / self.field
    }
    pub fn mass_to_si(&self, v: f64) -> f64 {
        v * self.mass
    }
    pub fn mass_from_si(&self, v: f64) -> f64 {
        v / self.mass
    }

    /// Whether values can be carried between `self` and `other` without
    /// changing their physical meaning. The natural system only talks to
    /// itself, since it carries no length scale.
    pub fn compatible_with(&self, other: &UnitSystem) -> bool {
        (self.mode == UnitMode::Natural) == (other.mode == UnitMode::Natural)
    }
}

/// Physical description of one magnetic Feshbach resonance, expressed in
/// `units`. `delta_mu` is a magnetic moment (energy per field), so the width
/// radius needs no implicit Bohr-magneton factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceData {
    pub a_bg: f64,
    pub delta_b: f64,
    pub b0: f64,
    pub delta_mu: f64,
    pub c6: f64,
    pub mass: f64,
    pub units: UnitSystem,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResonanceClass {
    Broad,
    Narrow,
}

impl std::fmt::Display for ResonanceClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ResonanceClass::Broad => "broad",
            ResonanceClass::Narrow => "narrow",
        })
    }
}

/// Default `|R*| / R_vdW` above which a resonance counts as narrow.
pub const NARROW_THRESHOLD: f64 = 1.0;

impl ResonanceData {
    pub fn new(
        a_bg: f64,
        delta_b: f64,
        b0: f64,
        delta_mu: f64,
        c6: f64,
        mass: f64,
        units: UnitSystem,
    ) -> Result<Self> {
        let all = [a_bg, delta_b, b0, delta_mu, c6, mass];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("resonance parameters must be finite".into()));
        }
        if delta_b == 0.0 {
            return Err(Error::DegenerateResonance("resonance width ΔB is zero".into()));
        }
        if mass <= 0.0 {
            return Err(Error::InvalidInput(format!("mass must be positive, got {mass}")));
        }
        if c6 <= 0.0 {
            return Err(Error::InvalidInput(format!("C6 must be positive, got {c6}")));
        }
        Ok(Self { a_bg, delta_b, b0, delta_mu, c6, mass, units })
    }

    /// The same resonance expressed in `target` units.
    pub fn to_units(&self, target: UnitSystem) -> Result<Self> {
        if !self.units.compatible_with(&target) {
            return Err(Error::Unit(format!(
                "cannot convert resonance data between {:?} and {:?} units",
                self.units.mode, target.mode
            )));
        }
        let s = &self.units;
        let moment_si = self.delta_mu * s.energy / s.field;
        let c6_si = self.c6 * s.energy * s.length.powi(6);
        Ok(Self {
            a_bg: target.length_from_si(s.length_to_si(self.a_bg)),
            delta_b: target.field_from_si(s.field_to_si(self.delta_b)),
            b0: target.field_from_si(s.field_to_si(self.b0)),
            delta_mu: moment_si * target.field / target.energy,
            c6: c6_si / (target.energy * target.length.powi(6)),
            mass: target.mass_from_si(s.mass_to_si(self.mass)),
            units: target,
        })
    }
}

/// a(B) = a_bg (1 − ΔB / (B − B0)), evaluated as
/// `a_bg (B − (B0 + ΔB)) / (B − B0)` so that it is exactly zero at the
/// floating-point field `B0 + ΔB`.
pub fn scattering_length_of_field(res: &ResonanceData, b: f64) -> Result<f64> {
    let detuning = b - res.b0;
    if detuning == 0.0 {
        return Err(Error::PoleAtResonance { b0: res.b0 });
    }
    Ok(res.a_bg * ((b - (res.b0 + res.delta_b)) / detuning))
}

/// R* = ħ² / (m a_bg δμ ΔB), signed.
pub fn width_radius(res: &ResonanceData) -> Result<f64> {
    let denom = res.mass * res.a_bg * res.delta_mu * res.delta_b;
    if denom == 0.0 || !denom.is_finite() {
        return Err(Error::DegenerateResonance(format!(
            "m·a_bg·δμ·ΔB = {denom} leaves the width radius undefined"
        )));
    }
    Ok(res.units.hbar * res.units.hbar / denom)
}

/// R_vdW = (μ C6 / ħ²)^{1/4} with μ = m/2 (identical atoms).
pub fn vdw_length(res: &ResonanceData) -> Result<f64> {
    if !(res.c6 > 0.0) || !(res.mass > 0.0) {
        return Err(Error::InvalidInput("C6 and mass must be positive".into()));
    }
    let mu = 0.5 * res.mass;
    Ok((mu * res.c6 / (res.units.hbar * res.units.hbar)).powf(0.25))
}

/// Narrow iff |R*| / R_vdW > `threshold` (strict).
pub fn classify_resonance(res: &ResonanceData, threshold: f64) -> ResonanceClass {
    let ratio = match (width_radius(res), vdw_length(res)) {
        (Ok(rstar), Ok(rvdw)) => rstar.abs() / rvdw,
        // an undefined width radius means an infinitely narrow resonance
        (Err(_), _) => f64::INFINITY,
        (Ok(_), Err(_)) => 0.0,
    };
    if ratio > threshold {
        ResonanceClass::Narrow
    } else {
        ResonanceClass::Broad
    }
}
