//! Contact-interaction models of two-body scattering: energy-dependent
//! phase-shift models, their bound states and modified scalar product, and a
//! two-channel model with a Gaussian form factor whose zero-width limit
//! reproduces them.
//!
//! Unless a function takes a [`units::UnitSystem`], quantities are in natural
//! units with ħ = 1 and particle mass m = 1, so the relative energy is `E = k²`.

pub mod bound_states;
pub mod error;
pub mod inner_product;
pub mod numerics;
pub mod phase_shift;
pub mod scattering;
pub mod species;
pub mod two_channel;
pub mod units;
pub mod verify;

pub use error::{Error, Result};
pub use phase_shift::PhaseShiftModel;

pub const HBAR: f64 = 1.0;
pub const MASS: f64 = 1.0;
/// μ = m/2 for two identical particles.
pub const REDUCED_MASS: f64 = 0.5;
