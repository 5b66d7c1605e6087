use thiserror::Error;

/// Errors raised by the scattering, bound-state and two-channel routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("magnetic field sits on the resonance position B0 = {b0}; scattering length diverges")]
    PoleAtResonance { b0: f64 },

    #[error("degenerate resonance: {0}")]
    DegenerateResonance(String),

    #[error("amplitude diverges at k = 0 (g(0) = 0, zero-energy resonance)")]
    DivergentAmplitude,

    #[error("state kinds do not match the operation: {0}")]
    KindMismatch(String),

    #[error("singular linear system: {0}")]
    SingularSystem(String),

    #[error("energy {energy} sits on a pole of the two-channel amplitude")]
    PoleHit { energy: f64 },

    #[error(
        "closed-form and fitted low-energy parameters disagree: {quantity} closed = {closed}, fit = {fit}"
    )]
    InconsistentExpansion {
        quantity: &'static str,
        closed: f64,
        fit: f64,
    },

    #[error("no bound state: {0}")]
    NoBoundState(String),

    #[error("quadrature did not converge: estimate {value} with error {error} after {evaluations} evaluations")]
    QuadratureFailure {
        value: f64,
        error: f64,
        evaluations: usize,
    },

    #[error("root refinement failed: {0}")]
    RootFailure(String),

    #[error("two-channel states were built with different parameters: {0}")]
    ParameterMismatch(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: u64,
        column: usize,
        message: String,
    },

    #[error("unit error: {0}")]
    Unit(String),
}

impl Error {
    /// True for failures of a numerical procedure, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::QuadratureFailure { .. }
                | Error::RootFailure(_)
                | Error::InconsistentExpansion { .. }
                | Error::NoBoundState(_)
                | Error::PoleHit { .. }
                | Error::DivergentAmplitude
                | Error::SingularSystem(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
