//! One-channel contact models defined by `g(E) = k cot δ(k)`, stored as a
//! polynomial in the relative energy `E = k²` (natural units).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{HBAR, MASS, REDUCED_MASS};

/// `g(E) = Σ c_n Eⁿ`. Trailing zero coefficients are dropped, so the degree is
/// canonical; the zero polynomial is stored as `[0.0]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseShiftModel {
    coeffs: Vec<f64>,
}

impl PhaseShiftModel {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("model coefficients must be finite".into()));
        }
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Ok(Self { coeffs })
    }

    /// `g(E) = −1/a − R* k²`, i.e. `c0 = −1/a`, `c1 = −R* m/ħ²`.
    pub fn from_effective_range(a: f64, rstar: f64) -> Result<Self> {
        if a == 0.0 || !a.is_finite() || !rstar.is_finite() {
            return Err(Error::InvalidInput(format!("effective-range model needs a finite a ≠ 0, got a = {a}")));
        }
        Self::new(vec![-1.0 / a, -rstar * MASS / (HBAR * HBAR)])
    }

    /// Zero-range model with a constant `g = −1/a`.
    pub fn wbp(a: f64) -> Result<Self> {
        Self::from_effective_range(a, 0.0)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Horner evaluation of g(E).
    pub fn g(&self, energy: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * energy + c)
    }

    /// g′(E), exact.
    pub fn g_prime(&self, energy: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (n, &c)| acc * energy + n as f64 * c)
    }

    /// k-th derivative of g at `energy`.
    pub fn derivative(&self, order: usize, energy: f64) -> f64 {
        let mut acc = 0.0;
        for (n, &c) in self.coeffs.iter().enumerate().skip(order).rev() {
            let falling: f64 = (0..order).map(|i| (n - i) as f64).product();
            acc = acc * energy + falling * c;
        }
        acc
    }

    /// a = −1/c0.
    pub fn scattering_length(&self) -> Result<f64> {
        let c0 = self.coeffs[0];
        if c0 == 0.0 {
            return Err(Error::InvalidInput("c0 = 0: the scattering length is infinite".into()));
        }
        Ok(-1.0 / c0)
    }

    /// R* = −c1 ħ²/m.
    pub fn rstar(&self) -> f64 {
        -self.coeffs.get(1).copied().unwrap_or(0.0) * HBAR * HBAR / MASS
    }

    /// Effective range r_e from `k cot δ = −1/a + r_e k²/2`; equals −2R*.
    pub fn effective_range(&self) -> f64 {
        -2.0 * self.rstar()
    }

    /// ħ²/(μ r_e²): energies well below this are inside the model's intended
    /// window. Infinite when r_e = 0.
    pub fn validity_scale(&self) -> f64 {
        let re = self.effective_range();
        if re == 0.0 {
            f64::INFINITY
        } else {
            HBAR * HBAR / (REDUCED_MASS * re * re)
        }
    }
}

impl fmt::Display for PhaseShiftModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g = [")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c:e}")?;
        }
        write!(f, "]")
    }
}

/// Parses `g = [c0, c1, ...]` or `a=<val> rstar=<val>`.
impl FromStr for PhaseShiftModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |msg: String| Error::Parse { line: 1, column: 0, message: msg };
        if let Some(rest) = s.strip_prefix('g') {
            let rest = rest.trim_start();
            let rest = rest.strip_prefix('=').ok_or_else(|| bad("expected '=' after 'g'".into()))?;
            let body = rest
                .trim()
                .strip_prefix('[')
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(|| bad("expected a bracketed coefficient list".into()))?;
            let coeffs = body
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|e| bad(format!("bad coefficient '{}': {e}", t.trim()))))
                .collect::<Result<Vec<_>>>()?;
            return Self::new(coeffs);
        }
        let mut a = None;
        let mut rstar = None;
        for token in s.split_whitespace() {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got '{token}'")))?;
            let value: f64 = value.parse().map_err(|e| bad(format!("bad value for {key}: {e}")))?;
            match key {
                "a" => a = Some(value),
                "rstar" => rstar = Some(value),
                other => return Err(bad(format!("unknown key '{other}'"))),
            }
        }
        let a = a.ok_or_else(|| bad("missing a=<val>".into()))?;
        Self::from_effective_range(a, rstar.unwrap_or(0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn effective_range_coefficients() {
        assert_eq!(PhaseShiftModel::from_effective_range(1.0, 0.0).unwrap().coeffs(), &[-1.0]);
        assert_eq!(PhaseShiftModel::from_effective_range(2.0, 0.5).unwrap().coeffs(), &[-0.5, -0.5]);
        assert_eq!(PhaseShiftModel::from_effective_range(-1.0, 1.0).unwrap().coeffs(), &[1.0, -1.0]);
        assert!(PhaseShiftModel::from_effective_range(0.0, 1.0).is_err());
    }

    #[test]
    fn trailing_zeros_are_dropped() {
        let m = PhaseShiftModel::new(vec![1.0, 2.0, 0.0, 0.0]).unwrap();
        assert_eq!(m.degree(), 1);
        assert_eq!(PhaseShiftModel::new(vec![]).unwrap().coeffs(), &[0.0]);
    }

    #[test]
    fn evaluation_examples() {
        let wbp = PhaseShiftModel::wbp(1.0).unwrap();
        for e in [-3.0, 0.0, 0.5, 10.0] {
            assert_eq!(wbp.g(e), -1.0);
            assert_eq!(wbp.g_prime(e), 0.0);
        }
        let er = PhaseShiftModel::from_effective_range(2.0, 0.5).unwrap();
        assert_eq!(er.g(1.0), -1.0);
        assert_eq!(er.g_prime(3.0), -0.5);
    }

    // 40-digit reference values for c = [0.3, -1.7, 0.25, 1.9, -0.6, 0.11, -1.3] at E = 0.37.
    #[test]
    fn degree_six_reference() {
        let m = PhaseShiftModel::new(vec![0.3, -1.7, 0.25, 1.9, -0.6, 0.11, -1.3]).unwrap();
        let g = m.g(0.37);
        assert!(((g - -0.212_351_926_804_7) / g).abs() < 1e-14);
        let gp = m.g_prime(0.37);
        assert!(((gp - -0.900_017_600_96) / gp).abs() < 1e-14);
    }

    #[test]
    fn higher_derivatives_match_closed_form() {
        let m = PhaseShiftModel::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        // g'' = 6 + 24E, g''' = 24
        assert_eq!(m.derivative(2, 0.5), 18.0);
        assert_eq!(m.derivative(3, 7.0), 24.0);
        assert_eq!(m.derivative(4, 7.0), 0.0);
        assert_eq!(m.derivative(1, 0.5), m.g_prime(0.5));
    }

    #[test]
    fn parses_both_literal_forms() {
        let m: PhaseShiftModel = "g = [-1, 0.5, 2e-1]".parse().unwrap();
        assert_eq!(m.coeffs(), &[-1.0, 0.5, 0.2]);
        let m: PhaseShiftModel = "a=2 rstar=0.5".parse().unwrap();
        assert_eq!(m.coeffs(), &[-0.5, -0.5]);
        assert!("g = -1, 2".parse::<PhaseShiftModel>().is_err());
        assert!("rstar=1".parse::<PhaseShiftModel>().is_err());
    }

    #[test]
    fn validity_scale_of_effective_range_model() {
        let m = PhaseShiftModel::from_effective_range(1.0, 0.5).unwrap();
        // r_e = -1, ħ²/(μ r_e²) = 2
        assert_eq!(m.validity_scale(), 2.0);
        assert!(PhaseShiftModel::wbp(1.0).unwrap().validity_scale().is_infinite());
    }

    /// Richardson-extrapolated central difference, independent of the
    /// analytic derivative.
    fn fd_derivative(m: &PhaseShiftModel, e: f64) -> f64 {
        let d = |h: f64| (m.g(e + h) - m.g(e - h)) / (2.0 * h);
        let h = 1e-3;
        let (d1, d2, d3) = (d(h), d(h / 2.0), d(h / 4.0));
        let r1 = (4.0 * d2 - d1) / 3.0;
        let r2 = (4.0 * d3 - d2) / 3.0;
        (16.0 * r2 - r1) / 15.0
    }

    proptest! {
        #[test]
        fn derivative_matches_finite_differences(
            coeffs in proptest::collection::vec(-2.0f64..2.0, 1..8),
            e in -1.5f64..1.5,
        ) {
            let m = PhaseShiftModel::new(coeffs.clone()).unwrap();
            let scale: f64 = coeffs.iter().enumerate().map(|(n, c)| (n as f64 * c).abs() * e.abs().max(1.0).powi(n as i32)).sum::<f64>().max(1e-3);
            prop_assert!((m.g_prime(e) - fd_derivative(&m, e)).abs() <= 1e-9 * scale);
        }

        #[test]
        fn effective_range_accessors_round_trip(a in prop_oneof![-50.0f64..-0.01, 0.01f64..50.0], rstar in -10.0f64..10.0) {
            let m = PhaseShiftModel::from_effective_range(a, rstar).unwrap();
            prop_assert!((m.scattering_length().unwrap() - a).abs() <= 4.0 * f64::EPSILON * a.abs());
            prop_assert_eq!(m.rstar(), rstar);
        }
    }
}
