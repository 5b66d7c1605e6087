//! Sweep grids.

use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    K,
    B,
    Eps,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSpec {
    pub variable: Variable,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    pub scale: Scale,
}

impl SweepSpec {
    pub fn new(variable: Variable, min: f64, max: f64, steps: usize, scale: Scale) -> Result<Self, CliError> {
        if !(min < max) || !min.is_finite() || !max.is_finite() {
            return Err(CliError::Usage(format!("sweep needs finite min < max, got {min} and {max}")));
        }
        if steps < 2 {
            return Err(CliError::Usage(format!("sweep needs at least 2 steps, got {steps}")));
        }
        if scale == Scale::Log && !(min > 0.0) {
            return Err(CliError::Usage(format!("a log sweep needs min > 0, got {min}")));
        }
        Ok(Self { variable, min, max, steps, scale })
    }

    /// The grid, with both endpoints exact.
    pub fn points(&self) -> Vec<f64> {
        let n = self.steps - 1;
        let mut out: Vec<f64> = (0..=n)
            .map(|i| {
                let t = i as f64 / n as f64;
                match self.scale {
                    Scale::Linear => self.min + (self.max - self.min) * t,
                    Scale::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * t).exp(),
                }
            })
            .collect();
        out[0] = self.min;
        out[n] = self.max;
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let lin = SweepSpec::new(Variable::K, 0.0, 1.0, 5, Scale::Linear).unwrap().points();
        assert_eq!(lin, [0.0, 0.25, 0.5, 0.75, 1.0]);
        let log = SweepSpec::new(Variable::Eps, 1e-3, 10.0, 5, Scale::Log).unwrap().points();
        assert_eq!((log[0], log[4]), (1e-3, 10.0));
        assert!((log[1] - 1e-2).abs() < 1e-15);
    }

    #[test]
    fn invalid_specs() {
        assert!(SweepSpec::new(Variable::K, 1.0, 1.0, 5, Scale::Linear).is_err());
        assert!(SweepSpec::new(Variable::K, 0.0, 1.0, 1, Scale::Linear).is_err());
        assert!(SweepSpec::new(Variable::K, 0.0, 1.0, 5, Scale::Log).is_err());
    }
}
