use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The six real couplings of the two-mode Hamiltonian.
///
/// The canonical JSON form is an object with exactly the keys
/// `alpha11`, `alpha22`, `alpha12`, `beta11`, `beta22`, `beta12`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParameters {
    pub alpha11: f64,
    pub alpha22: f64,
    pub alpha12: f64,
    pub beta11: f64,
    pub beta22: f64,
    pub beta12: f64,
}

impl ModelParameters {
    pub fn new(
        alpha11: f64,
        alpha22: f64,
        alpha12: f64,
        beta11: f64,
        beta22: f64,
        beta12: f64,
    ) -> Result<Self> {
        let p = Self {
            alpha11,
            alpha22,
            alpha12,
            beta11,
            beta22,
            beta12,
        };
        p.validate()?;
        Ok(p)
    }

    /// Two independent oscillators with frequencies `alpha11`, `alpha22`.
    pub fn decoupled(alpha11: f64, alpha22: f64) -> Result<Self> {
        Self::new(alpha11, alpha22, 0.0, 0.0, 0.0, 0.0)
    }

    pub fn named(&self) -> [(&'static str, f64); 6] {
        [
            ("alpha11", self.alpha11),
            ("alpha22", self.alpha22),
            ("alpha12", self.alpha12),
            ("beta11", self.beta11),
            ("beta22", self.beta22),
            ("beta12", self.beta12),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in self.named() {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite",
                });
            }
        }
        for (name, value) in [("alpha11", self.alpha11), ("alpha22", self.alpha22)] {
            if value <= 0.0 {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "diagonal frequencies must be positive",
                });
            }
        }
        Ok(())
    }

    /// True when every coupling vanishes and `H` is Hermitian.
    pub fn is_decoupled(&self) -> bool {
        self.alpha12 == 0.0 && self.beta11 == 0.0 && self.beta22 == 0.0 && self.beta12 == 0.0
    }

    /// Largest absolute coupling (α12 or any β).
    pub fn max_coupling(&self) -> f64 {
        [self.alpha12, self.beta11, self.beta22, self.beta12]
            .iter()
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}
