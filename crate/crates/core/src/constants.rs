//! Physical constants and unit conventions shared by every module.
//!
//! All four dials are independent inputs in code units; derived quantities
//! (α, the Larmor coefficient, the Compton wavelength) are always computed,
//! never stored, so ℏ-ladders are a plain loop over `hbar`.

use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConstantsError {
    #[error("constant `{name}` must be strictly positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
}

/// Rest mass m, speed of light c, squared charge e², and ℏ, in code units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub m: f64,
    pub c: f64,
    pub e2: f64,
    pub hbar: f64,
}

impl PhysicalConstants {
    pub fn new(m: f64, c: f64, e2: f64, hbar: f64) -> Result<Self, ConstantsError> {
        for (name, value) in [("m", m), ("c", c), ("e2", e2), ("hbar", hbar)] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(ConstantsError::NonPositive { name, value });
            }
        }
        Ok(Self { m, c, e2, hbar })
    }

    /// m = c = e² = ℏ = 1.
    pub fn natural_units() -> Self {
        Self {
            m: 1.0,
            c: 1.0,
            e2: 1.0,
            hbar: 1.0,
        }
    }

    /// Fine structure constant α = e²/4πℏc.
    pub fn alpha(&self) -> f64 {
        self.e2 / (4.0 * PI * self.hbar * self.c)
    }

    /// Larmor prefactor e²/6πc³, so that P = (e²/6πc³) a².
    pub fn larmor_coeff(&self) -> f64 {
        self.e2 / (6.0 * PI * self.c.powi(3))
    }

    /// Compton wavelength ℏ/mc.
    pub fn compton_wavelength(&self) -> f64 {
        self.hbar / (self.m * self.c)
    }

    /// Copy with a different ℏ (used by ℏ-ladders).
    pub fn with_hbar(&self, hbar: f64) -> Self {
        Self { hbar, ..*self }
    }
}
