//! Shared run parameters.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamsError {
    #[error("n_sites must be at least 2, got {0}")]
    TooFewSites(usize),
    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },
    #[error("{name} must be nonnegative, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("z_max must be positive, got {0}")]
    NonPositiveRange(f64),
    #[error("step must satisfy 0 < step <= z_max, got step={step} z_max={z_max}")]
    BadStep { step: f64, z_max: f64 },
}

/// Normalized model and integration parameters.
///
/// `quantum_scale` is `L = U v / kappa`; it measures the inverse photon
/// number per unit of normalized amplitude. `L = 0` selects the classical
/// limit in which fluctuations are carried in rescaled form (see
/// [`crate::moments::MomentState`]).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub n_sites: usize,
    pub omega: f64,
    pub quantum_scale: f64,
    pub absorption: f64,
    pub z_max: f64,
    pub step: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            n_sites: 25,
            omega: 10.0,
            quantum_scale: 0.01,
            absorption: 0.0,
            z_max: 1.5,
            step: 1e-4,
        }
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<(), ParamsError> {
        if self.n_sites < 2 {
            return Err(ParamsError::TooFewSites(self.n_sites));
        }
        for (name, value) in [
            ("omega", self.omega),
            ("quantum_scale", self.quantum_scale),
            ("absorption", self.absorption),
            ("z_max", self.z_max),
            ("step", self.step),
        ] {
            if !value.is_finite() {
                return Err(ParamsError::NonFinite { name, value });
            }
        }
        if self.quantum_scale < 0.0 {
            return Err(ParamsError::Negative { name: "quantum_scale", value: self.quantum_scale });
        }
        if self.absorption < 0.0 {
            return Err(ParamsError::Negative { name: "absorption", value: self.absorption });
        }
        if self.z_max <= 0.0 {
            return Err(ParamsError::NonPositiveRange(self.z_max));
        }
        if self.step <= 0.0 || self.step > self.z_max {
            return Err(ParamsError::BadStep { step: self.step, z_max: self.z_max });
        }
        Ok(())
    }

    /// Number of fixed steps needed to reach `z_max` (the last step lands on it).
    pub fn n_steps(&self) -> usize {
        (self.z_max / self.step - 1e-9).ceil().max(1.0) as usize
    }

    pub fn with_scale(mut self, quantum_scale: f64) -> Self {
        self.quantum_scale = quantum_scale;
        self
    }

    pub fn with_absorption(mut self, absorption: f64) -> Self {
        self.absorption = absorption;
        self
    }

    pub fn with_range(mut self, z_max: f64, step: f64) -> Self {
        self.z_max = z_max;
        self.step = step;
        self
    }
}
