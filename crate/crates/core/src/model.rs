use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Constants of the competition system.
///
/// `b` is the competition coefficient acting on `v` (the pressure `u` puts on
/// the native species); `k` is the one acting on `u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    pub d1: f64,
    pub d2: f64,
    pub k: f64,
    pub b: f64,
    pub gamma: f64,
    pub mu: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            d1: 1.0,
            d2: 1.0,
            k: 0.5,
            b: 0.5,
            gamma: 1.0,
            mu: 1.0,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("d1", self.d1),
            ("d2", self.d2),
            ("k", self.k),
            ("b", self.b),
            ("gamma", self.gamma),
            ("mu", self.mu),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidInput(format!("{name} must be positive")));
            }
        }
        Ok(())
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    /// Limiting center densities for a spreading run with `k < 1`:
    /// coexistence when `b < 1`, competitive exclusion of `v` otherwise.
    pub fn spreading_limits(&self) -> Option<(f64, f64)> {
        if self.k >= 1.0 {
            return None;
        }
        if self.b >= 1.0 {
            Some((1.0, 0.0))
        } else {
            let den = 1.0 - self.b * self.k;
            Some(((1.0 - self.k) / den, (1.0 - self.b) / den))
        }
    }
}
