//! Physical parameters of the kicked rotor.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{QkrError, Result};

/// Kick strength `K`, scaled Planck constant `hbar_eff` and the derived kick
/// phase amplitude `kappa = K / hbar_eff`.
///
/// `kappa` is always recomputed from the other two fields; deserialized
/// values are checked for consistency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KickedRotorParams {
    pub k: f64,
    pub hbar_eff: f64,
    kappa: f64,
}

impl KickedRotorParams {
    pub fn new(k: f64, hbar_eff: f64) -> Result<Self> {
        if !k.is_finite() || k < 0.0 {
            return Err(QkrError::InvalidInput(format!(
                "kick strength K must be finite and >= 0, got {k}"
            )));
        }
        if !hbar_eff.is_finite() || hbar_eff <= 0.0 {
            return Err(QkrError::InvalidInput(format!(
                "hbar_eff must be finite and > 0, got {hbar_eff}"
            )));
        }
        Ok(Self { k, hbar_eff, kappa: k / hbar_eff })
    }

    /// Build from the kick phase amplitude instead of `K`.
    pub fn from_kappa(kappa: f64, hbar_eff: f64) -> Result<Self> {
        Self::new(kappa * hbar_eff, hbar_eff)
    }

    /// Simple resonance `hbar_eff = 2*pi*ell`.
    pub fn sqr(k: f64, ell: u32) -> Result<Self> {
        if ell == 0 {
            return Err(QkrError::InvalidInput("ell must be >= 1".into()));
        }
        Self::new(k, 2.0 * PI * f64::from(ell))
    }

    /// The `hbar_eff = pi` high-order resonance.
    pub fn hqr_pi(k: f64) -> Result<Self> {
        Self::new(k, PI)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Checks `hbar_eff == 2*pi*ell` within a relative tolerance of 1e-12.
    pub fn require_sqr(&self, ell: u32) -> Result<()> {
        let target = 2.0 * PI * f64::from(ell);
        if (self.hbar_eff - target).abs() <= 1e-12 * target {
            Ok(())
        } else {
            Err(QkrError::NonResonantHbar { hbar: self.hbar_eff, ell })
        }
    }

    /// Re-derives `kappa` after deserialization; rejects stale values.
    pub fn validate(&self) -> Result<()> {
        let fresh = Self::new(self.k, self.hbar_eff)?;
        if self.kappa != fresh.kappa {
            return Err(QkrError::InvalidInput(format!(
                "kappa = {} inconsistent with K/hbar_eff = {}",
                self.kappa, fresh.kappa
            )));
        }
        Ok(())
    }
}
