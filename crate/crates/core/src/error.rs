//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QkrError {
    /// Bad user input: rejected before any computation starts.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Norm drifted past the abort threshold during propagation.
    #[error("norm guard tripped at kick {step}: |norm^2 - 1| = {drift:.3e}")]
    NormDrift { step: usize, drift: f64 },

    /// Operation requires a simple-resonance Planck constant (2*pi*ell).
    #[error("hbar_eff = {hbar} is not 2*pi*{ell} within tolerance")]
    NonResonantHbar { hbar: f64, ell: u32 },

    /// Beta-averaged runs must share one spatial envelope.
    #[error("beta-average states do not share a common spatial envelope")]
    MismatchedEnvelope,
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, QkrError>;

impl QkrError {
    /// True for failures of runtime numerical guards (as opposed to input
    /// validation); callers map these onto a distinct exit code.
    pub fn is_numerical_guard(&self) -> bool {
        matches!(self, QkrError::NormDrift { .. })
    }
}
