//! Closed-form dynamics at the simple resonances `hbar_eff = 2 pi ell`.
//!
//! Between kicks the density only drifts by `v = 2 pi ell (beta + 1/2)`, so
//! the kick phases accumulate in closed form. Rational `v / 2 pi = p/q`
//! separates the resonant (q = 1, ballistic), antiresonant (q > 1, periodic)
//! and drifting (irrational) regimes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{QkrError, Result};
use crate::params::KickedRotorParams;
use crate::series::ObservableSeries;
use crate::state::{
    grid_points, grid_step, kinetic_energy, mean_momentum, probability_current, translate,
    BlochWaveState,
};

/// Largest denominator the rational-velocity detector will accept.
pub const MAX_DENOMINATOR: u64 = 64;
/// Tolerance for declaring `v / 2 pi` rational.
pub const RATIONAL_TOL: f64 = 1e-12;
/// Below this, `sin(v/2)` is treated as zero and Dirichlet sums fall back to
/// direct term summation.
pub const DIRICHLET_EPS: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SqrClass {
    /// `v = 0 mod 2 pi`: every kick hits the same phase; ballistic.
    Resonant,
    /// `v = 2 pi p / q`, `q > 1`: kicks cancel over `q` periods.
    AntiResonant { period: u64 },
    /// No small rational within tolerance: kicks average to zero, the packet
    /// just drifts.
    Drifting,
}

/// Simple-resonance regime descriptor for `hbar_eff = 2 pi ell`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqrRegime {
    pub ell: u32,
    pub beta: f64,
    pub v: f64,
    pub classification: SqrClass,
}

/// `v = 2 pi ell (beta + 1/2)`.
pub fn drift_velocity(ell: u32, beta: f64) -> f64 {
    2.0 * PI * f64::from(ell) * (beta + 0.5)
}

/// Best rational approximation `p/q` of `x` with `q <= max_q`, by continued
/// fractions; `None` when no convergent lands within `tol`.
fn rational_approx(x: f64, max_q: u64, tol: f64) -> Option<(i64, u64)> {
    let mut a = x.floor();
    let mut frac = x - a;
    // Convergent recurrence: p_k = a_k p_{k-1} + p_{k-2}.
    let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0u64, a as i64, 1u64);
    for _ in 0..64 {
        if (x - p1 as f64 / q1 as f64).abs() <= tol {
            return Some((p1, q1));
        }
        if frac.abs() < f64::EPSILON {
            break;
        }
        let inv = 1.0 / frac;
        a = inv.floor();
        frac = inv - a;
        let p2 = a as i64 * p1 + p0;
        let q2 = a as u64 * q1 + q0;
        if q2 > max_q {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    ((x - p1 as f64 / q1 as f64).abs() <= tol && q1 <= max_q).then_some((p1, q1))
}

impl SqrRegime {
    pub fn new(ell: u32, beta: f64) -> Result<Self> {
        if ell == 0 {
            return Err(QkrError::InvalidInput("ell must be >= 1".into()));
        }
        let v = drift_velocity(ell, beta);
        let classification = match rational_approx(v / (2.0 * PI), MAX_DENOMINATOR, RATIONAL_TOL)
        {
            Some((_, 1)) => SqrClass::Resonant,
            Some((_, q)) => SqrClass::AntiResonant { period: q },
            None => SqrClass::Drifting,
        };
        Ok(Self { ell, beta, v, classification })
    }

    pub fn hbar_eff(&self) -> f64 {
        2.0 * PI * f64::from(self.ell)
    }

    /// Recurrence time for antiresonances, 1 for exact resonance.
    pub fn recurrence_time(&self) -> Option<u64> {
        match self.classification {
            SqrClass::Resonant => Some(1),
            SqrClass::AntiResonant { period } => Some(period),
            SqrClass::Drifting => None,
        }
    }
}

/// Accumulated kick phase `Phi(X, t) = sum_{s=0}^{t-1} cos(X - v s)`,
/// evaluated with the Dirichlet-kernel closed form away from `sin(v/2) = 0`.
pub fn accumulated_phase(xs: &[f64], v: f64, t: u64) -> Vec<f64> {
    if t == 0 {
        return vec![0.0; xs.len()];
    }
    let tf = t as f64;
    let s_half = (0.5 * v).sin();
    if s_half.abs() > DIRICHLET_EPS {
        let amp = (0.5 * tf * v).sin() / s_half;
        xs.iter().map(|&x| amp * (x - 0.5 * v * (tf - 1.0)).cos()).collect()
    } else {
        xs.iter()
            .map(|&x| (0..t).map(|s| (x - v * s as f64).cos()).sum::<f64>())
            .collect()
    }
}

/// State after `t` kicks from the closed-form recurrence: spectral drift by
/// `v t`, accumulated kick phase, and the per-kick global phase
/// `exp(i hbar beta (beta + 1) / 2)` kept so the result matches the
/// propagator exactly, not just up to phase.
pub fn closed_form_state(
    psi0: &BlochWaveState,
    params: &KickedRotorParams,
    regime: &SqrRegime,
    t: u64,
) -> Result<BlochWaveState> {
    params.require_sqr(regime.ell)?;
    if t == 0 {
        return Ok(psi0.clone());
    }
    let v = regime.v;
    let mut out = translate(psi0, v * t as f64);
    let xs: Vec<f64> = grid_points(psi0.n_grid()).collect();
    let phi = accumulated_phase(&xs, v, t);
    let hbar = params.hbar_eff;
    let global =
        Complex64::from_polar(1.0, t as f64 * 0.5 * hbar * regime.beta * (regime.beta + 1.0));
    let kappa = params.kappa();
    let samples = out
        .samples()
        .iter()
        .zip(&phi)
        .map(|(s, &p)| s * global * Complex64::from_polar(1.0, -kappa * p))
        .collect();
    out.replace_samples(samples);
    out.set_drift_offset(psi0.drift_offset() + v * t as f64);
    Ok(out)
}

/// `integral of e^{iX} |psi|^2 dX`; its imaginary part is `<sin X>`.
fn first_harmonic(psi0: &BlochWaveState) -> Complex64 {
    let dx = grid_step(psi0.n_grid());
    grid_points(psi0.n_grid())
        .zip(psi0.samples())
        .map(|(x, c)| Complex64::from_polar(c.norm_sqr() * dx, x))
        .sum()
}

/// Ballistic rate at exact resonance: `D = K <sin X>_0`.
pub fn resonant_slope(psi0: &BlochWaveState, k: f64) -> f64 {
    k * first_harmonic(psi0).im
}

/// Momentum series from the closed form: interference factor
/// `sin(t v / 2) / sin(v / 2)` in general, the `D t` limit at resonance.
pub fn momentum_series_sqr(
    psi0: &BlochWaveState,
    params: &KickedRotorParams,
    regime: &SqrRegime,
    t_max: u64,
) -> Result<ObservableSeries> {
    params.require_sqr(regime.ell)?;
    let p0 = mean_momentum(psi0, params);
    let e0 = kinetic_energy(psi0, params);
    let k = params.k;
    let v = regime.v;
    let c1 = first_harmonic(psi0);
    let s_half = (0.5 * v).sin();
    let mut series = ObservableSeries::with_capacity(t_max as usize + 1);
    for t in 0..=t_max {
        let tf = t as f64;
        let gain = if s_half.abs() > DIRICHLET_EPS {
            let kernel = (0.5 * tf * v).sin() / s_half;
            kernel * (Complex64::from_polar(1.0, 0.5 * (tf + 1.0) * v) * c1).im
        } else {
            // v = 0 mod 2 pi: the 0/0 limit is the linear resonant growth.
            tf * c1.im
        };
        series.push(t, p0 + k * gain, e0, 1.0);
    }
    // e_mean here mirrors the initial energy; energy_series_sqr owns the full
    // energy evolution.
    Ok(series)
}

/// Kinetic-energy series from the closed form. The Dirichlet sum
/// `S_t(X) = sum_{n=1}^{t} sin(X + n v)` enters squared against the density
/// and linearly against the initial current.
pub fn energy_series_sqr(
    psi0: &BlochWaveState,
    params: &KickedRotorParams,
    regime: &SqrRegime,
    t_max: u64,
) -> Result<ObservableSeries> {
    params.require_sqr(regime.ell)?;
    let e0 = kinetic_energy(psi0, params);
    let p0 = mean_momentum(psi0, params);
    let k = params.k;
    let v = regime.v;
    let n = psi0.n_grid();
    let dx = grid_step(n);
    let density = psi0.density();
    let current = probability_current(psi0, params);
    let xs: Vec<f64> = grid_points(n).collect();
    let s_half = (0.5 * v).sin();

    let mut series = ObservableSeries::with_capacity(t_max as usize + 1);
    for t in 0..=t_max {
        let tf = t as f64;
        let st: Vec<f64> = if t == 0 {
            vec![0.0; n]
        } else if s_half.abs() > DIRICHLET_EPS {
            let amp = (0.5 * tf * v).sin() / s_half;
            xs.iter().map(|&x| amp * (x + 0.5 * (tf + 1.0) * v).sin()).collect()
        } else {
            xs.iter().map(|&x| tf * x.sin()).collect()
        };
        let quad: f64 =
            st.iter().zip(&density).map(|(s, d)| s * s * d).sum::<f64>() * dx;
        let cross: f64 = st.iter().zip(&current).map(|(s, j)| s * j).sum::<f64>() * dx;
        series.push(t, p0, e0 + 0.5 * k * k * quad + k * cross, 1.0);
    }
    Ok(series)
}

/// Mean-value map for a point-localized packet: `X_t = X0 + v t`,
/// `P_t = P0 + K sum_{n=1}^{t} sin(X0 + n v)`.
pub fn mean_value_map(x0: f64, p0: f64, k: f64, v: f64, t: u64) -> (f64, f64) {
    let tf = t as f64;
    let x_t = x0 + v * tf;
    let s_half = (0.5 * v).sin();
    let sum = if t == 0 {
        0.0
    } else if s_half.abs() > DIRICHLET_EPS {
        (0.5 * tf * v).sin() / s_half * (x0 + 0.5 * (tf + 1.0) * v).sin()
    } else {
        tf * x0.sin()
    };
    (x_t, p0 + k * sum)
}
