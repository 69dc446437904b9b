//! Exact one-period Floquet evolution: free flight then kick.
//!
//! The state label `t` means "just after the t-th kick". Free flight over a
//! fraction `tau` of the period multiplies ladder mode `m` by
//! `exp(-i hbar (m + beta)^2 tau / 2)`; the kick multiplies the position
//! samples by `exp(-i kappa cos X)`.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{QkrError, Result};
use crate::params::KickedRotorParams;
use crate::series::ObservableSeries;
use crate::state::{grid_points, to_momentum, to_position, BlochWaveState};

/// Modes this close to the grid edge count as aliasing-endangered.
pub const EDGE_MARGIN: usize = 4;
/// Edge occupancy above this triggers the aliasing warning.
pub const ALIASING_THRESHOLD: f64 = 1e-10;
/// Norm-squared drift beyond this aborts an evolution.
pub const NORM_GUARD: f64 = 1e-8;

/// Free-flight phase multipliers for every ladder mode, in ascending-m order.
///
/// The phase is `2 pi * frac(r (m + beta)^2 tau)` with `r = hbar / (4 pi)`.
/// For the resonant values hbar = pi, 2 pi, 4 pi, ... built from dyadic
/// multiples of pi, `r` and the reduced fraction are exact in f64, so the
/// Talbot revival is exact instead of drowning in argument-reduction error.
fn free_multipliers(n: usize, beta: f64, hbar: f64, tau: f64) -> Vec<Complex64> {
    let r = hbar / (4.0 * PI);
    let half = (n / 2) as i64;
    (0..n)
        .map(|i| {
            let m = i as i64 - half;
            let b = m as f64 + beta;
            let u = r * b * b * tau;
            Complex64::from_polar(1.0, -2.0 * PI * (u - u.round()))
        })
        .collect()
}

fn kick_multipliers(n: usize, kappa: f64) -> Vec<Complex64> {
    grid_points(n).map(|x| Complex64::from_polar(1.0, -kappa * x.cos())).collect()
}

fn warn_on_aliasing(state: &BlochWaveState) {
    let occ = to_momentum(state).edge_occupancy(EDGE_MARGIN);
    if occ > ALIASING_THRESHOLD {
        log::warn!(
            "ladder occupancy {occ:.3e} within {EDGE_MARGIN} modes of the grid edge; \
             enlarge n_grid"
        );
    }
}

/// Free flight over the fraction `tau` of one period (`0 < tau <= 1`).
pub fn free_evolve(state: &BlochWaveState, params: &KickedRotorParams, tau: f64) -> BlochWaveState {
    debug_assert!(tau > 0.0 && tau <= 1.0, "tau must lie in (0, 1]");
    let mut ladder = to_momentum(state);
    let mult = free_multipliers(state.n_grid(), state.beta(), params.hbar_eff, tau);
    for (c, m) in ladder.coefficients_mut().iter_mut().zip(&mult) {
        *c *= m;
    }
    let mut out = to_position(&ladder);
    out.set_drift_offset(state.drift_offset());
    out
}

/// Instantaneous kick `psi(X) *= exp(-i kappa cos X)`; beta is untouched.
pub fn kick(state: &BlochWaveState, params: &KickedRotorParams) -> BlochWaveState {
    warn_on_aliasing(state);
    let mult = kick_multipliers(state.n_grid(), params.kappa());
    let samples = state.samples().iter().zip(&mult).map(|(s, m)| s * m).collect();
    let mut out = state.clone();
    out.replace_samples(samples);
    out
}

/// One full Floquet period: free flight, then kick.
pub fn floquet_step(state: &BlochWaveState, params: &KickedRotorParams) -> BlochWaveState {
    kick(&free_evolve(state, params, 1.0), params)
}

/// Evolves `t_kicks` periods, recording `<P>`, `<E>` and the norm after every
/// kick (plus the initial entry at t = 0) when `record` is set. Aborts if the
/// norm drifts past [`NORM_GUARD`].
pub fn evolve(
    state: &BlochWaveState,
    params: &KickedRotorParams,
    t_kicks: usize,
    record: bool,
) -> Result<(BlochWaveState, ObservableSeries)> {
    let n = state.n_grid();
    let beta = state.beta();
    let hbar = params.hbar_eff;
    let free = free_multipliers(n, beta, hbar, 1.0);
    let kickm = kick_multipliers(n, params.kappa());
    let half = (n / 2) as i64;

    let mut series = ObservableSeries::with_capacity(if record { t_kicks + 1 } else { 0 });
    let mut ladder = to_momentum(state);
    let mut aliasing_reported = false;

    let mut record_entry = |t: usize,
                            ladder: &crate::state::MomentumLadder,
                            series: &mut ObservableSeries,
                            reported: &mut bool|
     -> Result<()> {
        let norm = ladder.norm_sq();
        if (norm - 1.0).abs() > NORM_GUARD {
            return Err(QkrError::NormDrift { step: t, drift: (norm - 1.0).abs() });
        }
        if !*reported && ladder.edge_occupancy(EDGE_MARGIN) > ALIASING_THRESHOLD {
            log::warn!("aliasing guard: edge occupancy exceeded at kick {t}; enlarge n_grid");
            *reported = true;
        }
        if record {
            let mut p = 0.0;
            let mut e = 0.0;
            for (m, c) in ladder.modes() {
                let q = m as f64 + beta;
                let w = c.norm_sqr();
                p += q * w;
                e += q * q * w;
            }
            series.push(t as u64, hbar * p, 0.5 * hbar * hbar * e, norm);
        }
        Ok(())
    };

    record_entry(0, &ladder, &mut series, &mut aliasing_reported)?;
    for t in 1..=t_kicks {
        for (c, m) in ladder.coefficients_mut().iter_mut().zip(&free) {
            *c *= m;
        }
        let mut pos = to_position(&ladder);
        let samples: Vec<Complex64> =
            pos.samples().iter().zip(&kickm).map(|(s, m)| s * m).collect();
        pos.replace_samples(samples);
        ladder = to_momentum(&pos);
        // Re-centered on integer modes by construction: quasimomentum is a
        // constant of motion, beta never changes.
        debug_assert_eq!(ladder.beta(), beta);
        record_entry(t, &ladder, &mut series, &mut aliasing_reported)?;
    }

    let mut fin = to_position(&ladder);
    fin.set_drift_offset(state.drift_offset());
    Ok((fin, series))
}
