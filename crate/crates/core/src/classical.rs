//! Chirikov standard map: the classical baseline for the kicked rotor.

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{QkrError, Result};
use crate::series::ObservableSeries;

/// Unfolded position and momentum of one classical particle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalState {
    pub x: f64,
    pub p: f64,
}

impl ClassicalState {
    pub fn new(x: f64, p: f64) -> Self {
        Self { x, p }
    }
}

/// One step of the standard map: `X' = X + P`, `P' = P + K sin X'`.
/// X stays unfolded; reduction happens only inside `sin`.
pub fn standard_map_step(s: ClassicalState, k: f64) -> ClassicalState {
    let x = s.x + s.p;
    let p = s.p + k * x.sin();
    ClassicalState { x, p }
}

/// Iterates the map `t` times from `s0`, returning every visited state
/// including the start.
pub fn standard_map_orbit(s0: ClassicalState, k: f64, t: usize) -> Vec<ClassicalState> {
    let mut orbit = Vec::with_capacity(t + 1);
    orbit.push(s0);
    let mut s = s0;
    for _ in 0..t {
        s = standard_map_step(s, k);
        orbit.push(s);
    }
    orbit
}

// Particles are summed in fixed-size blocks so the reduction order (and thus
// the f64 result) does not depend on the number of worker threads.
const ENSEMBLE_BLOCK: usize = 1024;

/// Ensemble-averaged `<P^2/2>` (and `<P>`) per step for `n_particles` drawn
/// uniformly from `[-pi, pi)^2`. Deterministic for a fixed seed, independent
/// of thread count: each particle owns a counter-mode RNG stream.
pub fn ensemble_energy_series(
    n_particles: usize,
    k: f64,
    t_max: usize,
    seed: u64,
) -> Result<ObservableSeries> {
    if n_particles < 1000 {
        return Err(QkrError::InvalidInput(format!(
            "ensemble needs at least 1000 particles, got {n_particles}"
        )));
    }
    let n_blocks = n_particles.div_ceil(ENSEMBLE_BLOCK);
    let partials: Vec<(Vec<f64>, Vec<f64>)> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let lo = b * ENSEMBLE_BLOCK;
            let hi = ((b + 1) * ENSEMBLE_BLOCK).min(n_particles);
            let mut e_sum = vec![0.0; t_max + 1];
            let mut p_sum = vec![0.0; t_max + 1];
            let dist = Uniform::new(-PI, PI);
            for i in lo..hi {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                let mut s = ClassicalState::new(dist.sample(&mut rng), dist.sample(&mut rng));
                e_sum[0] += 0.5 * s.p * s.p;
                p_sum[0] += s.p;
                for t in 1..=t_max {
                    s = standard_map_step(s, k);
                    e_sum[t] += 0.5 * s.p * s.p;
                    p_sum[t] += s.p;
                }
            }
            (e_sum, p_sum)
        })
        .collect();

    let inv = 1.0 / n_particles as f64;
    let mut series = ObservableSeries::with_capacity(t_max + 1);
    for t in 0..=t_max {
        let e: f64 = partials.iter().map(|(es, _)| es[t]).sum();
        let p: f64 = partials.iter().map(|(_, ps)| ps[t]).sum();
        series.push(t as u64, p * inv, e * inv, 1.0);
    }
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fit::linear_fit;

    #[test]
    fn resonant_orbit_is_ballistic() {
        // K = 2 pi from (pi/2, 0): P_t = 2 pi t, X_t = 2 pi (t^2 - t) + pi/2.
        let k = 2.0 * PI;
        let orbit = standard_map_orbit(ClassicalState::new(PI / 2.0, 0.0), k, 100);
        for (t, s) in orbit.iter().enumerate() {
            let t = t as f64;
            let p_expect = 2.0 * PI * t;
            let x_expect = 2.0 * PI * (t * t - t) + PI / 2.0;
            assert!((s.p - p_expect).abs() <= 1e-12 * p_expect.max(1.0), "t={t}: P {}", s.p);
            assert!((s.x - x_expect).abs() <= 1e-12 * x_expect.max(1.0), "t={t}: X {}", s.x);
        }
    }

    #[test]
    fn resonant_orbit_sin_is_exactly_one() {
        // The orbit is kicked at the same phase every step; sin X_t lands so
        // close to the flat maximum that it rounds to exactly 1.0.
        let k = 2.0 * PI;
        let mut s = ClassicalState::new(PI / 2.0, 0.0);
        for _ in 0..1000 {
            s = standard_map_step(s, k);
            assert_eq!((s.x).sin(), 1.0);
        }
    }

    #[test]
    fn antiresonant_orbit_alternates() {
        let k = 3.0 * PI / 2.0;
        let orbit = standard_map_orbit(ClassicalState::new(PI / 2.0, 0.0), k, 50);
        for (t, s) in orbit.iter().enumerate() {
            let expect = if t % 2 == 0 { 0.0 } else { k };
            assert!((s.p - expect).abs() < 1e-9, "t={t}: P={}", s.p);
        }
    }

    #[test]
    fn free_motion_at_zero_kick() {
        let orbit = standard_map_orbit(ClassicalState::new(0.3, 0.7), 0.0, 10);
        for (t, s) in orbit.iter().enumerate() {
            assert_eq!(s.p, 0.7);
            assert!((s.x - (0.3 + 0.7 * t as f64)).abs() < 1e-12);
        }
    }

    #[test]
    fn map_is_area_preserving() {
        // Jacobian determinant of one step by central finite differences.
        let k = 3.7;
        let s = ClassicalState::new(0.9, -1.3);
        let h = 1e-6;
        let f = |x: f64, p: f64| standard_map_step(ClassicalState::new(x, p), k);
        let dxx = (f(s.x + h, s.p).x - f(s.x - h, s.p).x) / (2.0 * h);
        let dxp = (f(s.x, s.p + h).x - f(s.x, s.p - h).x) / (2.0 * h);
        let dpx = (f(s.x + h, s.p).p - f(s.x - h, s.p).p) / (2.0 * h);
        let dpp = (f(s.x, s.p + h).p - f(s.x, s.p - h).p) / (2.0 * h);
        let det = dxx * dpp - dxp * dpx;
        assert!((det - 1.0).abs() < 1e-8, "det = {det}");
    }

    #[test]
    fn ensemble_is_deterministic_and_flat_for_zero_kick() {
        let a = ensemble_energy_series(1000, 0.0, 20, 42).unwrap();
        let b = ensemble_energy_series(1000, 0.0, 20, 42).unwrap();
        assert_eq!(a, b);
        for &e in &a.e_mean {
            assert_eq!(e, a.e_mean[0]);
        }
    }

    #[test]
    fn ensemble_rejects_tiny_populations() {
        assert!(ensemble_energy_series(10, 1.0, 5, 1).is_err());
    }

    #[test]
    fn subcritical_kick_keeps_energy_bounded() {
        // K = 0.5 < K_c: invariant curves confine the motion.
        let series = ensemble_energy_series(2000, 0.5, 300, 7).unwrap();
        let e0 = series.e_mean[0];
        for &e in &series.e_mean {
            assert!(e < e0 + 1.0, "energy should stay bounded, got {e} from {e0}");
        }
    }

    #[test]
    fn chaotic_kick_diffuses() {
        // Coarse check that K = 10 diffuses on the K^2 scale; the acceptance
        // suite pins the slope against an independent oracle.
        let k = 10.0;
        let series = ensemble_energy_series(20_000, k, 100, 11).unwrap();
        let (_, slope) = linear_fit(&series.times_f64(), &series.e_mean);
        assert!(slope > k * k / 16.0 && slope < k * k, "slope = {slope}");
    }
}
