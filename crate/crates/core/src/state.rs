//! Bloch-wave states on a periodic grid and their momentum-ladder
//! representation.
//!
//! A quasimomentum component `psi_beta(X) = e^{i beta X} u_beta(X)` is sampled
//! on `N` uniform points `X_j = -pi + 2 pi j / N` covering one spatial period.
//! Fourier transforms act on the periodic part `u_beta`, so the ladder indices
//! stay integer and the momenta are `P = (m + beta) hbar_eff`.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{QkrError, Result};
use crate::params::KickedRotorParams;

pub const MIN_GRID: usize = 32;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft_forward(buf: &mut [Complex64]) {
    let fft: Arc<dyn rustfft::Fft<f64>> =
        PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()));
    fft.process(buf);
}

fn fft_inverse(buf: &mut [Complex64]) {
    let fft: Arc<dyn rustfft::Fft<f64>> =
        PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()));
    fft.process(buf);
    let scale = 1.0 / buf.len() as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

/// Grid points `X_j = -pi + 2 pi j / N`.
pub fn grid_points(n_grid: usize) -> impl Iterator<Item = f64> {
    let step = 2.0 * PI / n_grid as f64;
    (0..n_grid).map(move |j| -PI + step * j as f64)
}

pub fn grid_step(n_grid: usize) -> f64 {
    2.0 * PI / n_grid as f64
}

fn check_grid(n_grid: usize) -> Result<()> {
    if n_grid < MIN_GRID || !n_grid.is_power_of_two() {
        return Err(QkrError::InvalidInput(format!(
            "n_grid must be a power of two >= {MIN_GRID}, got {n_grid}"
        )));
    }
    Ok(())
}

/// Maps beta into the canonical half-open Brillouin zone `[-1/2, 1/2)`;
/// exactly +1/2 folds to -1/2, anything else outside is rejected.
pub fn canonical_beta(beta: f64) -> Result<f64> {
    if !beta.is_finite() {
        return Err(QkrError::InvalidInput(format!("beta must be finite, got {beta}")));
    }
    if beta == 0.5 {
        return Ok(-0.5);
    }
    if !(-0.5..0.5).contains(&beta) {
        return Err(QkrError::InvalidInput(format!(
            "beta must lie in [-1/2, 1/2), got {beta}"
        )));
    }
    Ok(beta)
}

/// A quasimomentum component sampled in position space.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochWaveState {
    n_grid: usize,
    beta: f64,
    /// `psi_beta(X_j)`, Bloch phase included.
    samples: Vec<Complex64>,
    /// Accumulated unfolded translation; the grid itself only ever holds one
    /// period, so the secular drift is bookkept here.
    drift_offset: f64,
}

impl BlochWaveState {
    pub fn from_samples(beta: f64, samples: Vec<Complex64>) -> Result<Self> {
        check_grid(samples.len())?;
        let beta = canonical_beta(beta)?;
        Ok(Self { n_grid: samples.len(), beta, samples, drift_offset: 0.0 })
    }

    pub fn n_grid(&self) -> usize {
        self.n_grid
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn drift_offset(&self) -> f64 {
        self.drift_offset
    }

    pub fn set_drift_offset(&mut self, value: f64) {
        self.drift_offset = value;
    }

    pub fn add_drift(&mut self, delta: f64) {
        self.drift_offset += delta;
    }

    /// Replaces the samples in place; the envelope keeps its metadata.
    pub(crate) fn replace_samples(&mut self, samples: Vec<Complex64>) {
        debug_assert_eq!(samples.len(), self.n_grid);
        self.samples = samples;
    }

    /// Same spatial samples, different quasimomentum. Used when one envelope
    /// seeds a whole beta ensemble.
    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        let beta = canonical_beta(beta)?;
        Ok(Self { beta, ..self.clone() })
    }

    /// `sum_j |psi_j|^2 * dX`.
    pub fn norm_sq(&self) -> f64 {
        let dx = grid_step(self.n_grid);
        self.samples.iter().map(|c| c.norm_sqr()).sum::<f64>() * dx
    }

    pub fn normalize(&mut self) {
        let scale = 1.0 / self.norm_sq().sqrt();
        for c in &mut self.samples {
            *c *= scale;
        }
    }

    /// `|psi(X_j)|^2` on the grid.
    pub fn density(&self) -> Vec<f64> {
        self.samples.iter().map(|c| c.norm_sqr()).collect()
    }

    /// Circular mean position `arg(<e^{iX}>)` in `[-pi, pi)`.
    pub fn circular_mean(&self) -> f64 {
        let dx = grid_step(self.n_grid);
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, c) in grid_points(self.n_grid).zip(&self.samples) {
            acc += Complex64::from_polar(c.norm_sqr() * dx, x);
        }
        let a = acc.arg();
        if a >= PI { a - 2.0 * PI } else { a }
    }
}

/// Fourier coefficients of the periodic part `u_beta`, indexed by the integer
/// mode `m` in `[-N/2, N/2)`; momentum `P = (m + beta) hbar_eff`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumLadder {
    beta: f64,
    /// `coefficients[i]` holds mode `m = i - N/2`.
    coefficients: Vec<Complex64>,
}

impl MomentumLadder {
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn n_modes(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn coefficients_mut(&mut self) -> &mut [Complex64] {
        &mut self.coefficients
    }

    pub fn mode(&self, m: i64) -> Complex64 {
        let half = (self.coefficients.len() / 2) as i64;
        self.coefficients[(m + half) as usize]
    }

    /// Iterates `(m, coefficient)` in ascending mode order.
    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let half = (self.coefficients.len() / 2) as i64;
        self.coefficients.iter().enumerate().map(move |(i, &c)| (i as i64 - half, c))
    }

    /// `sum_m |c_m|^2`; equals the position-space norm^2 (Parseval).
    pub fn norm_sq(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Probability weight within `margin` modes of the grid edge. Spectral
    /// content here is about to alias; the propagator warns on it.
    pub fn edge_occupancy(&self, margin: usize) -> f64 {
        let n = self.coefficients.len();
        let lo: f64 = self.coefficients[..margin.min(n)].iter().map(|c| c.norm_sqr()).sum();
        let hi: f64 =
            self.coefficients[n.saturating_sub(margin)..].iter().map(|c| c.norm_sqr()).sum();
        (lo + hi) / self.norm_sq()
    }
}

/// Position -> ladder transform, exact discrete Fourier pair on `u_beta`.
pub fn to_momentum(state: &BlochWaveState) -> MomentumLadder {
    let n = state.n_grid;
    let mut buf: Vec<Complex64> = grid_points(n)
        .zip(&state.samples)
        .map(|(x, &psi)| psi * Complex64::from_polar(1.0, -state.beta * x))
        .collect();
    fft_forward(&mut buf);
    // c_m = sqrt(2 pi)/N * (-1)^m * U_{m mod N}, stored in ascending m.
    let half = n / 2;
    let scale = (2.0 * PI).sqrt() / n as f64;
    let mut coefficients = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        let m = i as i64 - half as i64;
        let k = m.rem_euclid(n as i64) as usize;
        let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        coefficients[i] = buf[k] * (scale * sign);
    }
    MomentumLadder { beta: state.beta, coefficients }
}

/// Ladder -> position transform; inverse of [`to_momentum`].
pub fn to_position(ladder: &MomentumLadder) -> BlochWaveState {
    let n = ladder.coefficients.len();
    let half = n / 2;
    let scale = n as f64 / (2.0 * PI).sqrt();
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (i, &c) in ladder.coefficients.iter().enumerate() {
        let m = i as i64 - half as i64;
        let k = m.rem_euclid(n as i64) as usize;
        let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        buf[k] = c * (scale * sign);
    }
    fft_inverse(&mut buf);
    let samples: Vec<Complex64> = grid_points(n)
        .zip(&buf)
        .map(|(x, &u)| u * Complex64::from_polar(1.0, ladder.beta * x))
        .collect();
    BlochWaveState { n_grid: n, beta: ladder.beta, samples, drift_offset: 0.0 }
}

/// Periodically wrapped Gaussian packet centered at `x0` with width `sigma`,
/// carrying Bloch phase `e^{i beta X}`; normalized, zero drift offset.
pub fn make_gaussian_packet(
    x0: f64,
    sigma: f64,
    beta: f64,
    n_grid: usize,
) -> Result<BlochWaveState> {
    check_grid(n_grid)?;
    let beta = canonical_beta(beta)?;
    if !(sigma > 0.0 && sigma < PI / 4.0) {
        return Err(QkrError::InvalidInput(format!(
            "sigma must lie in (0, pi/4) for a localized packet, got {sigma}"
        )));
    }
    // Enough periodic images for truncation below 1e-15.
    let k_max = (8.0 * sigma / (2.0 * PI)).ceil() as i64 + 2;
    let inv = 1.0 / (4.0 * sigma * sigma);
    let samples: Vec<Complex64> = grid_points(n_grid)
        .map(|x| {
            let mut env = 0.0;
            for k in -k_max..=k_max {
                let d = x - x0 + 2.0 * PI * k as f64;
                env += (-d * d * inv).exp();
            }
            Complex64::from_polar(env, beta * x)
        })
        .collect();
    let mut state = BlochWaveState { n_grid, beta, samples, drift_offset: 0.0 };
    state.normalize();
    Ok(state)
}

/// Mean momentum `hbar_eff * sum_m (m + beta) |c_m|^2`.
pub fn mean_momentum(state: &BlochWaveState, params: &KickedRotorParams) -> f64 {
    let ladder = to_momentum(state);
    params.hbar_eff
        * ladder.modes().map(|(m, c)| (m as f64 + ladder.beta) * c.norm_sqr()).sum::<f64>()
}

/// Kinetic energy `hbar_eff^2 / 2 * sum_m (m + beta)^2 |c_m|^2`.
pub fn kinetic_energy(state: &BlochWaveState, params: &KickedRotorParams) -> f64 {
    let ladder = to_momentum(state);
    0.5 * params.hbar_eff
        * params.hbar_eff
        * ladder
            .modes()
            .map(|(m, c)| {
                let p = m as f64 + ladder.beta;
                p * p * c.norm_sqr()
            })
            .sum::<f64>()
}

/// Probability current `J(X) = i hbar/2 (psi dX psi* - psi* dX psi)` on the
/// grid, with the derivative taken spectrally on `u_beta` plus the `i beta`
/// Bloch term. The imaginary residue is checked before being discarded.
pub fn probability_current(state: &BlochWaveState, params: &KickedRotorParams) -> Vec<f64> {
    let n = state.n_grid;
    let ladder = to_momentum(state);
    // dX u in position space.
    let mut du = vec![Complex64::new(0.0, 0.0); n];
    let half = n / 2;
    let scale = n as f64 / (2.0 * PI).sqrt();
    for (i, &c) in ladder.coefficients.iter().enumerate() {
        let m = i as i64 - half as i64;
        let k = m.rem_euclid(n as i64) as usize;
        let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        du[k] = c * Complex64::new(0.0, m as f64) * (scale * sign);
    }
    fft_inverse(&mut du);
    grid_points(n)
        .enumerate()
        .map(|(j, x)| {
            let bloch = Complex64::from_polar(1.0, state.beta * x);
            let u = state.samples[j] * bloch.conj();
            let dpsi = bloch * (du[j] + Complex64::new(0.0, state.beta) * u);
            let psi = state.samples[j];
            let z = Complex64::new(0.0, 0.5 * params.hbar_eff)
                * (psi * dpsi.conj() - psi.conj() * dpsi);
            debug_assert!(z.im.abs() < 1e-12, "current residue {:.3e}", z.im);
            z.re
        })
        .collect()
}

/// Exact spectral translation `psi(X) -> psi(X - a)` of a Bloch function:
/// a phase ramp on the ladder plus the plane-wave factor `e^{-i beta a}`.
pub fn translate(state: &BlochWaveState, a: f64) -> BlochWaveState {
    let mut ladder = to_momentum(state);
    for (i, c) in ladder.coefficients.iter_mut().enumerate() {
        let m = i as i64 - (state.n_grid / 2) as i64;
        *c *= Complex64::from_polar(1.0, -(m as f64) * a);
    }
    let mut out = to_position(&ladder);
    let bloch = Complex64::from_polar(1.0, -state.beta * a);
    for s in &mut out.samples {
        *s *= bloch;
    }
    out.drift_offset = state.drift_offset;
    out
}

/// Squared overlap `|<a|b>|^2` of two grid states.
pub fn fidelity(a: &BlochWaveState, b: &BlochWaveState) -> f64 {
    assert_eq!(a.n_grid, b.n_grid, "fidelity requires matching grids");
    let dx = grid_step(a.n_grid);
    let ov: Complex64 =
        a.samples.iter().zip(&b.samples).map(|(x, y)| x.conj() * y).sum::<Complex64>() * dx;
    ov.norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane_wave(m0: i64, beta: f64, n: usize) -> BlochWaveState {
        let samples = grid_points(n)
            .map(|x| Complex64::from_polar(1.0 / (2.0 * PI).sqrt(), (m0 as f64 + beta) * x))
            .collect();
        BlochWaveState::from_samples(beta, samples).unwrap()
    }

    #[test]
    fn gaussian_is_normalized_and_centered() {
        let s = make_gaussian_packet(PI / 2.0, 0.1, 0.0, 512).unwrap();
        assert!((s.norm_sq() - 1.0).abs() < 1e-12);
        assert!((s.circular_mean() - PI / 2.0).abs() < 1e-10);
        assert_eq!(s.drift_offset(), 0.0);
    }

    #[test]
    fn gaussian_bloch_periodicity() {
        // u = psi e^{-i beta X} is the real wrapped envelope and must close
        // periodically across the seam; center the packet on the seam so the
        // check is not trivially 0 = 0.
        let n = 512;
        let s = make_gaussian_packet(PI, 0.1, 0.25, n).unwrap();
        let u: Vec<Complex64> = grid_points(n)
            .zip(s.samples())
            .map(|(x, &psi)| psi * Complex64::from_polar(1.0, -0.25 * x))
            .collect();
        for v in &u {
            assert!(v.im.abs() < 1e-12, "u should be real, got im {:.3e}", v.im);
        }
        // u(-pi) vs u(pi - dx): one grid step apart on a smooth periodic curve.
        let diff = (u[0] - u[n - 1]).norm() / u[0].norm();
        assert!(diff < 1e-2, "seam mismatch {diff:.3e}");
    }

    #[test]
    fn gaussian_rejects_bad_inputs() {
        assert!(make_gaussian_packet(0.0, 0.0, 0.0, 512).is_err());
        assert!(make_gaussian_packet(0.0, 1.0, 0.0, 512).is_err());
        assert!(make_gaussian_packet(0.0, 0.1, 0.7, 512).is_err());
        assert!(make_gaussian_packet(0.0, 0.1, 0.0, 100).is_err());
        assert!(make_gaussian_packet(0.0, 0.1, 0.0, 16).is_err());
    }

    #[test]
    fn beta_half_maps_to_minus_half() {
        let s = make_gaussian_packet(0.0, 0.1, 0.5, 64).unwrap();
        assert_eq!(s.beta(), -0.5);
    }

    #[test]
    fn plane_wave_is_single_mode() {
        let s = plane_wave(2, 0.25, 128);
        let ladder = to_momentum(&s);
        for (m, c) in ladder.modes() {
            let expect = if m == 2 { 1.0 } else { 0.0 };
            assert!((c.norm() - expect).abs() < 1e-12, "mode {m}");
        }
    }

    #[test]
    fn round_trip_is_identity() {
        let s = make_gaussian_packet(0.3, 0.12, -0.37, 256).unwrap();
        let back = to_position(&to_momentum(&s));
        let err = s
            .samples()
            .iter()
            .zip(back.samples())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12, "round trip error {err:.3e}");
    }

    #[test]
    fn parseval_holds() {
        let s = make_gaussian_packet(-1.0, 0.15, 0.11, 256).unwrap();
        let ladder = to_momentum(&s);
        assert!((s.norm_sq() - ladder.norm_sq()).abs() < 1e-10);
    }

    #[test]
    fn ladder_magnitudes_follow_gaussian_transform() {
        // |c_m| / |c_0| = e^{-sigma^2 m^2} for a packet at the origin
        // (continuum Fourier transform; wrap corrections are far below 1e-9).
        let sigma = 0.1;
        let s = make_gaussian_packet(0.0, sigma, 0.0, 512).unwrap();
        let ladder = to_momentum(&s);
        let c0 = ladder.mode(0).norm();
        for m in [1i64, 2, 5, 8, 12] {
            let expect = (-sigma * sigma * (m * m) as f64).exp();
            let got = ladder.mode(m).norm() / c0;
            assert!((got - expect).abs() < 1e-9, "m={m}: {got} vs {expect}");
        }
    }

    #[test]
    fn mean_momentum_plane_wave() {
        let params = KickedRotorParams::new(1.0, PI).unwrap();
        let s = plane_wave(2, 0.25, 128);
        assert!((mean_momentum(&s, &params) - PI * 2.25).abs() < 1e-10);
    }

    #[test]
    fn mean_momentum_of_resting_packet_vanishes() {
        let params = KickedRotorParams::new(1.0, 2.0 * PI).unwrap();
        let s = make_gaussian_packet(0.7, 0.1, 0.0, 512).unwrap();
        assert!(mean_momentum(&s, &params).abs() < 1e-12);
    }

    #[test]
    fn kinetic_energy_plane_wave_and_gaussian() {
        let params = KickedRotorParams::new(1.0, 2.0 * PI).unwrap();
        let pw = plane_wave(1, 0.0, 128);
        assert!((kinetic_energy(&pw, &params) - 2.0 * PI * PI).abs() < 1e-9);

        // Gaussian momentum variance: E = hbar^2 / (8 sigma^2).
        let sigma = 0.1;
        let g = make_gaussian_packet(0.0, sigma, 0.0, 512).unwrap();
        let expect = params.hbar_eff * params.hbar_eff / (8.0 * sigma * sigma);
        let got = kinetic_energy(&g, &params);
        assert!((got - expect).abs() < 1e-8 * expect, "{got} vs {expect}");
    }

    #[test]
    fn energy_bounds_mean_momentum() {
        let params = KickedRotorParams::new(1.0, PI).unwrap();
        for beta in [0.0, 0.25, -0.4] {
            let s = make_gaussian_packet(1.1, 0.1, beta, 256).unwrap();
            let p = mean_momentum(&s, &params);
            let e = kinetic_energy(&s, &params);
            assert!(e >= p * p / 2.0 - 1e-12);
        }
    }

    #[test]
    fn current_vanishes_for_real_packet() {
        let params = KickedRotorParams::new(1.0, PI).unwrap();
        let s = make_gaussian_packet(0.4, 0.1, 0.0, 256).unwrap();
        for j in probability_current(&s, &params) {
            assert!(j.abs() < 1e-12);
        }
    }

    #[test]
    fn current_of_plane_wave() {
        let params = KickedRotorParams::new(1.0, PI).unwrap();
        let s = plane_wave(3, 0.25, 128);
        let current = probability_current(&s, &params);
        for (j, psi) in current.iter().zip(s.samples()) {
            let expect = params.hbar_eff * 3.25 * psi.norm_sqr();
            assert!((j - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn current_integrates_to_mean_momentum() {
        let params = KickedRotorParams::new(1.0, 2.0 * PI).unwrap();
        let mut s = make_gaussian_packet(0.2, 0.12, 0.17, 256).unwrap();
        // Give it structure: mix in a phase gradient.
        let samples: Vec<Complex64> = grid_points(256)
            .zip(s.samples())
            .map(|(x, &c)| c * Complex64::from_polar(1.0, 0.8 * (2.0 * x).sin()))
            .collect();
        s.replace_samples(samples);
        s.normalize();
        let dx = grid_step(256);
        let total: f64 = probability_current(&s, &params).iter().sum::<f64>() * dx;
        let p = mean_momentum(&s, &params);
        assert!((total - p).abs() < 1e-9, "{total} vs {p}");
    }

    #[test]
    fn translate_shifts_density() {
        let s = make_gaussian_packet(0.0, 0.1, 0.25, 256).unwrap();
        let t = translate(&s, PI / 2.0);
        assert!((t.circular_mean() - PI / 2.0).abs() < 1e-9);
        assert!((t.norm_sq() - 1.0).abs() < 1e-12);
        // Translation by a full period is the identity up to the Bloch phase.
        let full = translate(&s, 2.0 * PI);
        let ph = Complex64::from_polar(1.0, -s.beta() * 2.0 * PI);
        let err = s
            .samples()
            .iter()
            .zip(full.samples())
            .map(|(a, b)| (a * ph - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12);
    }

    #[test]
    fn grid_refinement_leaves_observables() {
        let params = KickedRotorParams::new(2.0, 4.0 * PI).unwrap();
        let coarse = make_gaussian_packet(0.9, 0.1, 0.2, 512).unwrap();
        let fine = make_gaussian_packet(0.9, 0.1, 0.2, 1024).unwrap();
        let de = (kinetic_energy(&coarse, &params) - kinetic_energy(&fine, &params)).abs();
        let dp = (mean_momentum(&coarse, &params) - mean_momentum(&fine, &params)).abs();
        assert!(de < 1e-8, "energy changed by {de:.3e}");
        assert!(dp < 1e-8, "momentum changed by {dp:.3e}");
    }
}
