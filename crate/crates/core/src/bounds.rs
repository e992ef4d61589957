//! Analytical bounds: the first-difference state bound, the guard-band
//! leakage bound, and the band-energy ratio of Q with its lower bound.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::signal::LineSpectrum;

/// ⌊Kπ c_max / (λγ) + 1⌋: bound on max(‖Re ε̲‖∞, ‖Im ε̲‖∞) for noiseless input.
pub fn lattice_bound(k: usize, c_max: f64, lambda: f64, gamma: f64) -> i64 {
    (k as f64 * PI * c_max / (lambda * gamma) + 1.0).floor() as i64
}

/// Decomposition ω = 2π(a + δ)/(N−1) with a integer and δ ∈ [−0.5, 0.5).
pub fn grid_offset(omega: f64, n: usize) -> (i64, f64) {
    let t = omega * (n as f64 - 1.0) / (2.0 * PI);
    let a = (t + 0.5).floor();
    let delta = t - a;
    let delta = if delta.abs() < 1e-12 { 0.0 } else { delta };
    (a as i64, delta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LeakageBound {
    pub value: f64,
    /// Every frequency sits exactly on the (N−1)-point DFT grid.
    pub on_grid: bool,
}

fn leakage_numerator(spec: &LineSpectrum, n: usize) -> (f64, bool) {
    let k = spec.k() as f64;
    let s_max = spec.omegas.iter().map(|w| (w / 2.0).sin()).fold(0.0, f64::max);
    let d_max = spec.omegas.iter().map(|&w| grid_offset(w, n).1.abs()).fold(0.0, f64::max);
    (2.0 * k * PI * spec.c_max() * s_max * d_max, d_max == 0.0)
}

/// Upper bound on |DFT(Δx)[n]| for a bin n above the signal band.
pub fn leakage_bound(spec: &LineSpectrum, n: usize, gamma: f64, bin: usize) -> Result<LeakageBound> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("N = {n} < 3")));
    }
    let l = (n - 1) as f64;
    let band_top = (l / gamma).floor() as usize;
    if bin <= band_top || bin > n - 2 {
        return Err(Error::InvalidArgument(format!(
            "bin {bin} outside ({band_top}, {}]",
            n - 2
        )));
    }
    let (num, on_grid) = leakage_numerator(spec, n);
    if on_grid {
        return Ok(LeakageBound { value: 0.0, on_grid });
    }
    let x = PI * bin as f64 / l;
    let den = l.sqrt() * (x - PI / gamma).sin().min(x.sin());
    Ok(LeakageBound { value: num / den, on_grid })
}

/// Bin-independent bound over the guard band: 2Kπ c_max s_max δ_max / (√(N−1) sin(βπ)).
pub fn uniform_leakage_bound(spec: &LineSpectrum, n: usize, beta: f64) -> f64 {
    let (num, _) = leakage_numerator(spec, n);
    num / (((n - 1) as f64).sqrt() * (beta * PI).sin())
}

/// ‖Q̃_p‖²_F / ‖Q‖²_F in closed form, with M = N − |S|.
pub fn band_energy_ratio(n: usize, m: usize, p: usize) -> Result<f64> {
    if m < 2 || m >= n {
        return Err(Error::InvalidArgument(format!("need 2 <= M < N, got M = {m}, N = {n}")));
    }
    let l = (n - 1) as f64;
    let mf = m as f64;
    let mut sum = 0.0;
    for k in 1..=p.min(n - 2) {
        let kf = k as f64;
        let num = (kf * (mf - 1.0) * PI / l).sin().powi(2);
        let den = (kf * PI / l).sin().powi(2);
        sum += (l - kf) * num / den;
    }
    Ok(1.0 - (mf - 1.0) / l + 2.0 * sum / (l * l * (n as f64 - mf)))
}

/// Distance from kη to the nearest integer.
fn u_q(k: usize, eta: f64) -> f64 {
    let t = k as f64 * eta;
    let frac = t - t.floor();
    if frac < 0.5 {
        frac
    } else {
        1.0 + t.floor() - t
    }
}

/// Lower bound on the band-energy ratio, valid for p <= (N−1)/2.
pub fn band_energy_lower_bound(n: usize, m: usize, p: usize) -> Result<f64> {
    if m < 2 || m >= n {
        return Err(Error::InvalidArgument(format!("need 2 <= M < N, got M = {m}, N = {n}")));
    }
    if 2 * p > n - 1 {
        return Err(Error::InvalidArgument(format!("p = {p} exceeds (N-1)/2")));
    }
    let l = (n - 1) as f64;
    let eta = (m as f64 - 1.0) / l;
    let sum: f64 = (1..=p)
        .map(|k| {
            let kf = k as f64;
            let u = u_q(k, eta);
            let shrink = 1.0 - (m as f64 - 1.0 - kf) / (l - kf);
            u * u / (kf * kf * shrink)
        })
        .sum();
    Ok(1.0 - eta + 8.0 / (PI * PI) * sum)
}

/// Large-N form of the lower bound, depending only on η and p.
pub fn band_energy_lower_bound_asymptotic(eta: f64, p: usize) -> f64 {
    let sum: f64 = (1..=p).map(|k| u_q(k, eta).powi(2) / (k * k) as f64).sum();
    1.0 - eta + 8.0 / (PI * PI * (1.0 - eta)) * sum
}
