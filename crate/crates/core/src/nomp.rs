//! Newtonized orthogonal matching pursuit for a known number of sinusoids,
//! plus the NMSE metric.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier;
use crate::signal::{ComplexSignal, LineSpectrum};

const TWO_PI: f64 = 2.0 * PI;
/// NMSE reported for a perfect reconstruction.
pub const NMSE_FLOOR_DB: f64 = -300.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NompConfig {
    pub grid_oversample: usize,
    pub newton_steps: usize,
    pub cyclic_rounds: usize,
}

impl Default for NompConfig {
    fn default() -> Self {
        NompConfig { grid_oversample: 4, newton_steps: 3, cyclic_rounds: 3 }
    }
}

/// y(ω) = Σ r[n] e^{−jωn} and its first two ω-derivatives.
fn projections(r: &[Complex64], omega: f64) -> (Complex64, Complex64, Complex64) {
    let mut y = Complex64::new(0.0, 0.0);
    let mut y1 = Complex64::new(0.0, 0.0);
    let mut y2 = Complex64::new(0.0, 0.0);
    let step = Complex64::from_polar(1.0, -omega);
    let mut phase = Complex64::new(1.0, 0.0);
    for (n, &v) in r.iter().enumerate() {
        // resynchronize to limit phase drift from repeated multiplication
        if n % 64 == 0 {
            phase = Complex64::from_polar(1.0, -omega * n as f64);
        }
        let t = v * phase;
        let nf = n as f64;
        y += t;
        y1 += t * Complex64::new(0.0, -nf);
        y2 -= t * (nf * nf);
        phase *= step;
    }
    (y, y1, y2)
}

fn gain(r: &[Complex64], omega: f64) -> f64 {
    projections(r, omega).0.norm_sqr()
}

fn atom(n: usize, omega: f64) -> Vec<Complex64> {
    (0..n).map(|i| Complex64::from_polar(1.0, omega * i as f64)).collect()
}

/// Newton ascent on |a(ω)ᴴr|² with step halving; never lowers the gain.
fn newton_refine(r: &[Complex64], mut omega: f64, steps: usize) -> f64 {
    for _ in 0..steps {
        let (y, y1, y2) = projections(r, omega);
        let current = y.norm_sqr();
        let d1 = 2.0 * (y.conj() * y1).re;
        let d2 = 2.0 * (y1.norm_sqr() + (y.conj() * y2).re);
        if d2 >= 0.0 {
            break;
        }
        let mut step = -d1 / d2;
        let mut moved = false;
        for _ in 0..30 {
            let cand = omega + step;
            if gain(r, cand) >= current {
                omega = cand;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
    }
    omega
}

fn wrap(omega: f64) -> f64 {
    let w = omega.rem_euclid(TWO_PI);
    if w >= TWO_PI {
        0.0
    } else {
        w
    }
}

/// Joint least-squares amplitudes for fixed frequencies.
fn refit(g: &[Complex64], omegas: &[f64]) -> Option<Vec<Complex64>> {
    let n = g.len();
    let k = omegas.len();
    let a = DMatrix::from_fn(n, k, |i, j| Complex64::from_polar(1.0, omegas[j] * i as f64));
    let gram = a.adjoint() * &a;
    let rhs = a.adjoint() * DVector::from_column_slice(g);
    let c = gram.cholesky()?.solve(&rhs);
    Some(c.iter().copied().collect())
}

fn residual_of(g: &[Complex64], omegas: &[f64], coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut r = g.to_vec();
    for (&w, &c) in omegas.iter().zip(coeffs) {
        for (i, v) in r.iter_mut().enumerate() {
            *v -= c * Complex64::from_polar(1.0, w * i as f64);
        }
    }
    r
}

/// One cyclic pass: re-refine each frequency against the residual with the
/// others removed. Returns the largest frequency move.
fn cyclic_pass(r: &mut [Complex64], omegas: &mut [f64], coeffs: &mut [Complex64], steps: usize) -> f64 {
    let n = r.len() as f64;
    let mut max_move: f64 = 0.0;
    for k in 0..omegas.len() {
        let old = atom(r.len(), omegas[k]);
        for (v, a) in r.iter_mut().zip(&old) {
            *v += coeffs[k] * a;
        }
        let w = newton_refine(r, omegas[k], steps);
        max_move = max_move.max((w - omegas[k]).abs());
        omegas[k] = w;
        coeffs[k] = projections(r, w).0 / n;
        let new = atom(r.len(), w);
        for (v, a) in r.iter_mut().zip(&new) {
            *v -= coeffs[k] * a;
        }
    }
    max_move
}

/// Estimate K sinusoids from `g`. Output is sorted by frequency in [0, 2π);
/// detections closer than half a DFT bin are merged.
pub fn nomp(g: &ComplexSignal, k: usize, cfg: &NompConfig) -> Result<LineSpectrum> {
    let n = g.len();
    if k == 0 || 2 * k > n {
        return Err(Error::InvalidArgument(format!("K = {k} must lie in 1..=N/2 (N = {n})")));
    }
    if cfg.grid_oversample < 2 {
        return Err(Error::InvalidArgument("grid_oversample must be >= 2".into()));
    }
    let samples = g.samples();
    let nf = n as f64;
    let mut omegas: Vec<f64> = Vec::with_capacity(k);
    let mut coeffs: Vec<Complex64> = Vec::with_capacity(k);
    let mut r = samples.to_vec();

    for _ in 0..k {
        let len = cfg.grid_oversample * n;
        let mut padded = vec![Complex64::new(0.0, 0.0); len];
        padded[..n].copy_from_slice(&r);
        fourier::fft_in_place(&mut padded);
        let (bin, _) = padded
            .iter()
            .enumerate()
            .fold((0, -1.0), |(bi, bv), (i, v)| if v.norm_sqr() > bv { (i, v.norm_sqr()) } else { (bi, bv) });
        let w = newton_refine(&r, TWO_PI * bin as f64 / len as f64, cfg.newton_steps);
        let c = projections(&r, w).0 / nf;
        let a = atom(n, w);
        for (v, x) in r.iter_mut().zip(&a) {
            *v -= c * x;
        }
        omegas.push(w);
        coeffs.push(c);

        for _ in 0..cfg.cyclic_rounds {
            cyclic_pass(&mut r, &mut omegas, &mut coeffs, cfg.newton_steps);
        }
        if let Some(c) = refit(samples, &omegas) {
            coeffs = c;
            r = residual_of(samples, &omegas, &coeffs);
        }
    }

    // final cyclic rounds until frequencies settle
    for _ in 0..50 {
        let moved = cyclic_pass(&mut r, &mut omegas, &mut coeffs, cfg.newton_steps);
        if let Some(c) = refit(samples, &omegas) {
            coeffs = c;
            r = residual_of(samples, &omegas, &coeffs);
        }
        if moved < 1e-13 {
            break;
        }
    }

    let mut pairs: Vec<(f64, Complex64)> = omegas.into_iter().map(wrap).zip(coeffs).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let merge_tol = 0.5 * TWO_PI / nf;
    let mut merged: Vec<(f64, Complex64)> = Vec::with_capacity(pairs.len());
    for (w, c) in pairs {
        match merged.last_mut() {
            Some(last) if (w - last.0).abs() < merge_tol => last.1 += c,
            _ => merged.push((w, c)),
        }
    }
    if merged.len() > 1 {
        let (first, last) = (merged[0].0, merged[merged.len() - 1].0);
        if first + TWO_PI - last < merge_tol {
            let (_, c) = merged.pop().unwrap();
            merged[0].1 += c;
        }
    }
    let (omegas, coeffs) = merged.into_iter().unzip();
    LineSpectrum::new(omegas, coeffs)
}

/// 10·log10(‖x̂−x‖²/‖x‖²), floored at [`NMSE_FLOOR_DB`].
pub fn nmse(x_hat: &ComplexSignal, x: &ComplexSignal) -> Result<f64> {
    if x_hat.len() != x.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: x_hat.len() });
    }
    let reference = x.energy();
    if reference == 0.0 {
        return Err(Error::ZeroEnergy);
    }
    let err: f64 = x_hat.samples().iter().zip(x.samples()).map(|(a, b)| (a - b).norm_sqr()).sum();
    if err == 0.0 {
        return Ok(NMSE_FLOOR_DB);
    }
    Ok((10.0 * (err / reference).log10()).max(NMSE_FLOOR_DB))
}
