//! Signal model: line-spectral and bandlimited test signals, additive noise,
//! and the centered modulo (self-reset ADC) operator.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier;
use crate::lattice::{GaussianInt, GaussianIntegerSeq};

/// A fixed-length sequence of complex samples (N >= 2, all finite).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexSignal(Vec<Complex64>);

impl ComplexSignal {
    pub fn new(samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "signal needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        if let Some(i) = samples.iter().position(|s| !(s.re.is_finite() && s.im.is_finite())) {
            return Err(Error::InvalidArgument(format!("sample {i} is not finite")));
        }
        Ok(ComplexSignal(samples))
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    /// Squared Euclidean norm.
    pub fn energy(&self) -> f64 {
        self.0.iter().map(|s| s.norm_sqr()).sum()
    }

    /// max over samples of max(|Re|, |Im|).
    pub fn max_component(&self) -> f64 {
        self.0.iter().map(|s| s.re.abs().max(s.im.abs())).fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> ComplexSignal {
        ComplexSignal(self.0.iter().map(|s| s * factor).collect())
    }
}

impl AsRef<[Complex64]> for ComplexSignal {
    fn as_ref(&self) -> &[Complex64] {
        &self.0
    }
}

/// K normalized angular frequencies (rad/sample) and their complex amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineSpectrum {
    pub omegas: Vec<f64>,
    pub coeffs: Vec<Complex64>,
}

impl LineSpectrum {
    pub fn new(omegas: Vec<f64>, coeffs: Vec<Complex64>) -> Result<Self> {
        if omegas.is_empty() {
            return Err(Error::EmptySpectrum);
        }
        if omegas.len() != coeffs.len() {
            return Err(Error::DimensionMismatch { expected: omegas.len(), got: coeffs.len() });
        }
        Ok(LineSpectrum { omegas, coeffs })
    }

    pub fn k(&self) -> usize {
        self.omegas.len()
    }

    pub fn c_max(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// True when every frequency lies strictly inside (0, 2π/γ).
    pub fn within_band(&self, gamma: f64) -> bool {
        let upper = 2.0 * PI / gamma;
        self.omegas.iter().all(|&w| w > 0.0 && w < upper)
    }

    pub fn min_separation(&self) -> f64 {
        let mut sorted = self.omegas.clone();
        sorted.sort_by(f64::total_cmp);
        sorted.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }
}

/// Parameters of one simulated acquisition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplingConfig {
    pub n: usize,
    pub gamma: f64,
    pub lambda: f64,
    pub k: usize,
    /// `inf` means noiseless.
    pub snr_db: f64,
    pub seed: u64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig { n: 512, gamma: 10.0, lambda: 0.7, k: 3, snr_db: 30.0, seed: 0 }
    }
}

impl SamplingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidArgument(format!("N = {} < 2", self.n)));
        }
        if !(self.gamma > 1.0) {
            return Err(Error::InvalidArgument(format!("gamma = {} must exceed 1", self.gamma)));
        }
        if !(self.lambda > 0.0) {
            return Err(Error::InvalidArgument(format!("lambda = {} must be positive", self.lambda)));
        }
        if self.k == 0 {
            return Err(Error::InvalidArgument("K must be at least 1".into()));
        }
        Ok(())
    }
}

/// x[n] = Σ_k c_k exp(j ω_k n), n = 0..N-1.
pub fn synth_line_spectral(spec: &LineSpectrum, n: usize) -> Result<ComplexSignal> {
    if spec.omegas.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (&w, &c) in spec.omegas.iter().zip(&spec.coeffs) {
        for (i, o) in out.iter_mut().enumerate() {
            *o += c * Complex64::from_polar(1.0, w * i as f64);
        }
    }
    ComplexSignal::new(out)
}

/// Random K-component spectrum: frequencies uniform on (0, 2π/γ) with pairwise
/// spacing at least `min_separation`, magnitudes ~ N(1, 0.1) kept positive,
/// phases uniform on (0, 2π).
pub fn gen_random_spectrum<R: Rng + ?Sized>(
    k: usize,
    gamma: f64,
    min_separation: f64,
    rng: &mut R,
) -> Result<LineSpectrum> {
    if k == 0 {
        return Err(Error::EmptySpectrum);
    }
    if !(gamma > 1.0) {
        return Err(Error::InvalidArgument(format!("gamma = {gamma} must exceed 1")));
    }
    let upper = 2.0 * PI / gamma;
    if (k as f64 - 1.0) * min_separation >= upper {
        return Err(Error::InvalidArgument(format!(
            "cannot place {k} frequencies {min_separation} apart inside (0, {upper})"
        )));
    }
    let magnitude = Normal::new(1.0, 0.1f64.sqrt()).expect("valid normal");

    let omegas = loop {
        let draw: Vec<f64> = (0..k)
            .map(|_| loop {
                let w = rng.random::<f64>() * upper;
                if w > 0.0 {
                    break w;
                }
            })
            .collect();
        let candidate = LineSpectrum { omegas: draw, coeffs: vec![Complex64::new(0.0, 0.0); k] };
        if k == 1 || candidate.min_separation() >= min_separation {
            break candidate.omegas;
        }
    };
    let coeffs = (0..k)
        .map(|_| {
            let m = loop {
                let m: f64 = magnitude.sample(rng);
                if m > 0.0 {
                    break m;
                }
            };
            let phase = rng.random::<f64>() * 2.0 * PI;
            Complex64::from_polar(m, phase)
        })
        .collect();
    Ok(LineSpectrum { omegas, coeffs })
}

/// Complex bandlimited signal with discrete spectrum on bins 0 < m < N/γ,
/// obtained from a random real bandlimited signal by discarding its DC and
/// negative-frequency content. Normalized to unit peak modulus.
pub fn gen_bandlimited<R: Rng + ?Sized>(n: usize, gamma: f64, rng: &mut R) -> Result<ComplexSignal> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!("N = {n} < 4")));
    }
    if !(gamma > 2.0) || gamma >= n as f64 {
        return Err(Error::InvalidArgument(format!("gamma = {gamma} must lie in (2, N)")));
    }
    let top = ((n as f64 / gamma).ceil() as usize).saturating_sub(1).max(1);

    // Real signal: Hermitian-symmetric random spectrum on |m| <= top.
    let mut spectrum = vec![Complex64::new(0.0, 0.0); n];
    spectrum[0] = Complex64::new(rng.sample(StandardNormal), 0.0);
    for m in 1..=top {
        let c = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        spectrum[m] = c;
        spectrum[n - m] = c.conj();
    }
    let mut real_signal = spectrum;
    fourier::ifft_in_place(&mut real_signal);
    for s in real_signal.iter_mut() {
        s.im = 0.0;
    }

    // Keep only the positive band.
    let mut analytic = real_signal;
    fourier::fft_in_place(&mut analytic);
    for (m, s) in analytic.iter_mut().enumerate() {
        if m == 0 || m > top {
            *s = Complex64::new(0.0, 0.0);
        }
    }
    fourier::ifft_in_place(&mut analytic);
    let peak = analytic.iter().map(|s| s.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Err(Error::ZeroEnergy);
    }
    ComplexSignal::new(analytic.into_iter().map(|s| s / peak).collect())
}

/// Adds circular complex white Gaussian noise at the requested SNR
/// (‖x‖² / E‖w‖²). An infinite `snr_db` returns `x` unchanged.
pub fn add_noise<R: Rng + ?Sized>(x: &ComplexSignal, snr_db: f64, rng: &mut R) -> Result<ComplexSignal> {
    let energy = x.energy();
    if energy == 0.0 {
        return Err(Error::ZeroEnergy);
    }
    if snr_db == f64::INFINITY {
        return Ok(x.clone());
    }
    if snr_db.is_nan() {
        return Err(Error::InvalidArgument("snr_db is NaN".into()));
    }
    let n = x.len() as f64;
    let variance = energy / (n * 10f64.powf(snr_db / 10.0));
    let scale = (variance / 2.0).sqrt();
    let noisy = x
        .samples()
        .iter()
        .map(|&s| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            s + Complex64::new(re, im) * scale
        })
        .collect();
    ComplexSignal::new(noisy)
}

/// M_λ(t) = 2λ(⟦t/(2λ) + 1/2⟧ − 1/2), mapping into [−λ, λ).
pub fn centered_modulo(t: f64, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument(format!("lambda = {lambda} must be positive")));
    }
    Ok(fold(t, lambda))
}

#[inline]
pub(crate) fn fold(t: f64, lambda: f64) -> f64 {
    if (-lambda..lambda).contains(&t) {
        return t;
    }
    let u = t / (2.0 * lambda) + 0.5;
    let v = 2.0 * lambda * ((u - u.floor()) - 0.5);
    // guard against v rounding up to λ
    if v >= lambda {
        -lambda
    } else {
        v
    }
}

/// Componentwise centered modulo of real and imaginary parts.
pub fn modulo_sample(g: &ComplexSignal, lambda: f64) -> Result<ComplexSignal> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument(format!("lambda = {lambda} must be positive")));
    }
    Ok(ComplexSignal(
        g.samples()
            .iter()
            .map(|s| Complex64::new(fold(s.re, lambda), fold(s.im, lambda)))
            .collect(),
    ))
}

/// Recovers the folding counts ε with g = y + 2λε.
pub fn residual_decompose(g: &ComplexSignal, y: &ComplexSignal, lambda: f64) -> Result<GaussianIntegerSeq> {
    if g.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: g.len(), got: y.len() });
    }
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument(format!("lambda = {lambda} must be positive")));
    }
    let two_lambda = 2.0 * lambda;
    let tol = 1e-9 * (g.max_component() / two_lambda).max(1.0);
    let to_int = |index: usize, v: f64| -> Result<i64> {
        let r = v.round();
        if (v - r).abs() > tol {
            return Err(Error::InconsistentResidual { index, value: v });
        }
        Ok(r as i64)
    };
    let values = g
        .samples()
        .iter()
        .zip(y.samples())
        .enumerate()
        .map(|(i, (gs, ys))| {
            let d = (gs - ys) / two_lambda;
            Ok(GaussianInt::new(to_int(i, d.re)?, to_int(i, d.im)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GaussianIntegerSeq::new(values))
}

/// y + 2λε.
pub fn unfold(y: &ComplexSignal, eps: &GaussianIntegerSeq, lambda: f64) -> Result<ComplexSignal> {
    if y.len() != eps.len() {
        return Err(Error::DimensionMismatch { expected: y.len(), got: eps.len() });
    }
    let two_lambda = 2.0 * lambda;
    ComplexSignal::new(
        y.samples()
            .iter()
            .zip(eps.values())
            .map(|(ys, e)| ys + Complex64::new(e.re as f64, e.im as f64) * two_lambda)
            .collect(),
    )
}
