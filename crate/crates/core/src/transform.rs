//! Difference/Fourier-domain formulation: the first-difference operator and
//! its anti-difference, the unitary DFT, the guard-band subset S, and the
//! integer least-squares instance ‖z_S + F_S ε̲‖².

use std::f64::consts::PI;
use std::ops::{Add, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier;
use crate::lattice::GaussianIntegerSeq;
use crate::signal::ComplexSignal;

/// out[n] = v[n+1] − v[n].
pub fn first_difference<T>(v: &[T]) -> Result<Vec<T>>
where
    T: Copy + Sub<Output = T>,
{
    if v.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "first difference needs length >= 2, got {}",
            v.len()
        )));
    }
    Ok(v.windows(2).map(|w| w[1] - w[0]).collect())
}

/// Cumulative sum with a zero head: out[0] = 0, out[n] = Σ_{i<n} d[i].
pub fn anti_difference<T>(d: &[T]) -> Vec<T>
where
    T: Copy + Default + Add<Output = T>,
{
    let mut out = Vec::with_capacity(d.len() + 1);
    let mut acc = T::default();
    out.push(acc);
    for &x in d {
        acc = acc + x;
        out.push(acc);
    }
    out
}

/// Unitary DFT (1/√L normalization).
pub fn dft(v: &[Complex64]) -> Vec<Complex64> {
    fourier::dft(v)
}

/// How the subset was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsetRule {
    /// {⌊(N−1)/γ + N_β⌋+2, …, ⌊N−1−N_β⌋+1}
    Guarded,
    /// {⌊(N−1)/γ⌋+2, …, N−1}; used by the OMP-only solver.
    Tail,
    /// {1, …, N−1}; validation only.
    Full,
}

/// Rows of the (N−1)-point DFT retained for the integer least-squares problem.
/// Indices are 1-based rows; row s holds DFT bin s−1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetSelection {
    pub beta: f64,
    pub n: usize,
    pub gamma: f64,
    pub rule: SubsetRule,
    pub indices: Vec<usize>,
}

impl SubsetSelection {
    /// Admissible open interval for β.
    pub fn beta_bounds(n: usize, gamma: f64) -> (f64, f64) {
        (1.0 / (n as f64 - 1.0), (gamma - 1.0) / (2.0 * gamma))
    }

    /// Full row set; bypasses the β constraint.
    pub fn full(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("N = {n} < 2")));
        }
        Ok(SubsetSelection {
            beta: 0.0,
            n,
            gamma: f64::INFINITY,
            rule: SubsetRule::Full,
            indices: (1..n).collect(),
        })
    }

    /// Explicit row set, validated against 1..=N−1.
    pub fn from_indices(n: usize, mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if indices.is_empty() || indices[0] == 0 || *indices.last().unwrap() > n - 1 {
            return Err(Error::InvalidArgument("subset rows must lie in 1..=N-1".into()));
        }
        Ok(SubsetSelection { beta: 0.0, n, gamma: f64::NAN, rule: SubsetRule::Full, indices })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// M = N − |S|.
    pub fn m(&self) -> usize {
        self.n - self.indices.len()
    }

    /// Zero-based DFT bins.
    pub fn bins(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().map(|s| s - 1)
    }

    fn contiguous(&self) -> bool {
        self.indices.windows(2).all(|w| w[1] == w[0] + 1)
    }
}

/// Guard-band subset for the DP formulation.
pub fn select_subset(n: usize, gamma: f64, beta: f64) -> Result<SubsetSelection> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("N = {n} < 3")));
    }
    if !(gamma > 1.0) {
        return Err(Error::InvalidArgument(format!("gamma = {gamma} must exceed 1")));
    }
    let (lo, hi) = SubsetSelection::beta_bounds(n, gamma);
    if !(beta > lo && beta < hi) {
        return Err(Error::BetaOutOfRange { beta, lo, hi });
    }
    let l = (n - 1) as f64;
    let n_beta = l * beta;
    let first = (l / gamma + n_beta).floor() as usize + 2;
    let last = (l - n_beta).floor() as usize + 1;
    if last < first || last > n - 1 {
        return Err(Error::InvalidArgument(format!("empty subset for N={n}, gamma={gamma}, beta={beta}")));
    }
    Ok(SubsetSelection { beta, n, gamma, rule: SubsetRule::Guarded, indices: (first..=last).collect() })
}

/// Everything above the signal band: {⌊(N−1)/γ⌋+2, …, N−1}.
pub fn select_tail_subset(n: usize, gamma: f64) -> Result<SubsetSelection> {
    if n < 3 || !(gamma > 1.0) {
        return Err(Error::InvalidArgument(format!("invalid N = {n} or gamma = {gamma}")));
    }
    let first = ((n - 1) as f64 / gamma).floor() as usize + 2;
    if first > n - 1 {
        return Err(Error::InvalidArgument(format!("empty tail subset for N={n}, gamma={gamma}")));
    }
    Ok(SubsetSelection { beta: 0.0, n, gamma, rule: SubsetRule::Tail, indices: (first..n).collect() })
}

/// Toeplitz generator q[d] = Q[i, i−d] = (1/(N−1)) Σ_{s∈S} e^{j2π(s−1)d/(N−1)},
/// d = 0..N−2. Contiguous subsets use the closed-form geometric sum.
pub fn toeplitz_generator(subset: &SubsetSelection) -> Vec<Complex64> {
    let l = subset.n - 1;
    let lf = l as f64;
    if subset.contiguous() {
        let m0 = (subset.indices[0] - 1) as f64;
        let count = subset.indices.len() as f64;
        (0..l)
            .map(|d| {
                if d == 0 {
                    return Complex64::new(count / lf, 0.0);
                }
                let theta = 2.0 * PI * d as f64 / lf;
                let r = Complex64::from_polar(1.0, theta);
                let num = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, theta * count);
                let den = Complex64::new(1.0, 0.0) - r;
                Complex64::from_polar(1.0, theta * m0) * num / den / lf
            })
            .collect()
    } else {
        (0..l)
            .map(|d| {
                subset
                    .bins()
                    .map(|m| Complex64::from_polar(1.0, 2.0 * PI * (m * d % l) as f64 / lf))
                    .sum::<Complex64>()
                    / lf
            })
            .collect()
    }
}

/// The integer least-squares problem
/// minimize ‖z_S + F_S ε̲‖² = ε̲ᴴQε̲ + 2Re{bᴴε̲} + ‖z_S‖²,
/// with Q = F_SᴴF_S Hermitian Toeplitz and b = F_Sᴴz_S.
#[derive(Debug, Clone)]
pub struct QuadraticInstance {
    pub n_vars: usize,
    pub subset: SubsetSelection,
    pub z_s: Vec<Complex64>,
    /// q[d] = Q[i+d, i] for d = 0..n_vars−1.
    pub q: Vec<Complex64>,
    pub b: Vec<Complex64>,
    pub p: usize,
    pub v: i64,
}

impl QuadraticInstance {
    /// Instance from an explicit observation vector z_S.
    pub fn from_observation(subset: SubsetSelection, z_s: Vec<Complex64>, p: usize, v: i64) -> Result<Self> {
        if z_s.len() != subset.len() {
            return Err(Error::DimensionMismatch { expected: subset.len(), got: z_s.len() });
        }
        if p < 1 {
            return Err(Error::InvalidArgument("band order p must be >= 1".into()));
        }
        if v < 1 {
            return Err(Error::InvalidArgument("state bound V must be >= 1".into()));
        }
        let n_vars = subset.n - 1;
        if p >= n_vars {
            return Err(Error::BandTooWide { p, n_vars });
        }
        let q = toeplitz_generator(&subset);
        let b = adjoint_subset(&subset, &z_s);
        Ok(QuadraticInstance { n_vars, subset, z_s, q, b, p, v })
    }

    /// Same Q, observation replaced by z_S + F_S ε̂ (re-centered at ε̂).
    pub fn recentered(&self, eps_hat: &GaussianIntegerSeq) -> Result<Self> {
        let z = self.residual(eps_hat)?;
        let b = adjoint_subset(&self.subset, &z);
        Ok(QuadraticInstance { z_s: z, b, q: self.q.clone(), subset: self.subset.clone(), ..*self })
    }

    /// Q[i, j] (0-based).
    pub fn q_entry(&self, i: usize, j: usize) -> Complex64 {
        if i >= j {
            self.q[i - j]
        } else {
            self.q[j - i].conj()
        }
    }

    /// Q̃[i, j]: Q[i, j] inside the band |i−j| <= p, else 0.
    pub fn q_banded_entry(&self, i: usize, j: usize) -> Complex64 {
        if i.abs_diff(j) <= self.p {
            self.q_entry(i, j)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    pub fn dense_q(&self) -> Vec<Vec<Complex64>> {
        (0..self.n_vars).map(|i| (0..self.n_vars).map(|j| self.q_entry(i, j)).collect()).collect()
    }

    pub fn dense_q_banded(&self) -> Vec<Vec<Complex64>> {
        (0..self.n_vars)
            .map(|i| (0..self.n_vars).map(|j| self.q_banded_entry(i, j)).collect())
            .collect()
    }

    /// F_S applied to a length-(N−1) vector.
    pub fn apply_fs(&self, v: &[Complex64]) -> Vec<Complex64> {
        let full = fourier::dft(v);
        self.subset.bins().map(|m| full[m]).collect()
    }

    /// z_S + F_S ε.
    pub fn residual(&self, eps: &GaussianIntegerSeq) -> Result<Vec<Complex64>> {
        self.check_len(eps.len())?;
        let fs = self.apply_fs(&eps.to_complex());
        Ok(self.z_s.iter().zip(fs).map(|(z, f)| z + f).collect())
    }

    /// Exact objective ‖z_S + F_S ε‖².
    pub fn exact_objective(&self, eps: &GaussianIntegerSeq) -> Result<f64> {
        Ok(self.residual(eps)?.iter().map(|r| r.norm_sqr()).sum())
    }

    /// ε̲ᴴQ̃ε̲ + 2Re{bᴴε̲} (band-approximated, constant ‖z_S‖² dropped).
    pub fn banded_objective(&self, eps: &GaussianIntegerSeq) -> Result<f64> {
        self.check_len(eps.len())?;
        Ok(self.banded_objective_c(&eps.to_complex()))
    }

    pub(crate) fn banded_objective_c(&self, x: &[Complex64]) -> f64 {
        let n = self.n_vars;
        let mut total = 0.0;
        for i in 0..n {
            total += self.q[0].re * x[i].norm_sqr() + 2.0 * (self.b[i].conj() * x[i]).re;
            for k in 1..=self.p.min(n - 1 - i) {
                // conj(x_i) Q[i, i+k] x_{i+k}, Q[i, i+k] = conj(q[k])
                total += 2.0 * (x[i].conj() * self.q[k].conj() * x[i + k]).re;
            }
        }
        total
    }

    /// ε̲ᴴQε̲ + 2Re{bᴴε̲} using the full Q.
    pub fn quadratic_objective(&self, eps: &GaussianIntegerSeq) -> Result<f64> {
        Ok(self.exact_objective(eps)? - self.z_s.iter().map(|z| z.norm_sqr()).sum::<f64>())
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n_vars {
            return Err(Error::DimensionMismatch { expected: self.n_vars, got: len });
        }
        Ok(())
    }
}

/// F_Sᴴ r for r indexed by the subset.
pub fn adjoint_subset(subset: &SubsetSelection, r: &[Complex64]) -> Vec<Complex64> {
    let mut full = vec![Complex64::new(0.0, 0.0); subset.n - 1];
    for (m, &v) in subset.bins().zip(r) {
        full[m] = v;
    }
    fourier::idft(&full)
}

/// z_S = [DFT(Δy)]_S / (2λ) together with Q, b and the band copy.
pub fn build_instance(
    y: &ComplexSignal,
    lambda: f64,
    subset: SubsetSelection,
    p: usize,
    v: i64,
) -> Result<QuadraticInstance> {
    if y.len() != subset.n {
        return Err(Error::DimensionMismatch { expected: subset.n, got: y.len() });
    }
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument(format!("lambda = {lambda} must be positive")));
    }
    let dy = first_difference(y.samples())?;
    let spectrum = fourier::dft(&dy);
    let scale = 1.0 / (2.0 * lambda);
    let z_s = subset.bins().map(|m| spectrum[m] * scale).collect();
    QuadraticInstance::from_observation(subset, z_s, p, v)
}
