//! Randomized and exhaustive checks of the analytical bounds.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    lattice_bound, leakage_bound, band_energy_ratio, band_energy_lower_bound, band_energy_lower_bound_asymptotic,
};
use crate::error::Result;
use crate::fourier;
use crate::signal::{gen_random_spectrum, modulo_sample, residual_decompose, synth_line_spectral, LineSpectrum};
use crate::transform::{first_difference, toeplitz_generator, SubsetSelection};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PropCheckConfig {
    /// Random draws for each randomized suite.
    pub draws: usize,
    pub seed: u64,
    /// Largest N in the exhaustive energy-ratio sweep.
    pub n_max: usize,
}

impl Default for PropCheckConfig {
    fn default() -> Self {
        PropCheckConfig { draws: 200, seed: 0, n_max: 64 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub checks: usize,
    pub violations: usize,
    /// Smallest (bound − observed) slack; negative means a violation.
    pub worst_margin: f64,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        SuiteReport { name: name.to_string(), checks: 0, violations: 0, worst_margin: f64::INFINITY }
    }

    fn record(&mut self, margin: f64, ok: bool) {
        self.checks += 1;
        if !ok {
            self.violations += 1;
        }
        self.worst_margin = self.worst_margin.min(margin);
    }

    pub fn passed(&self) -> bool {
        self.violations == 0 && self.checks > 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropReport {
    pub suites: Vec<SuiteReport>,
}

impl PropReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteReport::passed)
    }
}

impl std::fmt::Display for PropReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for s in &self.suites {
            writeln!(
                f,
                "{} {:<28} checks={:<7} violations={:<4} worst_margin={:.3e}",
                if s.passed() { "PASS" } else { "FAIL" },
                s.name,
                s.checks,
                s.violations,
                s.worst_margin
            )?;
        }
        Ok(())
    }
}

/// Random scene parameters for the first two suites.
fn random_scene(rng: &mut ChaCha8Rng) -> Result<(usize, f64, LineSpectrum)> {
    let n = rng.random_range(64..=512);
    let gamma = rng.random_range(6.0..30.0);
    let separation = 2.0 * PI / n as f64;
    let fits = ((2.0 * PI / gamma) / separation).floor().max(1.0) as usize;
    let k = rng.random_range(1..=4).min(fits);
    let mut spec = gen_random_spectrum(k, gamma, separation, rng)?;
    let scale = rng.random_range(0.5..3.0);
    spec.coeffs.iter_mut().for_each(|c| *c *= scale);
    Ok((n, gamma, spec))
}

/// Noiseless first differences of fold counts never exceed the V bound.
pub fn check_v_bound(draws: usize, rng: &mut ChaCha8Rng) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("first-difference V bound");
    for _ in 0..draws {
        let (n, gamma, spec) = random_scene(rng)?;
        let lambda = rng.random_range(0.2..1.5);
        let g = synth_line_spectral(&spec, n)?;
        let y = modulo_sample(&g, lambda)?;
        let eps = residual_decompose(&g, &y, lambda)?;
        let d = first_difference(eps.values())?;
        let observed = d.iter().map(|v| v.re.abs().max(v.im.abs())).max().unwrap_or(0);
        let bound = lattice_bound(spec.k(), spec.c_max(), lambda, gamma);
        rep.record((bound - observed) as f64, observed <= bound);
    }
    Ok(rep)
}

/// Out-of-band DFT magnitudes of Δx stay below the leakage bound at every bin.
pub fn check_leakage_bound(draws: usize, rng: &mut ChaCha8Rng) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("out-of-band leakage bound");
    for _ in 0..draws {
        let (n, gamma, spec) = random_scene(rng)?;
        let x = synth_line_spectral(&spec, n)?;
        let spectrum = fourier::dft(&first_difference(x.samples())?);
        let first = ((n - 1) as f64 / gamma).floor() as usize + 1;
        for (bin, value) in spectrum.iter().enumerate().take(n - 1).skip(first) {
            let bound = leakage_bound(&spec, n, gamma, bin)?;
            let observed = value.norm();
            let tol = 1e-9 * (1.0 + x.max_component());
            rep.record(bound.value - observed, observed <= bound.value + tol);
        }
    }
    Ok(rep)
}

/// ‖Q̃_p‖²_F / ‖Q‖²_F computed from the dense Toeplitz generator.
pub fn direct_energy_ratio(n: usize, m: usize, p: usize) -> f64 {
    let subset = SubsetSelection::from_indices(n, (1..=n - m).collect()).expect("valid subset");
    let q = toeplitz_generator(&subset);
    let l = n - 1;
    let weight = |d: usize| if d == 0 { l as f64 } else { 2.0 * (l - d) as f64 };
    let total: f64 = (0..l).map(|d| weight(d) * q[d].norm_sqr()).sum();
    let band: f64 = (0..=p.min(l - 1)).map(|d| weight(d) * q[d].norm_sqr()).sum();
    band / total
}

/// Closed-form ratio against the dense computation, and the lower bound below it.
pub fn check_energy_ratio(n_max: usize) -> Result<(SuiteReport, SuiteReport)> {
    let mut formula = SuiteReport::new("energy ratio closed form");
    let mut lower = SuiteReport::new("energy ratio lower bound");
    for n in 4..=n_max {
        for m in 2..n {
            for p in 0..=(n - 1) / 2 {
                let closed = band_energy_ratio(n, m, p)?;
                let direct = direct_energy_ratio(n, m, p);
                let err = (closed - direct).abs();
                formula.record(1e-10 - err, err <= 1e-10);
                let lb = band_energy_lower_bound(n, m, p)?;
                lower.record(closed - lb, lb <= closed + 1e-12);
            }
        }
    }
    Ok((formula, lower))
}

/// Lower-bound values at η = 1/8 for p = 1..=4 (large-N form).
pub fn eta_eighth_table() -> [f64; 4] {
    [1, 2, 3, 4].map(|p| band_energy_lower_bound_asymptotic(0.125, p))
}

pub fn check_propositions(cfg: &PropCheckConfig) -> Result<PropReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let v = check_v_bound(cfg.draws, &mut rng)?;
    let leak = check_leakage_bound(cfg.draws, &mut rng)?;
    let (formula, lower) = check_energy_ratio(cfg.n_max)?;
    let mut table = SuiteReport::new("eta=1/8 lower-bound table");
    for (value, target) in eta_eighth_table().iter().zip([0.890, 0.904, 0.918, 0.933]) {
        let err = (value - target).abs();
        table.record(0.002 - err, err <= 0.002);
    }
    let mut p0 = SuiteReport::new("p=0 ratio equals 1-eta");
    for n in 4..=cfg.n_max {
        for m in 2..n {
            let err = (band_energy_ratio(n, m, 0)? - (1.0 - (m - 1) as f64 / (n - 1) as f64)).abs();
            p0.record(1e-12 - err, err <= 1e-12);
        }
    }
    Ok(PropReport { suites: vec![v, leak, formula, lower, table, p0] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    /// Dense-matrix energy of a Hermitian Toeplitz generator restricted to |i−j| <= p.
    fn banded_energy(q: &[Complex64], p: usize) -> f64 {
        let l = q.len();
        (0..l).flat_map(|i| (0..l).map(move |j| (i, j))).filter(|(i, j)| i.abs_diff(*j) <= p).map(|(i, j)| q[i.abs_diff(j)].norm_sqr()).sum()
    }

    #[test]
    fn direct_ratio_matches_dense_sum() {
        let n = 12;
        let subset = SubsetSelection::from_indices(n, (1..=8).collect()).unwrap();
        let q = toeplitz_generator(&subset);
        let full = banded_energy(&q, n);
        assert!((full - subset.len() as f64).abs() < 1e-10);
        for p in 0..5 {
            assert!((direct_energy_ratio(n, n - 8, p) - banded_energy(&q, p) / full).abs() < 1e-12);
        }
    }

    #[test]
    fn small_run_passes() {
        let rep = check_propositions(&PropCheckConfig { draws: 10, seed: 1, n_max: 16 }).unwrap();
        assert!(rep.passed(), "{rep}");
    }
}
