//! End-to-end recovery: iterated DP + OMP on the difference-domain integer
//! program, anti-difference back to fold counts, unfolding, and frequency
//! estimation.

use serde::{Deserialize, Serialize};

use crate::dp::{dp_solve_with_budget, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::lattice::{GaussianInt, GaussianIntegerSeq};
use crate::nomp::{nomp, NompConfig};
use crate::omp::{default_max_sparsity, omp_refine, try_accept};
use crate::signal::{unfold, ComplexSignal, LineSpectrum};
use crate::transform::{anti_difference, build_instance, select_subset, select_tail_subset, SubsetRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LseMethod {
    Nomp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    /// Half-bandwidth of the banded Q̃.
    pub p: usize,
    /// State bound: DP searches Re, Im of ε̲ in {−V, …, V}.
    pub v: i64,
    pub beta: f64,
    pub iter_max: usize,
    /// `None` selects ⌈|S|/4⌉; `Some(0)` disables OMP.
    pub omp_max_sparsity: Option<usize>,
    pub dp_enabled: bool,
    pub subset_rule: SubsetRule,
    pub dp_budget: f64,
    pub lse_method: LseMethod,
    pub nomp: NompConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            p: 3,
            v: 1,
            beta: 0.04,
            iter_max: 2,
            omp_max_sparsity: None,
            dp_enabled: true,
            subset_rule: SubsetRule::Guarded,
            dp_budget: DEFAULT_BUDGET,
            lse_method: LseMethod::Nomp,
            nomp: NompConfig::default(),
        }
    }
}

impl PipelineConfig {
    /// Single DP pass, no OMP.
    pub fn dp_only(p: usize, beta: f64) -> Self {
        PipelineConfig { p, beta, iter_max: 1, omp_max_sparsity: Some(0), ..Default::default() }
    }

    /// One DP + OMP pass.
    pub fn dp_omp(p: usize, beta: f64) -> Self {
        PipelineConfig { p, beta, iter_max: 1, ..Default::default() }
    }

    /// `iters` rounds of DP + OMP.
    pub fn dp_omp_iter(p: usize, beta: f64, iters: usize) -> Self {
        PipelineConfig { p, beta, iter_max: iters, ..Default::default() }
    }

    /// OMP alone over the whole out-of-band tail.
    pub fn omp_only() -> Self {
        PipelineConfig { iter_max: 1, dp_enabled: false, subset_rule: SubsetRule::Tail, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iter_max < 1 {
            return Err(Error::Config("iter_max must be >= 1".into()));
        }
        if self.dp_enabled && self.p < 1 {
            return Err(Error::Config("p must be >= 1".into()));
        }
        if self.v < 1 {
            return Err(Error::Config("V must be >= 1".into()));
        }
        if !self.dp_enabled && self.omp_max_sparsity == Some(0) {
            return Err(Error::Config("both DP and OMP are disabled".into()));
        }
        Ok(())
    }
}

/// Fold-count estimate and solver bookkeeping.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualRecovery {
    /// ε̂ of length N with ε̂[0] = 0.
    pub eps_hat: GaussianIntegerSeq,
    /// Difference-domain estimate ε̲̂ (length N−1).
    pub eps_diff: GaussianIntegerSeq,
    /// Exact objective before any update.
    pub initial_objective: f64,
    /// Exact objective after each iteration.
    pub objective_trace: Vec<f64>,
    /// DP updates rejected because they did not lower the exact objective.
    pub dp_rejections: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RecoveryResult {
    pub eps_hat: GaussianIntegerSeq,
    pub g_hat: ComplexSignal,
    pub spectrum_hat: LineSpectrum,
    pub objective_trace: Vec<f64>,
    pub dp_rejections: usize,
}

/// How the additive Gaussian-integer constant of ε̂ is fixed before unfolding.
#[derive(Debug, Clone, Copy)]
pub enum ConstantResolution<'a> {
    /// Keep ε̂[0] = 0.
    Anchor,
    /// Subtract the rounded componentwise median.
    Blind,
    /// Match the mean of a known ε.
    Truth(&'a GaussianIntegerSeq),
}

pub fn recover_residual(y: &ComplexSignal, cfg: &PipelineConfig, lambda: f64, gamma: f64) -> Result<GaussianIntegerSeq> {
    Ok(recover_residual_detailed(y, cfg, lambda, gamma)?.eps_hat)
}

pub fn recover_residual_detailed(
    y: &ComplexSignal,
    cfg: &PipelineConfig,
    lambda: f64,
    gamma: f64,
) -> Result<ResidualRecovery> {
    cfg.validate()?;
    let n = y.len();
    let subset = match cfg.subset_rule {
        SubsetRule::Guarded => select_subset(n, gamma, cfg.beta)?,
        SubsetRule::Tail => select_tail_subset(n, gamma)?,
        SubsetRule::Full => {
            return Err(Error::Config("the full subset carries no out-of-band information".into()));
        }
    };
    let p = cfg.p.clamp(1, n.saturating_sub(2).max(1));
    let base = build_instance(y, lambda, subset, p, cfg.v)?;
    let sparsity = cfg.omp_max_sparsity.unwrap_or_else(|| default_max_sparsity(&base));

    let mut eps = GaussianIntegerSeq::zeros(n - 1);
    let initial_objective = base.exact_objective(&eps)?;
    let mut trace = Vec::with_capacity(cfg.iter_max);
    let mut rejections = 0;
    let mut objective = initial_objective;

    for _ in 0..cfg.iter_max {
        if cfg.dp_enabled {
            let delta = dp_solve_with_budget(&base.recentered(&eps)?, cfg.dp_budget)?.eps;
            let (next, taken, obj) = try_accept(&base, &eps, &delta)?;
            if !taken && !delta.is_zero() {
                rejections += 1;
            }
            eps = next;
            objective = obj;
        }
        if sparsity > 0 {
            let delta = omp_refine(&base, &eps, sparsity)?;
            let (next, _, obj) = try_accept(&base, &eps, &delta)?;
            eps = next;
            objective = obj;
        }
        trace.push(objective);
    }

    let eps_hat = GaussianIntegerSeq::new(anti_difference(eps.values()));
    Ok(ResidualRecovery { eps_hat, eps_diff: eps, initial_objective, objective_trace: trace, dp_rejections: rejections })
}

fn rounded_mean(values: impl Iterator<Item = i64>, len: usize) -> i64 {
    (values.sum::<i64>() as f64 / len as f64 + 0.5).floor() as i64
}

/// ε̂ shifted by the rounded mean of ε − ε̂ (per component).
pub fn resolve_constant_with_truth(eps_hat: &GaussianIntegerSeq, eps_true: &GaussianIntegerSeq) -> Result<GaussianIntegerSeq> {
    if eps_hat.len() != eps_true.len() {
        return Err(Error::DimensionMismatch { expected: eps_true.len(), got: eps_hat.len() });
    }
    let len = eps_hat.len().max(1);
    let diffs: Vec<GaussianInt> = eps_true.values().iter().zip(eps_hat.values()).map(|(t, h)| t - h).collect();
    let c = GaussianInt::new(
        rounded_mean(diffs.iter().map(|d| d.re), len),
        rounded_mean(diffs.iter().map(|d| d.im), len),
    );
    Ok(eps_hat.offset(c))
}

fn rounded_median(mut v: Vec<i64>) -> i64 {
    v.sort_unstable();
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        // half rounds up so the result commutes with integer shifts
        (v[mid - 1] + v[mid] + 1).div_euclid(2)
    }
}

/// ε̂ minus its rounded componentwise median.
pub fn resolve_constant_blind(eps_hat: &GaussianIntegerSeq) -> Result<GaussianIntegerSeq> {
    if eps_hat.is_empty() {
        return Err(Error::InvalidArgument("empty sequence".into()));
    }
    let re = rounded_median(eps_hat.values().iter().map(|v| v.re).collect());
    let im = rounded_median(eps_hat.values().iter().map(|v| v.im).collect());
    Ok(eps_hat.offset(GaussianInt::new(-re, -im)))
}

/// Full recovery with blind constant resolution.
pub fn uslse(y: &ComplexSignal, k: usize, gamma: f64, lambda: f64, cfg: &PipelineConfig) -> Result<RecoveryResult> {
    uslse_with(y, k, gamma, lambda, cfg, ConstantResolution::Blind)
}

pub fn uslse_with(
    y: &ComplexSignal,
    k: usize,
    gamma: f64,
    lambda: f64,
    cfg: &PipelineConfig,
    resolution: ConstantResolution<'_>,
) -> Result<RecoveryResult> {
    let rec = recover_residual_detailed(y, cfg, lambda, gamma)?;
    let eps_hat = match resolution {
        ConstantResolution::Anchor => rec.eps_hat,
        ConstantResolution::Blind => resolve_constant_blind(&rec.eps_hat)?,
        ConstantResolution::Truth(t) => resolve_constant_with_truth(&rec.eps_hat, t)?,
    };
    let g_hat = unfold(y, &eps_hat, lambda)?;
    let spectrum_hat = match cfg.lse_method {
        LseMethod::Nomp => nomp(&g_hat, k, &cfg.nomp)?,
    };
    Ok(RecoveryResult { eps_hat, g_hat, spectrum_hat, objective_trace: rec.objective_trace, dp_rejections: rec.dp_rejections })
}
