//! One Monte Carlo trial: draw a scene, fold it, recover, score.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::harness::config::Method;
use crate::lattice::{round_to_lattice, GaussianIntegerSeq};
use crate::nomp::{nmse, nomp};
use crate::pipeline::{recover_residual_detailed, resolve_constant_with_truth, PipelineConfig};
use crate::signal::{
    add_noise, gen_bandlimited, gen_random_spectrum, modulo_sample, residual_decompose, synth_line_spectral, unfold,
    ComplexSignal, SamplingConfig,
};
use crate::usalg::{select_usalg_order, usalg};

/// Seed for trial `trial_id`: the first word of ChaCha8 stream `trial_id`
/// keyed by the master seed. Independent of scheduling order.
pub fn trial_seed(master: u64, trial_id: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(trial_id);
    rng.next_u64()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial_id: u64,
    pub seed: u64,
    pub method: String,
    pub p: usize,
    pub beta: f64,
    pub snr_db: f64,
    pub nmse_db: f64,
    pub success: bool,
    pub runtime_s: f64,
}

/// Everything needed to run one trial.
#[derive(Debug, Clone)]
pub struct TrialSpec {
    pub trial_id: u64,
    pub seed: u64,
    pub method: Method,
    pub sampling: SamplingConfig,
    pub pipeline: PipelineConfig,
    pub bandlimited: bool,
    pub bandlimited_peak: f64,
    pub success_threshold_db: f64,
    pub timing: bool,
    pub usalg_max_order: usize,
}

/// A generated acquisition.
#[derive(Debug, Clone)]
pub struct Scene {
    /// Noise-free reference: the line-spectral sum or the bandlimited signal.
    pub x: ComplexSignal,
    /// x plus noise, before folding.
    pub g: ComplexSignal,
    /// Folded samples.
    pub y: ComplexSignal,
    pub eps: GaussianIntegerSeq,
}

pub fn draw_scene(sampling: &SamplingConfig, bandlimited: bool, peak: f64, seed: u64) -> Result<Scene> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = sampling.n;
    let x = if bandlimited {
        gen_bandlimited(n, sampling.gamma, &mut rng)?.scaled(peak)
    } else {
        let spec = gen_random_spectrum(sampling.k, sampling.gamma, 2.0 * PI / n as f64, &mut rng)?;
        synth_line_spectral(&spec, n)?
    };
    let g = add_noise(&x, sampling.snr_db, &mut rng)?;
    let y = modulo_sample(&g, sampling.lambda)?;
    let eps = residual_decompose(&g, &y, sampling.lambda)?;
    Ok(Scene { x, g, y, eps })
}

/// Recovered signal after truth-based constant resolution, and the unfolding runtime.
pub fn unfold_scene(spec: &TrialSpec, scene: &Scene) -> Result<(ComplexSignal, f64)> {
    let lambda = spec.sampling.lambda;
    let start = Instant::now();
    let eps_hat = match spec.method {
        Method::Usalg => {
            let order = select_usalg_order(&scene.g, spec.usalg_max_order)?;
            let g_hat = usalg(&scene.y, lambda, order)?;
            GaussianIntegerSeq::new(
                g_hat
                    .samples()
                    .iter()
                    .zip(scene.y.samples())
                    .map(|(a, b)| round_to_lattice((a - b) / (2.0 * lambda)))
                    .collect(),
            )
        }
        m => recover_residual_detailed(&scene.y, &m.pipeline(&spec.pipeline), lambda, spec.sampling.gamma)?.eps_hat,
    };
    let runtime = start.elapsed().as_secs_f64();
    let resolved = resolve_constant_with_truth(&eps_hat, &scene.eps)?;
    Ok((unfold(&scene.y, &resolved, lambda)?, runtime))
}

fn score(spec: &TrialSpec, scene: &Scene) -> Result<(f64, f64)> {
    let (g_hat, runtime) = unfold_scene(spec, scene)?;
    let value = if spec.bandlimited {
        nmse(&g_hat, &scene.x)?
    } else {
        let est = nomp(&g_hat, spec.sampling.k, &spec.pipeline.nomp)?;
        nmse(&synth_line_spectral(&est, spec.sampling.n)?, &scene.x)?
    };
    Ok((value, runtime))
}

/// Runs one trial. Solver failures yield a failed row with infinite NMSE.
pub fn run_trial(spec: &TrialSpec) -> TrialResult {
    let outcome = draw_scene(&spec.sampling, spec.bandlimited, spec.bandlimited_peak, spec.seed)
        .and_then(|scene| score(spec, &scene));
    let (nmse_db, runtime) = outcome.unwrap_or((f64::INFINITY, 0.0));
    TrialResult {
        trial_id: spec.trial_id,
        seed: spec.seed,
        method: spec.method.name().to_string(),
        p: spec.pipeline.p,
        beta: spec.pipeline.beta,
        snr_db: spec.sampling.snr_db,
        nmse_db,
        success: nmse_db < spec.success_threshold_db,
        runtime_s: if spec.timing { runtime } else { 0.0 },
    }
}
