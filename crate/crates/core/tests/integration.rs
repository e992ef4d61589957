use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use uslse::dp::{dp_solve_with_budget, DEFAULT_BUDGET};
use uslse::harness::{run_sweep, write_outputs, ExperimentConfig, Method, Scenario};
use uslse::omp::{default_max_sparsity, omp_refine};
use uslse::pipeline::{recover_residual_detailed, resolve_constant_with_truth};
use uslse::{
    add_noise, gen_random_spectrum, modulo_sample, nmse, nomp, residual_decompose, select_subset, synth_line_spectral,
    GaussianInt, GaussianIntegerSeq, LineSpectrum, NompConfig, PipelineConfig, QuadraticInstance, SamplingConfig,
};

#[test]
fn dp_work_grows_by_at_most_lattice_size_per_band_step() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 128;
    let subset = select_subset(n, 10.0, 0.04).unwrap();
    let z: Vec<Complex64> =
        (0..subset.len()).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    let mut previous = None;
    for p in 1..=3 {
        let inst = QuadraticInstance::from_observation(subset.clone(), z.clone(), p, 1).unwrap();
        let stats = dp_solve_with_budget(&inst, DEFAULT_BUDGET).unwrap().stats;
        assert_eq!(stats.peak_value_tables, 2);
        if let Some(prev) = previous {
            let growth = stats.candidate_evaluations as f64 / prev as f64;
            assert!(growth <= 9.0 + 0.5, "p={p}: growth {growth}");
        }
        previous = Some(stats.candidate_evaluations);
    }
}

/// −F_S ε̲ plus small noise on a subset covering at least half of the bins.
fn planted_instance(rng: &mut ChaCha8Rng, errors: usize) -> (QuadraticInstance, GaussianIntegerSeq, GaussianIntegerSeq) {
    let n = 64;
    let subset = select_subset(n, 4.0, 0.05).unwrap();
    assert!(subset.len() as f64 / (n - 1) as f64 >= 0.5);
    let truth = GaussianIntegerSeq::new(
        (0..n - 1)
            .map(|_| if rng.random::<f64>() < 0.1 { GaussianInt::new(rng.random_range(-1..=1), rng.random_range(-1..=1)) } else { GaussianInt::new(0, 0) })
            .collect(),
    );
    let zero = QuadraticInstance::from_observation(subset.clone(), vec![Complex64::new(0.0, 0.0); subset.len()], 2, 1).unwrap();
    let z = zero
        .apply_fs(&truth.to_complex())
        .into_iter()
        .map(|v| -v + Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * 0.02)
        .collect();
    let inst = QuadraticInstance::from_observation(subset, z, 2, 1).unwrap();
    let mut est = truth.clone();
    let mut positions = Vec::new();
    while positions.len() < errors {
        let p = rng.random_range(0..n - 1);
        if !positions.contains(&p) {
            positions.push(p);
        }
    }
    for p in positions {
        let unit = if rng.random::<bool>() { GaussianInt::new(1, 0) } else { GaussianInt::new(0, -1) };
        est.values_mut()[p] += unit;
    }
    (inst, truth, est)
}

#[test]
fn omp_repairs_planted_errors() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for errors in [1, 2] {
        let mut ok = 0;
        for _ in 0..200 {
            let (inst, truth, est) = planted_instance(&mut rng, errors);
            let delta = omp_refine(&inst, &est, default_max_sparsity(&inst)).unwrap();
            if est.add(&delta) == truth {
                ok += 1;
            }
        }
        assert!(ok >= 190, "{errors} planted errors: {ok}/200 repaired");
    }
}

#[test]
fn noiseless_on_grid_scenes_recover_exactly() {
    let (n, gamma, lambda) = (256, 20.0, 0.5);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cfg = PipelineConfig::default();
    let mut exact = 0;
    let mut folded = 0;
    for _ in 0..100 {
        let max_bin = ((n - 1) as f64 / gamma).floor() as usize - 1;
        let k = rng.random_range(1..=3);
        let omegas = (0..k).map(|_| 2.0 * PI * rng.random_range(1..=max_bin) as f64 / (n - 1) as f64).collect();
        let coeffs = (0..k).map(|_| Complex64::from_polar(rng.random_range(0.5..1.2), rng.random_range(0.0..2.0 * PI))).collect();
        let g = synth_line_spectral(&LineSpectrum::new(omegas, coeffs).unwrap(), n).unwrap();
        let y = modulo_sample(&g, lambda).unwrap();
        let truth = residual_decompose(&g, &y, lambda).unwrap();
        if !truth.is_zero() {
            folded += 1;
        }
        let rec = recover_residual_detailed(&y, &cfg, lambda, gamma).unwrap();
        if resolve_constant_with_truth(&rec.eps_hat, &truth).unwrap() == truth {
            exact += 1;
        }
    }
    assert!(folded >= 80, "only {folded} scenes fold");
    assert!(exact >= 95, "{exact}/100 exact");
}

#[test]
fn nomp_success_on_unfolded_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 512;
    let mut ok = 0;
    for _ in 0..100 {
        let spec = gen_random_spectrum(3, 10.0, 2.0 * PI / n as f64, &mut rng).unwrap();
        let x = synth_line_spectral(&spec, n).unwrap();
        let g = add_noise(&x, 30.0, &mut rng).unwrap();
        let est = nomp(&g, 3, &NompConfig::default()).unwrap();
        if nmse(&synth_line_spectral(&est, n).unwrap(), &x).unwrap() < -15.0 {
            ok += 1;
        }
    }
    assert!(ok >= 95, "{ok}/100");
}

fn desk_config(dir_seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        scenario: Scenario::SnrSweep,
        trials: 12,
        snr_grid: vec![14.0, 22.0, 30.0],
        methods: vec![Method::DpOmpIter, Method::Dp, Method::OmpOnly, Method::Usalg],
        timing: false,
        sampling: SamplingConfig { n: 256, seed: dir_seed, ..Default::default() },
        ..Default::default()
    }
}

#[test]
fn sweep_outputs_are_byte_identical_across_runs_and_thread_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut cfg = desk_config(9);
    cfg.parallelism = 1;
    write_outputs(a.path(), &run_sweep(&cfg).unwrap()).unwrap();
    cfg.parallelism = 3;
    write_outputs(b.path(), &run_sweep(&cfg).unwrap()).unwrap();
    for name in ["results.csv", "summary.csv", "summary.json"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, y, "{name} differs");
    }
    let results = std::fs::read_to_string(a.path().join("results.csv")).unwrap();
    assert!(results.starts_with("trial_id,seed,method,p,beta,snr_db,nmse_db,success,runtime_s\n"));
    assert_eq!(results.lines().count(), 1 + 3 * 4 * 12);
}

#[test]
fn success_is_non_decreasing_in_snr() {
    let mut cfg = desk_config(5);
    cfg.trials = 50;
    cfg.sampling.n = 512;
    cfg.methods = vec![Method::DpOmpIter];
    cfg.snr_grid = vec![14.0, 18.0, 22.0, 26.0, 30.0];
    let out = run_sweep(&cfg).unwrap();
    let probs: Vec<f64> = out.summary.iter().map(|s| s.success_probability).collect();
    for w in probs.windows(2) {
        assert!(w[1] + 0.1 >= w[0], "{probs:?}");
    }
    for row in &out.rows {
        assert_eq!(row.success, row.nmse_db < cfg.success_threshold_db);
    }
}
