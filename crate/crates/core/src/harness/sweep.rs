//! Grid sweeps over SNR or β, executed on a bounded worker pool.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::config::{ExperimentConfig, Scenario};
use crate::harness::trial::{run_trial, trial_seed, TrialResult, TrialSpec};

/// Aggregate over the trials of one (method, p, β, SNR) grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSummary {
    pub method: String,
    pub p: usize,
    pub beta: f64,
    pub snr_db: f64,
    pub trials: usize,
    pub successes: usize,
    pub success_probability: f64,
    /// Mean over trials with finite NMSE.
    pub mean_nmse_db: f64,
    pub mean_runtime_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepOutput {
    pub rows: Vec<TrialResult>,
    pub summary: Vec<GridSummary>,
}

/// Trial specifications in output order: grid point, then method, then trial.
/// Trial k uses the same scene seed at every grid point.
pub fn expand_grid(cfg: &ExperimentConfig) -> Result<Vec<TrialSpec>> {
    cfg.validate()?;
    let (points, bandlimited): (Vec<(f64, f64)>, bool) = match cfg.scenario {
        Scenario::BetaSweep => (cfg.beta_grid.iter().map(|&b| (b, cfg.sampling.snr_db)).collect(), false),
        Scenario::SnrSweep => (cfg.snr_grid.iter().map(|&s| (cfg.pipeline.beta, s)).collect(), false),
        Scenario::BandlimitedSweep => (cfg.snr_grid.iter().map(|&s| (cfg.pipeline.beta, s)).collect(), true),
        Scenario::SingleTrial => (vec![(cfg.pipeline.beta, cfg.sampling.snr_db)], false),
        Scenario::PropCheck | Scenario::Ingest => {
            return Err(Error::Config(format!("scenario {:?} is not a sweep", cfg.scenario)));
        }
    };
    let trials = if cfg.scenario == Scenario::SingleTrial { 1 } else { cfg.trials };
    let mut specs = Vec::with_capacity(points.len() * cfg.methods.len() * trials);
    for &(beta, snr) in &points {
        for &method in &cfg.methods {
            for t in 0..trials as u64 {
                let mut sampling = cfg.sampling.clone();
                sampling.snr_db = snr;
                let mut pipeline = cfg.pipeline.clone();
                pipeline.beta = beta;
                specs.push(TrialSpec {
                    trial_id: t,
                    seed: trial_seed(cfg.sampling.seed, t),
                    method,
                    sampling,
                    pipeline,
                    bandlimited,
                    bandlimited_peak: cfg.bandlimited_peak,
                    success_threshold_db: cfg.success_threshold_db,
                    timing: cfg.timing,
                    usalg_max_order: cfg.usalg_max_order,
                });
            }
        }
    }
    Ok(specs)
}

pub fn summarize(rows: &[TrialResult]) -> Vec<GridSummary> {
    let mut out: Vec<GridSummary> = Vec::new();
    let mut i = 0;
    while i < rows.len() {
        let head = &rows[i];
        let same = |r: &TrialResult| {
            r.method == head.method && r.p == head.p && r.beta.to_bits() == head.beta.to_bits() && r.snr_db.to_bits() == head.snr_db.to_bits()
        };
        let end = i + rows[i..].iter().take_while(|r| same(r)).count();
        let group = &rows[i..end];
        let successes = group.iter().filter(|r| r.success).count();
        let finite: Vec<f64> = group.iter().map(|r| r.nmse_db).filter(|v| v.is_finite()).collect();
        out.push(GridSummary {
            method: head.method.clone(),
            p: head.p,
            beta: head.beta,
            snr_db: head.snr_db,
            trials: group.len(),
            successes,
            success_probability: successes as f64 / group.len() as f64,
            mean_nmse_db: if finite.is_empty() { f64::NAN } else { finite.iter().sum::<f64>() / finite.len() as f64 },
            mean_runtime_s: group.iter().map(|r| r.runtime_s).sum::<f64>() / group.len() as f64,
        });
        i = end;
    }
    out
}

pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    let specs = expand_grid(cfg)?;
    let run = || specs.par_iter().map(run_trial).collect::<Vec<_>>();
    let rows = if cfg.parallelism == 0 {
        run()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.parallelism)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(run)
    };
    let summary = summarize(&rows);
    Ok(SweepOutput { rows, summary })
}

pub fn write_results_csv(path: &Path, rows: &[TrialResult]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv(path: &Path, summary: &[GridSummary]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?;
    for s in summary {
        w.serialize(s)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_json(path: &Path, summary: &[GridSummary]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, summary)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Writes `results.csv`, `summary.csv` and `summary.json` into `dir`.
pub fn write_outputs(dir: &Path, out: &SweepOutput) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_results_csv(&dir.join("results.csv"), &out.rows)?;
    write_summary_csv(&dir.join("summary.csv"), &out.summary)?;
    write_summary_json(&dir.join("summary.json"), &out.summary)
}
