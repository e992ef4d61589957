use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use uslse::harness::{
    check_propositions, draw_scene, read_iq, run_sweep, write_iq, write_outputs, ExperimentConfig, Method,
    PropCheckConfig, Scenario,
};
use uslse::pipeline::{recover_residual_detailed, resolve_constant_blind};
use uslse::{modulo_sample, nomp, select_usalg_order, unfold, usalg, ComplexSignal, LineSpectrum, Result};

#[derive(Parser)]
#[command(name = "uslse", version, about = "Recover line-spectral signals from modulo samples")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Overrides applied on top of a config file.
#[derive(Args, Debug, Default)]
struct Overrides {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    /// One value replaces the β grid; several are accepted.
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    beta: Option<Vec<f64>>,
    /// One value replaces the SNR grid; several are accepted.
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    snr: Option<Vec<f64>>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, value_enum, num_args = 1.., value_delimiter = ',')]
    method: Option<Vec<Method>>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum)]
    scenario: Option<Scenario>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    parallelism: Option<usize>,
    /// Write zero runtimes so reruns are byte-identical.
    #[arg(long)]
    no_timing: bool,
}

impl Overrides {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(v) = self.seed {
            cfg.sampling.seed = v;
        }
        if let Some(v) = self.trials {
            cfg.trials = v;
        }
        if let Some(v) = self.p {
            cfg.pipeline.p = v;
        }
        if let Some(v) = &self.beta {
            cfg.pipeline.beta = v[0];
            cfg.beta_grid = v.clone();
        }
        if let Some(v) = &self.snr {
            cfg.sampling.snr_db = v[0];
            cfg.snr_grid = v.clone();
        }
        if let Some(v) = self.gamma {
            cfg.sampling.gamma = v;
        }
        if let Some(v) = self.lambda {
            cfg.sampling.lambda = v;
        }
        if let Some(v) = &self.method {
            cfg.methods = v.clone();
        }
        if let Some(v) = self.n {
            cfg.sampling.n = v;
        }
        if let Some(v) = self.k {
            cfg.sampling.k = v;
        }
        if let Some(v) = self.scenario {
            cfg.scenario = v;
        }
        if let Some(v) = self.parallelism {
            cfg.parallelism = v;
        }
        if self.no_timing {
            cfg.timing = false;
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a scene and write folded and unfolded IQ files.
    Simulate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
        /// Bandlimited signal instead of a line spectrum.
        #[arg(long)]
        bandlimited: bool,
        #[arg(long, default_value = "sim")]
        out: PathBuf,
    },
    /// Recover a signal from a folded IQ file.
    Recover {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
        /// Write the unfolded signal here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a Monte Carlo sweep.
    Experiment {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Check the analytical bounds numerically.
    PropCheck {
        #[arg(long, default_value_t = 200)]
        draws: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        n_max: usize,
    },
    /// Read an IQ file, report statistics and optionally fold it.
    Ingest {
        #[arg(long)]
        input: PathBuf,
        /// Fold at this threshold and write the result to `--out`.
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_config(path: Option<&Path>, overrides: &Overrides) -> Result<ExperimentConfig> {
    let mut cfg = match path {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    overrides.apply(&mut cfg);
    Ok(cfg)
}

#[derive(Serialize)]
struct RecoverReport<'a> {
    method: &'a str,
    n: usize,
    spectrum: LineSpectrum,
    fold_count_max: i64,
    objective_trace: Vec<f64>,
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { config, overrides, bandlimited, out } => {
            let cfg = load_config(config.as_deref(), &overrides)?;
            cfg.sampling.validate()?;
            let scene = draw_scene(&cfg.sampling, bandlimited, cfg.bandlimited_peak, cfg.sampling.seed)?;
            std::fs::create_dir_all(&out)?;
            write_iq(&out.join("folded.csv"), &scene.y)?;
            write_iq(&out.join("unfolded.csv"), &scene.g)?;
            write_iq(&out.join("clean.csv"), &scene.x)?;
            std::fs::write(out.join("fold_counts.json"), serde_json::to_string_pretty(&scene.eps)? + "\n")?;
            println!("wrote {} samples to {}", scene.y.len(), out.display());
        }
        Command::Recover { input, config, overrides, out } => {
            let cfg = load_config(config.as_deref(), &overrides)?;
            let y = read_iq(&input)?;
            let lambda = cfg.sampling.lambda;
            let method = cfg.methods[0];
            let (g_hat, trace) = match method {
                Method::Usalg => {
                    let order = select_usalg_order(&y, cfg.usalg_max_order)?;
                    (usalg(&y, lambda, order)?, Vec::new())
                }
                m => {
                    let rec = recover_residual_detailed(&y, &m.pipeline(&cfg.pipeline), lambda, cfg.sampling.gamma)?;
                    let eps = resolve_constant_blind(&rec.eps_hat)?;
                    (unfold(&y, &eps, lambda)?, rec.objective_trace)
                }
            };
            let spectrum = nomp(&g_hat, cfg.sampling.k, &cfg.pipeline.nomp)?;
            let folds = g_hat
                .samples()
                .iter()
                .zip(y.samples())
                .map(|(a, b)| ((a - b) / (2.0 * lambda)).norm().round() as i64)
                .max()
                .unwrap_or(0);
            let report =
                RecoverReport { method: method.name(), n: y.len(), spectrum, fold_count_max: folds, objective_trace: trace };
            println!("{}", serde_json::to_string_pretty(&report)?);
            if let Some(path) = out {
                write_iq(&path, &g_hat)?;
            }
        }
        Command::Experiment { config, overrides, out } => {
            let cfg = load_config(config.as_deref(), &overrides)?;
            let output = run_sweep(&cfg)?;
            write_outputs(&out, &output)?;
            std::fs::write(out.join("config.toml"), cfg.to_toml_string()?)?;
            for s in &output.summary {
                println!(
                    "{:<12} p={} beta={:<6} snr={:<6} success={:.3} ({}/{}) mean_nmse={:.2} dB",
                    s.method, s.p, s.beta, s.snr_db, s.success_probability, s.successes, s.trials, s.mean_nmse_db
                );
            }
        }
        Command::PropCheck { draws, seed, n_max } => {
            let report = check_propositions(&PropCheckConfig { draws, seed, n_max })?;
            print!("{report}");
            if !report.passed() {
                return Err(uslse::Error::InvalidArgument("property check failed".into()));
            }
        }
        Command::Ingest { input, lambda, out } => {
            let sig: ComplexSignal = read_iq(&input)?;
            println!("samples={} energy={:.6e} max_component={:.6e}", sig.len(), sig.energy(), sig.max_component());
            if let Some(l) = lambda {
                let folded = modulo_sample(&sig, l)?;
                let path = out.unwrap_or_else(|| input.with_extension("folded.csv"));
                write_iq(&path, &folded)?;
                println!("folded at lambda={l} -> {}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
