//! Python bindings for `uslse`.
//!
//! Signals cross the boundary as lists of Python `complex`; fold-count
//! sequences as lists of `(re, im)` integer tuples.

use std::path::PathBuf;

use num_complex::Complex64;
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use uslse::dp::{dp_solve_with_budget, DEFAULT_BUDGET};
use uslse::harness::{self, ExperimentConfig, PropCheckConfig};
use uslse::{ComplexSignal, ConstantResolution, GaussianInt, GaussianIntegerSeq, LineSpectrum};

fn to_py(err: uslse::Error) -> PyErr {
    match err {
        uslse::Error::Io(e) => PyOSError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for uslse::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

fn signal(v: Vec<Complex64>) -> PyResult<ComplexSignal> {
    ComplexSignal::new(v).py()
}

fn seq(v: Vec<(i64, i64)>) -> GaussianIntegerSeq {
    GaussianIntegerSeq::new(v.into_iter().map(|(re, im)| GaussianInt::new(re, im)).collect())
}

fn tuples(s: &GaussianIntegerSeq) -> Vec<(i64, i64)> {
    s.values().iter().map(|c| (c.re, c.im)).collect()
}

/// Settings of the difference-domain recovery.
#[pyclass(name = "PipelineConfig", module = "pyuslse", skip_from_py_object)]
#[derive(Clone)]
struct PyPipelineConfig {
    inner: uslse::PipelineConfig,
}

#[pymethods]
impl PyPipelineConfig {
    #[new]
    #[pyo3(signature = (p=None, beta=None, iter_max=None, v=None, omp_max_sparsity=None, dp_enabled=None))]
    fn new(
        p: Option<usize>,
        beta: Option<f64>,
        iter_max: Option<usize>,
        v: Option<i64>,
        omp_max_sparsity: Option<usize>,
        dp_enabled: Option<bool>,
    ) -> PyResult<Self> {
        let mut inner = uslse::PipelineConfig::default();
        inner.p = p.unwrap_or(inner.p);
        inner.beta = beta.unwrap_or(inner.beta);
        inner.iter_max = iter_max.unwrap_or(inner.iter_max);
        inner.v = v.unwrap_or(inner.v);
        inner.omp_max_sparsity = omp_max_sparsity.or(inner.omp_max_sparsity);
        inner.dp_enabled = dp_enabled.unwrap_or(inner.dp_enabled);
        inner.validate().py()?;
        Ok(PyPipelineConfig { inner })
    }

    #[staticmethod]
    fn dp_only(p: usize, beta: f64) -> Self {
        PyPipelineConfig { inner: uslse::PipelineConfig::dp_only(p, beta) }
    }

    #[staticmethod]
    fn dp_omp(p: usize, beta: f64) -> Self {
        PyPipelineConfig { inner: uslse::PipelineConfig::dp_omp(p, beta) }
    }

    #[staticmethod]
    fn dp_omp_iter(p: usize, beta: f64, iters: usize) -> Self {
        PyPipelineConfig { inner: uslse::PipelineConfig::dp_omp_iter(p, beta, iters) }
    }

    #[staticmethod]
    fn omp_only() -> Self {
        PyPipelineConfig { inner: uslse::PipelineConfig::omp_only() }
    }

    #[getter]
    fn p(&self) -> usize {
        self.inner.p
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.inner.beta
    }

    #[getter]
    fn iter_max(&self) -> usize {
        self.inner.iter_max
    }

    #[getter]
    fn v(&self) -> i64 {
        self.inner.v
    }

    #[getter]
    fn omp_max_sparsity(&self) -> Option<usize> {
        self.inner.omp_max_sparsity
    }

    #[getter]
    fn dp_enabled(&self) -> bool {
        self.inner.dp_enabled
    }

    fn __repr__(&self) -> String {
        let c = &self.inner;
        format!(
            "PipelineConfig(p={}, beta={}, iter_max={}, v={}, omp_max_sparsity={:?}, dp_enabled={})",
            c.p, c.beta, c.iter_max, c.v, c.omp_max_sparsity, c.dp_enabled
        )
    }
}

/// Output of a full recovery.
#[pyclass(name = "RecoveryResult", module = "pyuslse", get_all)]
struct PyRecoveryResult {
    eps_hat: Vec<(i64, i64)>,
    g_hat: Vec<Complex64>,
    omegas: Vec<f64>,
    coeffs: Vec<Complex64>,
    objective_trace: Vec<f64>,
    dp_rejections: usize,
}

#[pymethods]
impl PyRecoveryResult {
    fn __repr__(&self) -> String {
        format!("RecoveryResult(n={}, k={}, objective_trace={:?})", self.g_hat.len(), self.omegas.len(), self.objective_trace)
    }
}

fn config_or_default(cfg: Option<PyRef<'_, PyPipelineConfig>>) -> uslse::PipelineConfig {
    cfg.map(|c| c.inner.clone()).unwrap_or_default()
}

#[pyfunction]
fn centered_modulo(t: f64, lam: f64) -> PyResult<f64> {
    uslse::centered_modulo(t, lam).py()
}

#[pyfunction]
fn modulo_sample(g: Vec<Complex64>, lam: f64) -> PyResult<Vec<Complex64>> {
    Ok(uslse::modulo_sample(&signal(g)?, lam).py()?.into_inner())
}

#[pyfunction]
fn residual_decompose(g: Vec<Complex64>, y: Vec<Complex64>, lam: f64) -> PyResult<Vec<(i64, i64)>> {
    Ok(tuples(&uslse::residual_decompose(&signal(g)?, &signal(y)?, lam).py()?))
}

#[pyfunction]
fn unfold(y: Vec<Complex64>, eps: Vec<(i64, i64)>, lam: f64) -> PyResult<Vec<Complex64>> {
    Ok(uslse::unfold(&signal(y)?, &seq(eps), lam).py()?.into_inner())
}

#[pyfunction]
fn synth_line_spectral(omegas: Vec<f64>, coeffs: Vec<Complex64>, n: usize) -> PyResult<Vec<Complex64>> {
    let spec = LineSpectrum::new(omegas, coeffs).py()?;
    Ok(uslse::synth_line_spectral(&spec, n).py()?.into_inner())
}

/// Random K-line spectrum inside (0, 2π/γ); returns `(omegas, coeffs)`.
#[pyfunction]
#[pyo3(signature = (k, gamma, min_separation, seed))]
fn random_spectrum(k: usize, gamma: f64, min_separation: f64, seed: u64) -> PyResult<(Vec<f64>, Vec<Complex64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = uslse::gen_random_spectrum(k, gamma, min_separation, &mut rng).py()?;
    Ok((spec.omegas, spec.coeffs))
}

#[pyfunction]
fn add_noise(x: Vec<Complex64>, snr_db: f64, seed: u64) -> PyResult<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(uslse::add_noise(&signal(x)?, snr_db, &mut rng).py()?.into_inner())
}

#[pyfunction]
fn select_subset(n: usize, gamma: f64, beta: f64) -> PyResult<Vec<usize>> {
    Ok(uslse::select_subset(n, gamma, beta).py()?.indices)
}

/// Single DP pass on the difference-domain instance built from `y`.
///
/// Returns `(eps_diff, banded_objective, candidate_evaluations)`.
#[pyfunction]
#[pyo3(signature = (y, lam, gamma, beta, p, v=1))]
fn dp_solve(y: Vec<Complex64>, lam: f64, gamma: f64, beta: f64, p: usize, v: i64) -> PyResult<(Vec<(i64, i64)>, f64, u64)> {
    let y = signal(y)?;
    let subset = uslse::select_subset(y.len(), gamma, beta).py()?;
    let inst = uslse::build_instance(&y, lam, subset, p, v).py()?;
    let sol = dp_solve_with_budget(&inst, DEFAULT_BUDGET).py()?;
    Ok((tuples(&sol.eps), sol.objective, sol.stats.candidate_evaluations))
}

/// Fold counts estimated from `y`, anchored at ε̂[0] = 0.
#[pyfunction]
#[pyo3(signature = (y, lam, gamma, config=None))]
fn recover_residual(
    y: Vec<Complex64>,
    lam: f64,
    gamma: f64,
    config: Option<PyRef<'_, PyPipelineConfig>>,
) -> PyResult<Vec<(i64, i64)>> {
    let cfg = config_or_default(config);
    Ok(tuples(&uslse::recover_residual(&signal(y)?, &cfg, lam, gamma).py()?))
}

/// Full recovery: fold counts, unfolded signal and K-line spectrum.
///
/// With `truth` the additive constant is matched to the given fold counts;
/// otherwise it is resolved blindly.
#[pyfunction(name = "uslse")]
#[pyo3(signature = (y, k, gamma, lam, config=None, truth=None))]
fn full_recovery(
    y: Vec<Complex64>,
    k: usize,
    gamma: f64,
    lam: f64,
    config: Option<PyRef<'_, PyPipelineConfig>>,
    truth: Option<Vec<(i64, i64)>>,
) -> PyResult<PyRecoveryResult> {
    let cfg = config_or_default(config);
    let y = signal(y)?;
    let truth = truth.map(seq);
    let resolution = match &truth {
        Some(t) => ConstantResolution::Truth(t),
        None => ConstantResolution::Blind,
    };
    let r = uslse::uslse_with(&y, k, gamma, lam, &cfg, resolution).py()?;
    Ok(PyRecoveryResult {
        eps_hat: tuples(&r.eps_hat),
        g_hat: r.g_hat.into_inner(),
        omegas: r.spectrum_hat.omegas,
        coeffs: r.spectrum_hat.coeffs,
        objective_trace: r.objective_trace,
        dp_rejections: r.dp_rejections,
    })
}

/// Newtonized OMP line-spectral estimate; returns `(omegas, coeffs)`.
#[pyfunction]
fn nomp(g: Vec<Complex64>, k: usize) -> PyResult<(Vec<f64>, Vec<Complex64>)> {
    let spec = uslse::nomp(&signal(g)?, k, &uslse::NompConfig::default()).py()?;
    Ok((spec.omegas, spec.coeffs))
}

#[pyfunction]
fn nmse(x_hat: Vec<Complex64>, x: Vec<Complex64>) -> PyResult<f64> {
    uslse::nmse(&signal(x_hat)?, &signal(x)?).py()
}

#[pyfunction]
fn usalg(y: Vec<Complex64>, lam: f64, order: usize) -> PyResult<Vec<Complex64>> {
    Ok(uslse::usalg(&signal(y)?, lam, order).py()?.into_inner())
}

#[pyfunction]
fn energy_ratio(n: usize, m: usize, p: usize) -> PyResult<f64> {
    uslse::bounds::band_energy_ratio(n, m, p).py()
}

#[pyfunction]
fn energy_lower_bound(n: usize, m: usize, p: usize) -> PyResult<f64> {
    uslse::bounds::band_energy_lower_bound(n, m, p).py()
}

/// Randomized check of the lattice, leakage and band-energy bounds.
///
/// Returns `(passed, report)`.
#[pyfunction]
#[pyo3(signature = (draws=200, seed=0, n_max=64))]
fn check_bounds(draws: usize, seed: u64, n_max: usize) -> PyResult<(bool, String)> {
    let report = harness::check_propositions(&PropCheckConfig { draws, seed, n_max }).py()?;
    Ok((report.passed(), report.to_string()))
}

/// Run a Monte Carlo sweep described by a TOML string.
///
/// Returns one dict per grid point. With `out_dir`, also writes
/// `results.csv`, `summary.csv` and `summary.json` there.
#[pyfunction]
#[pyo3(signature = (config_toml, out_dir=None))]
fn run_sweep<'py>(py: Python<'py>, config_toml: &str, out_dir: Option<PathBuf>) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let cfg = ExperimentConfig::from_toml_str(config_toml).py()?;
    cfg.validate().py()?;
    let out = py.detach(|| harness::run_sweep(&cfg)).py()?;
    if let Some(dir) = out_dir {
        harness::write_outputs(&dir, &out).py()?;
    }
    out.summary
        .iter()
        .map(|s| {
            let d = PyDict::new(py);
            d.set_item("method", &s.method)?;
            d.set_item("p", s.p)?;
            d.set_item("beta", s.beta)?;
            d.set_item("snr_db", s.snr_db)?;
            d.set_item("trials", s.trials)?;
            d.set_item("successes", s.successes)?;
            d.set_item("success_probability", s.success_probability)?;
            d.set_item("mean_nmse_db", s.mean_nmse_db)?;
            d.set_item("mean_runtime_s", s.mean_runtime_s)?;
            Ok(d)
        })
        .collect()
}

#[pyfunction]
fn read_iq(path: PathBuf) -> PyResult<Vec<Complex64>> {
    Ok(harness::read_iq(&path).py()?.into_inner())
}

#[pyfunction]
fn write_iq(path: PathBuf, x: Vec<Complex64>) -> PyResult<()> {
    harness::write_iq(&path, &signal(x)?).py()
}

#[pymodule]
fn pyuslse(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPipelineConfig>()?;
    m.add_class::<PyRecoveryResult>()?;
    m.add_function(wrap_pyfunction!(centered_modulo, m)?)?;
    m.add_function(wrap_pyfunction!(modulo_sample, m)?)?;
    m.add_function(wrap_pyfunction!(residual_decompose, m)?)?;
    m.add_function(wrap_pyfunction!(unfold, m)?)?;
    m.add_function(wrap_pyfunction!(synth_line_spectral, m)?)?;
    m.add_function(wrap_pyfunction!(random_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(add_noise, m)?)?;
    m.add_function(wrap_pyfunction!(select_subset, m)?)?;
    m.add_function(wrap_pyfunction!(dp_solve, m)?)?;
    m.add_function(wrap_pyfunction!(recover_residual, m)?)?;
    m.add_function(wrap_pyfunction!(full_recovery, m)?)?;
    m.add_function(wrap_pyfunction!(nomp, m)?)?;
    m.add_function(wrap_pyfunction!(nmse, m)?)?;
    m.add_function(wrap_pyfunction!(usalg, m)?)?;
    m.add_function(wrap_pyfunction!(energy_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(energy_lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(check_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(read_iq, m)?)?;
    m.add_function(wrap_pyfunction!(write_iq, m)?)?;
    Ok(())
}
