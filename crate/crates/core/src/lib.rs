//! Recovery of line-spectral and bandlimited signals from modulo (self-reset
//! ADC) samples.
//!
//! The fold counts are recovered in the first-difference domain, where they
//! solve a banded integer least-squares problem over the out-of-band DFT bins.
//! A dynamic program finds its exact minimizer on a bounded Gaussian-integer
//! lattice, OMP refines the estimate, and an anti-difference maps back to fold
//! counts. Frequencies are then estimated from the unfolded signal.

pub mod bounds;
pub mod dp;
pub mod error;
pub mod fourier;
pub mod harness;
pub mod lattice;
pub mod nomp;
pub mod omp;
pub mod pipeline;
pub mod signal;
pub mod transform;
pub mod usalg;

pub use dp::{brute_force_solve, decompose_objective, dp_solve, dp_solve_with_budget, DpSolution, StageDecomposition};
pub use error::{Error, Result};
pub use lattice::{GaussianInt, GaussianIntegerSeq};
pub use nomp::{nmse, nomp, NompConfig};
pub use omp::{accept_if_improves, omp_refine};
pub use pipeline::{
    recover_residual, resolve_constant_blind, resolve_constant_with_truth, uslse, uslse_with, ConstantResolution,
    PipelineConfig, RecoveryResult,
};
pub use signal::{
    add_noise, centered_modulo, gen_bandlimited, gen_random_spectrum, modulo_sample, residual_decompose,
    synth_line_spectral, unfold, ComplexSignal, LineSpectrum, SamplingConfig,
};
pub use transform::{
    anti_difference, build_instance, first_difference, select_subset, select_tail_subset, QuadraticInstance,
    SubsetRule, SubsetSelection,
};
pub use usalg::{select_usalg_order, usalg};
