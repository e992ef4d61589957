//! Monte Carlo experiments, bound checks and file I/O.

pub mod config;
pub mod iq;
pub mod props;
pub mod sweep;
pub mod trial;

pub use config::{ExperimentConfig, Method, Scenario};
pub use iq::{read_iq, read_iq_from, write_iq, write_iq_to};
pub use props::{check_propositions, PropCheckConfig, PropReport, SuiteReport};
pub use sweep::{run_sweep, write_outputs, GridSummary, SweepOutput};
pub use trial::{draw_scene, run_trial, trial_seed, Scene, TrialResult, TrialSpec};
