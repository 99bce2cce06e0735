//! Experiment runner: configuration, the verification suites and the
//! numerical experiments, each producing a serializable [`Report`].

macro_rules! row {
    ($($x:expr),* $(,)?) => { vec![$(serde_json::json!($x)),*] };
}

mod checks;
mod config;
mod experiments;
mod report;

pub use checks::{
    exceptional_suite, expansion_suite, linear_algebra_suite, normalization_suite, split_suite, ExceptionalSummary,
    NormalizationSummary, ResidualSummary,
};
pub use config::{exponent_triple, Config, Experiment, Exponent};
pub use experiments::{affine_fit, bmo_symbol, estimate_norm, sweep_shapes, synthesis_entries, NormEstimate};
pub use report::{Assertion, DataTable, Report};

use crate::error::Result;

/// Validates `config` and runs its experiment.
pub fn run_experiment(config: &Config) -> Result<Report> {
    config.validate()?;
    match config.experiment {
        Experiment::Identities => experiments::identities(config),
        Experiment::Measures => experiments::measures(config),
        Experiment::Norms => experiments::norms(config),
        Experiment::Duality => experiments::duality(config),
        Experiment::WeakType => experiments::weak_type(config),
        Experiment::ComplexitySweep => experiments::complexity_sweep(config),
        Experiment::Synthesis => experiments::synthesis(config),
    }
}
