//! Named experiment recipes. Each returns its tables; writing them is the
//! caller's job so tests can inspect results in memory.

mod cooling;
mod decay;
mod noisy;
mod validate;

use std::path::PathBuf;

use crate::config::{ExperimentConfig, Recipe};
use crate::error::{CliError, CliResult};
use crate::output::{write_tables, Table};

pub use validate::{monte_carlo_z, Check, MC_REPETITIONS, MC_SHOTS_PER_CIRCUIT};

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub tables: Vec<Table>,
    /// Human-readable lines for stdout.
    pub summary: Vec<String>,
    /// `(failed, total)` for the validation suite.
    pub checks: Option<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Worker threads for sweep cells; `None` lets rayon decide.
    pub threads: Option<usize>,
}

/// Runs the selected recipe without touching the filesystem.
pub fn compute(config: &ExperimentConfig, options: RunOptions) -> CliResult<Outcome> {
    config.validate()?;
    let recipe = config.recipe()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = options.threads {
        builder = builder.num_threads(k.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::config("threads", format!("cannot start worker pool: {e}")))?;
    pool.install(|| match recipe {
        Recipe::CoolingMse => cooling::run(config),
        Recipe::Mitigate => noisy::run_mitigate(config),
        Recipe::Unified => noisy::run_unified(config),
        Recipe::GaussianDecay => decay::run(config),
        Recipe::Validate => validate::run(config),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub outcome: Outcome,
    pub files: Vec<PathBuf>,
}

/// Runs the recipe and writes its CSV files, sidecars and optional SVGs. A
/// failed validation suite still writes its table before returning
/// [`CliError::ValidationFailed`].
pub fn run_experiment(config: &ExperimentConfig, options: RunOptions) -> CliResult<RunReport> {
    let outcome = compute(config, options)?;
    let files = write_tables(&outcome.tables, config, config.output.svg)?;
    if let Some((failed, total)) = outcome.checks {
        if failed > 0 {
            return Err(CliError::ValidationFailed { failed, total });
        }
    }
    Ok(RunReport { outcome, files })
}
