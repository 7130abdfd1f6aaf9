//! Experiment runner: configuration handling, the named recipes and their
//! CSV/SVG output. The `vpure` binary is a thin wrapper over [`run_cli`].

pub mod config;
pub mod error;
pub mod output;
pub mod recipes;

use std::path::PathBuf;

use clap::Parser;
use serde_json::{Map, Value};

pub use config::{ExperimentConfig, Recipe};
pub use error::{CliError, CliResult};
pub use recipes::{compute, run_experiment, Outcome, RunOptions, RunReport};

#[derive(Debug, Clone, Parser)]
#[command(name = "vpure", version, about = "Fully and localized virtual purification experiments")]
pub struct Args {
    /// cooling-mse, mitigate, unified, gaussian-decay or validate.
    pub recipe: String,
    /// JSON or `key = value` config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Master seed (overrides `protocol.seed`).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads for sweep cells.
    #[arg(long, env = "VPURE_THREADS")]
    pub threads: Option<usize>,
    /// Also write SVG line plots.
    #[arg(long)]
    pub svg: bool,
    /// Extra `dotted.key=value` overrides, applied after the file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

/// Merges file, overrides and flags into a validated config.
pub fn resolve_config(args: &Args) -> CliResult<ExperimentConfig> {
    let mut doc = match &args.config {
        Some(path) => config::read_document(path)?,
        None => Value::Object(Map::new()),
    };
    if !doc.is_object() {
        return Err(CliError::config("<root>", "config must be a table"));
    }
    for o in &args.overrides {
        config::apply_override(&mut doc, o)?;
    }
    config::insert_dotted(&mut doc, "recipe", Value::String(args.recipe.clone()), true)?;
    if let Some(seed) = args.seed {
        config::insert_dotted(&mut doc, "protocol.seed", Value::from(seed), true)?;
    }
    if let Some(out) = &args.out {
        config::insert_dotted(&mut doc, "output.dir", Value::String(out.display().to_string()), true)?;
    }
    if args.svg {
        config::insert_dotted(&mut doc, "output.svg", Value::Bool(true), true)?;
    }
    let cfg = config::from_value(doc)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Parses, runs and writes; returns the report or the error whose
/// [`CliError::exit_code`] the binary exits with.
pub fn run_cli(args: &Args) -> CliResult<RunReport> {
    let cfg = resolve_config(args)?;
    run_experiment(&cfg, RunOptions { threads: args.threads })
}
