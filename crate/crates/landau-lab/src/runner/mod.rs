//! Configuration, the experiment registry and machine-readable outputs.
//!
//! A run reads one config file, executes one experiment and writes into its
//! output directory: `config.txt` (the resolved configuration), the
//! experiment's CSV tables and `summary.json`. Audit failures are data: they
//! land in the summary with `passed = false` and do not abort the run.

mod config;
mod experiments;
mod output;

use std::path::Path;
use std::time::Instant;

pub use config::{Experiment, RunConfig, Value};
pub use experiments::{dispatch, Outcome};
pub use output::{Metric, Summary, Table};

use crate::error::Result;

/// Run the configured experiment and write every artifact into `dir`.
pub fn run_experiment(cfg: &RunConfig, dir: &Path) -> Result<Summary> {
    let start = Instant::now();
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("config.txt"), cfg.echo())?;
    let outcome = dispatch(cfg)?;
    for t in &outcome.tables {
        t.write(dir)?;
    }
    let summary = Summary {
        experiment: cfg.experiment().name().to_string(),
        params: cfg.params(),
        seed: cfg.seed(),
        metrics: outcome.metrics,
        wallclock: start.elapsed().as_secs_f64(),
    };
    std::fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
    Ok(summary)
}

#[cfg(test)]
mod tests;
