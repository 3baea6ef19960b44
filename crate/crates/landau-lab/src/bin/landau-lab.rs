use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use landau_lab::runner::{run_experiment, Experiment, RunConfig};
use landau_lab::Error;

/// Run one laboratory experiment and write its CSV tables and summary.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    /// landau-verify, inequalities, linear-decay, picard, decay, split,
    /// weakstrong, continuity or resolvent.
    experiment: String,
    /// Flat `section.key = value` configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `run.out`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `run.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Suppress the per-metric report.
    #[arg(long)]
    quiet: bool,
}

const CONFIG_ERROR: u8 = 2;
const RUNTIME_ERROR: u8 = 3;

fn load(cli: &Cli) -> landau_lab::Result<RunConfig> {
    let experiment: Experiment = cli.experiment.parse()?;
    let text = std::fs::read_to_string(&cli.config)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", cli.config.display())))?;
    // The positional experiment fills in `run.experiment` unless the file
    // names a different one.
    let mut cfg = match RunConfig::parse(&text) {
        Ok(c) => c,
        Err(Error::Config(m)) if m.contains("missing required key `run.experiment`") => {
            RunConfig::parse(&format!("run.experiment = {experiment}\n{text}"))?
        }
        Err(e) => return Err(e),
    };
    if cfg.experiment() != experiment {
        return Err(Error::Config(format!("config names experiment `{}` but `{experiment}` was requested", cfg.experiment())));
    }
    if let Some(seed) = cli.seed {
        cfg.set("run.seed", &seed.to_string())?;
    }
    if let Some(out) = &cli.out {
        cfg.set("run.out", &out.to_string_lossy())?;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("LANDAU_LAB_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().ok();
    }
    let cfg = match load(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(CONFIG_ERROR);
        }
    };
    let dir = PathBuf::from(cfg.text("run.out"));
    match run_experiment(&cfg, &dir) {
        Ok(summary) => {
            if !cli.quiet {
                for (name, m) in &summary.metrics {
                    let verdict = match (m.threshold, m.passed) {
                        (None, _) => "info",
                        (_, true) => "PASS",
                        (_, false) => "FAIL",
                    };
                    let show = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.6e}"));
                    println!("{verdict:4} {name:32} {:>14} {:>14}", show(m.value), show(m.threshold));
                }
                println!("wrote {}", dir.display());
            }
            ExitCode::SUCCESS
        }
        Err(e @ Error::Config(_)) | Err(e @ Error::InvalidParameter(_)) | Err(e @ Error::UnderResolved(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(CONFIG_ERROR)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(RUNTIME_ERROR)
        }
    }
}
