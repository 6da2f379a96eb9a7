use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use onoff_cli::{run, Experiment, ExperimentConfig, RunError, EXIT_CHECK_FAILED, EXIT_ERROR};

/// Run an on-off traffic experiment and write data.csv and manifest.json.
#[derive(Debug, Parser)]
#[command(version)]
struct Args {
    /// TOML config; fields not given fall back to the experiment's preset.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    experiment: Option<Experiment>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    replications: Option<usize>,
}

fn config_from(args: &Args) -> Result<ExperimentConfig, RunError> {
    let mut cfg = match (&args.config, args.experiment) {
        (Some(path), e) => ExperimentConfig::from_file(path, e)?,
        (None, Some(e)) => ExperimentConfig::preset(e),
        (None, None) => return Err(RunError::Config("give --experiment or --config".into())),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.out = out.clone();
    }
    if let Some(threads) = args.threads {
        cfg.threads = Some(threads);
    }
    if let Some(n) = args.replications {
        cfg.replications = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let outcome = config_from(&args).and_then(|cfg| run(&cfg));
    match outcome {
        Ok(outcome) => {
            for c in &outcome.report.checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                println!("{tag} {} = {:.6} in [{}, {}]", c.name, c.value, c.lower, c.upper);
            }
            println!("wrote {} and {}", outcome.csv.display(), outcome.manifest.display());
            if outcome.report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_CHECK_FAILED as u8)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
