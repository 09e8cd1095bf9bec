use std::path::PathBuf;
use std::process::ExitCode;

use besov_lab::config::OUT_ENV;
use besov_lab::{run, RunConfig, Subcommand};
use clap::Parser;

/// Estimators and inequality certificates for fractional smoothness functionals.
#[derive(Debug, Parser)]
#[command(name = "besov-lab", version)]
struct Cli {
    #[arg(value_enum)]
    subcommand: Subcommand,
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one configuration key, e.g. `--set alpha=0.5,1`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory; takes precedence over the environment and the config file.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn build_config(cli: &Cli) -> besov_lab::Result<RunConfig> {
    let mut cfg = RunConfig::defaults(cli.subcommand);
    if let Some(path) = &cli.config {
        cfg.apply_file(path)?;
    }
    if let Ok(dir) = std::env::var(OUT_ENV) {
        cfg.out = PathBuf::from(dir);
    }
    for pair in &cli.overrides {
        cfg.set_pair(pair)?;
    }
    if let Some(dir) = &cli.out {
        cfg.out = dir.clone();
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = build_config(&cli).and_then(|cfg| run(&cfg).map(|o| (cfg, o)));
    match result {
        Ok((cfg, outcome)) => {
            for f in &outcome.files {
                println!("{}", cfg.out.join(f).display());
            }
            if outcome.certificate_failure {
                eprintln!("certificate failure: see {}", cfg.out.join("certificates.json").display());
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
