//! `gravkit`: gravity-field modeling experiments from config files.

use clap::{Parser, Subcommand};
use gravkit::cli::{self, CliError, ExperimentConfig};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "gravkit", about = "Gravity-field modeling toolkit", version)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a training dataset from the configured truth field.
    GenData {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override every seeded stage of the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Train a learned model (pinn3 or tnn).
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Regress a classical model (sh, mascon, elm).
    Regress {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Evaluate a stored model against the configured truth.
    Evaluate {
        #[arg(long)]
        config: PathBuf,
        /// Model path (bundle dir or file), or `point_mass` / `poly`.
        #[arg(long)]
        model: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Evaluate every model listed in the config and emit a comparison table.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Propagate a model and the truth on the configured orbit.
    Trajectory {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        model: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Train the configured hyperparameter grids cell by cell.
    Ablate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Train the staged-modification ladder and report per-stage errors.
    ModsStudy {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn load(config: &std::path::Path, seed: Option<u64>) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::load(config)?;
    if let Some(s) = seed {
        cfg.override_seed(s);
    }
    Ok(cfg)
}

fn run() -> Result<(), CliError> {
    match Args::parse().command {
        Command::GenData { config, out, seed } => {
            let path = cli::cmd_gen_data(&load(&config, seed)?, &out)?;
            println!("wrote {}", path.display());
        }
        Command::Train { config, out, seed } => {
            let summary = cli::cmd_train(&load(&config, seed)?, &out)?;
            println!("{}", serde_json::to_string_pretty(&summary).unwrap());
        }
        Command::Regress { config, out, seed } => {
            let summary = cli::cmd_regress(&load(&config, seed)?, &out)?;
            println!("{}", serde_json::to_string_pretty(&summary).unwrap());
        }
        Command::Evaluate { config, model, out, seed } => {
            let report = cli::cmd_evaluate(&load(&config, seed)?, &model, &out)?;
            println!("{}", report.to_json());
        }
        Command::Compare { config, out, seed } => {
            let path = cli::cmd_compare(&load(&config, seed)?, &out)?;
            println!("wrote {}", path.display());
        }
        Command::Trajectory { config, model, out, seed } => {
            let (s_km, final_km) = cli::cmd_trajectory(&load(&config, seed)?, &model, &out)?;
            println!("accumulated error {s_km:.4} km, final error {final_km:.4} km");
        }
        Command::Ablate { config, out, seed } => {
            let rows = cli::cmd_ablate(&load(&config, seed)?, &out)?;
            println!("{} grid cells written", rows.len());
        }
        Command::ModsStudy { config, out, seed } => {
            let rows = cli::cmd_mods_study(&load(&config, seed)?, &out)?;
            for r in &rows {
                println!(
                    "stage {}: interior {:.4}% exterior {:.4}% extrapolation {:.4}% limit {:.4}%",
                    r.stage, r.interior_pct, r.exterior_pct, r.extrapolation_pct, r.limit_pct
                );
            }
        }
    }
    Ok(())
}

fn main() {
    if let Err(err) = run() {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
