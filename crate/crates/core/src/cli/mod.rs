//! Experiment configuration and the subcommand entry points.
//!
//! Every figure-style experiment is a config file plus a subcommand; all
//! outputs are data files under the chosen output directory, reproducible
//! from the config and seed alone (timing fields excepted).

pub mod commands;
pub mod config;

pub use commands::*;
pub use config::*;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
    #[error(transparent)]
    Analytic(#[from] crate::analytic::AnalyticError),
    #[error(transparent)]
    Train(#[from] crate::training::TrainError),
    #[error(transparent)]
    Pinn(#[from] crate::pinn::PinnError),
    #[error(transparent)]
    Regress(#[from] crate::regress::RegressError),
    #[error(transparent)]
    Eval(#[from] crate::evalsuite::EvalError),
    #[error(transparent)]
    Bundle(#[from] crate::pinn::bundle::BundleError),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Exit-code category: 2 config, 3 data/io, 4 training, 5 regression,
    /// 6 evaluation.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Toml(_) => 2,
            CliError::Io(_) | CliError::Json(_) | CliError::Geometry(_) => 3,
            CliError::Train(_) | CliError::Pinn(_) => 4,
            CliError::Regress(_) => 5,
            CliError::Eval(_) | CliError::Analytic(_) | CliError::Bundle(_) => 6,
        }
    }
}
