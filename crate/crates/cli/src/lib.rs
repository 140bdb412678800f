//! Configuration-driven scenario runner for `quanputer-core`.
//!
//! A scenario is a kind (one of the registered [`ScenarioKind`]s) plus a
//! sectioned configuration. Running it produces CSV and binary files that are
//! written together once the computation has finished, alongside a manifest.

pub mod config;
pub mod kinds;
pub mod presets;
pub mod runner;

use thiserror::Error;

pub use config::{ConfigError, KeySpec, Params, RawConfig};
pub use kinds::{kind_registry, Check, Outcome, OutputFile, RunContext, ScenarioKind};
pub use presets::{find_preset, list_scenarios, Preset, PRESETS};
pub use runner::{run_scenario, RunRequest, RunResult};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("{module} error: {message}")]
    Numeric { module: &'static str, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 2,
            CliError::Numeric { .. } => 3,
            CliError::Io(_) => 1,
        }
    }
}

/// Exit status for a run whose expected-order or tolerance check failed.
pub const EXIT_CHECK_FAILED: i32 = 4;

macro_rules! numeric_from {
    ($($ty:ty => $module:literal),* $(,)?) => {
        $(impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::Numeric { module: $module, message: e.to_string() }
            }
        })*
    };
}

numeric_from!(
    quanputer_core::dynsys::DynsysError => "dynsys",
    quanputer_core::qreg::QregError => "qreg",
    quanputer_core::quantum_solver::SolverError => "quantum_solver",
    quanputer_core::liouville::LiouvilleError => "liouville",
    quanputer_core::opverify::VerifyError => "opverify",
);

impl From<quanputer_core::RegistryError> for CliError {
    fn from(e: quanputer_core::RegistryError) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
