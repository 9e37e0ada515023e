//! Scenario loading, parameter sweeps, and validation runs for the
//! double-RIS downlink simulator. The `ris-sim` binary is a thin wrapper
//! around this library so tests drive the exact code paths the CLI uses.

use thiserror::Error;

pub mod scenario;
pub mod sweep;
pub mod validate;

pub use scenario::{load_scenario, ResolvedScenario, ScenarioFile, DEFAULT_SEED, SEED_ENV_VAR};
pub use sweep::{
    parse_grid, render_csv, run_sweep, SweepMode, SweepParam, SweepRow, SweepSpec, CSV_HEADER,
};
pub use validate::{rbd_check, validate, CheckResult, RbdCheckReport, ValidationReport};

/// CLI-level errors: schema and range problems with field context, plus
/// anything bubbling up from the core.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("schema error: {0}")]
    Schema(String),

    #[error("range error in `{field}`: {message}")]
    Range { field: String, message: String },

    #[error(transparent)]
    Core(#[from] ris_core::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
