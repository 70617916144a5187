//! Experiment harness for the hybrid NOMA analysis library: JSON-driven
//! SNR sweeps, figure presets and cross-validation reports.

pub mod presets;
pub mod spec;
pub mod sweep;
pub mod validate;

pub use spec::{Quantity, SweepSpec};
pub use sweep::{run_sweep, write_rows, Format, Row, COLUMNS};
pub use validate::{default_specs, run_validation, Check, Report, ValidateOptions};

/// Failures of a command, each mapped to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("validation failed: {0}")]
    Validation(String),
}

impl CliError {
    /// 1 for a failed validation, 2 for anything wrong with the input.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Config(_) | CliError::Io(_) => 2,
        }
    }
}
