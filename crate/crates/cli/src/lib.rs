//! Configuration, orchestration and file output for the `ldcu` command.

use std::path::{Path, PathBuf};

pub mod commands;
pub mod config;
pub mod snapshot;

pub use commands::{cmd_compare, cmd_convergence, cmd_run, simulate, RunSummary, Simulation, SolutionField};
pub use config::{parse_config, RunConfig, WindowSpec};
pub use snapshot::{Snapshot1D, Snapshot2D, SnapshotMeta};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed snapshot: {0}")]
    Snapshot(String),
    #[error(transparent)]
    Solver(#[from] ldcu::SolverError),
    #[error(transparent)]
    Diagnostics(#[from] ldcu::diagnostics::DiagnosticsError),
}

impl CliError {
    pub(crate) fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
        move |source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// 0 success, 2 configuration, 3 aborted run, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        use ldcu::diagnostics::DiagnosticsError;
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(ldcu::SolverError::Config(_)) => 2,
            CliError::Diagnostics(DiagnosticsError::EmptyWindow { .. } | DiagnosticsError::NotSquare { .. }) => 2,
            CliError::Io { .. } | CliError::Snapshot(_) => 4,
            CliError::Solver(ldcu::SolverError::Sink(_)) => 4,
            CliError::Solver(_) | CliError::Diagnostics(_) => 3,
        }
    }
}
