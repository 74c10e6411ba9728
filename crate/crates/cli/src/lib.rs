//! Library side of the `polytors` binary: argument types, the four
//! subcommands, and the verification sweep.

pub mod commands;
pub mod config;
pub mod sweep;

use thiserror::Error;

pub use commands::{cmd_homology, cmd_table, cmd_torsion, cmd_verify};
pub use config::{Cli, Command};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CONSISTENCY: i32 = 2;
pub const EXIT_STRICT_DISCREPANCY: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("internal consistency error: {0}")]
    Consistency(polytors_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Consistency(_) => EXIT_CONSISTENCY,
            CliError::Usage(_) | CliError::Io(_) => EXIT_USAGE,
        }
    }
}

impl From<polytors_core::Error> for CliError {
    fn from(e: polytors_core::Error) -> Self {
        use polytors_core::Error as E;
        match e {
            E::Inconsistent { .. } | E::Incompatible(_) => CliError::Consistency(e),
            other => CliError::Usage(other.to_string()),
        }
    }
}

/// What a subcommand produced: the rendered result, optional diagnostics for
/// stderr, and the process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Output {
    pub fn ok(stdout: String) -> Self {
        Output {
            stdout,
            stderr: String::new(),
            code: EXIT_OK,
        }
    }
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Result<Output, CliError> {
    let (out, path) = match &cli.command {
        Command::Homology(a) => (cmd_homology(a)?, &a.common.output),
        Command::Torsion(a) => (cmd_torsion(a)?, &a.common.output),
        Command::Table(a) => (cmd_table(a)?, &a.common.output),
        Command::Verify(a) => (cmd_verify(a)?, &a.common.output),
    };
    match path {
        Some(path) => {
            std::fs::write(path, &out.stdout)?;
            Ok(Output {
                stdout: format!("wrote {}\n", path.display()),
                ..out
            })
        }
        None => Ok(out),
    }
}
