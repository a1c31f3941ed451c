//! Command-line front end: JSON documents in, reports and documents out.
//!
//! [`run`] executes one invocation and returns its exit code and output, so
//! the binary and the tests share a single code path.
//!
//! Exit codes: 0 success, 1 mathematical failure, 2 parse or usage error,
//! 3 size cap exceeded.

pub mod commands;
pub mod document;
pub mod format;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use lts_core::Caps;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MATH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("{0}")]
    Math(String),
    #[error("cap exceeded: {0}")]
    Cap(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Usage(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::Math(_) => EXIT_MATH,
            CliError::Cap(_) => EXIT_CAP,
        }
    }
}

impl From<lts_core::CohomologyError> for CliError {
    fn from(e: lts_core::CohomologyError) -> Self {
        match e {
            _ if e.is_cap() => CliError::Cap(e.to_string()),
            lts_core::CohomologyError::InvalidDegree(_) => CliError::Usage(e.to_string()),
            _ => CliError::Math(e.to_string()),
        }
    }
}

impl From<lts_core::DeformationError> for CliError {
    fn from(e: lts_core::DeformationError) -> Self {
        if e.is_cap() {
            CliError::Cap(e.to_string())
        } else {
            CliError::Math(e.to_string())
        }
    }
}

impl From<lts_core::GroupError> for CliError {
    fn from(e: lts_core::GroupError) -> Self {
        match e {
            lts_core::GroupError::TooLarge { .. } | lts_core::GroupError::AmbientTooLarge { .. } => {
                CliError::Cap(e.to_string())
            }
            _ => CliError::Math(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "lts", version, about = "Exact computations with Lie triple systems, Yamaguti cohomology and equivariant deformations")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Print a machine-readable JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Coefficient field, `rational` or `gf:<p>`; overrides the system document.
    #[arg(long, global = true)]
    pub field: Option<String>,
    /// Largest cochain degree that may be built.
    #[arg(long, global = true, env = "LTS_MAX_DEGREE", default_value_t = Caps::default().max_degree)]
    pub max_degree: usize,
    /// Largest ambient cochain dimension `d^k m`.
    #[arg(long, global = true, env = "LTS_MAX_AMBIENT", default_value_t = Caps::default().max_ambient)]
    pub max_ambient: usize,
    /// Largest accepted group order.
    #[arg(long, global = true, env = "LTS_MAX_GROUP_ORDER", default_value_t = Caps::default().max_group_order)]
    pub max_group_order: usize,
}

impl GlobalArgs {
    pub fn caps(&self) -> Caps {
        Caps {
            max_degree: self.max_degree,
            max_ambient: self.max_ambient,
            max_group_order: self.max_group_order,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the axioms of a system and, optionally, a group action on it.
    Verify {
        system: PathBuf,
        #[arg(long)]
        action: Option<PathBuf>,
    },
    /// Dimensions of cocycles, coboundaries and cohomology in one degree.
    Cohomology {
        system: PathBuf,
        #[arg(long)]
        degree: usize,
        /// Restrict to cochains invariant under this action.
        #[arg(long, value_name = "ACTION")]
        equivariant: Option<PathBuf>,
        /// Also print a cocycle for each cohomology basis class.
        #[arg(long)]
        representatives: bool,
    },
    /// Check the deformation equations of a truncated deformation.
    DeformCheck {
        deformation: PathBuf,
        /// Read the series at this order: zero-padded above, truncated below.
        #[arg(long)]
        order: Option<usize>,
    },
    /// Compute the obstruction to extending by one order.
    DeformObstruct {
        deformation: PathBuf,
        /// Write the extended deformation here when it exists.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extend by one order; fails when the obstruction class is nonzero.
    DeformExtend {
        deformation: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for an equivariant formal isomorphism from the first
    /// deformation to the second.
    DeformEquiv {
        first: PathBuf,
        second: PathBuf,
        /// Highest order to match; defaults to the larger document order.
        #[arg(long)]
        cap: Option<usize>,
        /// Write the isomorphism document here when one exists.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Remove coboundary infinitesimals order by order.
    DeformTrivialize {
        deformation: PathBuf,
        /// Highest order to track; defaults to the document order.
        #[arg(long)]
        cap: Option<usize>,
        /// Write the accumulated isomorphism document here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify rigidity through the vanishing of the degree-3 cohomology.
    Rigidity {
        system: PathBuf,
        #[arg(long, value_name = "ACTION")]
        equivariant: Option<PathBuf>,
    },
    /// Emit a document for a standard example.
    Build {
        #[command(subcommand)]
        kind: commands::BuildKind,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    match commands::execute(&cli) {
        Ok(report) => Outcome {
            code: report.code,
            stdout: report.render(cli.global.json),
            stderr: String::new(),
        },
        Err(e) => {
            let code = e.exit_code();
            if cli.global.json {
                let value = serde_json::json!({ "error": e.to_string(), "exitCode": code });
                Outcome {
                    code,
                    stdout: format!("{}\n", serde_json::to_string_pretty(&value).expect("json")),
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: format!("error: {e}\n"),
                }
            }
        }
    }
}
