//! Stage runner behind the `tunnel-orders` command line.

mod output;
mod pipeline;

use std::path::{Path, PathBuf};
use std::time::Instant;

use thiserror::Error;

/// Subcommands; all share one config schema.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Expand,
    Predict,
    Fit,
    Verify,
    Oracle,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Expand => "expand",
            Command::Predict => "predict",
            Command::Fit => "fit",
            Command::Verify => "verify",
            Command::Oracle => "oracle",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub out: PathBuf,
    /// Overrides `scenario.precision_bits`.
    pub precision: Option<usize>,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Core(#[from] tunnel_orders::Error),
    #[error("cannot read config `{path}`: {source}")]
    ReadConfig {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write `{path}`: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot encode `{path}`: {message}")]
    Encode { path: PathBuf, message: String },
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VERIFY_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

impl RunError {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        use tunnel_orders::Error as E;
        match self {
            RunError::Core(e) => match e {
                E::Numeric(_) | E::NoTurningPoint(_) | E::DivisionByNonUnit => EXIT_NUMERIC,
                _ => EXIT_CONFIG,
            },
            RunError::ReadConfig { .. } => EXIT_CONFIG,
            RunError::Write { .. } | RunError::Encode { .. } => EXIT_NUMERIC,
        }
    }
}

/// Result of a successful run.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub pass: bool,
    pub files: Vec<PathBuf>,
    pub summary: Vec<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            EXIT_PASS
        } else {
            EXIT_VERIFY_FAIL
        }
    }
}

/// Runs one subcommand on a config file and writes its outputs.
pub fn run(command: Command, config: &Path, opts: &RunOptions) -> Result<Outcome, RunError> {
    let started = Instant::now();
    let text = std::fs::read_to_string(config).map_err(|source| RunError::ReadConfig {
        path: config.to_path_buf(),
        source,
    })?;
    let mut ctx = pipeline::Context::load(&text, opts.precision)?;
    let mut files = output::Files::new(&opts.out)?;
    let pass = match command {
        Command::Expand => pipeline::cmd_expand(&mut ctx, &mut files)?,
        Command::Predict => pipeline::cmd_predict(&mut ctx, &mut files)?,
        Command::Fit => pipeline::cmd_fit(&mut ctx, &mut files)?,
        Command::Verify => pipeline::cmd_verify(&mut ctx, &mut files)?,
        Command::Oracle => pipeline::cmd_oracle(&mut ctx, &mut files)?,
    };
    let summary = ctx.summary.clone();
    files.manifest(command, config, &ctx, started.elapsed().as_secs_f64())?;
    Ok(Outcome {
        pass,
        files: files.written,
        summary,
    })
}
