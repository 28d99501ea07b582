//! Command-line front end: `census`, `tate`, `reduce` and `selftest`.
//!
//! Every command writes line-delimited JSON to stdout. Failures print one
//! JSON error line to stderr and exit with 2 (configuration), 3
//! (precision) or 4 (mathematical precondition). A failing selftest exits
//! with 1.

pub mod commands;
pub mod config;
pub mod json;
pub mod selftest;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::exec::Execution;
use config::JobConfig;
use json::{line, ErrorDoc, Int, ReduceInput};

#[derive(Parser, Debug)]
#[command(name = "dforge", version, about = "Drinfeld modules over F_q[T]: cusps, Tate-Drinfeld expansions, stable reduction")]
pub struct Cli {
    /// Disable the data-parallel paths.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct FieldArgs {
    /// Field size, a prime power.
    #[arg(long, default_value_t = 3)]
    pub q: u64,
    /// Level f as little-endian coefficient indices, e.g. 0,1 for T.
    #[arg(long, allow_hyphen_values = true)]
    pub f: String,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Group orders and cusp counts for level f.
    Census {
        #[command(flatten)]
        field: FieldArgs,
        /// Class number factor.
        #[arg(long, default_value_t = 1)]
        h: u64,
    },
    /// Tate-Drinfeld expansion at level f to precision N.
    Tate {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long = "N", default_value_t = 9)]
        n: i64,
        /// Also write the expansion specialized to a finite field, in the
        /// `reduce` input format.
        #[arg(long = "emit-reduce")]
        emit_reduce: Option<PathBuf>,
    },
    /// Stable reduction of a module over F_{q^m}((x)) read from a file.
    Reduce {
        input: PathBuf,
        /// Working precision (defaults to the file's N).
        #[arg(long = "N")]
        n: Option<i64>,
        /// τ-degree of the approximation.
        #[arg(long = "D", default_value_t = 2)]
        d: usize,
    },
    /// Seeded invariant suites.
    Selftest {
        #[arg(long, default_value_t = selftest::DEFAULT_SEED)]
        seed: u64,
        /// Samples per suite (defaults vary by suite).
        #[arg(long)]
        samples: Option<usize>,
        /// Run against a deliberately broken skew product (mutation check).
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Census { .. } => "census",
            Command::Tate { .. } => "tate",
            Command::Reduce { .. } => "reduce",
            Command::Selftest { .. } => "selftest",
        }
    }
}

fn exec(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::default()
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32, Error> {
    let io = |e: std::io::Error| Error::Config(format!("write failed: {e}"));
    match &cli.command {
        Command::Census { field, h } => {
            let cfg = JobConfig::new(field.q, &field.f, 1, 0)?;
            let doc = commands::cmd_census(&cfg, *h, exec(cli.sequential))?;
            writeln!(out, "{}", line(&doc)).map_err(io)?;
        }
        Command::Tate { field, n, emit_reduce } => {
            let cfg = JobConfig::new(field.q, &field.f, *n, 0)?;
            let (doc, input) = commands::cmd_tate(&cfg)?;
            writeln!(out, "{}", line(&doc)).map_err(io)?;
            if let Some(p) = emit_reduce {
                std::fs::write(p, line(&input) + "\n")
                    .map_err(|e| Error::Config(format!("cannot write {}: {e}", p.display())))?;
            }
        }
        Command::Reduce { input, n, d } => {
            let bound = crate::algebra::gf::checked_max_field_size()?;
            let text = std::fs::read_to_string(input)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", input.display())))?;
            let doc: ReduceInput =
                serde_json::from_str(text.trim()).map_err(|e| Error::Config(format!("{}: {e}", input.display())))?;
            let rep = commands::cmd_reduce(&doc, *n, *d, bound)?;
            writeln!(out, "{}", line(&rep)).map_err(io)?;
        }
        Command::Selftest { seed, samples, inject_fault } => {
            let res = selftest::run_suites(*seed, *samples, *inject_fault);
            for l in selftest::report(&res, *seed) {
                writeln!(out, "{l}").map_err(io)?;
            }
            if res.iter().any(|r| r.failed() > 0) {
                return Ok(1);
            }
        }
    }
    Ok(0)
}

/// Runs the tool on `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let sink: &mut dyn Write = if code == 0 { out } else { err };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let code = e.exit_code();
            let doc = ErrorDoc {
                command: cli.command.name().into(),
                status: "error".into(),
                exit: Int(code),
                message: e.to_string(),
            };
            let _ = writeln!(err, "{}", line(&doc));
            code
        }
    }
}
