//! `mwt`: multiwavelet filter banks, transforms, PDE dataset generation and
//! operator-model training from the command line.
//!
//! Exit codes: 0 success, 1 usage, 2 I/O, 3 numerical failure or
//! divergence, 4 incompatible inputs.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mwt_core::transform::NamedKernel;
use mwt_core::{BasisKind, Error};

#[derive(Parser)]
#[command(name = "mwt", version, about = "multiwavelet operator-learning toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derive decomposition/reconstruction filters and export them as CSV
    Filters {
        /// basis family: legendre | chebyshev
        #[arg(long, default_value = "legendre")]
        kind: String,
        /// polynomial order (1..=6)
        #[arg(long, default_value_t = 4)]
        k: usize,
        /// output directory
        #[arg(long)]
        out: PathBuf,
        /// also dump the φ and ψ coefficient tables
        #[arg(long)]
        dump_basis: bool,
    },
    /// Multiscale transform self-tests and kernel mask dumps
    Transform {
        #[command(subcommand)]
        action: TransformAction,
    },
    /// Generate a synthetic PDE dataset from a config file
    Datagen {
        #[arg(long)]
        config: PathBuf,
        /// output file (defaults to a name derived from the config)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train an operator model on a dataset
    Train {
        #[arg(long)]
        config: PathBuf,
        /// dataset file (overrides data_path from the config)
        #[arg(long)]
        data: Option<PathBuf>,
        /// output directory (overrides out_dir from the config)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a checkpoint on a dataset
    Eval {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// evaluate at a coarser resolution (must divide the native one)
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Export the non-standard sparsity mask of a named kernel
    Kernelviz {
        /// gaussian | abs-difference | polynomial
        #[arg(long)]
        kernel: String,
        #[arg(long, default_value = "legendre")]
        kind: String,
        #[arg(long, default_value_t = 4)]
        k: usize,
        /// finest scale N (dense cost grows as 4^N)
        #[arg(long, default_value_t = 6)]
        levels: usize,
        #[arg(long, default_value_t = 1e-8)]
        threshold: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum TransformAction {
    /// decompose/reconstruct round trips on random coefficient arrays
    Selftest {
        #[arg(long, default_value = "legendre")]
        kind: String,
        #[arg(long, default_value_t = 4)]
        k: usize,
        /// finest scale N (signal length 2^N)
        #[arg(long, default_value_t = 8)]
        levels: usize,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// project a named kernel and dump the Fig.-2-style mask entries
    Kernel {
        #[arg(long)]
        kernel: String,
        #[arg(long, default_value = "legendre")]
        kind: String,
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, default_value_t = 6)]
        levels: usize,
        #[arg(long, default_value_t = 1e-8)]
        threshold: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io(_) => 2,
        Error::UnsupportedOrder(_)
        | Error::Domain(_)
        | Error::InvalidSpec(_)
        | Error::Format(_)
        | Error::Shape(_)
        | Error::Scale(_) => 1,
        Error::Incompatible(_) => 4,
        _ => 3,
    }
}

fn run(cli: Cli) -> mwt_core::Result<()> {
    match cli.command {
        Command::Filters {
            kind,
            k,
            out,
            dump_basis,
        } => commands::cmd_filters(BasisKind::parse(&kind)?, k, &out, dump_basis),
        Command::Transform { action } => match action {
            TransformAction::Selftest {
                kind,
                k,
                levels,
                samples,
                seed,
            } => commands::cmd_transform_selftest(
                BasisKind::parse(&kind)?,
                k,
                levels,
                samples,
                seed,
            ),
            TransformAction::Kernel {
                kernel,
                kind,
                k,
                levels,
                threshold,
                out,
            } => commands::cmd_transform_kernel(
                NamedKernel::parse(&kernel)?,
                BasisKind::parse(&kind)?,
                k,
                levels,
                threshold,
                &out,
            ),
        },
        Command::Datagen { config, out } => {
            commands::cmd_datagen(&config, out.as_deref()).map(|_| ())
        }
        Command::Train { config, data, out } => {
            commands::cmd_train(&config, data.as_deref(), out.as_deref()).map(|_| ())
        }
        Command::Eval {
            checkpoint,
            data,
            resolution,
        } => commands::cmd_eval(&checkpoint, &data, resolution).map(|_| ()),
        Command::Kernelviz {
            kernel,
            kind,
            k,
            levels,
            threshold,
            out,
        } => commands::cmd_kernelviz(
            NamedKernel::parse(&kernel)?,
            BasisKind::parse(&kind)?,
            k,
            levels,
            threshold,
            &out,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
