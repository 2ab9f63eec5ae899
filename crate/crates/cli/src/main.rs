mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cullen_core::baker::Mode;

use crate::error::CliError;

/// Bounds, reductions and searches for `U_{n_1} + ... + U_{n_k} = l x^l + Q(x)`.
#[derive(Debug, Parser)]
#[command(name = "cullen", version)]
pub struct Cli {
    /// Starting working precision in bits.
    #[arg(long, global = true, env = "CULLEN_PRECISION", default_value_t = 256,
          value_parser = clap::value_parser!(u32).range(64..=8192))]
    pub precision: u32,
    /// Worker threads for searches and reductions.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    pub workers: Option<u32>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    /// `F_{n_1} + F_{n_2} = l 2^l + 1`.
    Fib,
    /// An instance given by `--spec`, `--x`, `--k` and `--q`.
    General,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Replay,
    Rigorous,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Replay => Mode::Replay,
            ModeArg::Rigorous => Mode::Rigorous,
        }
    }
}

#[derive(Debug, Args)]
pub struct InstanceArgs {
    /// Recurrence JSON file: `{"order", "coefficients", "initials"}`.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long, default_value = "2")]
    pub x: String,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Nonzero `Q(x)` as a polynomial expression, a coefficient list `[c0, c1, ...]`, or `+c` / `-c`.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub q: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Effective bound on `n_1` with a ledger of every constant.
    Bound {
        target: Target,
        #[arg(long, value_enum, default_value_t = ModeArg::Rigorous)]
        mode: ModeArg,
        #[command(flatten)]
        instance: InstanceArgs,
        /// Ledger JSON destination; printed to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lattice reduction of the Fibonacci bounds.
    Reduce {
        target: Target,
        /// 1 reduces `n_1 - n_2`, 2 reduces `n_1`; both when absent.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        stage: Option<u8>,
        /// Bound on `n_1 - n_2` used by the second stage.
        #[arg(long)]
        gap: Option<u64>,
        /// Prebound on `n_1`; taken from the replay chain when absent.
        #[arg(long)]
        n1_max: Option<String>,
        /// Prebound on `l`; `0.75 n1_max` when absent.
        #[arg(long)]
        ell_max: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive search in a box.
    Search {
        target: Target,
        #[arg(long, default_value_t = 10)]
        ell_max: u64,
        #[arg(long, default_value_t = 0)]
        ell_min: u64,
        #[arg(long, default_value_t = 100)]
        n1_max: u64,
        #[command(flatten)]
        instance: InstanceArgs,
        /// Expected solution list; exit 5 on any difference.
        #[arg(long)]
        expect: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Tab-separated output instead of JSON.
        #[arg(long)]
        tsv: bool,
    },
    /// Certificate for the periodic sequence `G_{n+3} = 3 G_{n+2} - 3 G_{n+1} + 2 G_n`.
    VerifyCounterexample {
        #[arg(long, default_value_t = 10_000)]
        k_max: u64,
        /// Alternative recurrence to check in place of the built-in one.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
