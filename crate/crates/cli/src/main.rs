//! `clique-forest`: decide, build, verify and probe RAAG embeddings from the
//! command line.
//!
//! Exit status: 0 pass, 1 finding (not embeddable, verification failure,
//! obstruction found, …), 2 input error, 3 synthesis stage failure.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use clique_forest::diffeo::Manifold;

pub const THREADS_ENV: &str = "CLIQUE_FOREST_THREADS";

#[derive(Parser, Debug)]
#[command(name = "clique-forest", version, about = "Right-angled Artin groups acting on the interval and the circle")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide embeddability of a graph's RAAG and write the certificate.
    Decide {
        graph: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Build an explicit embedding and verify it.
    Synthesize {
        graph: PathBuf,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        synth: SynthArgs,
        /// Where to write the verification report (JSON).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Re-verify a saved assignment.
    Verify {
        assignment: PathBuf,
        /// Graph the assignment must realize; defaults to the one it records.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = clique_forest::synth::DEFAULT_WORD_LEN)]
        word_len: usize,
    },
    /// Locate the fixed points of one expression.
    Fixpoints {
        /// File holding an expression in text or JSON form.
        expr: PathBuf,
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Commutation graph of a list of expressions, written as DOT.
    Commgraph {
        /// File with one text expression per line, or a JSON array.
        exprs: PathBuf,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = clique_forest::raag::DEFAULT_POWER_BOUND)]
        power_bound: u32,
        /// Where to write the residual table and completeness report (JSON).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Search a finite set of matrices for the commuting-chain obstruction.
    Obstruct {
        /// Oracle file; omit when using --heisenberg.
        oracle: Option<PathBuf>,
        /// Use the Heisenberg ball of this radius instead of a file.
        #[arg(long, conflicts_with = "oracle")]
        heisenberg: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Commutators of the sine-shear family on the line.
    Remark {
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
        b: f64,
        #[arg(long, default_value_t = 3)]
        n_max: u32,
        #[arg(long, default_value_t = clique_forest::obstruct::DEFAULT_REMARK_GRID)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the JSON Schema of an output document.
    Schema {
        #[arg(value_enum)]
        document: SchemaName,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
struct Common {
    #[arg(long, value_enum, default_value_t = ManifoldArg::I)]
    manifold: ManifoldArg,
    #[arg(long, default_value_t = clique_forest::raag::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = clique_forest::diffeo::DEFAULT_GRID)]
    grid: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct SynthArgs {
    #[arg(long, default_value_t = clique_forest::synth::DEFAULT_WORD_LEN)]
    word_len: usize,
    #[arg(long, default_value_t = clique_forest::synth::DEFAULT_ALPHA_K)]
    alpha_k: u32,
    #[arg(long, default_value_t = clique_forest::synth::DEFAULT_BASEPOINT)]
    basepoint: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ManifoldArg {
    #[value(name = "I", alias = "i")]
    I,
    #[value(name = "S1", alias = "s1")]
    S1,
}

impl From<ManifoldArg> for Manifold {
    fn from(m: ManifoldArg) -> Self {
        match m {
            ManifoldArg::I => Manifold::Interval,
            ManifoldArg::S1 => Manifold::Circle,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Text,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum SchemaName {
    Decision,
    Assignment,
    Verification,
    Fixpoints,
    Commgraph,
    Obstruct,
    Remark,
    Expr,
    Graph,
}

/// Outcome of a subcommand, mapped to the exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass = 0,
    Finding = 1,
    InputError = 2,
    StageFailure = 3,
}

/// An error with the exit status it should produce.
#[derive(Debug)]
pub struct Failure {
    pub status: Status,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure { status: Status::InputError, message: message.into() }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::input(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::input(format!("cannot size the thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { Status::InputError as u8 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = configure_threads().and_then(|()| commands::run(cli.command));
    match result {
        Ok(status) => ExitCode::from(status as u8),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.status as u8)
        }
    }
}
