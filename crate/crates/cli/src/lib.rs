//! `meshspectra`: extract descriptors from mesh datasets, query and score
//! them, and time extraction. The binary is a thin wrapper around [`run`].

mod bench;
mod evaluate;
mod extract;
mod retrieve;
mod store;
mod synth;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use meshspectra_core::descriptors::{DEFAULT_LAMBDA, DEFAULT_N};
use meshspectra_core::{DescriptorKind, Extractor, Metric};

/// Exit status for bad invocations.
const EXIT_USAGE: u8 = 1;
/// Exit status for failures caused by the data.
const EXIT_DATA: u8 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("features mix kinds or parameters: {first:?} and {other:?} differ")]
    MixedKinds { first: String, other: String },
    #[error("unknown query id {0:?}")]
    UnknownQueryId(String),
    #[error("no feature records found in {0}")]
    NoFeatures(PathBuf),
    #[error("no features to compare")]
    EmptyCorpus,
    #[error("two ids map to the same file name: {0:?}")]
    FileNameClash(String),
    #[error("{failed} of {total} entries failed")]
    EntriesFailed { failed: usize, total: usize },
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Parser)]
#[command(name = "meshspectra", version, about = "Breadth and area spectra of triangle meshes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute one descriptor or motion curve per manifest entry.
    Extract(extract::ExtractArgs),
    /// Rank stored features by distance to one of them.
    Retrieve(retrieve::RetrieveArgs),
    /// Score leave-one-out retrieval with NN, FT and ST.
    Evaluate(evaluate::EvaluateArgs),
    /// Time descriptor extraction on one mesh.
    Bench(bench::BenchArgs),
    /// Write a synthetic labeled corpus and its manifest.
    Synth(synth::SynthArgs),
}

/// Descriptor selection shared by the subcommands that extract.
#[derive(Debug, Clone, Args)]
pub struct DescriptorArgs {
    /// Descriptor kind, e.g. breadths, shape, q-shape.
    #[arg(long, value_parser = parse_kind)]
    pub kind: DescriptorKind,
    /// Grid parameter n.
    #[arg(long, default_value_t = DEFAULT_N)]
    pub n: usize,
    /// Percentile for the Q-kinds.
    #[arg(long, default_value_t = DEFAULT_LAMBDA)]
    pub lambda: f64,
    /// Temporal filter radius K for sequences.
    #[arg(long, default_value_t = 0)]
    pub window: usize,
}

impl DescriptorArgs {
    pub fn extractor(&self) -> anyhow::Result<Extractor> {
        if self.n == 0 || self.n > u8::MAX as usize {
            anyhow::bail!(CliError::Usage(format!("--n must be in 1..=255, got {}", self.n)));
        }
        if !(0.0..=100.0).contains(&self.lambda) {
            anyhow::bail!(CliError::Usage(format!("--lambda must be in [0, 100], got {}", self.lambda)));
        }
        Ok(Extractor::with_lambda(self.n, self.lambda))
    }
}

fn parse_kind(s: &str) -> Result<DescriptorKind, String> {
    s.parse::<DescriptorKind>().map_err(|e| e.to_string())
}

pub fn parse_metric(s: &str) -> Result<Metric, String> {
    s.parse()
}

/// Caps the global pool at `MESHSPECTRA_THREADS` when set.
fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("MESHSPECTRA_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| format!("MESHSPECTRA_THREADS must be a positive integer, got {value:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

/// Parses `args` (program name first), runs the command and maps the
/// outcome to the process exit status.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    let result = match cli.command {
        Command::Extract(args) => extract::run(&args),
        Command::Retrieve(args) => retrieve::run(&args),
        Command::Evaluate(args) => evaluate::run(&args),
        Command::Bench(args) => bench::run(&args),
        Command::Synth(args) => synth::run(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if matches!(e.downcast_ref::<CliError>(), Some(CliError::Usage(_))) {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::from(EXIT_DATA)
            }
        }
    }
}
