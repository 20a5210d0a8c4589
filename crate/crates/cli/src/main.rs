//! `cantor`: exact measure, transport, block-code and recovery runs.
//!
//! Every command prints a JSON run report on stdout. Exit status is 0 when
//! every check in the report passes, 1 when some check fails and 2 on
//! invalid input.

mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use cantor_core::RationalProb;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "cantor", version, about = "Exact computation with clopen subsets of Cantor space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Mc,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Style {
    Mixed,
    Divergent,
}

#[derive(Subcommand)]
pub enum Command {
    /// Measure of a clopen set (antichain text or JSON).
    Measure {
        set: PathBuf,
        /// Bernoulli parameter; defaults to 1/2 unless --poly is given.
        #[arg(long)]
        p: Option<RationalProb>,
        /// Print the measure as integer coefficients of a polynomial in p.
        #[arg(long)]
        poly: bool,
    },
    /// Transport a test stage along the pullback of a permutation.
    Transport {
        test: PathBuf,
        perm: PathBuf,
        /// Write the transported stage here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether a block code preserves every Bernoulli measure.
    CertifyBlockcode { code: PathBuf },
    /// Recover f⁻¹ on the window from a noisy functional.
    Recover {
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "exact")]
        mode: Mode,
        #[arg(long, default_value_t = 20_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        search_bound: Option<usize>,
        /// Scan only the first W coordinates.
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        p: Option<RationalProb>,
    },
    /// Build a corrupted tabulation of f* around σ.
    Synthesize {
        perm: PathBuf,
        #[arg(long, default_value = "")]
        sigma: String,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        mass: RationalProb,
        #[arg(long)]
        seed: u64,
        /// Output width and scanned window; defaults to the permutation's.
        #[arg(long)]
        window: Option<usize>,
        #[arg(long, value_enum, default_value = "mixed")]
        style: Style,
        /// Accept masses above 1 − 95/100 (fixtures that break the promise).
        #[arg(long)]
        below_promise: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let report = match commands::run(cli.command) {
        Ok(r) => r.finish(start.elapsed()),
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    match cli.report {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, text + "\n") {
                eprintln!("error: writing {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            if let Err(e) = writeln!(stdout, "{text}") {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            }
        }
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
