mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qmcast_core::{Capacity, Error, Result, Scheme};

#[derive(Parser, Debug)]
#[command(
    name = "qmcast",
    version,
    about = "Quantum multicast compression: sweeps, bandwidth tables, ring simulations and codec roundtrips"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bandwidth L and circuit size D of recursive homogeneous encoding against group size k.
    Tradeoff(TradeoffArgs),
    /// Bottleneck bandwidth of every scheme over an (N, m) grid.
    BandwidthTable(TableArgs),
    /// Total ring bandwidth per scheme: exact, approximate and simulated.
    Ring(RingArgs),
    /// Encode and decode a state from a file and report the fidelity.
    Roundtrip(RoundtripArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to FILE instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Maximum number of simulated amplitudes.
    #[arg(long, default_value_t = Capacity::DEFAULT.get())]
    pub cap: usize,
}

impl Common {
    pub fn capacity(&self) -> Result<Capacity> {
        Capacity::new(self.cap)
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct TradeoffArgs {
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 80)]
    pub n: usize,
    /// Single group size; overrides --k-range.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_name = "A..B", default_value = "2..12")]
    pub k_range: String,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    #[arg(long, default_value_t = 8)]
    pub d: usize,
    /// Number of states; defaults to both 3 and 20.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, value_name = "A..B")]
    pub m_range: Option<String>,
    /// Number of terminals; overrides --n-range.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_name = "A..B", default_value = "1..25")]
    pub n_range: String,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct RingArgs {
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Number of clusters (even).
    #[arg(long)]
    pub n: usize,
    /// Terminals per cluster.
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    /// One of direct, homogeneous, homo_hetero; all three by default.
    #[arg(long)]
    pub scheme: Option<String>,
    /// States to multicast; a deterministic family is used otherwise.
    #[arg(long, value_name = "FILE")]
    pub family: Option<PathBuf>,
    /// Emit the per-link ledger instead of totals.
    #[arg(long)]
    pub ledger: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct RoundtripArgs {
    /// direct, homogeneous, recursive, heterogeneous, homo_hetero or hetero_homo.
    #[arg(long)]
    pub scheme: String,
    #[arg(long, value_name = "FILE")]
    pub state: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub family: Option<PathBuf>,
    /// Copies to encode when the state file holds a single copy.
    #[arg(long)]
    pub n: Option<usize>,
    /// Group size for the recursive scheme.
    #[arg(long)]
    pub k: Option<usize>,
    /// Fidelity loss accepted as lossless.
    #[arg(long, default_value_t = qmcast_core::state::FIDELITY_TOL)]
    pub tol: f64,
    #[command(flatten)]
    pub common: Common,
}

/// Inclusive `a..b`.
pub fn parse_range(text: &str) -> Result<Vec<usize>> {
    let bad = || Error::InvalidParameter(format!("expected a range a..b, got {text:?}"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(Error::InvalidParameter(format!("empty range {text:?}")));
    }
    Ok((a..=b).collect())
}

pub fn parse_scheme(text: &str) -> Result<Scheme> {
    text.parse()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Tradeoff(a) => commands::tradeoff(&a),
        Command::BandwidthTable(a) => commands::bandwidth_table(&a),
        Command::Ring(a) => commands::ring(&a),
        Command::Roundtrip(a) => commands::roundtrip(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("2..5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_range("3..3").unwrap(), vec![3]);
        assert!(parse_range("5..2").is_err());
        assert!(parse_range("5").is_err());
        assert!(parse_range("a..2").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
