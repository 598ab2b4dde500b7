//! `hnrel`: Betti numbers, strata, relation classes, residue pairings and
//! parabolic bookkeeping from the command line. Results are JSON (or CSV for
//! integer series) with every computed number written as an exact string.

mod commands;
mod expr;
mod selftest;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const SCHEMA: &str = "hnrel/1";

#[derive(Parser, Debug)]
#[command(name = "hnrel", version, about = "Exact computations on moduli of bundles over a curve")]
struct Cli {
    /// Write the artifact here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Poincaré series of the moduli space.
    Betti(BettiArgs),
    /// Harder–Narasimhan types up to a codimension.
    Strata(StrataArgs),
    /// Slant-product relation records.
    Relations(RelationsArgs),
    /// Residue-formula pairings on the hat moduli space.
    Pairing(PairingArgs),
    /// Parabolic ranks, windows and good-data checks.
    Parabolic(ParabolicArgs),
    /// Runs the invariant battery.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug)]
pub struct BettiArgs {
    #[arg(long)]
    pub n: i64,
    #[arg(long)]
    pub d: i64,
    #[arg(long)]
    pub g: i64,
    /// Highest power of t kept; defaults to the real dimension of the moduli space.
    #[arg(long, env = "HNREL_CAP")]
    pub cap: Option<usize>,
    /// Also evaluate the closed formula and compare.
    #[arg(long)]
    pub closed: bool,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct StrataArgs {
    #[arg(long)]
    pub n: i64,
    #[arg(long)]
    pub d: i64,
    #[arg(long)]
    pub g: i64,
    #[arg(long, env = "HNREL_CAP")]
    pub codim_cap: i64,
}

#[derive(Args, Debug)]
pub struct RelationsArgs {
    #[arg(long)]
    pub n: i64,
    #[arg(long)]
    pub d: i64,
    #[arg(long)]
    pub g: i64,
    #[arg(long)]
    pub nhat: i64,
    #[arg(long)]
    pub dhat: i64,
    /// Every r in the relation window.
    #[arg(long, conflicts_with = "r")]
    pub window: bool,
    /// Specific degrees r.
    #[arg(long, value_delimiter = ',')]
    pub r: Vec<i64>,
}

#[derive(Args, Debug)]
pub struct PairingArgs {
    #[arg(long)]
    pub n: i64,
    #[arg(long)]
    pub d: i64,
    #[arg(long)]
    pub g: i64,
    #[arg(long)]
    pub nhat: i64,
    #[arg(long)]
    pub dhat: i64,
    #[arg(long, env = "HNREL_CAP", default_value_t = 4)]
    pub t_cap: usize,
    /// Insertion η as a polynomial in ha{r} and hb{r}_{j}.
    #[arg(long, default_value = "1", conflicts_with = "eps")]
    pub eta: String,
    /// Use the deformed formula with ε_2..ε_n̂ (comma separated, "p/q" allowed).
    #[arg(long, value_delimiter = ',')]
    pub eps: Vec<String>,
    /// Exponents m_1..m_n̂ of â_r for the deformed formula.
    #[arg(long, value_delimiter = ',')]
    pub m: Vec<u32>,
    /// Odd insertions b̂_r^k for the deformed formula, as r:k pairs.
    #[arg(long, value_delimiter = ',')]
    pub odd: Vec<String>,
    #[arg(long, default_value_t = 0)]
    pub lambda_order: usize,
    /// Relabels the blocks before the Weyl sum (0-based permutation).
    #[arg(long, value_delimiter = ',')]
    pub relabel: Vec<usize>,
    /// Flips the Berezin orientation.
    #[arg(long)]
    pub negative_orientation: bool,
}

#[derive(Args, Debug)]
pub struct ParabolicArgs {
    #[arg(long)]
    pub n: i64,
    #[arg(long)]
    pub d: i64,
    /// Weights α_1 < … < α_m, comma separated, "p/q" allowed.
    #[arg(long, value_delimiter = ',', required = true)]
    pub weights: Vec<String>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub mults: Vec<i64>,
    #[arg(long)]
    pub check_good: bool,
    /// Rank formula and relation window for the sub-data given by --sub.
    #[arg(long, requires = "sub")]
    pub rank: bool,
    /// Sub-data as n̂,d̂,ĵ_1,…,ĵ_m.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub sub: Vec<i64>,
    #[arg(long, default_value_t = 2)]
    pub g: i64,
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    /// Breaks the Koszul sign rule first; the sign suite should then fail.
    #[arg(long)]
    pub mutate_koszul: bool,
}

/// Errors mapped onto exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad input: exit 2.
    Validation(String),
    /// A cap was too small: exit 3.
    Cap { message: String, required: Option<u64> },
    /// Internal failure: exit 1.
    Failure(String),
    /// A complete report that records failures (self-tests): written out, exit 1.
    Report(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Cap { .. } => 3,
            CliError::Failure(_) | CliError::Report(_) => 1,
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            CliError::Validation(m) => serde_json::json!({"schema": SCHEMA, "error": "validation", "message": m}),
            CliError::Cap { message, required } => {
                serde_json::json!({"schema": SCHEMA, "error": "cap", "message": message, "required_cap": required})
            }
            CliError::Failure(m) => serde_json::json!({"schema": SCHEMA, "error": "failure", "message": m}),
            CliError::Report(_) => serde_json::json!({"schema": SCHEMA, "error": "failure", "message": "see report"}),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{}", CliError::Validation(e.to_string().trim().to_string()).to_json());
            return ExitCode::from(2);
        }
    };
    let result = match &cli.command {
        Command::Betti(a) => commands::betti(a),
        Command::Strata(a) => commands::strata(a),
        Command::Relations(a) => commands::relations(a),
        Command::Pairing(a) => commands::pairing(a),
        Command::Parabolic(a) => commands::parabolic(a),
        Command::Selftest(a) => selftest::run(a),
    };
    match result {
        Ok(text) => match emit(cli.out.as_ref(), &text) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("{}", CliError::Failure(e.to_string()).to_json());
                ExitCode::from(1)
            }
        },
        Err(CliError::Report(text)) => {
            if let Err(e) = emit(cli.out.as_ref(), &text) {
                eprintln!("{}", CliError::Failure(e.to_string()).to_json());
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.code())
        }
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}
