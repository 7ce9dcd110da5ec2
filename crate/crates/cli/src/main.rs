//! `lssq`: command-line front end for the lssq-core kernels.
//!
//! Exit codes: 0 success, 1 domain error, 2 verification failure,
//! 64 usage error, 78 configuration error.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

use commands::CliError;

const EXIT_DOMAIN: u8 = 1;
const EXIT_VERIFY: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_CONFIG: u8 = 78;

#[derive(Parser, Debug)]
#[command(
    name = "lssq",
    version,
    about = "Exact sums and counts behind the large sieve with square moduli"
)]
pub struct Cli {
    /// Write output here instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Quadratic Gauss sum G(a, b, c)
    Gauss(GaussArgs),
    /// Restricted Gauss sum G*(a, b, p²) over n coprime to p
    GaussStar(GaussStarArgs),
    /// All square roots of s modulo r, comma-separated
    Sqrt(SqrtArgs),
    /// P(α): fractions a/q² with q ≤ Q within Δ of α
    Palpha(PalphaArgs),
    /// The bilinear sum Σ and its Weyl-differencing ratio
    Bilinear(BilinearArgs),
    /// Partial sums S_α over p^m against Cochrane's bound, or the §3.4 family sum
    Cochrane(CochraneArgs),
    /// Left-hand side of the large sieve with square moduli
    SieveLhs(SieveArgs),
    /// Bound expressions at one parameter point
    Bounds(BoundsArgs),
    /// Parameter-grid sweep from a TOML config
    Sweep(SweepArgs),
    /// Run the self-check suites
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct GaussArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub a: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub b: i64,
    #[arg(long)]
    pub c: u64,
    /// closed form (odd c), brute force, or closed when available
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    pub method: Method,
    /// Also print the exact closed form
    #[arg(long)]
    pub exact: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Auto,
    Closed,
    Brute,
}

#[derive(Args, Debug)]
pub struct GaussStarArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub a: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub b: i64,
    #[arg(long)]
    pub p: u64,
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    pub method: Method,
    #[arg(long)]
    pub exact: bool,
}

#[derive(Args, Debug)]
pub struct SqrtArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub s: i64,
    #[arg(long)]
    pub r: u64,
}

#[derive(Args, Debug)]
pub struct PalphaArgs {
    #[arg(long = "Q")]
    pub q: u64,
    /// Centre α as `a/b`, a decimal, or b/r + z via --b, --r, --gamma
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Radius Δ as `a/b` or a decimal; defaults to 1/Q³
    #[arg(long)]
    pub delta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<i64>,
    #[arg(long)]
    pub r: Option<u64>,
    #[arg(long)]
    pub gamma: Option<f64>,
}

#[derive(Args, Debug)]
pub struct BilinearArgs {
    #[arg(long)]
    pub r: u64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1)]
    pub j: i64,
    #[arg(long = "L")]
    pub l: u64,
    #[arg(long = "M")]
    pub m: u64,
    #[arg(long = "H")]
    pub h: Option<u64>,
    #[arg(long, default_value_t = lssq_core::counting::DEFAULT_EPS)]
    pub eps: f64,
    /// ones, spike or random-phase
    #[arg(long, default_value = "ones")]
    pub kind: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Phase f(m) = coef · √m
    #[arg(long, allow_hyphen_values = true)]
    pub sqrt_phase: Option<f64>,
}

#[derive(Args, Debug)]
pub struct CochraneArgs {
    #[arg(long)]
    pub p: u64,
    /// Numerator coefficients, constant term first, comma-separated
    #[arg(long, allow_hyphen_values = true)]
    pub num: Option<String>,
    /// Denominator coefficients, constant term first
    #[arg(long, allow_hyphen_values = true, default_value = "1")]
    pub den: String,
    #[arg(long, default_value_t = 2)]
    pub m: u32,
    #[arg(long, allow_hyphen_values = true)]
    pub h: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    pub u: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    pub v: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    pub j: Option<i64>,
}

#[derive(Args, Debug)]
pub struct SieveArgs {
    #[arg(long = "Q")]
    pub q: u64,
    #[arg(long = "N")]
    pub n: u64,
    /// Coefficients are a_{M+1} … a_{M+N}
    #[arg(long = "M", default_value_t = 0)]
    pub offset: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    #[arg(long)]
    pub r: u64,
    #[arg(long = "L")]
    pub l: Option<u64>,
    #[arg(long = "M")]
    pub m: Option<u64>,
    #[arg(long = "H")]
    pub h: Option<u64>,
    #[arg(long = "Q")]
    pub q: Option<f64>,
    #[arg(long = "N")]
    pub n: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = lssq_core::counting::DEFAULT_EPS)]
    pub eps: f64,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Suite name or `all`
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

fn emit(out: &Option<PathBuf>, text: &str) -> io::Result<()> {
    match out {
        Some(path) => fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
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
    let result = commands::run(&cli.command, &cli.out).and_then(|out| {
        emit(&cli.out.clone().or(out.path), &out.text).map_err(|e| CliError::Domain(e.to_string()))?;
        out.verdict
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lssq: {e}");
            ExitCode::from(match e {
                CliError::Domain(_) => EXIT_DOMAIN,
                CliError::Verify(_) => EXIT_VERIFY,
                CliError::Config(_) => EXIT_CONFIG,
            })
        }
    }
}
