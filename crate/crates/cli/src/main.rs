//! `tpht`: build Hessenberg-Toeplitz truncations, factor them, compute their
//! spectra and large-n limits, and run random-symbol ensembles.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;
mod svg;

use output::Format;

#[derive(Parser)]
#[command(name = "tpht", version, about = "Totally positive Hessenberg-Toeplitz matrices")]
struct Cli {
    /// Output format for the data written to stdout (or --output).
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the data to this file instead of stdout.
    #[arg(short = 'o', long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

/// Symbol roots, either listed or as `m` unit roots.
#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct SymbolArgs {
    /// Comma-separated non-negative roots, e.g. "1,0.5,2" ("" for none).
    #[arg(long, value_parser = parse_roots, allow_hyphen_values = true)]
    roots: Option<Roots>,

    /// Shorthand for M roots equal to one.
    #[arg(long, value_name = "M")]
    ones: Option<usize>,
}

impl SymbolArgs {
    pub fn roots(&self) -> Vec<f64> {
        match (&self.roots, self.ones) {
            (Some(r), _) => r.0.clone(),
            (None, Some(m)) => vec![1.0; m],
            (None, None) => unreachable!("clap requires one of --roots/--ones"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Roots(Vec<f64>);

fn parse_roots(s: &str) -> Result<Roots, String> {
    if s.trim().is_empty() {
        return Ok(Roots(Vec::new()));
    }
    s.split(',')
        .map(|t| {
            let t = t.trim();
            let v: f64 = t.parse().map_err(|_| format!("'{t}' is not a number"))?;
            if !v.is_finite() || v < 0.0 {
                return Err(format!("root {t} must be finite and non-negative"));
            }
            Ok(v)
        })
        .collect::<Result<_, _>>()
        .map(Roots)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Function {
    Exp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistName {
    Lognormal,
    Exp,
    Bernoulli,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeName {
    #[value(alias = "simultaneous")]
    Sim,
    #[value(alias = "independent")]
    Indep,
}

#[derive(Subcommand)]
enum Command {
    /// Print the n x n truncation.
    Matrix {
        #[command(flatten)]
        symbol: SymbolArgs,
        #[arg(short)]
        n: usize,
    },
    /// Closed-form LU factors, optionally followed by LU-dynamics diagnostics.
    Lu {
        #[command(flatten)]
        symbol: SymbolArgs,
        #[arg(short)]
        n: usize,
        /// Number of A = LU -> UL steps to trace.
        #[arg(long, value_name = "STEPS", default_value_t = 0)]
        dynamics: usize,
    },
    /// Eigenvalues, with optional oscillation report and histogram.
    Spectrum {
        #[command(flatten)]
        symbol: SymbolArgs,
        #[arg(short)]
        n: usize,
        /// Compute eigenvectors, sign variations and interpolation nodes.
        #[arg(long)]
        oscillation: bool,
        /// Histogram of the eigenvalues with this many bins.
        #[arg(long, value_name = "BINS")]
        hist: Option<usize>,
        /// Chart file: the eigenvector zero map with --oscillation, the
        /// eigenvalue histogram otherwise.
        #[arg(long, value_name = "PATH")]
        svg: Option<PathBuf>,
    },
    /// Large-n limits of eigenvalue averages.
    Gs(GsArgs),
    /// Monte-Carlo ensemble of random symbols.
    Mc(McArgs),
    /// Computed eigenvalues of a large truncation against the symbol curve.
    FpDemo {
        #[command(flatten)]
        symbol: SymbolArgs,
        #[arg(short)]
        n: usize,
        /// Samples of the symbol curve.
        #[arg(long, default_value_t = 512)]
        curve_points: usize,
        #[arg(long, value_name = "PATH")]
        svg: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("average").required(true).args(["p", "function"]))]
pub struct GsArgs {
    #[command(flatten)]
    symbol: SymbolArgs,
    /// Moment order.
    #[arg(short, value_parser = clap::value_parser!(u32).range(1..))]
    p: Option<u32>,
    /// Entire function to average instead of a power.
    #[arg(long, value_enum)]
    function: Option<Function>,
    /// Quadrature nodes on the unit circle.
    #[arg(long, default_value_t = tpht::gs_asymptotics::DEFAULT_NODES)]
    nodes: usize,
    /// Add finite-n values computed from traces of banded powers.
    #[arg(long)]
    table: bool,
    /// Truncation sizes for --table.
    #[arg(long, value_delimiter = ',', default_value = "100,1000,10000")]
    sizes: Vec<usize>,
}

#[derive(Args, Debug)]
pub struct McArgs {
    #[arg(long, value_enum)]
    dist: DistName,
    /// Log-normal shape parameter.
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Exponential mean.
    #[arg(long, default_value_t = 1.0)]
    mean: f64,
    /// Bernoulli success probability.
    #[arg(long, default_value_t = 0.5)]
    q: f64,
    /// Number of roots per symbol.
    #[arg(short)]
    m: usize,
    /// Truncation size for the trace side.
    #[arg(short, default_value_t = 100)]
    n: usize,
    /// Moment order.
    #[arg(short, value_parser = clap::value_parser!(u32).range(1..))]
    p: u32,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, env = "TPHT_SEED", default_value_t = tpht::ensemble::DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = ModeName::Indep)]
    mode: ModeName,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    threads: Option<usize>,
    /// Log-scale histogram chart of both sides.
    #[arg(long, value_name = "PATH")]
    svg: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Matrix { symbol, n } => commands::matrix(symbol, *n),
        Command::Lu {
            symbol,
            n,
            dynamics,
        } => commands::lu(symbol, *n, *dynamics),
        Command::Spectrum {
            symbol,
            n,
            oscillation,
            hist,
            svg,
        } => commands::spectrum(symbol, *n, *oscillation, *hist, svg.as_deref()),
        Command::Gs(args) => commands::gs(args),
        Command::Mc(args) => commands::mc(args),
        Command::FpDemo {
            symbol,
            n,
            curve_points,
            svg,
        } => commands::fp_demo(symbol, *n, *curve_points, svg.as_deref()),
    };
    let outcome = result.and_then(|r| commands::emit(&r, cli.format, cli.output.as_deref()));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
