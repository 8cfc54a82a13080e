//! Front end for the `latpoly` verification suites and artifact commands.
//!
//! Exit status: 0 when every checked residual is within tolerance, 1 when
//! any is not (or a computation breaks down), 2 for usage and validation
//! errors.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use latpoly::FamilyParams;

pub mod commands;
pub mod report;
pub mod suites;

use commands::{ConvergeParams, Format, Target};
use suites::{Overrides, Suite};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Lib(latpoly::Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use latpoly::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Lib(
                E::Validation(_)
                | E::Domain(_)
                | E::Pole { .. }
                | E::Truncation { .. }
                | E::Unsupported(_),
            ) => 2,
            CliError::Lib(_) | CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<latpoly::Error> for CliError {
    fn from(e: latpoly::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "latpoly",
    version,
    about = "Discrete orthogonal polynomial and lattice verification tool"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a verification suite and write its JSON report.
    Verify(VerifyArgs),
    /// Error of a discrete-to-continuum limit at increasing sizes.
    Converge(ConvergeArgs),
    /// Orthonormal functions, weight, norms and Gram matrix of a family.
    Tabulate(TabulateArgs),
    /// Per-mode residuals of the lattice Dirac operator and the doubling scan.
    DiracScan(DiracScanArgs),
    /// Cayley iteration of the Heisenberg equations against the exact flow.
    Evolve(EvolveArgs),
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write the artifact here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Lattice size (Kravchuk and Hahn N, or Dirac N).
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Meixner μ.
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub charlier_mu: Option<f64>,
    /// Symmetric Hahn λ (α = β = λ − ½).
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Truncated Fock-space dimension.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Replaces the default tolerance of every residual case.
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[arg(long, value_enum)]
    pub target: Target,
    /// Degree.
    #[arg(long, default_value_t = 0)]
    pub n: usize,
    /// Lattice sizes (1/h for laguerre), strictly increasing.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FamilyTag {
    Kravchuk,
    Meixner,
    Charlier,
    Hahn,
}

#[derive(Debug, Args)]
pub struct TabulateArgs {
    #[arg(long, value_enum)]
    pub family: FamilyTag,
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Symmetric Hahn shorthand for α = β = λ − ½.
    #[arg(long, conflicts_with_all = ["alpha", "beta"])]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = 4)]
    pub n_max: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub output: Output,
}

impl TabulateArgs {
    pub fn params(&self) -> FamilyParams {
        match self.family {
            FamilyTag::Kravchuk => FamilyParams::Kravchuk {
                p: self.p.unwrap_or(0.5),
                n: self.n.unwrap_or(32),
            },
            FamilyTag::Meixner => FamilyParams::Meixner {
                gamma: self.gamma.unwrap_or(1.5),
                mu: self.mu.unwrap_or(0.4),
            },
            FamilyTag::Charlier => FamilyParams::Charlier {
                mu: self.mu.unwrap_or(1.0),
            },
            FamilyTag::Hahn => match self.lambda {
                Some(lambda) => FamilyParams::hahn_symmetric(lambda, self.n.unwrap_or(32)),
                None => FamilyParams::Hahn {
                    alpha: self.alpha.unwrap_or(0.5),
                    beta: self.beta.unwrap_or(0.5),
                    n: self.n.unwrap_or(32),
                },
            },
        }
    }
}

#[derive(Debug, Args)]
pub struct DiracScanArgs {
    /// Lattice size, even and at least 4.
    #[arg(long = "N", default_value_t = 8)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub eps: f64,
    /// Mass m0c (default 0 unless --solve-for-mode is given).
    #[arg(long)]
    pub m0c: Option<f64>,
    /// Choose m0c so that this mode `m0,m1,m2,m3` is on shell.
    #[arg(long, value_delimiter = ',')]
    pub solve_for_mode: Option<Vec<usize>>,
    /// Tolerance for the on-shell residuals and unitarity defects.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    /// Coefficients of P(x), constant term first.
    #[arg(
        long = "H-coeffs",
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "0,1"
    )]
    pub h_coeffs: Vec<f64>,
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    #[arg(long, default_value_t = 20)]
    pub steps: usize,
    #[arg(long, default_value_t = 24)]
    pub dim: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub output: Output,
}

fn emit(output: &Output, text: &str) -> Result<(), CliError> {
    match &output.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Runs a parsed command and returns the exit status.
pub fn execute(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Verify(args) => {
            let overrides = Overrides {
                n: args.n,
                p: args.p,
                gamma: args.gamma,
                mu: args.mu,
                charlier_mu: args.charlier_mu,
                lambda: args.lambda,
                eps: args.eps,
                dim: args.dim,
                tol: args.tol,
            };
            let report = suites::run(args.suite, &overrides)?;
            emit(&args.output, &report.to_json())?;
            Ok(if report.all_passed() { 0 } else { 1 })
        }
        Command::Converge(args) => {
            let default_sizes = match args.target {
                Target::Laguerre => vec![100, 400, 1600],
                Target::Hermite | Target::Gegenbauer => vec![256, 1024, 4096],
            };
            let params = ConvergeParams {
                target: args.target,
                n: args.n,
                p: args.p,
                alpha: args.alpha,
                lambda: args.lambda,
            };
            let rows =
                commands::converge(&params, args.sizes.as_deref().unwrap_or(&default_sizes))?;
            emit(&args.output, &commands::converge_output(&rows, args.format))?;
            Ok(0)
        }
        Command::Tabulate(args) => {
            let table = commands::tabulate(args.params(), args.n_max)?;
            emit(
                &args.output,
                &commands::tabulate_output(&table, args.format),
            )?;
            Ok(0)
        }
        Command::DiracScan(args) => {
            let mode = match args.solve_for_mode.as_deref() {
                None => None,
                Some(&[a, b, c, d]) => Some([a, b, c, d]),
                Some(other) => {
                    return Err(CliError::Usage(format!(
                        "mode needs four indices, got {other:?}"
                    )))
                }
            };
            let scan = commands::dirac_scan(args.n, args.eps, args.m0c, mode)?;
            emit(
                &args.output,
                &commands::dirac_scan_output(&scan, args.format),
            )?;
            let (dirac, unitarity) = scan.worst();
            Ok(if dirac <= args.tol && unitarity <= args.tol {
                0
            } else {
                1
            })
        }
        Command::Evolve(args) => {
            let report = commands::evolve(&args.h_coeffs, args.eps, args.steps, args.dim)?;
            emit(&args.output, &commands::evolve_output(&report, args.format))?;
            Ok(0)
        }
    }
}

/// Parses `args`, runs the command and maps every outcome to an exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
