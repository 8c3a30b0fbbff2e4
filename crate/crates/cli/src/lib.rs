//! Command-line experiment runner over the uikernels toolkit.
//!
//! Five subcommands mirror the library modules: `kernel` (coefficients
//! and CNP verdicts), `pick` (feasibility, sweeps, kernel quotients),
//! `model` (hereditary spectra and operator diagnostics), `dilate`
//! (coextension certificates), and `report` (a deterministic
//! markdown/CSV bundle). Exit codes: 0 pass, 1 usage or IO error,
//! 2 mathematical verdict failure.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use thiserror::Error;
use uikernels::kernel::{KernelFamily, KernelSpec};

pub mod commands;
pub mod report;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERDICT: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Math(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => EXIT_USAGE,
            CliError::Math(_) => EXIT_VERDICT,
        }
    }

    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "uik",
    about = "Numerical experiments on unitarily invariant kernel spaces",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coefficient table, CNP verdict, regularity and summability report.
    Kernel(KernelArgs),
    /// Pick-matrix feasibility, target sweeps, and kernel-quotient tests.
    Pick(PickArgs),
    /// Model operator diagnostics: hereditary spectra, defects, norms.
    Model(ModelArgs),
    /// Coextension certificates for (compressed) shift tuples.
    Dilate(DilateArgs),
    /// Deterministic markdown + CSV bundle over the standard families.
    Report(ReportArgs),
}

#[derive(Debug, Args, Clone)]
pub struct CommonArgs {
    /// Kernel family: hardy, da, dirichlet, h_s, besov, bergman.
    #[arg(long)]
    pub family: Option<String>,
    /// Parameter s for the h_s family (s <= 0).
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<f64>,
    /// Parameter sigma for the Besov-Sobolev family (0 < sigma <= 1).
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Ambient dimension of the ball.
    #[arg(short = 'd', long)]
    pub dimension: Option<usize>,
    /// Truncation order.
    #[arg(short = 'N', long = "order")]
    pub n: Option<usize>,
    /// Verdict tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Seed for sampled experiments.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file (reports echo to stdout regardless).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format: json or csv.
    #[arg(long)]
    pub format: Option<String>,
    /// JSON config file; explicit flags win over its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Kernel spec file ({"family": ..., "d": ..., "N": ...}).
    #[arg(long)]
    pub spec: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PickArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Pick problem file.
    #[arg(long)]
    pub problem: Option<PathBuf>,
    /// Bisect the largest feasible target scale in [0, 1].
    #[arg(long)]
    pub sweep: bool,
    /// Numerator family for a kernel-quotient test.
    #[arg(long)]
    pub quotient_num: Option<String>,
    /// Denominator family for a kernel-quotient test.
    #[arg(long)]
    pub quotient_den: Option<String>,
    /// Sample size for quotient tests.
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    /// Sample radius for quotient tests.
    #[arg(long, default_value_t = 0.9)]
    pub radius: f64,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Which check to run: projection, lemma91, defect, commutators,
    /// toeplitz, norms, technical.
    #[arg(long)]
    pub check: Option<String>,
    /// Evaluate the Bergman-table hereditary operator on this family's
    /// truncated shift (the coextension obstruction).
    #[arg(long)]
    pub bergman_hereditary: bool,
}

#[derive(Debug, Args)]
pub struct DilateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Scale r applied to the constructed shift tuple.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// Homogeneous ideal file; the tuple is compressed to its complement.
    #[arg(long)]
    pub ideal: Option<PathBuf>,
    /// Operator tuple file (text matrix format) used instead of a shift.
    #[arg(long)]
    pub tuple: Option<PathBuf>,
    /// Family providing the shift tuple when it differs from --family
    /// (which always provides the coefficient table).
    #[arg(long)]
    pub shift_family: Option<String>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

/// Config-file counterpart of the common flags.
#[derive(Debug, Default, Deserialize)]
pub struct FileConfig {
    pub family: Option<String>,
    pub s: Option<f64>,
    pub sigma: Option<f64>,
    pub d: Option<usize>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
}

impl CommonArgs {
    /// Overlays the config file under the explicit flags.
    pub fn merged(&self) -> Result<CommonArgs, CliError> {
        let mut merged = self.clone();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let file: FileConfig = serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("config {}: {}", path.display(), e)))?;
            merged.family = merged.family.or(file.family);
            merged.s = merged.s.or(file.s);
            merged.sigma = merged.sigma.or(file.sigma);
            merged.dimension = merged.dimension.or(file.d);
            merged.n = merged.n.or(file.n);
            merged.tol = merged.tol.or(file.tol);
            merged.seed = merged.seed.or(file.seed);
            merged.out = merged.out.or(file.out);
            merged.format = merged.format.or(file.format);
        }
        Ok(merged)
    }

    pub fn d(&self) -> usize {
        self.dimension.unwrap_or(1)
    }

    pub fn n_or(&self, default: usize) -> usize {
        self.n.unwrap_or(default)
    }

    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    pub fn seed_or(&self, default: u64) -> u64 {
        self.seed.unwrap_or(default)
    }
}

/// Resolves a family name plus optional parameters into a kernel family.
pub fn parse_family(
    name: &str,
    s: Option<f64>,
    sigma: Option<f64>,
) -> Result<KernelFamily, CliError> {
    match name.to_ascii_lowercase().as_str() {
        "hardy" => Ok(KernelFamily::Hardy),
        "da" | "drury_arveson" | "drury-arveson" => Ok(KernelFamily::DruryArveson),
        "dirichlet" => Ok(KernelFamily::HS { s: -1.0 }),
        "h_s" | "hs" => {
            let s = s.ok_or_else(|| CliError::Usage("h_s needs --s".into()))?;
            Ok(KernelFamily::HS { s })
        }
        "besov" | "besov_sobolev" | "k_sigma" => {
            let sigma =
                sigma.ok_or_else(|| CliError::Usage("besov_sobolev needs --sigma".into()))?;
            Ok(KernelFamily::BesovSobolev { sigma })
        }
        "bergman" | "bergman_disc" => Ok(KernelFamily::BergmanDisc),
        other => Err(CliError::Usage(format!(
            "unknown family {:?}; expected hardy, da, dirichlet, h_s, besov, bergman",
            other
        ))),
    }
}

/// Family from merged common args.
pub fn family_from_common(common: &CommonArgs) -> Result<KernelFamily, CliError> {
    let name = common
        .family
        .as_ref()
        .ok_or_else(|| CliError::Usage("missing --family".into()))?;
    parse_family(name, common.s, common.sigma)
}

pub fn spec_from_common(common: &CommonArgs) -> Result<KernelSpec, CliError> {
    let family = family_from_common(common)?;
    KernelSpec::new(family, common.d()).map_err(|e| CliError::Usage(e.to_string()))
}

/// Entry point shared by the binary and the tests.
pub fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Kernel(args) => commands::run_kernel(args),
        Command::Pick(args) => commands::run_pick(args),
        Command::Model(args) => commands::run_model(args),
        Command::Dilate(args) => commands::run_dilate(args),
        Command::Report(args) => report::run_report(args),
    }
}

pub fn write_output(path: &Option<PathBuf>, payload: &str) -> Result<(), CliError> {
    if let Some(path) = path {
        std::fs::write(path, payload).map_err(|e| CliError::io(path, e))?;
    }
    Ok(())
}
