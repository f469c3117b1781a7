use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "dirreg", version, about = "Determining sets for directional regularity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether Λ determines order-k regularity.
    Analyze(AnalyzeArgs),
    /// Reconstruct all k-th partials from directional data.
    Reconstruct(ReconstructArgs),
    /// Check the counterexample attached to a negative verdict.
    Counterexample(CounterexampleArgs),
    /// Decide the rank-one problem and estimate ε.
    Rank1(Rank1Args),
    /// Check admissibility of a weight sequence.
    Weights(WeightsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Select {
    First,
    Maxvol,
}

impl Select {
    pub fn name(self) -> &'static str {
        match self {
            Select::First => "first",
            Select::Maxvol => "maxvol",
        }
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long, value_name = "FILE")]
    pub lambda: PathBuf,
    #[arg(long, value_enum, default_value_t = Select::First)]
    pub select: Select,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    #[arg(long, value_name = "FILE")]
    pub lambda: PathBuf,
    #[arg(long, value_name = "FILE", conflicts_with = "poly", required_unless_present = "poly")]
    pub data: Option<PathBuf>,
    #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
    pub poly: Option<String>,
    /// Comma-separated coordinates; the origin when omitted.
    #[arg(long, value_name = "CSV", allow_hyphen_values = true)]
    pub point: Option<String>,
    /// Finite-difference step; exact directionals of --poly when omitted.
    #[arg(long, value_name = "STEP", requires = "poly")]
    pub h: Option<String>,
    #[arg(long, value_enum, default_value_t = Select::First)]
    pub select: Select,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CounterexampleArgs {
    /// An analyze or rank1 report with a negative verdict.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["phi", "uv"])]
    pub from_report: Option<PathBuf>,
    #[arg(long, value_name = "FILE", conflicts_with = "uv")]
    pub phi: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub uv: Option<PathBuf>,
    #[arg(long, value_name = "FILE", conflicts_with = "from_report")]
    pub lambda: Option<PathBuf>,
    /// weierstrass, weierstrass:A,B or abs.
    #[arg(long, default_value = "weierstrass")]
    pub profile: String,
    /// Comma-separated radii for the log-blowup sweeps.
    #[arg(long, value_name = "LIST")]
    pub radii: Option<String>,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Rank1Args {
    #[arg(long, value_name = "FILE")]
    pub lambda: PathBuf,
    /// Exponent l of |u|^l; ε is estimated only when given.
    #[arg(long, value_name = "INT")]
    pub epsilon_l: Option<u32>,
    #[arg(long, value_name = "INT", default_value_t = 64)]
    pub grid: usize,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WeightsArgs {
    /// gevrey:NU, gevrey(NU) or factorial.
    #[arg(long, value_name = "NAME", conflicts_with = "values")]
    pub family: Option<String>,
    #[arg(long, value_name = "FILE")]
    pub values: Option<PathBuf>,
    /// Last index checked; defaults to 50, or to the list length with --values.
    #[arg(long = "K", value_name = "INT")]
    pub k_max: Option<usize>,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

pub fn base_name(p: &Path) -> String {
    p.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| p.to_string_lossy().into_owned())
}

/// Arguments in a fixed order, file paths reduced to base names.
pub struct Echo(Vec<String>);

impl Echo {
    pub fn new() -> Self {
        Echo(Vec::new())
    }

    pub fn file(mut self, flag: &str, p: &Option<PathBuf>) -> Self {
        if let Some(p) = p {
            self.0.push(format!("--{flag}"));
            self.0.push(base_name(p));
        }
        self
    }

    pub fn value(mut self, flag: &str, v: Option<String>) -> Self {
        if let Some(v) = v {
            self.0.push(format!("--{flag}"));
            self.0.push(v);
        }
        self
    }

    pub fn into_args(self) -> Vec<String> {
        self.0
    }
}

impl Default for Echo {
    fn default() -> Self {
        Self::new()
    }
}
