use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "weil", version, about = "Exact censuses of Weil q-polynomials")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count every member for one (g, q) and bucket them modulo ell.
    Census(CensusArgs),
    /// One census per r in rmin..=rmax, as a table of limit-trend deviations.
    Sweep(SweepArgs),
    /// Monte Carlo estimate of the normalized volume v_g.
    Volume(VolumeArgs),
    /// Stream every member as CSV rows in lexicographic order.
    Enumerate(EnumerateArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct EngineArgs {
    /// Disable prefix pruning (slower, same results).
    #[arg(long)]
    pub no_prune: bool,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct CensusArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub g: u32,
    #[arg(long)]
    pub p: u64,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub r: u32,
    #[arg(long)]
    pub ell: u64,
    /// Target residues m_1,...,m_g, each in [0, ell).
    #[arg(long)]
    pub residues: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[arg(long, env = "WEIL_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub g: u32,
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub ell: u64,
    #[arg(long)]
    pub rmin: u32,
    #[arg(long)]
    pub rmax: u32,
    /// Target residue class m_1,...,m_g; defaults to all zeros.
    #[arg(long)]
    pub residues: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[arg(long, env = "WEIL_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VolumeArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub g: u32,
    #[arg(long)]
    pub samples: u64,
    #[arg(long)]
    pub seed: u64,
    /// Scale the sampling box beyond [-binom(2g,i), binom(2g,i)].
    #[arg(long, default_value_t = 1.0)]
    pub box_scale: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub g: u32,
    #[arg(long)]
    pub p: u64,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub r: u32,
    /// Append P(1) mod ell to every row.
    #[arg(long)]
    pub ell: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub engine: EngineArgs,
}
