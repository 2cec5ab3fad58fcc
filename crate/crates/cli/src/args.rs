use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use zerosum::davenport::DEFAULT_BUDGET;
use zerosum::group::DEFAULT_SEED;
use zerosum::{GroupSpec, Target};

#[derive(Parser, Debug)]
#[command(
    name = "zerosum",
    version,
    about = "Exact zero-sum computations in small finite groups"
)]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,

    /// Result cache directory [default: $HOME/.cache/zerosum]
    #[arg(long, global = true, env = "ZEROSUM_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,

    /// Neither read nor write the cache
    #[arg(long, global = true)]
    pub no_cache: bool,

    /// Maximum number of search nodes
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: u64,

    /// Worker threads for the search
    #[arg(long, global = true, default_value_t = 1,
          value_parser = clap::value_parser!(u64).range(1..=256))]
    pub parallelism: u64,

    /// Seed for randomized group self-checks
    #[arg(long, global = true, default_value_t = DEFAULT_SEED, value_parser = parse_seed)]
    pub rng_seed: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Group structure
    #[command(subcommand)]
    Group(GroupCommand),
    /// Product-1-freeness of sequences
    #[command(subcommand)]
    Free(FreeCommand),
    /// Every product of a nonempty subsequence, in any order
    Reach {
        #[arg(long)]
        group: GroupSpec,
        #[arg(long)]
        seq: String,
    },
    /// Davenport constant by exhaustive search
    Davenport {
        #[arg(long)]
        group: GroupSpec,
    },
    /// All product-1-free sequences of length D(G) - 1
    Extremal {
        #[arg(long)]
        group: GroupSpec,
    },
    /// Compare enumerations with closed-form characterizations
    Verify {
        /// cyclic, dihedral, dicyclic, metacyclic, weighted, cyclic-structure or minzero
        #[arg(long)]
        target: Target,
        /// n, a range such as 4..8, q,m,s for metacyclic, or a group spec for minzero
        #[arg(long, required = true)]
        param: Vec<String>,
    },
    /// Aggregate table over every cached result
    Report,
}

#[derive(Subcommand, Debug)]
pub enum GroupCommand {
    /// Order, exponent, center and element orders
    Info {
        #[arg(long)]
        group: GroupSpec,
        /// Also print the names e, -e, i, j, k (Q:2 only)
        #[arg(long)]
        quaternion: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum FreeCommand {
    /// Decide whether a sequence is product-1-free
    Check {
        #[arg(long)]
        group: GroupSpec,
        #[arg(long, required_unless_present = "seq_file", conflicts_with = "seq_file")]
        seq: Option<String>,
        /// One sequence per line; blank lines and lines starting with # are skipped
        #[arg(long)]
        seq_file: Option<PathBuf>,
    },
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(&hex.replace('_', ""), 16),
        None => s.replace('_', "").parse(),
    };
    parsed.map_err(|e| format!("invalid seed `{s}`: {e}"))
}
