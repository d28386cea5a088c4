//! Command-line surface.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use mobility_core::geo::RegionLevel;

#[derive(Debug, Parser)]
#[command(
    name = "mobility",
    version,
    about = "Social mobility index pipeline: ingest geolocated events, compute weekly/daily \
             travel dispersion, and produce reduction, change-point and correlation reports"
)]
pub struct Cli {
    /// Configuration file (TOML).
    #[arg(long, global = true, default_value = "mobility.toml")]
    pub config: PathBuf,

    /// Analysis level; overrides the configured list.
    #[arg(long, global = true, value_enum)]
    pub level: Option<LevelArg>,

    /// Worker threads (0 = all cores); a pure performance knob.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Seed for the synthetic generator; overrides the configured seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse JSONL event shards into the canonical event store.
    Ingest,
    /// Compute weekly records and weekly/daily regional series.
    Compute,
    /// Produce reduction tables, box-plot summaries and drop weeks.
    Report,
    /// Detect change points and attribute them to policy dates.
    Changepoint,
    /// Correlation panels against case, factor and policy data.
    Correlate,
    /// Generate a seeded synthetic event corpus.
    Synth {
        /// Output JSONL path; overrides the configured synth.out.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LevelArg {
    Country,
    State,
    City,
}

impl From<LevelArg> for RegionLevel {
    fn from(level: LevelArg) -> Self {
        match level {
            LevelArg::Country => RegionLevel::Country,
            LevelArg::State => RegionLevel::State,
            LevelArg::City => RegionLevel::City,
        }
    }
}
