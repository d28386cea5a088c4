//! Pipeline stages behind the CLI subcommands. Each stage is an ordinary
//! function over the configuration so tests drive them in-process.

pub mod changepoint;
pub mod compute;
pub mod correlate;
pub mod ingest;
pub mod report;

use mobility_core::geo::RegionLevel;

use crate::error::{CliError, Result};

/// Run `f` on a dedicated rayon pool of `threads` workers (0 = default
/// pool). Thread count is purely a performance knob: every stage merges
/// with exact, order-independent accumulators, so outputs are identical
/// for any value.
pub fn run_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if threads == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::config(format!("cannot build worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// File-name suffix for one analysis level.
pub fn level_suffix(level: RegionLevel) -> &'static str {
    level.as_str()
}
