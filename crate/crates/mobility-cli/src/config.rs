//! Declarative pipeline configuration.
//!
//! One TOML file carries every knob; all defaults are the study's
//! constants, so an empty file is a valid configuration. A handful of
//! environment variables (`MOBILITY_OUTPUT_DIR`, `MOBILITY_THREADS`,
//! `MOBILITY_SEED`) override the file, and command-line flags override
//! both. See `docs/config.md`.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use mobility_core::geo::RegionLevel;
use mobility_core::ingest::AnalysisMode;
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub data: DataSection,
    pub ingest: IngestSection,
    pub dates: DatesSection,
    pub filters: FiltersSection,
    pub mobility: MobilitySection,
    pub analysis: AnalysisSection,
    pub changepoint: ChangepointSection,
    pub correlate: CorrelateSection,
    pub synth: SynthSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataSection {
    /// Input event files (`.jsonl`, optionally gzip as `.jsonl.gz`).
    pub inputs: Vec<PathBuf>,
    pub output_dir: PathBuf,
    /// Event store location; defaults to `<output_dir>/events.store`.
    pub event_store: Option<PathBuf>,
    /// Region geometry file; required when a state or city level is used.
    pub regions: Option<PathBuf>,
}

impl Default for DataSection {
    fn default() -> Self {
        Self {
            inputs: vec![PathBuf::from("events.jsonl")],
            output_dir: PathBuf::from("out"),
            event_store: None,
            regions: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IngestSection {
    /// "state_analysis" or "city_analysis".
    pub mode: String,
    /// Tracked city names for city analysis POI matching.
    pub city_names: Vec<String>,
}

impl Default for IngestSection {
    fn default() -> Self {
        Self {
            mode: "state_analysis".into(),
            city_names: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DatesSection {
    pub start: NaiveDate,
    pub split: NaiveDate,
    pub end: NaiveDate,
}

impl Default for DatesSection {
    fn default() -> Self {
        Self {
            start: date(2019, 1, 1),
            split: date(2020, 3, 16),
            end: date(2020, 4, 27),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FiltersSection {
    pub min_lifetime_events: u32,
    pub min_weekly_events: u32,
    /// One-sided confidence for the low-data week filter.
    pub lowdata_confidence: f64,
    /// Check-ins required on both sides of the split for the user-level
    /// reduction distribution.
    pub min_checkins_per_period: u64,
}

impl Default for FiltersSection {
    fn default() -> Self {
        Self {
            min_lifetime_events: 3,
            min_weekly_events: 2,
            lowdata_confidence: 0.9975,
            min_checkins_per_period: 2,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MobilitySection {
    /// Length of the daily (trailing) window, days.
    pub window_days: u32,
    /// "window": per-user trailing-window index (primary).
    /// "smoothed": moving average of single-day aggregates (alternate).
    pub daily_mode: String,
}

impl Default for MobilitySection {
    fn default() -> Self {
        Self {
            window_days: 7,
            daily_mode: "window".into(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisSection {
    /// Levels to compute: "country", "state", "city".
    pub levels: Vec<String>,
    /// Worker count; 0 means all cores. A pure performance knob: outputs
    /// are identical for any value.
    pub threads: usize,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        Self {
            levels: vec!["state".into()],
            threads: 0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChangepointSection {
    /// L2 penalty; 0 selects the per-series default 2*sigma^2*ln(n).
    pub penalty: f64,
    pub national_announcement: NaiveDate,
    pub stationarity_window: u32,
}

impl Default for ChangepointSection {
    fn default() -> Self {
        Self {
            penalty: 0.0,
            national_announcement: date(2020, 3, 16),
            stationarity_window: 7,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CorrelateSection {
    pub cases: Option<PathBuf>,
    pub factors: Option<PathBuf>,
    pub policies: Option<PathBuf>,
    pub snapshot: NaiveDate,
    pub sentinel: f64,
}

impl Default for CorrelateSection {
    fn default() -> Self {
        Self {
            cases: None,
            factors: None,
            policies: None,
            snapshot: date(2020, 5, 10),
            sentinel: mobility_core::correlate::POLICY_SENTINEL_DAYS,
        }
    }
}

/// Synthetic corpus shape: homes scattered in weighted boxes, Gaussian
/// event scatter with a dispersion drop at the split, and a cohort that
/// stops moving entirely.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthSection {
    pub users: u32,
    pub events_per_week: u32,
    pub dispersion_pre_km: f64,
    pub dispersion_post_km: f64,
    pub fraction_fully_reducing: f64,
    pub seed: u64,
    pub out: PathBuf,
    pub regions: Vec<SynthRegion>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthRegion {
    pub name: String,
    pub lat_range: [f64; 2],
    pub lon_range: [f64; 2],
    #[serde(default = "one")]
    pub weight: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for SynthSection {
    fn default() -> Self {
        Self {
            users: 1000,
            events_per_week: 4,
            dispersion_pre_km: 9.0,
            dispersion_post_km: 5.7,
            fraction_fully_reducing: 0.4,
            seed: 42,
            out: PathBuf::from("events.jsonl"),
            regions: vec![SynthRegion {
                name: "A".into(),
                lat_range: [38.0, 40.0],
                lon_range: [-78.0, -75.0],
                weight: 1.0,
            }],
        }
    }
}

fn date(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).expect("valid constant date")
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        let mut config: PipelineConfig = toml::from_str(&text)
            .map_err(|e| CliError::config(format!("bad config {}: {e}", path.display())))?;
        config.apply_env_overrides()?;
        config.validate()?;
        Ok(config)
    }

    fn apply_env_overrides(&mut self) -> Result<()> {
        if let Ok(dir) = std::env::var("MOBILITY_OUTPUT_DIR") {
            self.data.output_dir = PathBuf::from(dir);
        }
        if let Ok(threads) = std::env::var("MOBILITY_THREADS") {
            self.analysis.threads = threads
                .parse()
                .map_err(|_| CliError::config(format!("MOBILITY_THREADS not a number: {threads}")))?;
        }
        if let Ok(seed) = std::env::var("MOBILITY_SEED") {
            self.synth.seed = seed
                .parse()
                .map_err(|_| CliError::config(format!("MOBILITY_SEED not a number: {seed}")))?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.dates.start >= self.dates.split {
            return Err(CliError::config("dates.start must precede dates.split"));
        }
        if self.dates.split > self.dates.end {
            return Err(CliError::config("dates.split must not pass dates.end"));
        }
        if self.filters.min_lifetime_events < 1 || self.filters.min_weekly_events < 1 {
            return Err(CliError::config("filter thresholds must be at least 1"));
        }
        if !(0.5..1.0).contains(&self.filters.lowdata_confidence) {
            return Err(CliError::config(
                "filters.lowdata_confidence must lie in [0.5, 1)",
            ));
        }
        if self.mobility.window_days < 1 {
            return Err(CliError::config("mobility.window_days must be at least 1"));
        }
        if !matches!(self.mobility.daily_mode.as_str(), "window" | "smoothed") {
            return Err(CliError::config(
                "mobility.daily_mode must be \"window\" or \"smoothed\"",
            ));
        }
        self.mode()?;
        self.levels()?;
        if self.synth.users == 0 || self.synth.events_per_week == 0 {
            return Err(CliError::config("synth.users and synth.events_per_week must be positive"));
        }
        if !(0.0..=1.0).contains(&self.synth.fraction_fully_reducing) {
            return Err(CliError::config(
                "synth.fraction_fully_reducing must lie in [0, 1]",
            ));
        }
        if self.synth.regions.is_empty() {
            return Err(CliError::config("synth.regions must not be empty"));
        }
        Ok(())
    }

    pub fn mode(&self) -> Result<AnalysisMode> {
        AnalysisMode::parse(&self.ingest.mode).ok_or_else(|| {
            CliError::config(format!(
                "ingest.mode must be state_analysis or city_analysis, got {}",
                self.ingest.mode
            ))
        })
    }

    pub fn levels(&self) -> Result<Vec<RegionLevel>> {
        self.analysis
            .levels
            .iter()
            .map(|l| {
                RegionLevel::parse(l).ok_or_else(|| {
                    CliError::config(format!("unknown analysis level: {l}"))
                })
            })
            .collect()
    }

    /// Low-data z threshold from the configured confidence.
    pub fn lowdata_z(&self) -> f64 {
        mobility_core::stats::normal_quantile(self.filters.lowdata_confidence)
    }

    pub fn core_filters(&self) -> mobility_core::mobility::Filters {
        mobility_core::mobility::Filters {
            min_lifetime_events: self.filters.min_lifetime_events,
            min_period_events: self.filters.min_weekly_events,
        }
    }

    pub fn split(&self) -> Result<mobility_core::reduction::PeriodSplit> {
        mobility_core::reduction::PeriodSplit::new(self.dates.start, self.dates.split, self.dates.end)
            .map_err(CliError::config)
    }

    pub fn event_store_path(&self) -> PathBuf {
        self.data
            .event_store
            .clone()
            .unwrap_or_else(|| self.data.output_dir.join("events.store"))
    }
}
