//! The compute stage: event store in, weekly record store plus weekly and
//! daily regional series out, with the low-data week exclusion applied.

use std::collections::BTreeMap;
use std::path::PathBuf;

use chrono::{Duration, NaiveDate};
use mobility_core::geo::{Geodesic, RegionIndex, RegionLevel};
use mobility_core::ingest::AnalysisMode;
use mobility_core::mobility::{
    build_daily_traces, build_profiles, build_weekly_traces, event_day, exclude_lowdata_periods,
    user_period_index, weekly_volumes, MobilityRecord, Period, RegionSeries, SeriesAccumulator,
    SeriesPoint, UserPeriodTrace,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::PipelineConfig;
use crate::error::{CliError, Result};
use crate::pipeline::level_suffix;
use crate::regions_io::load_regions;
use crate::stores;
use crate::{event_store, stores::ExcludedWeekRow};

#[derive(Debug, Clone, Serialize)]
pub struct ComputeOutcome {
    pub events_in_range: u64,
    pub excluded_weeks: Vec<NaiveDate>,
    pub lowdata_warning: Option<String>,
    pub weekly_records: u64,
    pub levels: Vec<LevelOutcome>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelOutcome {
    pub level: String,
    pub records_file: PathBuf,
    pub weekly_series_file: PathBuf,
    pub daily_series_file: PathBuf,
    pub regions_with_data: u64,
}

fn index_records(traces: &[UserPeriodTrace]) -> Vec<MobilityRecord> {
    traces
        .par_iter()
        .map_init(Geodesic::wgs84, |geod, trace| user_period_index(trace, geod))
        .collect()
}

fn aggregate_parallel(
    records: &[MobilityRecord],
    regions: &BTreeMap<String, Option<String>>,
) -> Vec<RegionSeries> {
    records
        .par_chunks(4096)
        .map(|chunk| {
            let mut acc = SeriesAccumulator::new();
            for record in chunk {
                let region = regions.get(&record.user_id).and_then(|r| r.as_deref());
                acc.push(record, region);
            }
            acc
        })
        .reduce(SeriesAccumulator::new, |mut a, b| {
            a.merge(b);
            a
        })
        .into_series()
}

fn window_overlaps_excluded(period: Period, excluded: &[NaiveDate]) -> bool {
    excluded
        .iter()
        .any(|&week| period.start() <= week + Duration::days(6) && week <= period.end())
}

/// Mode compatibility: state and country analyses run on the
/// state-analysis store, the city analysis on the city-analysis store.
fn check_mode(meta_mode: AnalysisMode, level: RegionLevel) -> Result<()> {
    let ok = match level {
        RegionLevel::City => meta_mode == AnalysisMode::CityAnalysis,
        RegionLevel::State | RegionLevel::Country => meta_mode == AnalysisMode::StateAnalysis,
    };
    if ok {
        Ok(())
    } else {
        Err(CliError::config(format!(
            "event store was ingested in {} mode, which does not serve the {} level; re-run ingest",
            meta_mode.as_str(),
            level
        )))
    }
}

pub fn run(config: &PipelineConfig, levels: &[RegionLevel]) -> Result<ComputeOutcome> {
    let store_path = config.event_store_path();
    let (meta, all_events) = event_store::read_store(&store_path)?;
    let mode = meta.mode()?;
    for &level in levels {
        check_mode(mode, level)?;
    }

    // Clamp to the configured date range.
    let events: Vec<_> = all_events
        .into_iter()
        .filter(|ev| {
            let day = event_day(ev);
            day >= config.dates.start && day <= config.dates.end
        })
        .collect();
    if events.is_empty() {
        return Err(CliError::data("no events inside the configured date range"));
    }

    // Low-data weeks: flagged at the country level from raw volumes, then
    // removed everywhere by dropping their events.
    let volumes = weekly_volumes(&events);
    let exclusion = exclude_lowdata_periods(&volumes, config.lowdata_z());
    let lowdata_warning = exclusion
        .insufficient_data
        .then(|| "fewer than 4 weeks of data; low-data exclusion skipped".to_string());
    let excluded = exclusion.excluded.clone();
    let manifest: Vec<ExcludedWeekRow> = excluded
        .iter()
        .map(|week| ExcludedWeekRow {
            week_start: *week,
            users: volumes[week].users,
            records: volumes[week].records,
            user_threshold: exclusion.user_threshold.unwrap_or(f64::NAN),
            record_threshold: exclusion.record_threshold.unwrap_or(f64::NAN),
        })
        .collect();
    let events: Vec<_> = events
        .into_iter()
        .filter(|ev| !excluded.contains(&Period::week_of(event_day(ev)).key))
        .collect();
    if events.is_empty() {
        return Err(CliError::data("low-data exclusion removed every event"));
    }

    let filters = config.core_filters();
    let weekly_traces = build_weekly_traces(&events, &filters);
    let weekly_records = index_records(&weekly_traces);
    drop(weekly_traces);

    // Daily records, in bounded date chunks to cap trace memory. Windows
    // touching an excluded week are dropped: their days lost data.
    let daily_records = {
        let mut out = Vec::new();
        let mut chunk_start = config.dates.start;
        while chunk_start <= config.dates.end {
            let chunk_end = (chunk_start + Duration::days(13)).min(config.dates.end);
            let traces = match config.mobility.daily_mode.as_str() {
                "window" => build_daily_traces(&events, &filters, chunk_start, chunk_end),
                _ => build_single_day_traces(&events, &filters, chunk_start, chunk_end),
            };
            let records = index_records(&traces);
            out.extend(
                records
                    .into_iter()
                    .filter(|r| !window_overlaps_excluded(r.period, &excluded)),
            );
            chunk_start = chunk_end + Duration::days(1);
        }
        out
    };

    let region_index = match &config.data.regions {
        Some(path) => Some(load_regions(path)?),
        None => None,
    };
    let profiles = build_profiles(&events);

    std::fs::create_dir_all(&config.data.output_dir)
        .map_err(|e| crate::error::io_data(&config.data.output_dir, e))?;

    let mut level_outcomes = Vec::new();
    for &level in levels {
        // user -> region at this level, via the all-time centroid.
        let user_regions: BTreeMap<String, Option<String>> = match level {
            RegionLevel::Country => BTreeMap::new(),
            RegionLevel::State | RegionLevel::City => {
                let index: &RegionIndex = region_index.as_ref().ok_or_else(|| {
                    CliError::config(format!(
                        "analysis level '{level}' needs data.regions geometry"
                    ))
                })?;
                if !index.has_level(level) {
                    return Err(CliError::config(format!(
                        "region file has no '{level}' features"
                    )));
                }
                profiles
                    .values()
                    .map(|p| {
                        let region = index
                            .assign(p.alltime_centroid, level)
                            .expect("level presence checked")
                            .map(str::to_string);
                        (p.user_id.clone(), region)
                    })
                    .collect()
            }
        };

        let suffix = level_suffix(level);
        let records_file = config.data.output_dir.join(format!("records_{suffix}.csv"));
        let region_of = |r: &MobilityRecord| -> Option<String> {
            match level {
                RegionLevel::Country => Some(mobility_core::mobility::COUNTRY_REGION.to_string()),
                _ => user_regions.get(&r.user_id).cloned().flatten(),
            }
        };
        stores::write_records(&records_file, &weekly_records, region_of)?;

        let weekly_series = aggregate_parallel(&weekly_records, &user_regions);
        let weekly_series_file = config
            .data
            .output_dir
            .join(format!("series_weekly_{suffix}.csv"));
        stores::write_series(&weekly_series_file, &weekly_series)?;

        let mut daily_series = aggregate_parallel(&daily_records, &user_regions);
        if config.mobility.daily_mode == "smoothed" {
            smooth_series(&mut daily_series, config.mobility.window_days as i64);
        }
        let daily_series_file = config
            .data
            .output_dir
            .join(format!("series_daily_{suffix}.csv"));
        stores::write_series(&daily_series_file, &daily_series)?;

        level_outcomes.push(LevelOutcome {
            level: level.as_str().to_string(),
            records_file,
            weekly_series_file,
            daily_series_file,
            regions_with_data: weekly_series.len() as u64,
        });
    }

    stores::write_excluded_weeks(
        &config.data.output_dir.join("excluded_weeks.csv"),
        &manifest,
    )?;

    Ok(ComputeOutcome {
        events_in_range: events.len() as u64,
        excluded_weeks: excluded,
        lowdata_warning,
        weekly_records: weekly_records.len() as u64,
        levels: level_outcomes,
    })
}

/// Alternate daily mode: one-day traces whose aggregates are smoothed
/// afterwards. The period is keyed like a trailing window ending on the
/// day; only that day's events are included.
fn build_single_day_traces(
    events: &[mobility_core::ingest::GeoEvent],
    filters: &mobility_core::mobility::Filters,
    first: NaiveDate,
    last: NaiveDate,
) -> Vec<UserPeriodTrace> {
    let mut lifetime: BTreeMap<&str, u32> = BTreeMap::new();
    for ev in events {
        *lifetime.entry(ev.user_id.as_str()).or_default() += 1;
    }
    let mut groups: BTreeMap<(&str, NaiveDate), Vec<&mobility_core::ingest::GeoEvent>> =
        BTreeMap::new();
    for ev in events {
        let day = event_day(ev);
        if day < first || day > last {
            continue;
        }
        if lifetime[ev.user_id.as_str()] < filters.min_lifetime_events {
            continue;
        }
        groups.entry((ev.user_id.as_str(), day)).or_default().push(ev);
    }
    groups
        .into_iter()
        .filter(|(_, evs)| evs.len() as u32 >= filters.min_period_events)
        .map(|((user, day), evs)| {
            let mut events: Vec<_> = evs.into_iter().cloned().collect();
            events.sort_by_key(|e| e.timestamp);
            UserPeriodTrace {
                user_id: user.to_string(),
                period: Period::day_window(day),
                events,
            }
        })
        .collect()
}

/// Trailing moving average over the mean series, equal-weighted across the
/// days present in each window.
fn smooth_series(series: &mut [RegionSeries], window_days: i64) {
    for s in series.iter_mut() {
        let original: BTreeMap<NaiveDate, SeriesPoint> = s.points.clone();
        for (&day, point) in s.points.iter_mut() {
            let from = day - Duration::days(window_days - 1);
            let window: Vec<f64> = original
                .range(from..=day)
                .map(|(_, p)| p.mean_km)
                .collect();
            point.mean_km = window.iter().sum::<f64>() / window.len() as f64;
        }
    }
}
