//! The report stage: reduction tables, user-level activity statistics,
//! box-plot summaries, and largest-drop weeks, from the stored records and
//! weekly series.

use std::collections::BTreeMap;
use std::path::PathBuf;

use chrono::Duration;
use mobility_core::geo::RegionLevel;
use mobility_core::mobility::{log1p_distribution_summary, MobilityRecord, COUNTRY_REGION};
use mobility_core::reduction::{
    drop_week_fractions, largest_drop_week, rank_regions, region_report, ReductionReport,
};
use serde::Serialize;

use crate::config::PipelineConfig;
use crate::error::Result;
use crate::pipeline::level_suffix;
use crate::stores;

#[derive(Debug, Clone, Serialize)]
pub struct ReportOutcome {
    pub report_file: PathBuf,
    pub boxplot_file: PathBuf,
    pub activity_file: PathBuf,
    pub drop_weeks_file: PathBuf,
    pub drop_fractions_file: PathBuf,
    pub regions: u64,
}

pub fn run(config: &PipelineConfig, level: RegionLevel) -> Result<ReportOutcome> {
    let suffix = level_suffix(level);
    let out_dir = &config.data.output_dir;
    let split = config.split()?;
    let min_checkins = config.filters.min_checkins_per_period;

    let stored = stores::read_records(&out_dir.join(format!("records_{suffix}.csv")))?;
    let mut by_region: BTreeMap<String, Vec<MobilityRecord>> = BTreeMap::new();
    let mut all_records: Vec<MobilityRecord> = Vec::with_capacity(stored.len());
    for s in stored {
        if let Some(region) = &s.region_id {
            if region != COUNTRY_REGION {
                by_region
                    .entry(region.clone())
                    .or_default()
                    .push(s.record.clone());
            }
        }
        all_records.push(s.record);
    }

    // Regional rows are ranked; the country row is appended unranked, as
    // in the published tables.
    let regional: Vec<ReductionReport> = by_region
        .iter()
        .map(|(region, records)| region_report(region, records, &split, min_checkins))
        .collect();
    let mut reports = rank_regions(regional);
    reports.push(region_report(
        COUNTRY_REGION,
        &all_records,
        &split,
        min_checkins,
    ));
    let report_file = out_dir.join(format!("report_{suffix}.csv"));
    stores::write_report(&report_file, &reports)?;

    let activity_file = out_dir.join(format!("activity_{suffix}.csv"));
    let activity: Vec<(String, u64, Option<f64>)> = reports
        .iter()
        .map(|r| {
            (
                r.region_id.clone(),
                r.active_users_both_periods,
                r.fully_reduced_fraction,
            )
        })
        .collect();
    stores::write_activity(&activity_file, &activity)?;

    // ln(1+x) box-plot summaries of per-user mean indices, before/after.
    let before_range = (config.dates.start, split.split - Duration::days(1));
    let after_range = (split.split, config.dates.end + Duration::days(6));
    let mut boxplots = Vec::new();
    for (region, records) in by_region
        .iter()
        .map(|(r, recs)| (r.as_str(), recs.as_slice()))
        .chain(std::iter::once((COUNTRY_REGION, all_records.as_slice())))
    {
        boxplots.push((
            region.to_string(),
            log1p_distribution_summary(records, before_range.0, before_range.1),
            log1p_distribution_summary(records, after_range.0, after_range.1),
        ));
    }
    let boxplot_file = out_dir.join(format!("boxplot_{suffix}.json"));
    stores::write_boxplot_json(&boxplot_file, &boxplots)?;

    // Largest week-over-week drops, from the weekly series.
    let series = stores::read_series(&out_dir.join(format!("series_weekly_{suffix}.csv")))?;
    let mut drops = Vec::new();
    let mut regional_series = Vec::new();
    for s in series {
        if let Some(d) = largest_drop_week(&s) {
            drops.push((s.region_id.clone(), d.week, d.drop_km));
        }
        if s.region_id != COUNTRY_REGION {
            regional_series.push(s);
        }
    }
    let drop_weeks_file = out_dir.join(format!("drop_weeks_{suffix}.csv"));
    stores::write_drop_weeks(&drop_weeks_file, &drops)?;
    let fractions = drop_week_fractions(&regional_series);
    let drop_fractions_file = out_dir.join(format!("drop_week_fractions_{suffix}.csv"));
    stores::write_drop_fractions(&drop_fractions_file, &fractions)?;

    let regions = reports.len() as u64;
    Ok(ReportOutcome {
        report_file,
        boxplot_file,
        activity_file,
        drop_weeks_file,
        drop_fractions_file,
        regions,
    })
}
