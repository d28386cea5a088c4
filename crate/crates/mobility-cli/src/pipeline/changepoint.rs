//! The change-point stage: offline detection on the stored daily series,
//! policy-date attribution, and the stationarity comparison.

use std::collections::BTreeMap;
use std::path::PathBuf;

use chrono::{Datelike, NaiveDate};
use mobility_core::changepoint::{
    attribute_changepoints, compare_stationarity, detect_changepoints, ChangePointResult,
    DailySeries,
};
use mobility_core::correlate::PolicyType;
use mobility_core::geo::RegionLevel;
use mobility_core::mobility::COUNTRY_REGION;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::PipelineConfig;
use crate::error::{CliError, Result};
use crate::external::load_policies;
use crate::pipeline::level_suffix;
use crate::schema;
use crate::stores::{self, ChangepointSummary};

#[derive(Debug, Clone, Serialize)]
pub struct ChangepointOutcome {
    pub breakpoints_file: PathBuf,
    pub summary_file: PathBuf,
    pub regions: u64,
    pub breakpoints: u64,
    pub warnings: Vec<String>,
}

pub fn run(config: &PipelineConfig, level: RegionLevel) -> Result<ChangepointOutcome> {
    let suffix = level_suffix(level);
    let out_dir = &config.data.output_dir;
    let series = stores::read_series(&out_dir.join(format!("series_daily_{suffix}.csv")))?;
    if series.is_empty() {
        return Err(CliError::data("daily series file holds no regions"));
    }
    let penalty = (config.changepoint.penalty > 0.0).then_some(config.changepoint.penalty);

    // Per-region detection is independent; order is preserved by collect.
    let results: Vec<(DailySeries, ChangePointResult)> = series
        .par_iter()
        .filter_map(|s| {
            let means: BTreeMap<NaiveDate, f64> =
                s.points.iter().map(|(d, p)| (*d, p.mean_km)).collect();
            let daily = DailySeries::from_points(&s.region_id, &means)?;
            if daily.len() < 4 {
                return None;
            }
            let result = detect_changepoints(&daily, penalty);
            Some((daily, result))
        })
        .collect();

    let mut rows = Vec::new();
    for (_, r) in &results {
        for &bp in &r.breakpoints {
            rows.push((r.region_id.clone(), bp, r.penalty));
        }
    }
    let breakpoints_file = out_dir.join(format!("breakpoints_{suffix}.csv"));
    stores::write_breakpoints(&breakpoints_file, &rows)?;

    // Attribution and stationarity need the per-state stay-at-home dates.
    let mut warnings = Vec::new();
    let mut fraction_in_window = None;
    let mut stationary_fraction = None;
    let mut regions_with_policy = 0u64;
    match &config.correlate.policies {
        None => warnings.push("no policy file configured; attribution skipped".to_string()),
        Some(path) => {
            if !path.exists() {
                return Err(CliError::config(format!(
                    "policy file {} does not exist",
                    path.display()
                )));
            }
            let policies = load_policies(path)?;
            let stay_home: BTreeMap<String, NaiveDate> = policies
                .iter()
                .filter_map(|(region, dates)| {
                    dates
                        .get(&PolicyType::StayAtHome)
                        .copied()
                        .flatten()
                        .map(|d| (region.clone(), d))
                })
                .collect();
            regions_with_policy = stay_home.len() as u64;

            let regional_results: Vec<ChangePointResult> = results
                .iter()
                .filter(|(_, r)| r.region_id != COUNTRY_REGION)
                .map(|(_, r)| r.clone())
                .collect();
            fraction_in_window = attribute_changepoints(
                &regional_results,
                config.changepoint.national_announcement,
                &stay_home,
                config.dates.split.year(),
            );

            let window = config.changepoint.stationarity_window as usize;
            let mut more_stationary = 0u64;
            let mut comparable = 0u64;
            for (daily, r) in &results {
                if r.region_id == COUNTRY_REGION {
                    continue;
                }
                let Some(&policy_date) = stay_home.get(&r.region_id) else {
                    continue;
                };
                if let Some(more) = compare_stationarity(daily, policy_date, window) {
                    comparable += 1;
                    if more {
                        more_stationary += 1;
                    }
                }
            }
            if comparable > 0 {
                stationary_fraction = Some(more_stationary as f64 / comparable as f64);
            }
        }
    }

    let summary_file = out_dir.join(format!("changepoint_summary_{suffix}.json"));
    stores::write_changepoint_summary(
        &summary_file,
        &ChangepointSummary {
            schema: format!("{} changepoint-summary", schema::SCHEMA_VERSION),
            fraction_after_national_before_state: fraction_in_window,
            more_stationary_before_policy_fraction: stationary_fraction,
            regions_with_policy,
            regions_total: results.len() as u64,
        },
    )?;

    Ok(ChangepointOutcome {
        breakpoints_file,
        summary_file,
        regions: results.len() as u64,
        breakpoints: rows.len() as u64,
        warnings,
    })
}
