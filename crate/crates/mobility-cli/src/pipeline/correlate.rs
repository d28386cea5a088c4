//! The correlate stage: daily factor panels (infection-rate and
//! mobility-index targets) and the policy-date correlation table.

use std::collections::BTreeMap;
use std::path::PathBuf;

use mobility_core::correlate::{
    daily_factor_correlations, daily_infection_rate, policy_correlation, PanelTarget, RegionDaily,
};
use mobility_core::geo::RegionLevel;
use mobility_core::mobility::COUNTRY_REGION;
use serde::Serialize;

use crate::config::PipelineConfig;
use crate::error::{CliError, Result};
use crate::external::{load_cases, load_factors, load_policies};
use crate::pipeline::level_suffix;
use crate::stores;

#[derive(Debug, Clone, Serialize)]
pub struct CorrelateOutcome {
    pub infection_panel_file: PathBuf,
    pub mobility_panel_file: PathBuf,
    pub policy_file: Option<PathBuf>,
    pub regions_with_rates: u64,
    pub warnings: Vec<String>,
}

fn require_input(path: &Option<std::path::PathBuf>, what: &str) -> Result<std::path::PathBuf> {
    let path = path
        .as_ref()
        .ok_or_else(|| CliError::config(format!("correlate.{what} is not configured")))?;
    if !path.exists() {
        return Err(CliError::config(format!(
            "correlate.{what} file {} does not exist",
            path.display()
        )));
    }
    Ok(path.clone())
}

pub fn run(config: &PipelineConfig, level: RegionLevel) -> Result<CorrelateOutcome> {
    let out_dir = &config.data.output_dir;
    let suffix = level_suffix(level);
    let mut warnings = Vec::new();

    let cases_path = require_input(&config.correlate.cases, "cases")?;
    let factors_path = require_input(&config.correlate.factors, "factors")?;
    let cases = load_cases(&cases_path)?;
    let factors = load_factors(&factors_path)?;

    // Daily infection rates; regions without a population are excluded.
    let mut rates: RegionDaily = BTreeMap::new();
    for series in &cases {
        let population = factors
            .get(&series.region_id)
            .and_then(|f| f.population);
        match daily_infection_rate(series, population) {
            Some(r) => {
                if !r.clamped_days.is_empty() {
                    warnings.push(format!(
                        "{}: cumulative cases decreased on {} day(s); clamped to zero",
                        r.region_id,
                        r.clamped_days.len()
                    ));
                }
                rates.insert(series.region_id.clone(), r.rates);
            }
            None => warnings.push(format!(
                "{}: no population known; excluded from rate panels",
                series.region_id
            )),
        }
    }

    // Daily mobility means per region, from the computed series.
    let mobility_series =
        stores::read_series(&out_dir.join(format!("series_daily_{suffix}.csv")))?;
    let mut mobility: RegionDaily = BTreeMap::new();
    for s in mobility_series {
        if s.region_id == COUNTRY_REGION {
            continue;
        }
        mobility.insert(
            s.region_id.clone(),
            s.points.iter().map(|(d, p)| (*d, p.mean_km)).collect(),
        );
    }

    let infection_panel =
        daily_factor_correlations(&rates, &mobility, &factors, PanelTarget::InfectionRate);
    let infection_panel_file = out_dir.join(format!("correlations_infection_{suffix}.csv"));
    stores::write_daily_correlations(&infection_panel_file, &infection_panel)?;

    let mobility_panel =
        daily_factor_correlations(&rates, &mobility, &factors, PanelTarget::MobilityIndex);
    let mobility_panel_file = out_dir.join(format!("correlations_mobility_{suffix}.csv"));
    stores::write_daily_correlations(&mobility_panel_file, &mobility_panel)?;

    // Policy table; optional input, the panels still run without it.
    let policy_file = match &config.correlate.policies {
        None => {
            warnings.push("no policy file configured; policy table skipped".to_string());
            None
        }
        Some(path) => {
            if !path.exists() {
                return Err(CliError::config(format!(
                    "policy file {} does not exist",
                    path.display()
                )));
            }
            let policies = load_policies(path)?;
            // Cumulative cases at the snapshot: last observation on or
            // before the snapshot date.
            let snapshot = config.correlate.snapshot;
            let mut cases_at: BTreeMap<String, f64> = BTreeMap::new();
            for series in &cases {
                if let Some((_, &v)) = series
                    .cumulative
                    .range(..=snapshot)
                    .next_back()
                {
                    cases_at.insert(series.region_id.clone(), v);
                }
            }
            let rows =
                policy_correlation(&cases_at, &policies, snapshot, config.correlate.sentinel);
            let path_out = out_dir.join(format!("policy_correlations_{suffix}.csv"));
            stores::write_policy_correlations(&path_out, &rows)?;
            Some(path_out)
        }
    };

    Ok(CorrelateOutcome {
        infection_panel_file,
        mobility_panel_file,
        policy_file,
        regions_with_rates: rates.len() as u64,
        warnings,
    })
}
