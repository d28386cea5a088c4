//! Readers for the external correlation inputs: case counts, state
//! factors, and policy dates. These are user-supplied files without the
//! pipeline's schema header; formats are documented in `docs/formats.md`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use chrono::NaiveDate;
use mobility_core::correlate::{CaseSeries, PolicyType, StateFactors};

use crate::error::{io_data, CliError, Result};

fn parse_date_loose(s: &str) -> Option<NaiveDate> {
    // ISO first, then the JHU month/day/two-digit-year style.
    s.parse::<NaiveDate>()
        .ok()
        .or_else(|| NaiveDate::parse_from_str(s, "%m/%d/%y").ok())
}

/// Load cumulative case series. Accepts two layouts, sniffed from the
/// header row:
/// - wide: `region_id,<date>,<date>,...` with one row per region;
/// - long: `region_id,date,cumulative` with one row per observation.
pub fn load_cases(path: &Path) -> Result<Vec<CaseSeries>> {
    let file = File::open(path).map_err(|e| io_data(path, e))?;
    let mut reader = csv::Reader::from_reader(BufReader::new(file));
    let headers = reader
        .headers()
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?
        .clone();
    if headers.len() < 2 {
        return Err(CliError::data(format!(
            "{}: case file needs at least two columns",
            path.display()
        )));
    }
    let is_long = headers.len() == 3 && &headers[1] == "date" && &headers[2] == "cumulative";
    let mut by_region: BTreeMap<String, CaseSeries> = BTreeMap::new();
    if is_long {
        for row in reader.records() {
            let row = row.map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
            let date = parse_date_loose(&row[1]).ok_or_else(|| {
                CliError::data(format!("{}: bad date '{}'", path.display(), &row[1]))
            })?;
            let value: f64 = row[2].parse().map_err(|_| {
                CliError::data(format!("{}: bad count '{}'", path.display(), &row[2]))
            })?;
            by_region
                .entry(row[0].to_string())
                .or_insert_with(|| CaseSeries {
                    region_id: row[0].to_string(),
                    cumulative: BTreeMap::new(),
                })
                .cumulative
                .insert(date, value);
        }
    } else {
        let dates: Vec<NaiveDate> = headers
            .iter()
            .skip(1)
            .map(|h| {
                parse_date_loose(h).ok_or_else(|| {
                    CliError::data(format!(
                        "{}: wide case file has non-date column '{h}'",
                        path.display()
                    ))
                })
            })
            .collect::<Result<_>>()?;
        for row in reader.records() {
            let row = row.map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
            let mut series = CaseSeries {
                region_id: row[0].to_string(),
                cumulative: BTreeMap::new(),
            };
            for (date, cell) in dates.iter().zip(row.iter().skip(1)) {
                if cell.is_empty() {
                    continue;
                }
                let value: f64 = cell.parse().map_err(|_| {
                    CliError::data(format!("{}: bad count '{cell}'", path.display()))
                })?;
                series.cumulative.insert(*date, value);
            }
            by_region.insert(series.region_id.clone(), series);
        }
    }
    Ok(by_region.into_values().collect())
}

/// Load per-state factors: `region_id,population,area_sq_miles,
/// homeless_2019,unemployment_2018,at_risk_fraction`. Empty cells are
/// missing values, excluded pairwise downstream.
pub fn load_factors(path: &Path) -> Result<BTreeMap<String, StateFactors>> {
    let file = File::open(path).map_err(|e| io_data(path, e))?;
    let mut reader = csv::Reader::from_reader(BufReader::new(file));
    let expected = [
        "region_id",
        "population",
        "area_sq_miles",
        "homeless_2019",
        "unemployment_2018",
        "at_risk_fraction",
    ];
    let headers = reader
        .headers()
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(CliError::data(format!(
            "{}: factor file header must be {}",
            path.display(),
            expected.join(",")
        )));
    }
    let cell = |s: &str, path: &Path| -> Result<Option<f64>> {
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse()
                .map(Some)
                .map_err(|_| CliError::data(format!("{}: bad number '{s}'", path.display())))
        }
    };
    let mut out = BTreeMap::new();
    for row in reader.records() {
        let row = row.map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        out.insert(
            row[0].to_string(),
            StateFactors {
                region_id: row[0].to_string(),
                population: cell(&row[1], path)?,
                area_sq_miles: cell(&row[2], path)?,
                homeless_2019: cell(&row[3], path)?,
                unemployment_rate_2018: cell(&row[4], path)?,
                at_risk_fraction: cell(&row[5], path)?,
            },
        );
    }
    Ok(out)
}

pub type PolicyMap = BTreeMap<String, BTreeMap<PolicyType, Option<NaiveDate>>>;

/// Load policy dates: `region_id,policy_type,date`, one row per (region,
/// policy); an empty date means the policy was never announced there.
pub fn load_policies(path: &Path) -> Result<PolicyMap> {
    let file = File::open(path).map_err(|e| io_data(path, e))?;
    let mut reader = csv::Reader::from_reader(BufReader::new(file));
    let mut out: PolicyMap = BTreeMap::new();
    for row in reader.records() {
        let row = row.map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        if row.len() != 3 {
            return Err(CliError::data(format!(
                "{}: policy rows need region_id,policy_type,date",
                path.display()
            )));
        }
        let policy = PolicyType::parse(&row[1]).ok_or_else(|| {
            CliError::data(format!(
                "{}: unknown policy type '{}'",
                path.display(),
                &row[1]
            ))
        })?;
        let date = if row[2].is_empty() {
            None
        } else {
            Some(parse_date_loose(&row[2]).ok_or_else(|| {
                CliError::data(format!("{}: bad date '{}'", path.display(), &row[2]))
            })?)
        };
        out.entry(row[0].to_string()).or_default().insert(policy, date);
    }
    Ok(out)
}
