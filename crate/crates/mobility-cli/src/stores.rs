//! CSV stores for pipeline intermediates and report outputs. Every file
//! starts with the schema header line; see `docs/formats.md`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use chrono::NaiveDate;
use mobility_core::geo::Point;
use mobility_core::mobility::{MobilityRecord, Period, RegionSeries, SeriesPoint};
use mobility_core::reduction::ReductionReport;
use mobility_core::stats::FiveNumberSummary;

use crate::error::{io_data, CliError, Result};
use crate::schema;

fn opt_f64(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn opt_u32(v: Option<u32>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn open_csv(path: &Path, name: &str) -> Result<csv::Reader<BufReader<File>>> {
    let file = File::open(path).map_err(|e| io_data(path, e))?;
    let mut reader = BufReader::new(file);
    schema::check_header(&mut reader, path, name)?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader))
}

fn create_csv(path: &Path, name: &str) -> Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).map_err(|e| io_data(path, e))?;
    let mut w = BufWriter::new(file);
    schema::write_header(&mut w, name).map_err(|e| io_data(path, e))?;
    Ok(csv::Writer::from_writer(w))
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    CliError::data(format!("{}: {e}", path.display()))
}

// ---- weekly mobility records ------------------------------------------

const RECORDS_SCHEMA: &str = "records";

/// Write the per-level weekly record store. `region_of` supplies the
/// record's region at this level (empty cell when unassigned; such users
/// still join the country series).
pub fn write_records(
    path: &Path,
    records: &[MobilityRecord],
    region_of: impl Fn(&MobilityRecord) -> Option<String>,
) -> Result<()> {
    let mut w = create_csv(path, RECORDS_SCHEMA)?;
    w.write_record([
        "user_id",
        "period_start",
        "region_id",
        "index_km",
        "checkins",
        "degenerate",
    ])
    .map_err(|e| csv_err(path, e))?;
    for r in records {
        w.write_record([
            r.user_id.as_str(),
            &r.period.key.to_string(),
            &region_of(r).unwrap_or_default(),
            &r.index_km.to_string(),
            &r.checkin_count.to_string(),
            if r.degenerate_home { "1" } else { "0" },
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| io_data(path, e))
}

/// A record row as stored, with its per-level region.
#[derive(Debug, Clone)]
pub struct StoredRecord {
    pub record: MobilityRecord,
    pub region_id: Option<String>,
}

pub fn read_records(path: &Path) -> Result<Vec<StoredRecord>> {
    let mut reader = open_csv(path, RECORDS_SCHEMA)?;
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| csv_err(path, e))?;
        let bad = || CliError::data(format!("{}: bad record row {:?}", path.display(), row));
        if row.len() != 6 {
            return Err(bad());
        }
        let period_key: NaiveDate = row[1].parse().map_err(|_| bad())?;
        out.push(StoredRecord {
            record: MobilityRecord {
                user_id: row[0].to_string(),
                period: Period::week_of(period_key),
                // Homes are not persisted; reports never need them.
                home: Point::new(0.0, 0.0),
                index_km: row[3].parse().map_err(|_| bad())?,
                checkin_count: row[4].parse().map_err(|_| bad())?,
                degenerate_home: &row[5] == "1",
            },
            region_id: if row[2].is_empty() {
                None
            } else {
                Some(row[2].to_string())
            },
        });
    }
    Ok(out)
}

// ---- region series -----------------------------------------------------

const SERIES_SCHEMA: &str = "region-series";

pub fn write_series(path: &Path, series: &[RegionSeries]) -> Result<()> {
    let mut w = create_csv(path, SERIES_SCHEMA)?;
    w.write_record(["region_id", "period_start", "mean_km", "variance", "users"])
        .map_err(|e| csv_err(path, e))?;
    for s in series {
        for (date, point) in &s.points {
            w.write_record([
                s.region_id.as_str(),
                &date.to_string(),
                &point.mean_km.to_string(),
                &point.variance.to_string(),
                &point.users.to_string(),
            ])
            .map_err(|e| csv_err(path, e))?;
        }
    }
    w.flush().map_err(|e| io_data(path, e))
}

pub fn read_series(path: &Path) -> Result<Vec<RegionSeries>> {
    let mut reader = open_csv(path, SERIES_SCHEMA)?;
    let mut by_region: std::collections::BTreeMap<String, RegionSeries> =
        std::collections::BTreeMap::new();
    for row in reader.records() {
        let row = row.map_err(|e| csv_err(path, e))?;
        let bad = || CliError::data(format!("{}: bad series row {:?}", path.display(), row));
        if row.len() != 5 {
            return Err(bad());
        }
        let date: NaiveDate = row[1].parse().map_err(|_| bad())?;
        let point = SeriesPoint {
            mean_km: row[2].parse().map_err(|_| bad())?,
            variance: row[3].parse().map_err(|_| bad())?,
            users: row[4].parse().map_err(|_| bad())?,
        };
        by_region
            .entry(row[0].to_string())
            .or_insert_with(|| RegionSeries {
                region_id: row[0].to_string(),
                points: std::collections::BTreeMap::new(),
            })
            .points
            .insert(date, point);
    }
    Ok(by_region.into_values().collect())
}

// ---- reduction report ---------------------------------------------------

const REPORT_SCHEMA: &str = "reduction-report";

pub fn write_report(path: &Path, reports: &[ReductionReport]) -> Result<()> {
    let mut w = create_csv(path, REPORT_SCHEMA)?;
    w.write_record([
        "location",
        "before_km",
        "after_km",
        "group_reduction",
        "median_reduction",
        "median_seasonal_reduction",
        "rank",
    ])
    .map_err(|e| csv_err(path, e))?;
    for r in reports {
        w.write_record([
            r.region_id.as_str(),
            &opt_f64(r.before_mean_km),
            &opt_f64(r.after_mean_km),
            &opt_f64(r.group_reduction),
            &opt_f64(r.median_user_reduction),
            &opt_f64(r.median_seasonal_reduction),
            &opt_u32(r.rank),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| io_data(path, e))
}

// ---- activity summary (active users, fully-reduced fraction) ------------

const ACTIVITY_SCHEMA: &str = "activity-summary";

pub fn write_activity(path: &Path, rows: &[(String, u64, Option<f64>)]) -> Result<()> {
    let mut w = create_csv(path, ACTIVITY_SCHEMA)?;
    w.write_record(["location", "active_users_both_periods", "fully_reduced_fraction"])
        .map_err(|e| csv_err(path, e))?;
    for (region, active, fraction) in rows {
        w.write_record([region.as_str(), &active.to_string(), &opt_f64(*fraction)])
            .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| io_data(path, e))
}

// ---- excluded weeks manifest --------------------------------------------

const EXCLUDED_SCHEMA: &str = "excluded-weeks";

pub struct ExcludedWeekRow {
    pub week_start: NaiveDate,
    pub users: u64,
    pub records: u64,
    pub user_threshold: f64,
    pub record_threshold: f64,
}

pub fn write_excluded_weeks(path: &Path, rows: &[ExcludedWeekRow]) -> Result<()> {
    let mut w = create_csv(path, EXCLUDED_SCHEMA)?;
    w.write_record([
        "week_start",
        "users",
        "records",
        "user_threshold",
        "record_threshold",
    ])
    .map_err(|e| csv_err(path, e))?;
    for r in rows {
        w.write_record([
            r.week_start.to_string(),
            r.users.to_string(),
            r.records.to_string(),
            r.user_threshold.to_string(),
            r.record_threshold.to_string(),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| io_data(path, e))
}

// ---- largest drop weeks --------------------------------------------------

const DROPS_SCHEMA: &str = "drop-weeks";

pub fn write_drop_weeks(path: &Path, rows: &[(String, NaiveDate, f64)]) -> Result<()> {
    let mut w = create_csv(path, DROPS_SCHEMA)?;
    w.write_record(["region_id", "week_start", "drop_km"])
        .map_err(|e| csv_err(path, e))?;
    for (region, week, drop) in rows {
        w.write_record([region.as_str(), &week.to_string(), &drop.to_string()])
            .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| io_data(path, e))
}

const DROP_FRACTIONS_SCHEMA: &str = "drop-week-fractions";

pub fn write_drop_fractions(
    path: &Path,
    fractions: &std::collections::BTreeMap<NaiveDate, f64>,
) -> Result<()> {
    let mut w = create_csv(path, DROP_FRACTIONS_SCHEMA)?;
    w.write_record(["week_start", "fraction_of_regions"])
        .map_err(|e| csv_err(path, e))?;
    for (week, fraction) in fractions {
        w.write_record([week.to_string(), fraction.to_string()])
            .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| io_data(path, e))
}

// ---- change points ---------------------------------------------------------

const BREAKPOINTS_SCHEMA: &str = "breakpoints";

pub fn write_breakpoints(path: &Path, rows: &[(String, NaiveDate, f64)]) -> Result<()> {
    let mut w = create_csv(path, BREAKPOINTS_SCHEMA)?;
    w.write_record(["region_id", "breakpoint_date", "penalty"])
        .map_err(|e| csv_err(path, e))?;
    for (region, date, penalty) in rows {
        w.write_record([region.as_str(), &date.to_string(), &penalty.to_string()])
            .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| io_data(path, e))
}

// ---- correlation panels ------------------------------------------------

const CORRELATIONS_SCHEMA: &str = "daily-correlations";

pub fn write_daily_correlations(
    path: &Path,
    panel: &std::collections::BTreeMap<NaiveDate, Vec<(String, Option<f64>)>>,
) -> Result<()> {
    let mut w = create_csv(path, CORRELATIONS_SCHEMA)?;
    w.write_record(["date", "factor", "correlation"])
        .map_err(|e| csv_err(path, e))?;
    for (date, row) in panel {
        for (factor, correlation) in row {
            w.write_record([date.to_string(), factor.clone(), opt_f64(*correlation)])
                .map_err(|e| csv_err(path, e))?;
        }
    }
    w.flush().map_err(|e| io_data(path, e))
}

const POLICY_SCHEMA: &str = "policy-correlations";

pub fn write_policy_correlations(
    path: &Path,
    rows: &[(mobility_core::correlate::PolicyType, Option<f64>)],
) -> Result<()> {
    let mut w = create_csv(path, POLICY_SCHEMA)?;
    w.write_record(["policy_type", "correlation"])
        .map_err(|e| csv_err(path, e))?;
    for (policy, correlation) in rows {
        w.write_record([policy.label(), &opt_f64(*correlation)])
            .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| io_data(path, e))
}

// ---- box-plot summary JSON ------------------------------------------------

#[derive(serde::Serialize)]
struct BoxplotDoc<'a> {
    schema: String,
    regions: Vec<BoxplotRegion<'a>>,
}

#[derive(serde::Serialize)]
struct BoxplotRegion<'a> {
    region_id: &'a str,
    before: Option<BoxplotStats>,
    after: Option<BoxplotStats>,
}

#[derive(serde::Serialize)]
struct BoxplotStats {
    min: f64,
    q1: f64,
    median: f64,
    q3: f64,
    max: f64,
}

impl From<FiveNumberSummary> for BoxplotStats {
    fn from(s: FiveNumberSummary) -> Self {
        Self {
            min: s.min,
            q1: s.q1,
            median: s.median,
            q3: s.q3,
            max: s.max,
        }
    }
}

/// Per-region before/after ln(1+x) box-plot summaries.
pub fn write_boxplot_json(
    path: &Path,
    rows: &[(String, Option<FiveNumberSummary>, Option<FiveNumberSummary>)],
) -> Result<()> {
    let doc = BoxplotDoc {
        schema: format!("{} boxplot", schema::SCHEMA_VERSION),
        regions: rows
            .iter()
            .map(|(region_id, before, after)| BoxplotRegion {
                region_id,
                before: before.map(Into::into),
                after: after.map(Into::into),
            })
            .collect(),
    };
    let file = File::create(path).map_err(|e| io_data(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, &doc)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    writeln!(w).map_err(|e| io_data(path, e))?;
    w.flush().map_err(|e| io_data(path, e))
}

// ---- change-point summary JSON ---------------------------------------------

#[derive(serde::Serialize)]
pub struct ChangepointSummary {
    pub schema: String,
    /// Fraction of breakpoints in the split year landing after the national
    /// announcement but before the region's own policy date.
    pub fraction_after_national_before_state: Option<f64>,
    /// Fraction of regions with a stay-at-home date whose pre-policy series
    /// is more stationary than the full series.
    pub more_stationary_before_policy_fraction: Option<f64>,
    pub regions_with_policy: u64,
    pub regions_total: u64,
}

pub fn write_changepoint_summary(path: &Path, summary: &ChangepointSummary) -> Result<()> {
    let file = File::create(path).map_err(|e| io_data(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, summary)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    writeln!(w).map_err(|e| io_data(path, e))?;
    w.flush().map_err(|e| io_data(path, e))
}

/// Verify that a path's first line carries the expected schema; used by
/// smoke tests and downstream tooling.
pub fn sniff_schema(path: &Path) -> Result<String> {
    let file = File::open(path).map_err(|e| io_data(path, e))?;
    let mut reader = BufReader::new(file);
    let mut line = String::new();
    reader.read_line(&mut line).map_err(|e| io_data(path, e))?;
    Ok(line.trim_end().to_string())
}
