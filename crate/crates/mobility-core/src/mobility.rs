//! The social mobility index: per-user travel dispersion per week (or per
//! trailing 7-day window), sparse-data filters, and regional aggregation.
//!
//! The index for one user and one period is the population standard
//! deviation, in kilometres, of the geodesic distances between each check-in
//! and the period's centroid ("home"). Regional series average the index
//! across users and record the cross-user variance.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use chrono::{Datelike, Duration, NaiveDate};

use crate::geo::{centroid, Geodesic, Point};
use crate::ingest::GeoEvent;
use crate::stats::{population_std, FiveNumberSummary, MomentAccumulator};

/// Sparse-data exclusion thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Filters {
    /// Users with fewer geolocated events than this over the whole dataset
    /// are dropped entirely.
    pub min_lifetime_events: u32,
    /// User-periods with fewer events than this are dropped.
    pub min_period_events: u32,
}

impl Default for Filters {
    fn default() -> Self {
        Self {
            min_lifetime_events: 3,
            min_period_events: 2,
        }
    }
}

/// Kind of aggregation period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PeriodKind {
    /// Monday-start calendar week; the key is the Monday.
    Week,
    /// Trailing 7-day window; the key is the final day.
    DayWindow,
}

/// One aggregation period, identified by its key date.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Period {
    pub kind: PeriodKind,
    pub key: NaiveDate,
}

impl Period {
    /// The Monday-start week containing `date`.
    pub fn week_of(date: NaiveDate) -> Self {
        let monday = date - Duration::days(date.weekday().num_days_from_monday() as i64);
        Self {
            kind: PeriodKind::Week,
            key: monday,
        }
    }

    /// The trailing 7-day window ending at `end`.
    pub fn day_window(end: NaiveDate) -> Self {
        Self {
            kind: PeriodKind::DayWindow,
            key: end,
        }
    }

    /// First day of the period (inclusive).
    pub fn start(&self) -> NaiveDate {
        match self.kind {
            PeriodKind::Week => self.key,
            PeriodKind::DayWindow => self.key - Duration::days(6),
        }
    }

    /// Last day of the period (inclusive). Range membership for the
    /// before/after split uses this date.
    pub fn end(&self) -> NaiveDate {
        match self.kind {
            PeriodKind::Week => self.key + Duration::days(6),
            PeriodKind::DayWindow => self.key,
        }
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        date >= self.start() && date <= self.end()
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            PeriodKind::Week => write!(f, "week:{}", self.key),
            PeriodKind::DayWindow => write!(f, "day:{}", self.key),
        }
    }
}

/// A user's events within one period, sorted by timestamp.
#[derive(Debug, Clone)]
pub struct UserPeriodTrace {
    pub user_id: String,
    pub period: Period,
    pub events: Vec<GeoEvent>,
}

/// The per-user, per-period index.
#[derive(Debug, Clone)]
pub struct MobilityRecord {
    pub user_id: String,
    pub period: Period,
    /// The period's centroid ("home" location).
    pub home: Point,
    pub index_km: f64,
    pub checkin_count: u32,
    /// True when the centroid fell back to the first event (degenerate
    /// vector mean); the index is still computed against that point.
    pub degenerate_home: bool,
}

/// Per-user whole-dataset profile used for region assignment.
#[derive(Debug, Clone)]
pub struct UserProfile {
    pub user_id: String,
    pub total_events: u64,
    pub alltime_centroid: Point,
    pub degenerate_centroid: bool,
}

fn event_date(ts: i64) -> NaiveDate {
    chrono::DateTime::from_timestamp(ts, 0)
        .expect("valid unix timestamp")
        .date_naive()
}

/// Date (UTC) of an event.
pub fn event_day(event: &GeoEvent) -> NaiveDate {
    event_date(event.timestamp)
}

fn event_point(event: &GeoEvent) -> Point {
    Point::new(event.latitude, event.longitude)
}

/// Compute the index for one trace. The trace must hold at least two
/// events (the builders guarantee this).
///
/// Note the two-event case: both events are (nearly) equidistant from their
/// midpoint centroid, so by the literal definition the index of any
/// two-point trace is ~0 regardless of how far apart the points are. The
/// index measures dispersion *around* the weekly home, not distance
/// travelled.
pub fn user_period_index(trace: &UserPeriodTrace, geodesic: &Geodesic) -> MobilityRecord {
    debug_assert!(trace.events.len() >= 2, "trace below the 2-event filter");
    let points: Vec<Point> = trace.events.iter().map(event_point).collect();
    let home = centroid(&points).expect("non-empty trace");
    let distances: Vec<f64> = points
        .iter()
        .map(|p| {
            geodesic.inverse_distance_km(
                p.latitude,
                p.longitude,
                home.point.latitude,
                home.point.longitude,
            )
        })
        .collect();
    MobilityRecord {
        user_id: trace.user_id.clone(),
        period: trace.period,
        home: home.point,
        index_km: population_std(&distances),
        checkin_count: trace.events.len() as u32,
        degenerate_home: home.degenerate,
    }
}

fn group_by_user(events: &[GeoEvent]) -> BTreeMap<&str, Vec<&GeoEvent>> {
    let mut by_user: BTreeMap<&str, Vec<&GeoEvent>> = BTreeMap::new();
    for ev in events {
        by_user.entry(ev.user_id.as_str()).or_default().push(ev);
    }
    by_user
}

fn make_trace(user_id: &str, period: Period, events: Vec<&GeoEvent>) -> UserPeriodTrace {
    let mut owned: Vec<GeoEvent> = events.into_iter().cloned().collect();
    owned.sort_by_key(|e| e.timestamp);
    UserPeriodTrace {
        user_id: user_id.to_string(),
        period,
        events: owned,
    }
}

/// Group events into Monday-start weekly traces, dropping users below the
/// lifetime filter and user-weeks below the per-period filter.
pub fn build_weekly_traces(events: &[GeoEvent], filters: &Filters) -> Vec<UserPeriodTrace> {
    let mut traces = Vec::new();
    for (user, user_events) in group_by_user(events) {
        if (user_events.len() as u32) < filters.min_lifetime_events {
            continue;
        }
        let mut by_week: BTreeMap<NaiveDate, Vec<&GeoEvent>> = BTreeMap::new();
        for ev in user_events {
            by_week
                .entry(Period::week_of(event_day(ev)).key)
                .or_default()
                .push(ev);
        }
        for (monday, week_events) in by_week {
            if (week_events.len() as u32) < filters.min_period_events {
                continue;
            }
            traces.push(make_trace(
                user,
                Period {
                    kind: PeriodKind::Week,
                    key: monday,
                },
                week_events,
            ));
        }
    }
    traces
}

/// Traces for the trailing 7-day window ending at one day.
pub fn build_daily_traces_for(
    events: &[GeoEvent],
    filters: &Filters,
    day: NaiveDate,
) -> Vec<UserPeriodTrace> {
    build_daily_traces(events, filters, day, day)
}

/// Traces for every trailing 7-day window ending in `[first_end, last_end]`.
/// A user contributes a trace for a window when at least
/// `min_period_events` of their events fall inside it; the lifetime filter
/// applies as for weeks.
pub fn build_daily_traces(
    events: &[GeoEvent],
    filters: &Filters,
    first_end: NaiveDate,
    last_end: NaiveDate,
) -> Vec<UserPeriodTrace> {
    let mut traces = Vec::new();
    if first_end > last_end {
        return traces;
    }
    for (user, user_events) in group_by_user(events) {
        if (user_events.len() as u32) < filters.min_lifetime_events {
            continue;
        }
        let mut by_day: BTreeMap<NaiveDate, Vec<&GeoEvent>> = BTreeMap::new();
        for ev in user_events {
            by_day.entry(event_day(ev)).or_default().push(ev);
        }
        let mut end = first_end;
        while end <= last_end {
            let start = end - Duration::days(6);
            let window: Vec<&GeoEvent> = by_day
                .range(start..=end)
                .flat_map(|(_, evs)| evs.iter().copied())
                .collect();
            if (window.len() as u32) >= filters.min_period_events {
                traces.push(make_trace(user, Period::day_window(end), window));
            }
            end += Duration::days(1);
        }
    }
    traces
}

/// Whole-dataset profiles: event counts and all-time centroids. The
/// lifetime filter is *not* applied here; callers decide which profiles
/// count as included users.
pub fn build_profiles(events: &[GeoEvent]) -> BTreeMap<String, UserProfile> {
    let mut profiles = BTreeMap::new();
    for (user, user_events) in group_by_user(events) {
        let points: Vec<Point> = user_events.iter().map(|e| event_point(e)).collect();
        let c = centroid(&points).expect("group_by_user yields non-empty groups");
        profiles.insert(
            user.to_string(),
            UserProfile {
                user_id: user.to_string(),
                total_events: user_events.len() as u64,
                alltime_centroid: c.point,
                degenerate_centroid: c.degenerate,
            },
        );
    }
    profiles
}

/// Region id reserved for the country-wide series that every record joins.
pub const COUNTRY_REGION: &str = "US";

/// One point of a regional time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPoint {
    pub mean_km: f64,
    pub variance: f64,
    pub users: u64,
}

/// Per-region time series of the aggregate index.
#[derive(Debug, Clone)]
pub struct RegionSeries {
    pub region_id: String,
    pub points: BTreeMap<NaiveDate, SeriesPoint>,
}

/// Mergeable aggregation state: one exact accumulator per (region, period
/// key). Partitions of the record stream can be accumulated independently
/// and merged; the result is identical to a single pass.
#[derive(Debug, Default)]
pub struct SeriesAccumulator {
    buckets: BTreeMap<(String, NaiveDate), MomentAccumulator>,
}

impl SeriesAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add one record. It always joins the country series; `region` is the
    /// record user's region at the level being aggregated, if any.
    pub fn push(&mut self, record: &MobilityRecord, region: Option<&str>) {
        self.buckets
            .entry((COUNTRY_REGION.to_string(), record.period.key))
            .or_default()
            .push(record.index_km);
        if let Some(region) = region {
            if region != COUNTRY_REGION {
                self.buckets
                    .entry((region.to_string(), record.period.key))
                    .or_default()
                    .push(record.index_km);
            }
        }
    }

    pub fn merge(&mut self, other: SeriesAccumulator) {
        for (key, acc) in other.buckets {
            self.buckets.entry(key).or_default().merge(&acc);
        }
    }

    pub fn into_series(self) -> Vec<RegionSeries> {
        let mut out: BTreeMap<String, RegionSeries> = BTreeMap::new();
        for ((region_id, date), acc) in self.buckets {
            let point = SeriesPoint {
                mean_km: acc.mean().expect("bucket never empty"),
                variance: acc.variance().expect("bucket never empty"),
                users: acc.count(),
            };
            out.entry(region_id.clone())
                .or_insert_with(|| RegionSeries {
                    region_id,
                    points: BTreeMap::new(),
                })
                .points
                .insert(date, point);
        }
        out.into_values().collect()
    }
}

/// Aggregate records into regional series in one pass. `user_regions` maps
/// each user to their region at the requested level; users missing from the
/// map (or mapped to None) only join the country series.
pub fn aggregate(
    records: &[MobilityRecord],
    user_regions: &BTreeMap<String, Option<String>>,
) -> Vec<RegionSeries> {
    let mut acc = SeriesAccumulator::new();
    for record in records {
        let region = user_regions
            .get(&record.user_id)
            .and_then(|r| r.as_deref());
        acc.push(record, region);
    }
    acc.into_series()
}

/// Weekly data volume at the country level, for the data-loss filter.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WeeklyVolume {
    /// Distinct users with at least one event that week.
    pub users: u64,
    /// Geolocated events that week.
    pub records: u64,
}

/// Count users and events per Monday-start week over the whole stream.
pub fn weekly_volumes(events: &[GeoEvent]) -> BTreeMap<NaiveDate, WeeklyVolume> {
    let mut volumes: BTreeMap<NaiveDate, (BTreeSet<&str>, u64)> = BTreeMap::new();
    for ev in events {
        let week = Period::week_of(event_day(ev)).key;
        let entry = volumes.entry(week).or_default();
        entry.0.insert(ev.user_id.as_str());
        entry.1 += 1;
    }
    volumes
        .into_iter()
        .map(|(week, (users, records))| {
            (
                week,
                WeeklyVolume {
                    users: users.len() as u64,
                    records,
                },
            )
        })
        .collect()
}

/// 0.9975 quantile of the standard normal; the paper's "99.75% confidence
/// limit" is read as a one-sided lower bound at this z.
pub const LOWDATA_Z_0_9975: f64 = 2.807033768343811;

/// Result of the data-loss week filter.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LowDataExclusion {
    pub excluded: Vec<NaiveDate>,
    pub user_threshold: Option<f64>,
    pub record_threshold: Option<f64>,
    /// Set when fewer than 4 weeks were available and no exclusion ran.
    pub insufficient_data: bool,
}

/// Flag weeks whose user count or record count falls below
/// `mean - z * std` (population std over all weeks). With fewer than 4
/// weeks there is no usable baseline and nothing is excluded.
pub fn exclude_lowdata_periods(
    volumes: &BTreeMap<NaiveDate, WeeklyVolume>,
    z: f64,
) -> LowDataExclusion {
    if volumes.len() < 4 {
        return LowDataExclusion {
            insufficient_data: true,
            ..LowDataExclusion::default()
        };
    }
    let users: Vec<f64> = volumes.values().map(|v| v.users as f64).collect();
    let records: Vec<f64> = volumes.values().map(|v| v.records as f64).collect();
    let mean_u = users.iter().sum::<f64>() / users.len() as f64;
    let mean_r = records.iter().sum::<f64>() / records.len() as f64;
    let user_threshold = mean_u - z * population_std(&users);
    let record_threshold = mean_r - z * population_std(&records);
    let excluded = volumes
        .iter()
        .filter(|(_, v)| (v.users as f64) < user_threshold || (v.records as f64) < record_threshold)
        .map(|(week, _)| *week)
        .collect();
    LowDataExclusion {
        excluded,
        user_threshold: Some(user_threshold),
        record_threshold: Some(record_threshold),
        insufficient_data: false,
    }
}

/// Per-user mean index over records whose period ends inside
/// `[start, end]`, summarised as ln(1 + mean) box-plot statistics.
pub fn log1p_distribution_summary(
    records: &[MobilityRecord],
    start: NaiveDate,
    end: NaiveDate,
) -> Option<FiveNumberSummary> {
    let mut per_user: BTreeMap<&str, (f64, u64)> = BTreeMap::new();
    for r in records {
        let period_end = r.period.end();
        if period_end >= start && period_end <= end {
            let entry = per_user.entry(r.user_id.as_str()).or_insert((0.0, 0));
            entry.0 += r.index_km;
            entry.1 += 1;
        }
    }
    let transformed: Vec<f64> = per_user
        .values()
        .map(|(sum, n)| libm::log1p(sum / *n as f64))
        .collect();
    FiveNumberSummary::from_values(&transformed)
}
