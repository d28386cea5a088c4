//! Pre/post social-distancing comparison: group-level reduction, user-level
//! reduction distributions, seasonal baselines, rankings, and the
//! largest-drop-week statistic.
//!
//! The group-level reduction is `1 - after_mean / before_mean`. Negative
//! reductions (mobility increases) are kept as-is; clamping would bias the
//! medians.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use chrono::{Datelike, NaiveDate};

use crate::mobility::{MobilityRecord, RegionSeries};
use crate::stats::{mean, median};

/// The study range split into before/after at one date.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeriodSplit {
    /// First day of the data range.
    pub start: NaiveDate,
    /// First day counted as "after".
    pub split: NaiveDate,
    /// Last day of the data range (inclusive).
    pub end: NaiveDate,
}

/// Which side of the split a period falls on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Before,
    After,
}

impl PeriodSplit {
    pub fn new(start: NaiveDate, split: NaiveDate, end: NaiveDate) -> Result<Self, &'static str> {
        if start >= split {
            return Err("split date must be after the range start");
        }
        if split > end {
            return Err("split date must not be after the range end");
        }
        Ok(Self { start, split, end })
    }

    /// A period belongs to the side its final day falls on, so a week
    /// straddling the split counts as "after" once it ends on or past the
    /// split date.
    pub fn phase_of(&self, period_end: NaiveDate) -> Phase {
        if period_end < self.split {
            Phase::Before
        } else {
            Phase::After
        }
    }

    /// The after-range shifted back one year: the seasonal baseline window.
    pub fn seasonal_window(&self) -> (NaiveDate, NaiveDate) {
        (shift_back_one_year(self.split), shift_back_one_year(self.end))
    }
}

/// Same calendar date one year earlier; Feb 29 maps to Feb 28.
pub fn shift_back_one_year(d: NaiveDate) -> NaiveDate {
    NaiveDate::from_ymd_opt(d.year() - 1, d.month(), d.day())
        .unwrap_or_else(|| NaiveDate::from_ymd_opt(d.year() - 1, 2, 28).expect("valid date"))
}

/// Eq-style group reduction: `1 - after/before`. Undefined (None) when the
/// before-period mean is zero; such regions are excluded from ranking.
pub fn group_reduction(before_mean: f64, after_mean: f64) -> Option<f64> {
    if before_mean == 0.0 {
        None
    } else {
        Some(1.0 - after_mean / before_mean)
    }
}

/// User-level reduction distribution for one record set.
#[derive(Debug, Clone, Default)]
pub struct UserReductionStats {
    /// (user, reduction) for every active user, sorted by user id.
    pub reductions: Vec<(String, f64)>,
    pub median: Option<f64>,
    /// Users with at least `min_checkins` check-ins in both periods and a
    /// non-zero before-period mean.
    pub active_users: u64,
    /// Fraction of active users whose reduction is exactly 1 (zero
    /// dispersion in every after-period week).
    pub fully_reduced_fraction: Option<f64>,
    /// Users meeting the check-in rule whose before-period mean was zero;
    /// their reduction is undefined and they are not counted as active.
    pub excluded_zero_before: u64,
}

#[derive(Default)]
struct UserSide {
    checkins: u64,
    index_sum: f64,
    weeks: u64,
}

impl UserSide {
    fn push(&mut self, r: &MobilityRecord) {
        self.checkins += r.checkin_count as u64;
        self.index_sum += r.index_km;
        self.weeks += 1;
    }

    fn mean(&self) -> Option<f64> {
        if self.weeks == 0 {
            None
        } else {
            Some(self.index_sum / self.weeks as f64)
        }
    }
}

fn reductions_between(
    records: &[MobilityRecord],
    is_before: impl Fn(NaiveDate) -> bool,
    is_after: impl Fn(NaiveDate) -> bool,
    min_checkins: u64,
) -> UserReductionStats {
    let mut sides: BTreeMap<&str, (UserSide, UserSide)> = BTreeMap::new();
    for r in records {
        let end = r.period.end();
        if is_before(end) {
            sides.entry(r.user_id.as_str()).or_default().0.push(r);
        } else if is_after(end) {
            sides.entry(r.user_id.as_str()).or_default().1.push(r);
        }
    }
    let mut stats = UserReductionStats::default();
    let mut fully_reduced = 0u64;
    for (user, (before, after)) in sides {
        if before.checkins < min_checkins || after.checkins < min_checkins {
            continue;
        }
        let (Some(before_mean), Some(after_mean)) = (before.mean(), after.mean()) else {
            continue;
        };
        match group_reduction(before_mean, after_mean) {
            Some(reduction) => {
                if after_mean == 0.0 {
                    fully_reduced += 1;
                }
                stats.reductions.push((user.into(), reduction));
            }
            None => stats.excluded_zero_before += 1,
        }
    }
    stats.active_users = stats.reductions.len() as u64;
    let values: Vec<f64> = stats.reductions.iter().map(|(_, r)| *r).collect();
    stats.median = median(&values);
    stats.fully_reduced_fraction = if stats.active_users > 0 {
        Some(fully_reduced as f64 / stats.active_users as f64)
    } else {
        None
    };
    stats
}

/// Per-user reductions across the split. A user's period mean is the mean
/// of their weekly index values on that side; eligibility needs
/// `min_checkins` check-ins (geolocated events inside qualifying weeks) on
/// both sides.
pub fn user_reductions(
    records: &[MobilityRecord],
    split: &PeriodSplit,
    min_checkins: u64,
) -> UserReductionStats {
    let s = *split;
    reductions_between(
        records,
        move |end| s.phase_of(end) == Phase::Before,
        move |end| s.phase_of(end) == Phase::After,
        min_checkins,
    )
}

/// Seasonal variant: the before side is the same calendar window one year
/// earlier than the after side.
pub fn seasonal_reductions(
    records: &[MobilityRecord],
    split: &PeriodSplit,
    min_checkins: u64,
) -> UserReductionStats {
    let (season_start, season_end) = split.seasonal_window();
    let s = *split;
    reductions_between(
        records,
        move |end| end >= season_start && end <= season_end,
        move |end| s.phase_of(end) == Phase::After,
        min_checkins,
    )
}

/// One region's row of the reduction table.
#[derive(Debug, Clone, Default)]
pub struct ReductionReport {
    pub region_id: String,
    pub before_mean_km: Option<f64>,
    pub after_mean_km: Option<f64>,
    pub group_reduction: Option<f64>,
    pub median_user_reduction: Option<f64>,
    pub median_seasonal_reduction: Option<f64>,
    pub active_users_both_periods: u64,
    pub fully_reduced_fraction: Option<f64>,
    /// Dense 1..N rank by group reduction, filled by [`rank_regions`].
    pub rank: Option<u32>,
}

/// Assemble the report for one region from that region's records. The
/// group-level before/after means weight each user-week record equally.
pub fn region_report(
    region_id: &str,
    records: &[MobilityRecord],
    split: &PeriodSplit,
    min_checkins: u64,
) -> ReductionReport {
    let mut before = Vec::new();
    let mut after = Vec::new();
    for r in records {
        match split.phase_of(r.period.end()) {
            Phase::Before => before.push(r.index_km),
            Phase::After => after.push(r.index_km),
        }
    }
    let before_mean = mean(&before);
    let after_mean = mean(&after);
    let user_stats = user_reductions(records, split, min_checkins);
    let seasonal = seasonal_reductions(records, split, min_checkins);
    ReductionReport {
        region_id: region_id.into(),
        before_mean_km: before_mean,
        after_mean_km: after_mean,
        group_reduction: match (before_mean, after_mean) {
            (Some(b), Some(a)) => group_reduction(b, a),
            _ => None,
        },
        median_user_reduction: user_stats.median,
        median_seasonal_reduction: seasonal.median,
        active_users_both_periods: user_stats.active_users,
        fully_reduced_fraction: user_stats.fully_reduced_fraction,
        rank: None,
    }
}

/// Sort by group reduction descending (ties by region id ascending, missing
/// reductions last) and assign dense ranks to the ranked entries.
pub fn rank_regions(mut reports: Vec<ReductionReport>) -> Vec<ReductionReport> {
    reports.sort_by(|a, b| match (a.group_reduction, b.group_reduction) {
        (Some(x), Some(y)) => y
            .partial_cmp(&x)
            .expect("reductions are finite")
            .then_with(|| a.region_id.cmp(&b.region_id)),
        (Some(_), None) => core::cmp::Ordering::Less,
        (None, Some(_)) => core::cmp::Ordering::Greater,
        (None, None) => a.region_id.cmp(&b.region_id),
    });
    let mut rank = 0u32;
    for report in reports.iter_mut() {
        report.rank = report.group_reduction.map(|_| {
            rank += 1;
            rank
        });
    }
    reports
}

/// The week with the largest week-over-week decrease of the mean index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DropWeek {
    /// Key of the week the series dropped *into*.
    pub week: NaiveDate,
    /// mean(previous week) - mean(this week); may be negative for
    /// monotone-increasing series (the least-bad decrease still wins).
    pub drop_km: f64,
}

/// Largest drop between consecutive present points (exclusion may leave
/// gaps; neighbours in the surviving series are compared). Earliest week
/// wins ties. None for series with fewer than two points.
pub fn largest_drop_week(series: &RegionSeries) -> Option<DropWeek> {
    let mut best: Option<DropWeek> = None;
    let mut prev: Option<(NaiveDate, f64)> = None;
    for (&week, point) in &series.points {
        if let Some((_, prev_mean)) = prev {
            let drop_km = prev_mean - point.mean_km;
            let better = match best {
                None => true,
                Some(b) => drop_km > b.drop_km,
            };
            if better {
                best = Some(DropWeek { week, drop_km });
            }
        }
        prev = Some((week, point.mean_km));
    }
    best
}

/// Fraction of regions whose largest drop lands on each week. The
/// denominator counts regions with a defined drop week.
pub fn drop_week_fractions(series: &[RegionSeries]) -> BTreeMap<NaiveDate, f64> {
    let drops: Vec<DropWeek> = series.iter().filter_map(largest_drop_week).collect();
    let total = drops.len() as f64;
    let mut counts: BTreeMap<NaiveDate, u64> = BTreeMap::new();
    for d in drops {
        *counts.entry(d.week).or_default() += 1;
    }
    counts
        .into_iter()
        .map(|(week, n)| (week, n as f64 / total))
        .collect()
}
