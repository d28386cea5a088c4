//! Offline change-point detection on daily mobility series, policy-date
//! attribution, and a stationarity score.
//!
//! Detection minimizes `sum of per-segment L2 costs + penalty * breakpoints`
//! exactly, using the PELT pruned dynamic program. The L2 cost of a segment
//! is the sum of squared deviations from the segment mean, which targets
//! mean shifts — regime changes in travel levels.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use chrono::{Datelike, Duration, NaiveDate};

use crate::stats::population_variance;

/// A gap-free daily series; missing days are forward-filled and flagged.
#[derive(Debug, Clone)]
pub struct DailySeries {
    pub region_id: String,
    /// Date of `values[0]`.
    pub start: NaiveDate,
    pub values: Vec<f64>,
    /// `filled[i]` is true when `values[i]` was forward-filled.
    pub filled: Vec<bool>,
}

impl DailySeries {
    /// Build from sparse (date, value) points. None when `points` is empty.
    pub fn from_points(region_id: &str, points: &BTreeMap<NaiveDate, f64>) -> Option<Self> {
        let (&start, _) = points.iter().next()?;
        let (&last, _) = points.iter().next_back()?;
        let mut values = Vec::new();
        let mut filled = Vec::new();
        let mut day = start;
        let mut current = f64::NAN;
        while day <= last {
            match points.get(&day) {
                Some(&v) => {
                    current = v;
                    values.push(v);
                    filled.push(false);
                }
                None => {
                    values.push(current);
                    filled.push(true);
                }
            }
            day += Duration::days(1);
        }
        Some(Self {
            region_id: region_id.into(),
            start,
            values,
            filled,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn date_at(&self, index: usize) -> NaiveDate {
        self.start + Duration::days(index as i64)
    }

    /// Index of the first day on or after `date`, if inside the series.
    pub fn index_of(&self, date: NaiveDate) -> Option<usize> {
        let offset = (date - self.start).num_days();
        if offset < 0 || offset as usize >= self.values.len() {
            None
        } else {
            Some(offset as usize)
        }
    }
}

/// Detected breakpoints for one region.
#[derive(Debug, Clone)]
pub struct ChangePointResult {
    pub region_id: String,
    /// Dates of the first day of each new segment, ascending.
    pub breakpoints: Vec<NaiveDate>,
    /// Same breakpoints as indices into the series.
    pub breakpoint_indices: Vec<usize>,
    pub penalty: f64,
    /// Minimized objective: total segment cost plus penalty per breakpoint.
    pub cost_total: f64,
}

/// Default penalty `2 * sigma^2 * ln n`, with the noise variance estimated
/// from first differences (Var(x[t+1] - x[t]) = 2 sigma^2 for iid noise
/// around a piecewise-constant signal).
pub fn default_penalty(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 1.0;
    }
    let mean_sq_diff = values
        .windows(2)
        .map(|w| {
            let d = w[1] - w[0];
            d * d
        })
        .sum::<f64>()
        / (n - 1) as f64;
    let sigma_sq = mean_sq_diff / 2.0;
    let penalty = 2.0 * sigma_sq * libm::log(n as f64);
    // A constant series estimates sigma = 0; any positive penalty then
    // yields the empty segmentation, so pick something finite.
    if penalty > 0.0 {
        penalty
    } else {
        1.0
    }
}

/// Exact penalized segmentation of `values` under the L2 cost.
///
/// Returns the breakpoint indices (start of each new segment, ascending)
/// and the minimized objective. Minimum segment length is 1, matching
/// exhaustive search over all segmentations; ties resolve toward the
/// smallest last-change-point, scanning candidates in ascending order.
pub fn pelt_segment(values: &[f64], penalty: f64) -> (Vec<usize>, f64) {
    let n = values.len();
    if n == 0 {
        return (Vec::new(), 0.0);
    }
    // Prefix sums make any segment cost O(1):
    // cost(i, j) = sum sq - (sum)^2 / len over values[i..j].
    let mut ps = vec![0.0f64; n + 1];
    let mut pss = vec![0.0f64; n + 1];
    for (i, &v) in values.iter().enumerate() {
        ps[i + 1] = ps[i] + v;
        pss[i + 1] = pss[i] + v * v;
    }
    let seg_cost = |i: usize, j: usize| -> f64 {
        let len = (j - i) as f64;
        let s = ps[j] - ps[i];
        let c = (pss[j] - pss[i]) - s * s / len;
        if c > 0.0 {
            c
        } else {
            0.0
        }
    };

    let mut best = vec![f64::INFINITY; n + 1];
    best[0] = -penalty;
    let mut prev = vec![0usize; n + 1];
    let mut candidates: Vec<usize> = vec![0];
    for t in 1..=n {
        let mut best_cost = f64::INFINITY;
        let mut best_s = 0usize;
        for &s in &candidates {
            let total = best[s] + seg_cost(s, t) + penalty;
            if total < best_cost {
                best_cost = total;
                best_s = s;
            }
        }
        best[t] = best_cost;
        prev[t] = best_s;
        // PELT pruning: a candidate whose partial objective already exceeds
        // the new optimum can never win later (L2 cost is concatenation-
        // subadditive), so dropping it keeps the solution exact.
        candidates.retain(|&s| best[s] + seg_cost(s, t) <= best[t]);
        candidates.push(t);
    }

    let mut breakpoints = Vec::new();
    let mut t = n;
    while t > 0 {
        let s = prev[t];
        if s > 0 {
            breakpoints.push(s);
        }
        t = s;
    }
    breakpoints.reverse();
    (breakpoints, best[n])
}

/// Run detection on one series. `penalty = None` selects the default.
pub fn detect_changepoints(series: &DailySeries, penalty: Option<f64>) -> ChangePointResult {
    let penalty = penalty.unwrap_or_else(|| default_penalty(&series.values));
    let (indices, cost_total) = pelt_segment(&series.values, penalty);
    ChangePointResult {
        region_id: series.region_id.clone(),
        breakpoints: indices.iter().map(|&i| series.date_at(i)).collect(),
        breakpoint_indices: indices,
        penalty,
        cost_total,
    }
}

/// Fraction of breakpoints in `year` that fall strictly after the national
/// announcement and strictly before the region's own policy date. Regions
/// without a policy date contribute an open-ended window; regions without
/// breakpoints in `year` contribute nothing to either count. None when no
/// region has a breakpoint in `year`.
pub fn attribute_changepoints(
    results: &[ChangePointResult],
    national_date: NaiveDate,
    state_policy_dates: &BTreeMap<String, NaiveDate>,
    year: i32,
) -> Option<f64> {
    let mut total = 0u64;
    let mut in_window = 0u64;
    for result in results {
        let policy = state_policy_dates.get(&result.region_id);
        for &bp in &result.breakpoints {
            if bp.year() != year {
                continue;
            }
            total += 1;
            let after_national = bp > national_date;
            let before_state = match policy {
                Some(&p) => bp < p,
                None => true,
            };
            if after_national && before_state {
                in_window += 1;
            }
        }
    }
    if total == 0 {
        None
    } else {
        Some(in_window as f64 / total as f64)
    }
}

/// Variance of the rolling-window means divided by the overall variance.
/// Lower is more stationary; a constant series scores 0 (0/0 is defined as
/// 0). None when the series is shorter than the window.
pub fn stationarity_score(values: &[f64], window: usize) -> Option<f64> {
    if window == 0 || values.len() < window {
        return None;
    }
    let overall = population_variance(values);
    if overall == 0.0 {
        return Some(0.0);
    }
    let mut rolling = Vec::with_capacity(values.len() - window + 1);
    let mut sum: f64 = values[..window].iter().sum();
    rolling.push(sum / window as f64);
    for i in window..values.len() {
        sum += values[i] - values[i - window];
        rolling.push(sum / window as f64);
    }
    Some(population_variance(&rolling) / overall)
}

/// True when the pre-policy prefix is more stationary than the full series.
/// None when fewer than `window` days precede the policy date.
pub fn compare_stationarity(
    series: &DailySeries,
    policy_date: NaiveDate,
    window: usize,
) -> Option<bool> {
    let cut = series.index_of(policy_date)?;
    let pre = stationarity_score(&series.values[..cut], window)?;
    let full = stationarity_score(&series.values, window)?;
    Some(pre < full)
}
