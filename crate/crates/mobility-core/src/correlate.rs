//! Correlation panels against epidemiological, socioeconomic and policy
//! data: daily infection rates, per-day cross-state Pearson panels, and the
//! policy-date correlation table.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use chrono::NaiveDate;

use libm::sqrt;

/// Cumulative confirmed cases for one region.
#[derive(Debug, Clone, Default)]
pub struct CaseSeries {
    pub region_id: String,
    pub cumulative: BTreeMap<NaiveDate, f64>,
}

/// Daily infection rate derived from a cumulative series.
#[derive(Debug, Clone)]
pub struct InfectionRates {
    pub region_id: String,
    pub rates: BTreeMap<NaiveDate, f64>,
    /// Days where the cumulative series decreased; new cases were clamped
    /// to zero there.
    pub clamped_days: Vec<NaiveDate>,
}

/// New cases per day divided by population. The first day uses the whole
/// cumulative count; later days difference against the previous present
/// day, clamping negative diffs (reporting corrections) to zero. None when
/// the population is missing or non-positive.
pub fn daily_infection_rate(cases: &CaseSeries, population: Option<f64>) -> Option<InfectionRates> {
    let population = population.filter(|p| *p > 0.0)?;
    let mut rates = BTreeMap::new();
    let mut clamped_days = Vec::new();
    let mut prev: Option<f64> = None;
    for (&date, &cumulative) in &cases.cumulative {
        let new_cases = match prev {
            None => cumulative,
            Some(p) => {
                let diff = cumulative - p;
                if diff < 0.0 {
                    clamped_days.push(date);
                    0.0
                } else {
                    diff
                }
            }
        };
        rates.insert(date, new_cases / population);
        prev = Some(cumulative);
    }
    Some(InfectionRates {
        region_id: cases.region_id.clone(),
        rates,
        clamped_days,
    })
}

/// Pearson product-moment correlation. None when fewer than 3 pairs remain
/// or either side has zero variance. Pairs where either value is non-finite
/// are dropped first (pairwise deletion).
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    debug_assert_eq!(x.len(), y.len());
    let pairs: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| a.is_finite() && b.is_finite())
        .map(|(a, b)| (*a, *b))
        .collect();
    if pairs.len() < 3 {
        return None;
    }
    let n = pairs.len() as f64;
    let mean_x = pairs.iter().map(|(a, _)| a).sum::<f64>() / n;
    let mean_y = pairs.iter().map(|(_, b)| b).sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in &pairs {
        let dx = a - mean_x;
        let dy = b - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / sqrt(sxx * syy))
}

/// Static per-state factors from the correlation inputs; any field may be
/// missing and is then excluded pairwise.
#[derive(Debug, Clone, Default)]
pub struct StateFactors {
    pub region_id: String,
    pub population: Option<f64>,
    pub area_sq_miles: Option<f64>,
    pub homeless_2019: Option<f64>,
    pub unemployment_rate_2018: Option<f64>,
    pub at_risk_fraction: Option<f64>,
}

/// The static factor columns, in output order.
pub const STATIC_FACTORS: [&str; 5] = [
    "area_sq_miles",
    "at_risk_fraction",
    "homeless_2019",
    "population",
    "unemployment_2018",
];

impl StateFactors {
    pub fn get(&self, name: &str) -> Option<f64> {
        match name {
            "area_sq_miles" => self.area_sq_miles,
            "at_risk_fraction" => self.at_risk_fraction,
            "homeless_2019" => self.homeless_2019,
            "population" => self.population,
            "unemployment_2018" => self.unemployment_rate_2018,
            _ => None,
        }
    }
}

/// Which series anchors the daily panel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PanelTarget {
    /// Correlate the daily infection rate against factors (the other
    /// dynamic column is the mobility index).
    InfectionRate,
    /// Correlate the daily mobility index against factors (the other
    /// dynamic column is the infection rate).
    MobilityIndex,
}

impl PanelTarget {
    /// Name of the opposite dynamic series, used as a factor column.
    fn dynamic_factor(&self) -> &'static str {
        match self {
            PanelTarget::InfectionRate => "mobility_index",
            PanelTarget::MobilityIndex => "infection_rate",
        }
    }
}

pub type RegionDaily = BTreeMap<String, BTreeMap<NaiveDate, f64>>;

/// For each day, the cross-state Pearson correlation between the target
/// series and each factor. Days where fewer than 3 states carry the target
/// are omitted. Factor order: the static factors (alphabetical) followed by
/// the opposite dynamic series.
pub fn daily_factor_correlations(
    rates: &RegionDaily,
    mobility: &RegionDaily,
    factors: &BTreeMap<String, StateFactors>,
    target: PanelTarget,
) -> BTreeMap<NaiveDate, Vec<(String, Option<f64>)>> {
    let (target_series, other_series) = match target {
        PanelTarget::InfectionRate => (rates, mobility),
        PanelTarget::MobilityIndex => (mobility, rates),
    };
    let mut dates: alloc::collections::BTreeSet<NaiveDate> = alloc::collections::BTreeSet::new();
    for series in target_series.values() {
        dates.extend(series.keys().copied());
    }

    let mut out = BTreeMap::new();
    for date in dates {
        // States with a target value today, sorted by id for determinism.
        let mut regions: Vec<(&str, f64)> = Vec::new();
        for (region, series) in target_series {
            if let Some(&v) = series.get(&date) {
                regions.push((region.as_str(), v));
            }
        }
        if regions.len() < 3 {
            continue;
        }
        let mut row: Vec<(String, Option<f64>)> = Vec::new();
        for factor_name in STATIC_FACTORS {
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for &(region, t) in &regions {
                if let Some(f) = factors.get(region).and_then(|f| f.get(factor_name)) {
                    xs.push(t);
                    ys.push(f);
                }
            }
            row.push((factor_name.into(), pearson(&xs, &ys)));
        }
        let dyn_name = target.dynamic_factor();
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for &(region, t) in &regions {
            if let Some(&other) = other_series.get(region).and_then(|s| s.get(&date)) {
                xs.push(t);
                ys.push(other);
            }
        }
        row.push((dyn_name.into(), pearson(&xs, &ys)));
        out.insert(date, row);
    }
    out
}

/// The ten policy types of the policy-date correlation table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PolicyType {
    StateOfEmergency,
    NursingHomeVisitBan,
    StayAtHome,
    EvictionFreeze,
    NonEssentialBusinessClosure,
    GymClosure,
    MovieTheaterClosure,
    DayCareClosure,
    RestaurantTakeoutOnly,
    SchoolClosure,
}

impl PolicyType {
    pub const ALL: [PolicyType; 10] = [
        PolicyType::StateOfEmergency,
        PolicyType::NursingHomeVisitBan,
        PolicyType::StayAtHome,
        PolicyType::EvictionFreeze,
        PolicyType::NonEssentialBusinessClosure,
        PolicyType::GymClosure,
        PolicyType::MovieTheaterClosure,
        PolicyType::DayCareClosure,
        PolicyType::RestaurantTakeoutOnly,
        PolicyType::SchoolClosure,
    ];

    /// Human-readable label, also the value used in the policy CSV.
    pub fn label(&self) -> &'static str {
        match self {
            PolicyType::StateOfEmergency => "State of emergency",
            PolicyType::NursingHomeVisitBan => "Date banned visitors to nursing homes",
            PolicyType::StayAtHome => "Stay at home/ shelter in place",
            PolicyType::EvictionFreeze => "Froze evictions",
            PolicyType::NonEssentialBusinessClosure => "Closed non-essential businesses",
            PolicyType::GymClosure => "Closed gyms",
            PolicyType::MovieTheaterClosure => "Closed movie theaters",
            PolicyType::DayCareClosure => "Closed day cares",
            PolicyType::RestaurantTakeoutOnly => "Closed restaurants except take out",
            PolicyType::SchoolClosure => "Date closed K-12 schools",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|p| p.label() == s)
    }
}

/// Days-since-policy stand-in for states that never announced the policy.
/// Kept as published; it dominates any correlation it enters, which is the
/// table's documented behaviour, so treat rows with many sentinel states
/// with care.
pub const POLICY_SENTINEL_DAYS: f64 = -1000.0;

/// Per-policy Pearson correlation between cumulative cases at the snapshot
/// date and the policy age in days (snapshot - policy date), with the
/// sentinel for states lacking the policy. Output is sorted by correlation
/// descending (missing last, ties by label), the table's ordering.
pub fn policy_correlation(
    cases_at_snapshot: &BTreeMap<String, f64>,
    policies: &BTreeMap<String, BTreeMap<PolicyType, Option<NaiveDate>>>,
    snapshot: NaiveDate,
    sentinel: f64,
) -> Vec<(PolicyType, Option<f64>)> {
    let mut rows: Vec<(PolicyType, Option<f64>)> = PolicyType::ALL
        .iter()
        .map(|&policy| {
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for (region, &cases) in cases_at_snapshot {
                let date = policies
                    .get(region)
                    .and_then(|p| p.get(&policy).copied())
                    .flatten();
                let age = match date {
                    Some(d) => (snapshot - d).num_days() as f64,
                    None => sentinel,
                };
                xs.push(age);
                ys.push(cases);
            }
            (policy, pearson(&xs, &ys))
        })
        .collect();
    rows.sort_by(|a, b| match (a.1, b.1) {
        (Some(x), Some(y)) => y
            .partial_cmp(&x)
            .expect("correlations are finite")
            .then_with(|| a.0.label().cmp(b.0.label())),
        (Some(_), None) => core::cmp::Ordering::Less,
        (None, Some(_)) => core::cmp::Ordering::Greater,
        (None, None) => a.0.label().cmp(b.0.label()),
    });
    rows
}
