//! Seeded synthetic event generator.
//!
//! Users get a home inside a weighted region box and check in several times
//! a week with Gaussian scatter around home. At the split date the scatter
//! shrinks from `dispersion_pre_km` to `dispersion_post_km`, and a
//! configured fraction of users stops moving entirely (every post-split
//! event exactly at home). The stream is a pure function of the seed.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use chrono::{DateTime, Duration, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::config::{DatesSection, SynthSection};
use crate::error::{io_data, CliError, Result};

/// What the generator actually injected; tests compare pipeline output
/// against this bookkeeping.
#[derive(Debug, Clone, Serialize)]
pub struct SynthSummary {
    pub users: u32,
    pub events: u64,
    pub fully_reducing_users: u32,
    pub fully_reduced_fraction: f64,
    /// Expected group-level reduction implied by the parameters:
    /// 1 - (1 - q) * post/pre, with q the fully-reducing fraction.
    pub expected_group_reduction: f64,
}

#[derive(Serialize)]
struct WireEvent<'a> {
    event_id: String,
    user_id: &'a str,
    timestamp: String,
    coordinates: [f64; 2],
}

const KM_PER_DEGREE_LAT: f64 = 111.32;

/// Standard normal sample via Box-Muller; rand_distr is not needed for one
/// distribution.
fn gaussian(rng: &mut ChaCha20Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn rfc3339(ts: i64) -> String {
    DateTime::<Utc>::from_timestamp(ts, 0)
        .expect("valid timestamp")
        .format("%Y-%m-%dT%H:%M:%SZ")
        .to_string()
}

pub fn generate(spec: &SynthSection, dates: &DatesSection, out: &Path) -> Result<SynthSummary> {
    let total_weight: f64 = spec.regions.iter().map(|r| r.weight).sum();
    if total_weight <= 0.0 {
        return Err(CliError::config("synth.regions weights must sum above 0"));
    }
    let file = File::create(out).map_err(|e| io_data(out, e))?;
    let mut w = BufWriter::new(file);

    let mut events: u64 = 0;
    let mut fully_reducing: u32 = 0;
    for user_index in 0..spec.users {
        // Independent per-user stream so the corpus is stable under any
        // generation order.
        let mut rng =
            ChaCha20Rng::seed_from_u64(spec.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ u64::from(user_index));
        let user_id = format!("synth{user_index:06}");

        // Weighted region choice, then a uniform home inside its box.
        let mut pick = rng.gen_range(0.0..total_weight);
        let mut region = &spec.regions[0];
        for r in &spec.regions {
            if pick < r.weight {
                region = r;
                break;
            }
            pick -= r.weight;
        }
        let home_lat = rng.gen_range(region.lat_range[0]..=region.lat_range[1]);
        let home_lon = rng.gen_range(region.lon_range[0]..=region.lon_range[1]);
        let reduces_fully = rng.gen_range(0.0..1.0) < spec.fraction_fully_reducing;
        if reduces_fully {
            fully_reducing += 1;
        }

        let km_per_degree_lon = KM_PER_DEGREE_LAT * home_lat.to_radians().cos();
        let mut counter = 0u32;
        use chrono::Datelike;
        let mut monday = dates.start
            - Duration::days(dates.start.weekday().num_days_from_monday() as i64);
        while monday <= dates.end {
            let week_first = monday.max(dates.start);
            let week_last = (monday + Duration::days(6)).min(dates.end);
            let days_in_week = (week_last - week_first).num_days() + 1;
            for _ in 0..spec.events_per_week {
                let day = week_first + Duration::days(rng.gen_range(0..days_in_week));
                let second = rng.gen_range(0..86400i64);
                let ts = day.and_hms_opt(0, 0, 0).unwrap().and_utc().timestamp() + second;
                let sigma = if day >= dates.split {
                    if reduces_fully {
                        0.0
                    } else {
                        spec.dispersion_post_km
                    }
                } else {
                    spec.dispersion_pre_km
                };
                let (lat, lon) = if sigma == 0.0 {
                    (home_lat, home_lon)
                } else {
                    (
                        (home_lat + gaussian(&mut rng) * sigma / KM_PER_DEGREE_LAT)
                            .clamp(-90.0, 90.0),
                        (home_lon + gaussian(&mut rng) * sigma / km_per_degree_lon)
                            .clamp(-180.0, 180.0),
                    )
                };
                let wire = WireEvent {
                    event_id: format!("s{user_index}-{counter}"),
                    user_id: &user_id,
                    timestamp: rfc3339(ts),
                    coordinates: [lon, lat],
                };
                counter += 1;
                events += 1;
                serde_json::to_writer(&mut w, &wire)
                    .map_err(|e| CliError::data(format!("{}: {e}", out.display())))?;
                writeln!(w).map_err(|e| io_data(out, e))?;
            }
            monday += Duration::days(7);
        }
    }
    w.flush().map_err(|e| io_data(out, e))?;

    let q = f64::from(fully_reducing) / f64::from(spec.users);
    Ok(SynthSummary {
        users: spec.users,
        events,
        fully_reducing_users: fully_reducing,
        fully_reduced_fraction: q,
        expected_group_reduction: 1.0
            - (1.0 - q) * spec.dispersion_post_km / spec.dispersion_pre_km,
    })
}
