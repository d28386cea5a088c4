//! Parsing and location resolution for geolocated event records.
//!
//! Input is newline-delimited JSON with a fixed schema (see
//! `docs/event-schema.md` for the field list and the Twitter v1.1 mapping).
//! Each record either becomes a [`GeoEvent`] with a resolved coordinate or
//! is skipped with a typed reason; nothing here is fatal per record.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::Deserialize;

/// Kind of named place attached to an event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlaceType {
    Poi,
    Neighborhood,
    City,
    /// State-level administrative area.
    Admin,
    Country,
}

impl PlaceType {
    pub fn as_str(&self) -> &'static str {
        match self {
            PlaceType::Poi => "poi",
            PlaceType::Neighborhood => "neighborhood",
            PlaceType::City => "city",
            PlaceType::Admin => "admin",
            PlaceType::Country => "country",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "poi" => Some(PlaceType::Poi),
            "neighborhood" => Some(PlaceType::Neighborhood),
            "city" => Some(PlaceType::City),
            "admin" => Some(PlaceType::Admin),
            "country" => Some(PlaceType::Country),
            _ => None,
        }
    }
}

/// A named place with its bounding box, corners in (longitude, latitude).
#[derive(Debug, Clone, PartialEq)]
pub struct PlaceInfo {
    pub place_id: String,
    pub place_type: PlaceType,
    pub name: String,
    pub full_name: String,
    pub country_code: String,
    pub bounding_box: [(f64, f64); 4],
}

/// A validated input record, before location resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct RawEvent {
    pub event_id: String,
    pub user_id: String,
    /// Unix seconds, UTC.
    pub timestamp: i64,
    /// Exact (longitude, latitude) if the device attached one.
    pub coordinates: Option<(f64, f64)>,
    pub place: Option<PlaceInfo>,
}

/// How the final coordinate was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resolution {
    ExactCoordinates,
    PlaceCenter,
}

impl Resolution {
    pub fn as_str(&self) -> &'static str {
        match self {
            Resolution::ExactCoordinates => "exact_coordinates",
            Resolution::PlaceCenter => "place_center",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "exact_coordinates" => Some(Resolution::ExactCoordinates),
            "place_center" => Some(Resolution::PlaceCenter),
            _ => None,
        }
    }
}

/// One geolocated check-in, ready for the mobility pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct GeoEvent {
    pub user_id: String,
    /// Unix seconds, UTC.
    pub timestamp: i64,
    pub latitude: f64,
    pub longitude: f64,
    pub resolution: Resolution,
    pub place_type: Option<PlaceType>,
}

/// Why a record was dropped instead of emitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkipReason {
    MalformedJson,
    MissingLocation,
    InvalidCoordinate,
    PoiExcluded,
    DuplicateId,
}

impl SkipReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            SkipReason::MalformedJson => "malformed_json",
            SkipReason::MissingLocation => "no_location",
            SkipReason::InvalidCoordinate => "invalid_coordinate",
            SkipReason::PoiExcluded => "poi_excluded",
            SkipReason::DuplicateId => "duplicate_id",
        }
    }
}

impl fmt::Display for SkipReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-reason skip counts for one ingestion run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SkipCounters {
    pub malformed_json: u64,
    pub no_location: u64,
    pub invalid_coordinate: u64,
    pub poi_excluded: u64,
    pub duplicate_id: u64,
}

impl SkipCounters {
    pub fn record(&mut self, reason: SkipReason) {
        match reason {
            SkipReason::MalformedJson => self.malformed_json += 1,
            SkipReason::MissingLocation => self.no_location += 1,
            SkipReason::InvalidCoordinate => self.invalid_coordinate += 1,
            SkipReason::PoiExcluded => self.poi_excluded += 1,
            SkipReason::DuplicateId => self.duplicate_id += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.malformed_json
            + self.no_location
            + self.invalid_coordinate
            + self.poi_excluded
            + self.duplicate_id
    }

    pub fn merge(&mut self, other: &SkipCounters) {
        self.malformed_json += other.malformed_json;
        self.no_location += other.no_location;
        self.invalid_coordinate += other.invalid_coordinate;
        self.poi_excluded += other.poi_excluded;
        self.duplicate_id += other.duplicate_id;
    }
}

/// Which analysis the event stream is being prepared for. POI handling
/// differs: states drop POI/neighborhood places outright, cities keep POIs
/// whose names mention a tracked city.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalysisMode {
    StateAnalysis,
    CityAnalysis,
}

impl AnalysisMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            AnalysisMode::StateAnalysis => "state_analysis",
            AnalysisMode::CityAnalysis => "city_analysis",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "state_analysis" => Some(AnalysisMode::StateAnalysis),
            "city_analysis" => Some(AnalysisMode::CityAnalysis),
            _ => None,
        }
    }
}

/// The five New York City boroughs; places named after them count as New
/// York City matches when that city is tracked.
pub const NYC_BOROUGHS: [&str; 5] = [
    "Brooklyn",
    "Manhattan",
    "Queens",
    "Staten Island",
    "The Bronx",
];

const NYC_NAME: &str = "new york city";

/// Case-insensitive substring matcher for city-named POIs.
#[derive(Debug, Clone, Default)]
pub struct CityNameMatcher {
    patterns: Vec<String>,
}

impl CityNameMatcher {
    /// Build from the tracked city names. If "New York City" is tracked,
    /// the five borough names are added as aliases for it.
    pub fn new<'a>(city_names: impl IntoIterator<Item = &'a str>) -> Self {
        let mut patterns: Vec<String> = city_names
            .into_iter()
            .map(|n| n.to_lowercase())
            .collect();
        if patterns.iter().any(|p| p == NYC_NAME) {
            patterns.extend(NYC_BOROUGHS.iter().map(|b| b.to_lowercase()));
        }
        Self { patterns }
    }

    /// True if the place name or full name contains any tracked pattern.
    pub fn matches(&self, name: &str, full_name: &str) -> bool {
        let name = name.to_lowercase();
        let full_name = full_name.to_lowercase();
        self.patterns
            .iter()
            .any(|p| name.contains(p.as_str()) || full_name.contains(p.as_str()))
    }
}

#[derive(Deserialize)]
struct EventWire {
    event_id: String,
    user_id: String,
    timestamp: String,
    #[serde(default)]
    coordinates: Option<[f64; 2]>,
    #[serde(default)]
    place: Option<PlaceWire>,
}

#[derive(Deserialize)]
struct PlaceWire {
    place_id: String,
    place_type: PlaceType,
    name: String,
    full_name: String,
    country_code: String,
    bounding_box: [[f64; 2]; 4],
}

fn coordinate_ok(lon: f64, lat: f64) -> bool {
    lon.is_finite()
        && lat.is_finite()
        && (-180.0..=180.0).contains(&lon)
        && (-90.0..=90.0).contains(&lat)
}

/// Parse one JSONL record into a validated [`RawEvent`].
///
/// Never panics on hostile input: structural problems become
/// `MalformedJson`, a record with neither coordinates nor place becomes
/// `MissingLocation`, and out-of-range coordinates (in either field or the
/// bounding box) become `InvalidCoordinate`.
pub fn parse_event(line: &str) -> Result<RawEvent, SkipReason> {
    let wire: EventWire = serde_json::from_str(line).map_err(|_| SkipReason::MalformedJson)?;
    if wire.event_id.is_empty() || wire.user_id.is_empty() {
        return Err(SkipReason::MalformedJson);
    }
    let timestamp = chrono::DateTime::parse_from_rfc3339(&wire.timestamp)
        .map_err(|_| SkipReason::MalformedJson)?
        .timestamp();
    if wire.coordinates.is_none() && wire.place.is_none() {
        return Err(SkipReason::MissingLocation);
    }
    let coordinates = match wire.coordinates {
        Some([lon, lat]) => {
            if !coordinate_ok(lon, lat) {
                return Err(SkipReason::InvalidCoordinate);
            }
            Some((lon, lat))
        }
        None => None,
    };
    let place = match wire.place {
        Some(p) => {
            let mut corners = [(0.0, 0.0); 4];
            for (i, c) in p.bounding_box.iter().enumerate() {
                if !coordinate_ok(c[0], c[1]) {
                    return Err(SkipReason::InvalidCoordinate);
                }
                corners[i] = (c[0], c[1]);
            }
            Some(PlaceInfo {
                place_id: p.place_id,
                place_type: p.place_type,
                name: p.name,
                full_name: p.full_name,
                country_code: p.country_code,
                bounding_box: corners,
            })
        }
        None => None,
    };
    Ok(RawEvent {
        event_id: wire.event_id,
        user_id: wire.user_id,
        timestamp,
        coordinates,
        place,
    })
}

/// Arithmetic centre of a place bounding box, as (longitude, latitude).
///
/// Boxes that cross the antimeridian (longitudinal extent > 180 as given)
/// take the midpoint along the shorter arc; a result of exactly 180 is
/// returned as written.
pub fn bounding_box_center(corners: &[(f64, f64); 4]) -> (f64, f64) {
    let mut lon_min = f64::INFINITY;
    let mut lon_max = f64::NEG_INFINITY;
    let mut lat_min = f64::INFINITY;
    let mut lat_max = f64::NEG_INFINITY;
    for &(lon, lat) in corners {
        lon_min = lon_min.min(lon);
        lon_max = lon_max.max(lon);
        lat_min = lat_min.min(lat);
        lat_max = lat_max.max(lat);
    }
    let lat = (lat_min + lat_max) / 2.0;
    let lon = if lon_max - lon_min > 180.0 {
        // The box wraps: the short arc runs from lon_max east to lon_min.
        let mid = (lon_max + lon_min + 360.0) / 2.0;
        if mid > 180.0 {
            mid - 360.0
        } else {
            mid
        }
    } else {
        (lon_min + lon_max) / 2.0
    };
    (lon, lat)
}

/// Resolve a raw event to a coordinate, or skip it.
///
/// Exact coordinates always win. Otherwise the place's bounding-box centre
/// is used, except that in state analysis POI and neighborhood places are
/// dropped (their metadata does not identify a state), and in city analysis
/// a POI is kept only when `matcher` recognises a tracked city in its name.
pub fn resolve_location(
    raw: RawEvent,
    mode: AnalysisMode,
    matcher: &CityNameMatcher,
) -> Result<GeoEvent, SkipReason> {
    let place_type = raw.place.as_ref().map(|p| p.place_type);
    if let Some((lon, lat)) = raw.coordinates {
        return Ok(GeoEvent {
            user_id: raw.user_id,
            timestamp: raw.timestamp,
            latitude: lat,
            longitude: lon,
            resolution: Resolution::ExactCoordinates,
            place_type,
        });
    }
    let place = raw.place.as_ref().ok_or(SkipReason::MissingLocation)?;
    match mode {
        AnalysisMode::StateAnalysis => {
            if matches!(
                place.place_type,
                PlaceType::Poi | PlaceType::Neighborhood
            ) {
                return Err(SkipReason::PoiExcluded);
            }
        }
        AnalysisMode::CityAnalysis => {
            if place.place_type == PlaceType::Poi
                && !matcher.matches(&place.name, &place.full_name)
            {
                return Err(SkipReason::PoiExcluded);
            }
        }
    }
    let (lon, lat) = bounding_box_center(&place.bounding_box);
    Ok(GeoEvent {
        user_id: raw.user_id,
        timestamp: raw.timestamp,
        latitude: lat,
        longitude: lon,
        resolution: Resolution::PlaceCenter,
        place_type,
    })
}
