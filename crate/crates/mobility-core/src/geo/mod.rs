//! Geodesic math: WGS-84 distances, spherical centroids, and region
//! assignment by point-in-polygon.

pub mod geodesic;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use libm::{atan2, cos, sin, sqrt};

pub use geodesic::Geodesic;

/// A location in degrees. Range checking happens at ingest; everything in
/// this module assumes valid coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub latitude: f64,
    pub longitude: f64,
}

impl Point {
    pub fn new(latitude: f64, longitude: f64) -> Self {
        Self {
            latitude,
            longitude,
        }
    }

    fn to_unit_vector(self) -> [f64; 3] {
        let lat = self.latitude.to_radians();
        let lon = self.longitude.to_radians();
        [cos(lat) * cos(lon), cos(lat) * sin(lon), sin(lat)]
    }

    fn from_unit_vector(v: [f64; 3]) -> Self {
        let hyp = sqrt(v[0] * v[0] + v[1] * v[1]);
        Self {
            latitude: atan2(v[2], hyp).to_degrees(),
            longitude: atan2(v[1], v[0]).to_degrees(),
        }
    }
}

/// WGS-84 geodesic distance in kilometres. Convenience wrapper that builds
/// the solver per call; hold a [`Geodesic`] in hot loops.
pub fn geodesic_distance_km(a: Point, b: Point) -> f64 {
    Geodesic::wgs84().inverse_distance_km(a.latitude, a.longitude, b.latitude, b.longitude)
}

/// Centroid of a point set plus a degeneracy flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentroidResult {
    pub point: Point,
    /// True when the averaged vector had near-zero norm (antipodal symmetric
    /// sets); the centroid then falls back to the first point.
    pub degenerate: bool,
}

/// Norm below which the vector mean is considered direction-free.
const CENTROID_DEGENERACY_NORM: f64 = 1e-9;

/// Spherical centroid: average of the unit vectors, renormalized. Exact for
/// a single point, antimeridian-safe, and within numerical noise of the
/// arithmetic lat/lon mean for the small extents a weekly trace covers.
pub fn centroid(points: &[Point]) -> Option<CentroidResult> {
    let first = *points.first()?;
    if points.len() == 1 {
        return Some(CentroidResult {
            point: first,
            degenerate: false,
        });
    }
    let mut sum = [0.0f64; 3];
    for p in points {
        let v = p.to_unit_vector();
        sum[0] += v[0];
        sum[1] += v[1];
        sum[2] += v[2];
    }
    let n = points.len() as f64;
    let mean = [sum[0] / n, sum[1] / n, sum[2] / n];
    let norm = sqrt(mean[0] * mean[0] + mean[1] * mean[1] + mean[2] * mean[2]);
    if norm < CENTROID_DEGENERACY_NORM {
        return Some(CentroidResult {
            point: first,
            degenerate: true,
        });
    }
    Some(CentroidResult {
        point: Point::from_unit_vector(mean),
        degenerate: false,
    })
}

/// Aggregation level of a region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RegionLevel {
    Country,
    State,
    City,
}

impl RegionLevel {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegionLevel::Country => "country",
            RegionLevel::State => "state",
            RegionLevel::City => "city",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "country" => Some(RegionLevel::Country),
            "state" => Some(RegionLevel::State),
            "city" => Some(RegionLevel::City),
            _ => None,
        }
    }
}

impl fmt::Display for RegionLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One named region: a set of rings in (longitude, latitude) degrees.
/// Holes are just additional rings; containment is even-odd over all of
/// them. Rings may be given open or closed.
#[derive(Debug, Clone)]
pub struct Region {
    pub region_id: String,
    pub level: RegionLevel,
    pub rings: Vec<Vec<(f64, f64)>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RegionError {
    /// No geometry loaded for the requested level.
    UnloadedLevel(RegionLevel),
    /// Two regions at the same level share an id.
    DuplicateRegionId(String),
    /// A ring has fewer than three distinct vertices.
    DegenerateRing(String),
}

impl fmt::Display for RegionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegionError::UnloadedLevel(level) => {
                write!(f, "no region geometry loaded for level '{level}'")
            }
            RegionError::DuplicateRegionId(id) => {
                write!(f, "duplicate region id '{id}' at one level")
            }
            RegionError::DegenerateRing(id) => {
                write!(f, "region '{id}' has a ring with fewer than 3 vertices")
            }
        }
    }
}

impl core::error::Error for RegionError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Containment {
    Outside,
    Boundary,
    Inside,
}

#[derive(Debug)]
struct IndexedRegion {
    region: Region,
    // Cheap reject box per region: (min_lon, min_lat, max_lon, max_lat).
    bbox: (f64, f64, f64, f64),
}

/// Immutable lookup structure over region geometries, one list per level.
#[derive(Debug)]
pub struct RegionIndex {
    levels: BTreeMap<RegionLevel, Vec<IndexedRegion>>,
}

impl RegionIndex {
    /// Build the index. Regions are sorted by id within each level so the
    /// boundary tie-break (smallest id wins) falls out of scan order.
    pub fn new(regions: Vec<Region>) -> Result<Self, RegionError> {
        let mut levels: BTreeMap<RegionLevel, Vec<IndexedRegion>> = BTreeMap::new();
        for region in regions {
            for ring in &region.rings {
                let mut distinct: Vec<(f64, f64)> = Vec::new();
                for &v in ring {
                    if !distinct.contains(&v) {
                        distinct.push(v);
                    }
                }
                if distinct.len() < 3 {
                    return Err(RegionError::DegenerateRing(region.region_id));
                }
            }
            let mut bbox = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
            for ring in &region.rings {
                for &(lon, lat) in ring {
                    bbox.0 = bbox.0.min(lon);
                    bbox.1 = bbox.1.min(lat);
                    bbox.2 = bbox.2.max(lon);
                    bbox.3 = bbox.3.max(lat);
                }
            }
            levels
                .entry(region.level)
                .or_default()
                .push(IndexedRegion { region, bbox });
        }
        for list in levels.values_mut() {
            list.sort_by(|a, b| a.region.region_id.cmp(&b.region.region_id));
            for pair in list.windows(2) {
                if pair[0].region.region_id == pair[1].region.region_id {
                    return Err(RegionError::DuplicateRegionId(
                        pair[0].region.region_id.clone(),
                    ));
                }
            }
        }
        Ok(Self { levels })
    }

    pub fn has_level(&self, level: RegionLevel) -> bool {
        self.levels.contains_key(&level)
    }

    pub fn region_ids(&self, level: RegionLevel) -> Vec<&str> {
        self.levels
            .get(&level)
            .map(|l| l.iter().map(|r| r.region.region_id.as_str()).collect())
            .unwrap_or_default()
    }

    /// Region containing the point at the given level, or None if outside
    /// all polygons. Containment is even-odd; boundary points count as
    /// contained and the lexicographically smallest matching region id wins,
    /// so every point maps to at most one region.
    pub fn assign(&self, p: Point, level: RegionLevel) -> Result<Option<&str>, RegionError> {
        let list = self
            .levels
            .get(&level)
            .ok_or(RegionError::UnloadedLevel(level))?;
        for entry in list {
            let (min_lon, min_lat, max_lon, max_lat) = entry.bbox;
            if p.longitude < min_lon
                || p.longitude > max_lon
                || p.latitude < min_lat
                || p.latitude > max_lat
            {
                continue;
            }
            if region_contains(&entry.region, p) != Containment::Outside {
                return Ok(Some(entry.region.region_id.as_str()));
            }
        }
        Ok(None)
    }
}

fn region_contains(region: &Region, p: Point) -> Containment {
    let mut inside = false;
    for ring in &region.rings {
        match ring_crossings(ring, p.longitude, p.latitude) {
            Containment::Boundary => return Containment::Boundary,
            Containment::Inside => inside = !inside,
            Containment::Outside => {}
        }
    }
    if inside {
        Containment::Inside
    } else {
        Containment::Outside
    }
}

/// Even-odd crossing count for one ring; `Inside` here means "odd number of
/// crossings contributed by this ring".
fn ring_crossings(ring: &[(f64, f64)], lon: f64, lat: f64) -> Containment {
    let n = ring.len();
    if n < 3 {
        return Containment::Outside;
    }
    // Skip a duplicated closing vertex.
    let n = if ring[0] == ring[n - 1] { n - 1 } else { n };
    let mut crossings = 0usize;
    for i in 0..n {
        let (x1, y1) = ring[i];
        let (x2, y2) = ring[(i + 1) % n];
        if on_segment(x1, y1, x2, y2, lon, lat) {
            return Containment::Boundary;
        }
        // Half-open rule on the vertical extent avoids double counting at
        // shared vertices; ray is cast toward +longitude.
        if (y1 > lat) != (y2 > lat) {
            let x_cross = x1 + (lat - y1) / (y2 - y1) * (x2 - x1);
            if lon < x_cross {
                crossings += 1;
            }
        }
    }
    if crossings % 2 == 1 {
        Containment::Inside
    } else {
        Containment::Outside
    }
}

fn on_segment(x1: f64, y1: f64, x2: f64, y2: f64, px: f64, py: f64) -> bool {
    let cross = (x2 - x1) * (py - y1) - (y2 - y1) * (px - x1);
    if cross != 0.0 {
        return false;
    }
    px >= x1.min(x2) && px <= x1.max(x2) && py >= y1.min(y2) && py <= y1.max(y2)
}
