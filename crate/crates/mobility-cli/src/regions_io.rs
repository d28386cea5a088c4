//! Region geometry loading.
//!
//! The geometry file is a GeoJSON FeatureCollection whose features carry
//! `region_id` and `level` properties and Polygon or MultiPolygon
//! geometries; see `docs/regions.md`. The repo ships only small rectangle
//! fixtures for tests — real state/city shapes are supplied by the user.

use std::path::Path;

use mobility_core::geo::{Region, RegionIndex, RegionLevel};
use serde::Deserialize;

use crate::error::{io_data, CliError, Result};

#[derive(Deserialize)]
struct FeatureCollection {
    #[serde(rename = "type")]
    kind: String,
    features: Vec<Feature>,
}

#[derive(Deserialize)]
struct Feature {
    properties: FeatureProps,
    geometry: Geometry,
}

#[derive(Deserialize)]
struct FeatureProps {
    region_id: String,
    level: String,
}

#[derive(Deserialize)]
#[serde(tag = "type")]
enum Geometry {
    Polygon { coordinates: Vec<Vec<[f64; 2]>> },
    MultiPolygon { coordinates: Vec<Vec<Vec<[f64; 2]>>> },
}

pub fn load_regions(path: &Path) -> Result<RegionIndex> {
    let text = std::fs::read_to_string(path).map_err(|e| io_data(path, e))?;
    let collection: FeatureCollection = serde_json::from_str(&text)
        .map_err(|e| CliError::data(format!("{}: bad region file: {e}", path.display())))?;
    if collection.kind != "FeatureCollection" {
        return Err(CliError::data(format!(
            "{}: expected a FeatureCollection, found '{}'",
            path.display(),
            collection.kind
        )));
    }
    let mut regions = Vec::new();
    for feature in collection.features {
        let level = RegionLevel::parse(&feature.properties.level).ok_or_else(|| {
            CliError::data(format!(
                "{}: region '{}' has unknown level '{}'",
                path.display(),
                feature.properties.region_id,
                feature.properties.level
            ))
        })?;
        let rings: Vec<Vec<(f64, f64)>> = match feature.geometry {
            Geometry::Polygon { coordinates } => coordinates
                .into_iter()
                .map(|ring| ring.into_iter().map(|c| (c[0], c[1])).collect())
                .collect(),
            Geometry::MultiPolygon { coordinates } => coordinates
                .into_iter()
                .flatten()
                .map(|ring| ring.into_iter().map(|c| (c[0], c[1])).collect())
                .collect(),
        };
        regions.push(Region {
            region_id: feature.properties.region_id,
            level,
            rings,
        });
    }
    RegionIndex::new(regions).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use mobility_core::geo::Point;
    use std::io::Write;

    #[test]
    fn loads_polygon_and_multipolygon() {
        let json = r#"{
          "type": "FeatureCollection",
          "features": [
            {
              "type": "Feature",
              "properties": {"region_id": "US-MD", "level": "state"},
              "geometry": {"type": "Polygon", "coordinates": [[[-77,38],[-75,38],[-75,40],[-77,40],[-77,38]]]}
            },
            {
              "type": "Feature",
              "properties": {"region_id": "US-MI", "level": "state"},
              "geometry": {"type": "MultiPolygon", "coordinates": [
                [[[-85,41],[-82,41],[-82,44],[-85,44],[-85,41]]],
                [[[-89,45],[-84,45],[-84,47],[-89,47],[-89,45]]]
              ]}
            }
          ]
        }"#;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("regions.json");
        write!(std::fs::File::create(&path).unwrap(), "{json}").unwrap();
        let index = load_regions(&path).unwrap();
        assert_eq!(
            index
                .assign(Point::new(39.0, -76.0), RegionLevel::State)
                .unwrap(),
            Some("US-MD")
        );
        // Second shell of the multipolygon.
        assert_eq!(
            index
                .assign(Point::new(46.0, -86.0), RegionLevel::State)
                .unwrap(),
            Some("US-MI")
        );
        assert_eq!(
            index
                .assign(Point::new(10.0, 10.0), RegionLevel::State)
                .unwrap(),
            None
        );
    }

    #[test]
    fn rejects_non_collections() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("regions.json");
        write!(
            std::fs::File::create(&path).unwrap(),
            r#"{{"type": "Feature", "features": []}}"#
        )
        .unwrap();
        assert!(load_regions(&path).is_err());
    }
}
