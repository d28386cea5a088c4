//! The intermediate event store: a line-based file between `ingest` and
//! `compute`.
//!
//! Layout: a schema header line, a JSON metadata line (analysis mode, skip
//! counters, emitted count), then one tab-separated event per line in
//! canonical (user_id, timestamp, event_id) order with floats printed at
//! round-trip precision. Re-running ingestion over the same inputs yields
//! a byte-identical store.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use mobility_core::ingest::{AnalysisMode, GeoEvent, PlaceType, Resolution, SkipCounters};
use serde::{Deserialize, Serialize};

use crate::error::{io_data, CliError, Result};
use crate::schema;

const STORE_SCHEMA: &str = "event-store";

/// Metadata carried in the store header.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct StoreMeta {
    pub mode: String,
    pub total_lines: u64,
    pub emitted: u64,
    pub skipped: SkippedCounts,
}

/// Serializable mirror of [`SkipCounters`].
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct SkippedCounts {
    pub malformed_json: u64,
    pub no_location: u64,
    pub invalid_coordinate: u64,
    pub poi_excluded: u64,
    pub duplicate_id: u64,
}

impl From<SkipCounters> for SkippedCounts {
    fn from(c: SkipCounters) -> Self {
        Self {
            malformed_json: c.malformed_json,
            no_location: c.no_location,
            invalid_coordinate: c.invalid_coordinate,
            poi_excluded: c.poi_excluded,
            duplicate_id: c.duplicate_id,
        }
    }
}

impl SkippedCounts {
    pub fn total(&self) -> u64 {
        self.malformed_json
            + self.no_location
            + self.invalid_coordinate
            + self.poi_excluded
            + self.duplicate_id
    }
}

impl StoreMeta {
    pub fn mode(&self) -> Result<AnalysisMode> {
        AnalysisMode::parse(&self.mode)
            .ok_or_else(|| CliError::data(format!("event store has unknown mode '{}'", self.mode)))
    }
}

pub fn write_store(path: &Path, meta: &StoreMeta, events: &[GeoEvent]) -> Result<()> {
    let file = File::create(path).map_err(|e| io_data(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e: std::io::Error| io_data(path, e);
    schema::write_header(&mut w, STORE_SCHEMA).map_err(io)?;
    let meta_line = serde_json::to_string(meta)
        .map_err(|e| CliError::data(format!("store meta serialization: {e}")))?;
    writeln!(w, "{meta_line}").map_err(io)?;
    for ev in events {
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}\t{}",
            ev.user_id,
            ev.timestamp,
            ev.latitude,
            ev.longitude,
            ev.resolution.as_str(),
            ev.place_type.map_or("-", |p| p.as_str()),
        )
        .map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn read_store(path: &Path) -> Result<(StoreMeta, Vec<GeoEvent>)> {
    let file = File::open(path).map_err(|e| io_data(path, e))?;
    let mut reader = BufReader::new(file);
    schema::check_header(&mut reader, path, STORE_SCHEMA)?;
    let mut meta_line = String::new();
    reader
        .read_line(&mut meta_line)
        .map_err(|e| io_data(path, e))?;
    let meta: StoreMeta = serde_json::from_str(meta_line.trim_end())
        .map_err(|e| CliError::data(format!("{}: bad store metadata: {e}", path.display())))?;
    let mut events = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| io_data(path, e))?;
        if line.is_empty() {
            continue;
        }
        events.push(parse_store_line(&line).ok_or_else(|| {
            CliError::data(format!(
                "{}: corrupt store line {}",
                path.display(),
                lineno + 3
            ))
        })?);
    }
    if events.len() as u64 != meta.emitted {
        return Err(CliError::data(format!(
            "{}: store header promises {} events, file holds {}",
            path.display(),
            meta.emitted,
            events.len()
        )));
    }
    Ok((meta, events))
}

fn parse_store_line(line: &str) -> Option<GeoEvent> {
    let mut parts = line.split('\t');
    let user_id = parts.next()?.to_string();
    let timestamp: i64 = parts.next()?.parse().ok()?;
    let latitude: f64 = parts.next()?.parse().ok()?;
    let longitude: f64 = parts.next()?.parse().ok()?;
    let resolution = Resolution::parse(parts.next()?)?;
    let place_type = match parts.next()? {
        "-" => None,
        other => Some(PlaceType::parse(other)?),
    };
    if parts.next().is_some() {
        return None;
    }
    Some(GeoEvent {
        user_id,
        timestamp,
        latitude,
        longitude,
        resolution,
        place_type,
    })
}
