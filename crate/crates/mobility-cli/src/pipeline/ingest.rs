//! Ingestion: JSONL shards to the canonical event store.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use mobility_core::ingest::{
    parse_event, resolve_location, AnalysisMode, CityNameMatcher, GeoEvent, SkipCounters,
    SkipReason,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::PipelineConfig;
use crate::error::{io_data, CliError, Result};
use crate::event_store::{write_store, SkippedCounts, StoreMeta};

/// Skip report printed by the `ingest` subcommand.
#[derive(Debug, Clone, Serialize)]
pub struct IngestOutcome {
    pub store: PathBuf,
    pub files: Vec<FileReport>,
    pub total_lines: u64,
    pub emitted: u64,
    pub skipped: SkippedCounts,
}

#[derive(Debug, Clone, Serialize)]
pub struct FileReport {
    pub path: PathBuf,
    pub lines: u64,
    pub parse_errors: u64,
}

struct ParsedFile {
    path: PathBuf,
    lines: u64,
    counters: SkipCounters,
    // (event_id, event), in input order; ids are needed for cross-file
    // duplicate removal and the canonical sort.
    events: Vec<(String, GeoEvent)>,
}

fn open_lines(path: &Path) -> Result<Box<dyn BufRead + Send>> {
    let file = File::open(path).map_err(|e| io_data(path, e))?;
    if path.extension().is_some_and(|e| e == "gz") {
        let decoder = flate2::read::GzDecoder::new(file);
        Ok(Box::new(BufReader::new(decoder)))
    } else {
        Ok(Box::new(BufReader::new(file)))
    }
}

fn parse_file(path: &Path, mode: AnalysisMode, matcher: &CityNameMatcher) -> Result<ParsedFile> {
    let mut reader = open_lines(path)?;
    let mut buf = String::new();
    let mut lines = 0u64;
    let mut counters = SkipCounters::default();
    let mut events = Vec::new();
    loop {
        buf.clear();
        let n = reader.read_line(&mut buf).map_err(|e| io_data(path, e))?;
        if n == 0 {
            break;
        }
        let line = buf.trim_end_matches(['\n', '\r']);
        if line.is_empty() {
            continue;
        }
        lines += 1;
        let raw = match parse_event(line) {
            Ok(raw) => raw,
            Err(reason) => {
                counters.record(reason);
                continue;
            }
        };
        // Tabs or newlines in ids would corrupt the line-based store.
        if raw.user_id.contains(['\t', '\n']) || raw.event_id.contains(['\t', '\n']) {
            counters.record(SkipReason::MalformedJson);
            continue;
        }
        let event_id = raw.event_id.clone();
        match resolve_location(raw, mode, matcher) {
            Ok(event) => events.push((event_id, event)),
            Err(reason) => counters.record(reason),
        }
    }
    Ok(ParsedFile {
        path: path.to_path_buf(),
        lines,
        counters,
        events,
    })
}

/// Parse every input shard, drop duplicate event ids (first occurrence in
/// input order wins), sort canonically, and write the store.
pub fn run(config: &PipelineConfig) -> Result<IngestOutcome> {
    let mode = config.mode()?;
    let matcher = CityNameMatcher::new(config.ingest.city_names.iter().map(String::as_str));
    if config.data.inputs.is_empty() {
        return Err(CliError::config("data.inputs is empty"));
    }
    std::fs::create_dir_all(&config.data.output_dir)
        .map_err(|e| io_data(&config.data.output_dir, e))?;

    // Shards parse in parallel; per-record work is pure, so only the
    // dedup/merge order below matters for determinism.
    let parsed: Vec<ParsedFile> = config
        .data
        .inputs
        .par_iter()
        .map(|path| parse_file(path, mode, &matcher))
        .collect::<Result<_>>()?;

    let mut counters = SkipCounters::default();
    let mut total_lines = 0u64;
    let mut files = Vec::new();
    for p in &parsed {
        counters.merge(&p.counters);
        total_lines += p.lines;
        files.push(FileReport {
            path: p.path.clone(),
            lines: p.lines,
            parse_errors: p.counters.malformed_json,
        });
    }

    // Keep the first occurrence of each event id, in (file, line) order.
    let mut seen: HashSet<&str> = HashSet::new();
    let mut keyed: Vec<&(String, GeoEvent)> = Vec::new();
    for p in &parsed {
        for entry in &p.events {
            if seen.insert(entry.0.as_str()) {
                keyed.push(entry);
            } else {
                counters.record(SkipReason::DuplicateId);
            }
        }
    }

    // Canonical order: (user, timestamp, event id); the id makes the sort
    // total, so the store bytes are independent of parse order.
    keyed.sort_by(|a, b| {
        (&a.1.user_id, a.1.timestamp, &a.0).cmp(&(&b.1.user_id, b.1.timestamp, &b.0))
    });
    let events: Vec<GeoEvent> = keyed.into_iter().map(|(_, ev)| ev.clone()).collect();

    if events.is_empty() {
        return Err(CliError::data("no events: every input line was skipped or empty"));
    }
    // Every line is accounted for: emitted once or skipped with a reason.
    debug_assert_eq!(events.len() as u64 + counters.total(), total_lines);

    let meta = StoreMeta {
        mode: mode.as_str().to_string(),
        total_lines,
        emitted: events.len() as u64,
        skipped: counters.into(),
    };
    let store = config.event_store_path();
    write_store(&store, &meta, &events)?;
    Ok(IngestOutcome {
        store,
        files,
        total_lines,
        emitted: meta.emitted,
        skipped: meta.skipped,
    })
}
