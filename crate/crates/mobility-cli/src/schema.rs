//! Versioned schema headers for every file the pipeline writes.
//!
//! Each output CSV starts with a `#mobility-schema/1 <name>` line and each
//! JSON document carries a `schema` field; readers reject mismatches so
//! stale intermediates fail loudly instead of parsing as garbage.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: &str = "mobility-schema/1";

pub fn header_line(name: &str) -> String {
    format!("#{SCHEMA_VERSION} {name}")
}

pub fn write_header(w: &mut impl Write, name: &str) -> std::io::Result<()> {
    writeln!(w, "{}", header_line(name))
}

/// Read and verify the schema line; returns the rest of the reader.
pub fn check_header(reader: &mut impl BufRead, path: &Path, expected: &str) -> Result<()> {
    let mut line = String::new();
    reader
        .read_line(&mut line)
        .map_err(|e| crate::error::io_data(path, e))?;
    let line = line.trim_end();
    let want = header_line(expected);
    if line != want {
        return Err(CliError::data(format!(
            "{}: schema mismatch: expected '{want}', found '{line}'",
            path.display()
        )));
    }
    Ok(())
}
