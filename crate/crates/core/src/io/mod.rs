//! File formats and bundled reference data.

pub mod catalog_doc;
pub mod events;
pub mod mapping;
pub mod reference;
pub mod report;
pub mod scenario;

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Writes `contents` to `path` through a temporary file in the same directory
/// followed by a rename, so readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| Error::io(path, e))?;
    tmp.flush().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn comma_reader(source: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source.as_bytes())
}

pub(crate) fn parse_f64(text: &str, line: usize, field: &str) -> Result<f64> {
    let v: f64 = text
        .parse()
        .map_err(|_| Error::parse(line, Some(field), format!("`{text}` is not a number")))?;
    if !v.is_finite() {
        return Err(Error::parse(
            line,
            Some(field),
            format!("`{text}` is not finite"),
        ));
    }
    Ok(v)
}

pub(crate) fn parse_period(text: &str, line: usize) -> Result<usize> {
    match text.parse::<usize>() {
        Ok(t) if t >= 1 => Ok(t),
        _ => Err(Error::parse(
            line,
            Some("t"),
            format!("`{text}` is not a period index >= 1"),
        )),
    }
}
