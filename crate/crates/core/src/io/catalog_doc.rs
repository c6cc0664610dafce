//! Catalog document format.
//!
//! Tab-separated text, one record per line, with header fields `level`, `level_name`,
//! `skill_id`, `skill_name`, `request_id` and `request_text` in that order.

use crate::catalog::{DescriptorCatalog, DescriptorEntry};
use crate::error::{Error, Result};

pub const HEADER: [&str; 6] = [
    "level",
    "level_name",
    "skill_id",
    "skill_name",
    "request_id",
    "request_text",
];

fn reader(source: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .has_headers(false)
        .quoting(false)
        .flexible(true)
        .from_reader(source.as_bytes())
}

pub(crate) fn csv_error(err: csv::Error) -> Error {
    let line = err.position().map_or(0, |p| p.line() as usize);
    Error::parse(line, None, err.to_string())
}

/// Parses entries without catalog-level validation.
pub fn parse(source: &str) -> Result<Vec<DescriptorEntry>> {
    let mut entries = Vec::new();
    let mut rdr = reader(source);
    let mut header_seen = false;
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        if !header_seen {
            let got: Vec<_> = record.iter().map(str::trim).collect();
            if got != HEADER {
                return Err(Error::parse(
                    line,
                    None,
                    format!("expected header `{}`", HEADER.join("\\t")),
                ));
            }
            header_seen = true;
            continue;
        }
        if record.len() != HEADER.len() {
            return Err(Error::parse(
                line,
                None,
                format!("expected {} fields, found {}", HEADER.len(), record.len()),
            ));
        }
        let field = |i: usize| record[i].trim().to_owned();
        let level = field(0)
            .parse::<u8>()
            .map_err(|e| Error::parse(line, Some("level"), e.to_string()))?;
        entries.push(DescriptorEntry {
            level,
            level_name: field(1),
            skill_id: field(2),
            skill_name: field(3),
            request_id: field(4),
            request_text: field(5),
        });
    }
    Ok(entries)
}

pub fn serialize(catalog: &DescriptorCatalog) -> String {
    let mut out = HEADER.join("\t");
    out.push('\n');
    for e in catalog.entries() {
        let fields = [
            e.level.to_string(),
            e.level_name.clone(),
            e.skill_id.clone(),
            e.skill_name.clone(),
            e.request_id.clone(),
            e.request_text.clone(),
        ];
        out.push_str(&fields.join("\t"));
        out.push('\n');
    }
    out
}
