//! Competency mapping format.
//!
//! A header block of `budget,<C>` (exactly once) and `cost,<competency_id>,<cost>`
//! lines (one per competency, in mapping order), then the column row
//! `competency_id,channel_label,flag` followed by flag records. Pairs that are not
//! listed default to 0. Lines starting with `#` are comments.
//!
//! ```text
//! budget,5669650
//! cost,1.1,28208
//! competency_id,channel_label,flag
//! 1.1,logging_1,1
//! ```

use std::collections::{HashMap, HashSet};

use super::catalog_doc::csv_error;
use super::{comma_reader, parse_f64};
use crate::catalog::DescriptorCatalog;
use crate::enterprise::CompetencyMapping;
use crate::error::{Error, Result};

pub const COLUMNS: [&str; 3] = ["competency_id", "channel_label", "flag"];

/// Parses a mapping against the channel labels of the model it will be applied to.
pub fn parse_mapping(
    source: &str,
    catalog: &DescriptorCatalog,
    channel_labels: &[String],
) -> Result<CompetencyMapping> {
    let channel_index: HashMap<&str, usize> = channel_labels
        .iter()
        .enumerate()
        .map(|(j, l)| (l.as_str(), j))
        .collect();
    let mut budget: Option<f64> = None;
    let mut ids: Vec<String> = Vec::new();
    let mut costs: Vec<f64> = Vec::new();
    let mut flags: Vec<Vec<bool>> = Vec::new();
    let mut in_body = false;
    let mut seen_pairs = HashSet::new();

    let mut rdr = comma_reader(source);
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) || record[0].starts_with('#') {
            continue;
        }
        if !in_body {
            match &record[0] {
                "budget" => {
                    if record.len() != 2 {
                        return Err(Error::parse(
                            line,
                            Some("budget"),
                            "expected `budget,<value>`",
                        ));
                    }
                    if budget.is_some() {
                        return Err(Error::parse(line, Some("budget"), "budget given twice"));
                    }
                    budget = Some(parse_f64(&record[1], line, "budget")?);
                }
                "cost" => {
                    if record.len() != 3 {
                        return Err(Error::parse(
                            line,
                            Some("cost"),
                            "expected `cost,<competency_id>,<value>`",
                        ));
                    }
                    let id = record[1].to_owned();
                    if ids.contains(&id) {
                        return Err(Error::parse(
                            line,
                            Some("competency_id"),
                            format!("competency `{id}` declared twice"),
                        ));
                    }
                    if !catalog.contains(&id) {
                        return Err(Error::parse(
                            line,
                            Some("competency_id"),
                            format!("competency `{id}` not in catalog"),
                        ));
                    }
                    costs.push(parse_f64(&record[2], line, "cost")?);
                    ids.push(id);
                    flags.push(vec![false; channel_labels.len()]);
                }
                _ if record.iter().eq(COLUMNS) => in_body = true,
                other => {
                    return Err(Error::parse(
                        line,
                        None,
                        format!("unexpected header line starting `{other}`"),
                    ))
                }
            }
            continue;
        }
        if record.len() != 3 {
            return Err(Error::parse(
                line,
                None,
                format!("expected 3 fields, found {}", record.len()),
            ));
        }
        let i = ids.iter().position(|id| id == &record[0]).ok_or_else(|| {
            Error::parse(
                line,
                Some("competency_id"),
                format!("competency `{}` has no cost line", &record[0]),
            )
        })?;
        let j = *channel_index.get(&record[1]).ok_or_else(|| {
            Error::parse(
                line,
                Some("channel_label"),
                format!("unknown channel `{}`", &record[1]),
            )
        })?;
        let on = match &record[2] {
            "0" => false,
            "1" => true,
            other => {
                return Err(Error::parse(
                    line,
                    Some("flag"),
                    format!("flag must be 0 or 1, got `{other}`"),
                ))
            }
        };
        if !seen_pairs.insert((i, j)) {
            return Err(Error::parse(
                line,
                None,
                "duplicate competency/channel pair",
            ));
        }
        flags[i][j] = on;
    }
    if !in_body {
        return Err(Error::parse(
            0,
            None,
            format!("missing column row `{}`", COLUMNS.join(",")),
        ));
    }
    let budget = budget.ok_or_else(|| Error::parse(0, Some("budget"), "missing budget line"))?;
    CompetencyMapping::new(ids, flags, costs, budget, catalog)
}

/// Writes only the set flags; unset pairs are implied.
pub fn write_mapping(mapping: &CompetencyMapping, channel_labels: &[String]) -> String {
    let mut out = format!("budget,{}\n", mapping.budget());
    for (id, cost) in mapping.competency_ids().iter().zip(mapping.costs()) {
        out.push_str(&format!("cost,{id},{cost}\n"));
    }
    out.push_str(&COLUMNS.join(","));
    out.push('\n');
    for (id, row) in mapping.competency_ids().iter().zip(mapping.flags()) {
        for (label, &on) in channel_labels.iter().zip(row) {
            if on {
                out.push_str(&format!("{id},{label},1\n"));
            }
        }
    }
    out
}
