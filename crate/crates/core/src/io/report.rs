//! Analysis reports and their on-disk form.
//!
//! [`emit_report`] writes three files into a destination directory:
//!
//! - `table.csv`: per-period table. With a regime comparison it uses the
//!   `t,v_basic,v_ddescr,dv` layout closed by a `Total` row; otherwise
//!   `t,V_<label1>,...,V_<labeln>,row_sum`, also closed by a `Total` row.
//! - `plot.csv`: `(t, aggregate V(t))` pairs for external plotting, with an
//!   `evaluable` column that is 0 on optional zero-padded warm-up rows.
//! - `meta.json`: window length, mode, seed and totals.
//!
//! Computed values are written with shortest round-trip formatting, so parsing an
//! emitted file reproduces the in-memory values exactly.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::catalog_doc::csv_error;
use super::reference::{parse_comparison_table, ReferenceTable, COLUMNS as COMPARISON_COLUMNS};
use super::{comma_reader, parse_f64, parse_period, write_atomic};
use crate::engine::{IndicatorColumn, IndicatorSeries, RegimeComparison};
use crate::enterprise::Normalization;
use crate::error::{Error, Result};

pub const TABLE_FILE: &str = "table.csv";
pub const PLOT_FILE: &str = "plot.csv";
pub const META_FILE: &str = "meta.json";
pub const ROW_SUM_COLUMN: &str = "row_sum";

const TOTALS_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub k: Option<usize>,
    pub mode: Option<Normalization>,
    pub seed: Option<u64>,
    /// Emit zero rows for warm-up periods in the plot file.
    pub pad_warmup: bool,
    pub masked_channels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodRecord {
    pub t: usize,
    pub components: Vec<f64>,
    pub row_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorBlock {
    pub labels: Vec<String>,
    pub records: Vec<PeriodRecord>,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub meta: RunMeta,
    pub indicators: Option<IndicatorBlock>,
    pub comparison: Option<RegimeComparison>,
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

impl AnalysisReport {
    pub fn from_indicators(meta: RunMeta, labels: Vec<String>, series: &IndicatorSeries) -> Self {
        let records = series
            .periods()
            .zip(&series.components)
            .map(|(t, c)| PeriodRecord {
                t,
                components: c.clone(),
                row_sum: c.iter().sum(),
            })
            .collect();
        Self {
            meta,
            indicators: Some(IndicatorBlock {
                labels,
                records,
                total: series.total,
            }),
            comparison: None,
        }
    }

    pub fn from_comparison(meta: RunMeta, comparison: RegimeComparison) -> Self {
        Self {
            meta,
            indicators: None,
            comparison: Some(comparison),
        }
    }

    /// Checks that there is something to emit and that stored totals match the records.
    pub fn validate(&self) -> Result<()> {
        if self.indicators.is_none() && self.comparison.is_none() {
            return Err(Error::EmptyReport("report has no content".into()));
        }
        if let Some(block) = &self.indicators {
            if block.records.is_empty() {
                return Err(Error::EmptyReport("empty evaluable range".into()));
            }
            for r in &block.records {
                if r.components.len() != block.labels.len() {
                    return Err(Error::Dimension(format!(
                        "period {} has {} components for {} channels",
                        r.t,
                        r.components.len(),
                        block.labels.len()
                    )));
                }
            }
            let recomputed: f64 = block
                .records
                .iter()
                .map(|r| r.components.iter().sum::<f64>())
                .sum();
            if !rel_close(recomputed, block.total, TOTALS_REL_TOL) {
                return Err(Error::Validation(format!(
                    "stored total {} differs from recomputed {recomputed}",
                    block.total
                )));
            }
        }
        if let Some(c) = &self.comparison {
            if c.is_empty() {
                return Err(Error::EmptyReport("empty comparison range".into()));
            }
            let basic: f64 = c.basic.iter().sum();
            let treated: f64 = c.treated.iter().sum();
            let scale = basic.abs().max(treated.abs());
            let ok = rel_close(basic, c.total_basic, TOTALS_REL_TOL)
                && rel_close(treated, c.total_treated, TOTALS_REL_TOL)
                && (c.total_delta - (treated - basic)).abs()
                    <= TOTALS_REL_TOL * scale.max(f64::MIN_POSITIVE);
            if !ok {
                return Err(Error::Validation("comparison totals inconsistent".into()));
            }
        }
        Ok(())
    }

    fn first_period(&self) -> usize {
        match (&self.comparison, &self.indicators) {
            (Some(c), _) => c.first_period,
            (None, Some(b)) => b.records[0].t,
            (None, None) => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmittedFiles {
    pub table: PathBuf,
    pub plot: PathBuf,
    pub meta: PathBuf,
}

#[derive(Debug, Serialize)]
struct MetaRecord<'a> {
    kind: &'static str,
    k: Option<usize>,
    mode: Option<Normalization>,
    seed: Option<u64>,
    first_period: usize,
    last_period: usize,
    periods: usize,
    warmup_padded: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    channels: Option<&'a [String]>,
    masked_channels: &'a [String],
    #[serde(skip_serializing_if = "Option::is_none")]
    total: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    total_basic: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    total_treated: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    total_delta: Option<f64>,
}

pub fn write_comparison_table(table: &ReferenceTable) -> String {
    let mut out = COMPARISON_COLUMNS.join(",");
    out.push('\n');
    for r in &table.rows {
        out.push_str(&format!("{},{},{},{}\n", r.t, r.v_basic, r.v_ddescr, r.dv));
    }
    let p = table.printed_totals;
    out.push_str(&format!("Total,{},{},{}\n", p.v_basic, p.v_ddescr, p.dv));
    out
}

pub fn write_indicator_table(block: &IndicatorBlock) -> String {
    let mut out = String::from("t");
    for l in &block.labels {
        out.push_str(",V_");
        out.push_str(l);
    }
    out.push(',');
    out.push_str(ROW_SUM_COLUMN);
    out.push('\n');
    let n = block.labels.len();
    let mut column_totals = vec![0.0; n];
    for r in &block.records {
        out.push_str(&r.t.to_string());
        for (acc, v) in column_totals.iter_mut().zip(&r.components) {
            *acc += v;
            out.push(',');
            out.push_str(&v.to_string());
        }
        out.push(',');
        out.push_str(&r.row_sum.to_string());
        out.push('\n');
    }
    out.push_str("Total");
    for v in &column_totals {
        out.push(',');
        out.push_str(&v.to_string());
    }
    out.push(',');
    out.push_str(&block.total.to_string());
    out.push('\n');
    out
}

/// Reads the aggregate `row_sum` column of an emitted indicator table.
pub fn parse_indicator_table(source: &str) -> Result<IndicatorColumn> {
    let mut rdr = comma_reader(source);
    let mut width: Option<usize> = None;
    let mut first_period = None;
    let mut values = Vec::new();
    let mut closed = false;
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let Some(w) = width else {
            if record.get(0) != Some("t")
                || record.len() < 3
                || record.get(record.len() - 1) != Some(ROW_SUM_COLUMN)
            {
                return Err(Error::parse(
                    line,
                    None,
                    format!("expected header `t,V_...,{ROW_SUM_COLUMN}`"),
                ));
            }
            width = Some(record.len());
            continue;
        };
        if closed {
            return Err(Error::parse(line, None, "data after Total row"));
        }
        if record.len() != w {
            return Err(Error::parse(
                line,
                None,
                format!("expected {w} fields, found {}", record.len()),
            ));
        }
        if &record[0] == "Total" {
            closed = true;
            continue;
        }
        let t = parse_period(&record[0], line)?;
        match first_period {
            None => first_period = Some(t),
            Some(f) if t != f + values.len() => {
                return Err(Error::parse(
                    line,
                    Some("t"),
                    format!("period {t} out of sequence"),
                ))
            }
            _ => {}
        }
        values.push(parse_f64(&record[w - 1], line, ROW_SUM_COLUMN)?);
    }
    let first_period = first_period.ok_or_else(|| Error::parse(0, None, "no data rows"))?;
    Ok(IndicatorColumn {
        first_period,
        values,
    })
}

/// Reads either an emitted indicator table or a comparison table's treated column.
pub fn parse_comparison_or_indicator(source: &str) -> Result<IndicatorColumn> {
    if source.starts_with(&COMPARISON_COLUMNS.join(",")) {
        let table = parse_comparison_table(source)?;
        let first_period = table.rows.first().map_or(1, |r| r.t);
        return Ok(IndicatorColumn {
            first_period,
            values: table.rows.iter().map(|r| r.v_ddescr).collect(),
        });
    }
    parse_indicator_table(source)
}

fn write_plot(report: &AnalysisReport) -> String {
    let pad = if report.meta.pad_warmup {
        report.first_period().saturating_sub(1)
    } else {
        0
    };
    let mut out = String::new();
    if let Some(c) = &report.comparison {
        out.push_str("t,v_basic,v_ddescr,evaluable\n");
        for t in 1..=pad {
            out.push_str(&format!("{t},0,0,0\n"));
        }
        for (p, t) in c.periods().enumerate() {
            out.push_str(&format!("{t},{},{},1\n", c.basic[p], c.treated[p]));
        }
    } else if let Some(b) = &report.indicators {
        out.push_str("t,V,evaluable\n");
        for t in 1..=pad {
            out.push_str(&format!("{t},0,0\n"));
        }
        for r in &b.records {
            out.push_str(&format!("{},{},1\n", r.t, r.row_sum));
        }
    }
    out
}

fn write_meta(report: &AnalysisReport) -> String {
    let (last_period, periods) = match (&report.comparison, &report.indicators) {
        (Some(c), _) => (c.first_period + c.len() - 1, c.len()),
        (None, Some(b)) => (b.records[b.records.len() - 1].t, b.records.len()),
        (None, None) => (0, 0),
    };
    let record = MetaRecord {
        kind: if report.comparison.is_some() {
            "comparison"
        } else {
            "indicators"
        },
        k: report.meta.k,
        mode: report.meta.mode,
        seed: report.meta.seed,
        first_period: report.first_period(),
        last_period,
        periods,
        warmup_padded: report.meta.pad_warmup,
        channels: report.indicators.as_ref().map(|b| b.labels.as_slice()),
        masked_channels: &report.meta.masked_channels,
        total: report.indicators.as_ref().map(|b| b.total),
        total_basic: report.comparison.as_ref().map(|c| c.total_basic),
        total_treated: report.comparison.as_ref().map(|c| c.total_treated),
        total_delta: report.comparison.as_ref().map(|c| c.total_delta),
    };
    let mut s = serde_json::to_string_pretty(&record).expect("meta serializes");
    s.push('\n');
    s
}

pub fn emit_report(report: &AnalysisReport, destination: &Path) -> Result<EmittedFiles> {
    report.validate()?;
    std::fs::create_dir_all(destination).map_err(|e| Error::io(destination, e))?;
    let files = EmittedFiles {
        table: destination.join(TABLE_FILE),
        plot: destination.join(PLOT_FILE),
        meta: destination.join(META_FILE),
    };
    let table = match &report.comparison {
        Some(c) => write_comparison_table(&ReferenceTable::from_comparison(c)),
        None => write_indicator_table(report.indicators.as_ref().expect("validated")),
    };
    write_atomic(&files.table, table.as_bytes())?;
    write_atomic(&files.plot, write_plot(report).as_bytes())?;
    write_atomic(&files.meta, write_meta(report).as_bytes())?;
    Ok(files)
}
