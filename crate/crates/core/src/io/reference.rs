//! Published regime-comparison table and its arithmetic checks.
//!
//! The bundled table keeps the printed two-decimal values verbatim. The same
//! comma-separated layout (`t,v_basic,v_ddescr,dv` plus a closing `Total` row) is
//! used for comparison tables emitted by the report writer.

use serde::{Deserialize, Serialize};

use super::catalog_doc::csv_error;
use super::{comma_reader, parse_f64, parse_period};
use crate::engine::RegimeComparison;
use crate::error::{Error, Result};

const BUNDLED_REFERENCE: &str = include_str!("../../data/reference_regimes.csv");

pub const REFERENCE_ROWS: usize = 57;
pub const PRINTED_TOTAL_BASIC: f64 = 5069.93;
pub const PRINTED_TOTAL_DDESCR: f64 = 5491.28;
pub const PRINTED_TOTAL_DELTA: f64 = 421.35;
/// Allowed gap between a printed row delta and the difference of its printed columns.
pub const ROW_DELTA_SLACK: f64 = 0.02;
/// Allowed gap between a printed column total and the sum of its printed rows.
pub const TOTAL_SLACK: f64 = 0.3;

/// Enterprise costs over five years, thousand rubles.
pub const ENTERPRISE_COSTS: i64 = 5_641_442;
/// Cost of installing descriptor-based competency control, thousand rubles.
pub const DESCRIPTOR_INSTALLATION_COST: i64 = 28_208;
/// Five-year total with descriptor control, thousand rubles.
pub const FIVE_YEAR_TOTAL: i64 = 5_669_650;

pub const COLUMNS: [&str; 4] = ["t", "v_basic", "v_ddescr", "dv"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRow {
    pub t: usize,
    pub v_basic: f64,
    pub v_ddescr: f64,
    pub dv: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Totals {
    pub v_basic: f64,
    pub v_ddescr: f64,
    pub dv: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceTable {
    pub rows: Vec<ReferenceRow>,
    /// Values of the `Total` row as written in the file.
    pub printed_totals: Totals,
}

impl ReferenceTable {
    pub fn column_sums(&self) -> Totals {
        Totals {
            v_basic: self.rows.iter().map(|r| r.v_basic).sum(),
            v_ddescr: self.rows.iter().map(|r| r.v_ddescr).sum(),
            dv: self.rows.iter().map(|r| r.dv).sum(),
        }
    }

    pub fn from_comparison(c: &RegimeComparison) -> Self {
        let rows = c
            .periods()
            .enumerate()
            .map(|(p, t)| ReferenceRow {
                t,
                v_basic: c.basic[p],
                v_ddescr: c.treated[p],
                dv: c.delta[p],
            })
            .collect();
        Self {
            rows,
            printed_totals: Totals {
                v_basic: c.total_basic,
                v_ddescr: c.total_treated,
                dv: c.total_delta,
            },
        }
    }
}

/// Parses a comparison table; rows must have strictly increasing consecutive periods
/// and the file must end with a `Total` row.
pub fn parse_comparison_table(source: &str) -> Result<ReferenceTable> {
    let mut rdr = comma_reader(source);
    let mut header_seen = false;
    let mut rows: Vec<ReferenceRow> = Vec::new();
    let mut totals: Option<Totals> = None;
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        if !header_seen {
            if !record.iter().eq(COLUMNS) {
                return Err(Error::parse(
                    line,
                    None,
                    format!("expected header `{}`", COLUMNS.join(",")),
                ));
            }
            header_seen = true;
            continue;
        }
        if totals.is_some() {
            return Err(Error::parse(line, None, "data after Total row"));
        }
        if record.len() != 4 {
            return Err(Error::parse(
                line,
                None,
                format!("expected 4 fields, found {}", record.len()),
            ));
        }
        let v_basic = parse_f64(&record[1], line, "v_basic")?;
        let v_ddescr = parse_f64(&record[2], line, "v_ddescr")?;
        let dv = parse_f64(&record[3], line, "dv")?;
        if &record[0] == "Total" {
            totals = Some(Totals {
                v_basic,
                v_ddescr,
                dv,
            });
            continue;
        }
        let t = parse_period(&record[0], line)?;
        if let Some(prev) = rows.last() {
            if t != prev.t + 1 {
                return Err(Error::parse(
                    line,
                    Some("t"),
                    format!("period {t} does not follow {}", prev.t),
                ));
            }
        }
        rows.push(ReferenceRow {
            t,
            v_basic,
            v_ddescr,
            dv,
        });
    }
    let printed_totals = totals.ok_or_else(|| Error::parse(0, None, "missing Total row"))?;
    Ok(ReferenceTable {
        rows,
        printed_totals,
    })
}

/// Loads the bundled published table, checking its shape.
pub fn load_reference() -> Result<ReferenceTable> {
    load_reference_from(BUNDLED_REFERENCE)
}

pub fn load_reference_from(source: &str) -> Result<ReferenceTable> {
    let table = parse_comparison_table(source).map_err(|e| Error::Integrity(e.to_string()))?;
    if table.rows.len() != REFERENCE_ROWS {
        return Err(Error::Integrity(format!(
            "{} rows, expected {REFERENCE_ROWS}",
            table.rows.len()
        )));
    }
    if table.rows[0].t != 1 {
        return Err(Error::Integrity("periods must start at 1".into()));
    }
    for r in &table.rows {
        if (r.dv - (r.v_ddescr - r.v_basic)).abs() > ROW_DELTA_SLACK + 1e-9 {
            return Err(Error::Integrity(format!(
                "row t={} delta inconsistent",
                r.t
            )));
        }
    }
    Ok(table)
}

pub fn bundled_source() -> &'static str {
    BUNDLED_REFERENCE
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
    pub column_sums: Totals,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn cents(x: f64) -> i64 {
    (x * 100.0).round() as i64
}

/// Runs the arithmetic checks on a comparison table. Failures are findings, not errors.
pub fn verify_reference(table: &ReferenceTable) -> VerificationReport {
    let mut checks = Vec::new();

    // float slack so a printed 0.02 residual is not rejected by representation error
    let bad_rows: Vec<String> = table
        .rows
        .iter()
        .filter(|r| (r.dv - (r.v_ddescr - r.v_basic)).abs() > ROW_DELTA_SLACK + 1e-9)
        .map(|r| format!("t={}: dv {} vs {}", r.t, r.dv, r.v_ddescr - r.v_basic))
        .collect();
    checks.push(CheckResult {
        name: "row-deltas",
        passed: bad_rows.is_empty(),
        detail: if bad_rows.is_empty() {
            format!("{} rows within {ROW_DELTA_SLACK}", table.rows.len())
        } else {
            bad_rows.join("; ")
        },
    });

    let sums = table.column_sums();
    let printed = table.printed_totals;
    let gap_basic = (sums.v_basic - printed.v_basic).abs();
    let gap_ddescr = (sums.v_ddescr - printed.v_ddescr).abs();
    checks.push(CheckResult {
        name: "column-totals",
        passed: gap_basic <= TOTAL_SLACK && gap_ddescr <= TOTAL_SLACK,
        detail: format!(
            "sum v_basic {:.2} vs printed {:.2}; sum v_ddescr {:.2} vs printed {:.2}",
            sums.v_basic, printed.v_basic, sums.v_ddescr, printed.v_ddescr
        ),
    });

    let diff = cents(printed.v_ddescr) - cents(printed.v_basic);
    checks.push(CheckResult {
        name: "total-delta",
        passed: diff == cents(printed.dv),
        detail: format!(
            "{:.2} - {:.2} = {:.2}, printed {:.2}",
            printed.v_ddescr,
            printed.v_basic,
            diff as f64 / 100.0,
            printed.dv
        ),
    });

    let cost_sum = ENTERPRISE_COSTS + DESCRIPTOR_INSTALLATION_COST;
    checks.push(CheckResult {
        name: "cost-identity",
        passed: cost_sum == FIVE_YEAR_TOTAL,
        detail: format!(
            "{ENTERPRISE_COSTS} + {DESCRIPTOR_INSTALLATION_COST} = {cost_sum}, expected {FIVE_YEAR_TOTAL}"
        ),
    });

    VerificationReport {
        checks,
        column_sums: sums,
    }
}
