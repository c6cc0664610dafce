//! Event-series format: comma-separated, header `t,<label1>,...,<labeln>`, one row per
//! period, periods dense from 1.

use std::collections::BTreeMap;

use super::catalog_doc::csv_error;
use super::{comma_reader, parse_f64, parse_period};
use crate::enterprise::EnterpriseModel;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub fn parse_events(source: &str) -> Result<EnterpriseModel> {
    let mut rdr = comma_reader(source);
    let mut labels: Option<Vec<String>> = None;
    let mut rows: BTreeMap<usize, (usize, Vec<f64>)> = BTreeMap::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let Some(labels) = labels.as_ref() else {
            if record.get(0) != Some("t") {
                return Err(Error::parse(line, Some("t"), "header must start with `t`"));
            }
            if record.len() < 2 {
                return Err(Error::parse(line, None, "header names no channels"));
            }
            labels = Some(record.iter().skip(1).map(str::to_owned).collect());
            continue;
        };
        if record.len() != labels.len() + 1 {
            return Err(Error::parse(
                line,
                None,
                format!(
                    "expected {} fields, found {}",
                    labels.len() + 1,
                    record.len()
                ),
            ));
        }
        let t = parse_period(&record[0], line)?;
        let values = labels
            .iter()
            .enumerate()
            .map(|(j, label)| parse_f64(&record[j + 1], line, label))
            .collect::<Result<Vec<_>>>()?;
        if rows.insert(t, (line, values)).is_some() {
            return Err(Error::parse(
                line,
                Some("t"),
                format!("duplicate period {t}"),
            ));
        }
    }
    let labels = labels.ok_or_else(|| Error::parse(1, None, "missing header"))?;
    if rows.is_empty() {
        return Err(Error::parse(1, None, "no data rows (t_max = 0)"));
    }
    // rows are keyed by period, so the first key that skips ahead names the gap
    for (want, (&got, &(line, _))) in (1..).zip(&rows) {
        if want != got {
            return Err(Error::parse(
                line,
                Some("t"),
                format!("missing period {want}"),
            ));
        }
    }
    let data: Vec<Vec<f64>> = rows.into_values().map(|(_, v)| v).collect();
    let events = Matrix::from_rows(&data).expect("rows checked for width");
    EnterpriseModel::new(events, labels)
}

pub fn write_events(model: &EnterpriseModel) -> String {
    let mut out = String::from("t");
    for l in model.labels() {
        out.push(',');
        out.push_str(l);
    }
    out.push('\n');
    for t in 1..=model.t_max() {
        out.push_str(&t.to_string());
        for v in model.period(t) {
            out.push(',');
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_by_two() {
        let m = parse_events("t,a,b\n1,1,2\n2,3,4\n3,5,6\n").unwrap();
        assert_eq!(m.t_max(), 3);
        assert_eq!(m.labels(), ["a", "b"]);
        assert_eq!(
            m.events(),
            &Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]).unwrap()
        );
        assert_eq!(parse_events(&write_events(&m)).unwrap(), m);
    }

    #[test]
    fn out_of_order_rows_are_sorted() {
        let m = parse_events("t,a\n2,20\n1,10\n").unwrap();
        assert_eq!(m.events().column(0), vec![10.0, 20.0]);
    }

    #[test]
    fn header_only() {
        assert!(matches!(parse_events("t,a,b\n"), Err(Error::Parse { .. })));
        assert!(parse_events("").is_err());
    }

    #[test]
    fn missing_period_is_named() {
        let err = parse_events("t,a\n1,1\n2,2\n4,4\n").unwrap_err();
        assert!(err.to_string().contains("missing period 3"), "{err}");
    }

    #[test]
    fn bad_cells() {
        match parse_events("t,a,b\n1,1,x\n") {
            Err(Error::Parse { line, field, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(field.as_deref(), Some("b"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_events("t,a,b\n1,1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_events("t,a\n1,1\n1,2\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(parse_events("t,a\n0,1\n").is_err());
        assert!(parse_events("t,a\n1,inf\n").is_err());
        assert!(parse_events("period,a\n1,1\n").is_err());
    }
}
