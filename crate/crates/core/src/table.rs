// SPDX-License-Identifier: Apache-2.0

//! Numeric tables with provenance, written as CSV.
//!
//! Layout: `# key = value` metadata lines, one header row, then data rows.
//! Numbers are printed with 12 significant digits in the shortest of fixed
//! or exponential notation.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Significant digits of every number in a table.
pub const DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepTable {
    pub metadata: Vec<(String, String)>,
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl SweepTable {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Result<SweepTable> {
        let columns: Vec<String> = columns.iter().map(|c| c.as_ref().to_string()).collect();
        for (k, c) in columns.iter().enumerate() {
            if columns[..k].contains(c) {
                return Err(Error::Invalid { key: "columns", reason: format!("duplicate column {c:?}") });
            }
        }
        Ok(SweepTable { metadata: Vec::new(), columns, rows: Vec::new() })
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.metadata.push((key.into(), value.to_string()));
        self
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Invalid {
                key: "row",
                reason: format!("{} values for {} columns", row.len(), self.columns.len()),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            let _ = write!(out, "# {k} = {v}\r\n");
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
        w.write_record(&self.columns).expect("writing to memory");
        for row in &self.rows {
            w.write_record(row.iter().map(|&x| format_sig(x, DIGITS))).expect("writing to memory");
        }
        let body = w.into_inner().expect("flushing to memory");
        out.push_str(std::str::from_utf8(&body).expect("input was UTF-8"));
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path.as_ref(), self.to_csv()).map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))
    }
}

/// Metadata pairs of a CSV produced by [`SweepTable::to_csv`].
pub fn parse_metadata(csv: &str) -> Vec<(String, String)> {
    csv.lines()
        .map_while(|l| l.strip_prefix("# "))
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

/// C `%.{digits}g` formatting.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let p = digits.max(1);
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_formatting() {
        assert_eq!(format_sig(1.0, 12), "1");
        assert_eq!(format_sig(0.1, 12), "0.1");
        assert_eq!(format_sig(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(format_sig(21.260_181_234_567_89, 12), "21.2601812346");
        assert_eq!(format_sig(-1234.5, 12), "-1234.5");
        assert_eq!(format_sig(1.5e-7, 12), "1.5e-07");
        assert_eq!(format_sig(1e12, 12), "1e+12");
        assert_eq!(format_sig(999_999_999_999.0, 12), "999999999999");
        assert_eq!(format_sig(0.0001, 12), "0.0001");
        assert_eq!(format_sig(0.0, 12), "0");
        assert_eq!(format_sig(f64::NAN, 12), "nan");
        // rounding can bump the exponent
        assert_eq!(format_sig(9.999_999_999_999_9, 12), "10");
    }

    #[test]
    fn layout() {
        let mut t = SweepTable::new(&["r", "h_D"]).unwrap();
        t.meta("seed", 7).meta("alpha", 2);
        t.push_row(vec![0.0, 7.75]).unwrap();
        t.push_row(vec![0.5, 7.7338]).unwrap();
        assert_eq!(t.to_csv(), "# seed = 7\r\n# alpha = 2\r\nr,h_D\r\n0,7.75\r\n0.5,7.7338\r\n");
        assert_eq!(t.column("h_D").unwrap(), vec![7.75, 7.7338]);
        assert_eq!(t.meta_value("alpha"), Some("2"));
        assert_eq!(parse_metadata(&t.to_csv()), vec![("seed".into(), "7".into()), ("alpha".into(), "2".into())]);
    }

    #[test]
    fn invariants() {
        assert!(SweepTable::new(&["a", "b", "a"]).is_err());
        let mut t = SweepTable::new(&["a", "b"]).unwrap();
        assert!(t.push_row(vec![1.0]).is_err());
        assert!(t.rows().is_empty());
    }

    #[test]
    fn quoting() {
        let t = SweepTable::new(&["a,b", "say \"hi\""]).unwrap();
        assert_eq!(t.to_csv(), "\"a,b\",\"say \"\"hi\"\"\"\r\n");
    }
}
