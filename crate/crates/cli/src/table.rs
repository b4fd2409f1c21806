//! Named-column tables and their CSV form.

use std::fs;
use std::path::Path;

use thiserror::Error;

/// Significant digits written for every value.
pub const SIGNIFICANT_DIGITS: usize = 15;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("row has {got} values, table has {want} columns")]
    RowLength { got: usize, want: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Columns of reals in a fixed order.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    names: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Self {
        Self {
            names: names.iter().map(|s| s.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<(), TableError> {
        if row.len() != self.names.len() {
            return Err(TableError::RowLength {
                got: row.len(),
                want: self.names.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.names.iter().position(|n| n == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    /// Header row, one line per row, newline-terminated.
    pub fn to_csv(&self) -> String {
        let mut out = self.names.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| format_value(x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<Self, TableError> {
        let mut lines = text.lines();
        let header = lines.next().ok_or(TableError::Parse {
            line: 1,
            message: "missing header".into(),
        })?;
        let mut table = Table::new(&header.split(',').collect::<Vec<_>>());
        for (k, line) in lines.enumerate() {
            let row = line
                .split(',')
                .map(|cell| cell.parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| TableError::Parse {
                    line: k + 2,
                    message: e.to_string(),
                })?;
            table.push_row(row).map_err(|e| TableError::Parse {
                line: k + 2,
                message: e.to_string(),
            })?;
        }
        Ok(table)
    }
}

/// Rounds to 15 significant digits, then prints the shortest decimal that
/// parses back to the rounded value.
pub fn format_value(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let r = round_significant(x);
    if r == 0.0 {
        return "0".into();
    }
    if (1e-4..1e15).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

/// `x` rounded to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_significant(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

pub fn emit_csv(table: &Table, path: &Path) -> Result<(), TableError> {
    fs::write(path, table.to_csv()).map_err(|source| TableError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_table_is_header_only() {
        assert_eq!(Table::new(&["a", "b"]).to_csv(), "a,b\n");
    }

    #[test]
    fn single_value() {
        let mut t = Table::new(&["col"]);
        t.push_row(vec![0.5]).unwrap();
        assert_eq!(t.to_csv(), "col\n0.5\n");
    }

    #[test]
    fn ragged_row_rejected() {
        let mut t = Table::new(&["a", "b"]);
        assert!(matches!(
            t.push_row(vec![1.0]),
            Err(TableError::RowLength { got: 1, want: 2 })
        ));
    }

    #[test]
    fn formatting() {
        assert_eq!(format_value(0.1 + 0.2), "0.3");
        assert_eq!(format_value(-0.0), "0");
        assert_eq!(format_value(1.0 / 3.0), "0.333333333333333");
        assert_eq!(format_value(1.5e-20), "1.5e-20");
        assert_eq!(format_value(2.0e20), "2e20");
        assert_eq!(format_value(100.0), "100");
        assert_eq!(format_value(f64::NAN), "NaN");
    }

    #[test]
    fn parse_round_trip_at_fifteen_digits() {
        let mut t = Table::new(&["x", "y"]);
        for k in 0..50 {
            let x = (k as f64 * 0.731).sin() * 10f64.powi(k % 9 - 4);
            t.push_row(vec![x, 1.0 / (k as f64 + 0.3)]).unwrap();
        }
        let back = Table::parse_csv(&t.to_csv()).unwrap();
        assert_eq!(back.names(), t.names());
        for (a, b) in back.rows().iter().zip(t.rows()) {
            for (x, y) in a.iter().zip(b) {
                assert_eq!(x.to_bits(), round_significant(*y).to_bits());
            }
        }
    }

    #[test]
    fn parse_reports_line() {
        let err = Table::parse_csv("a\n1\nfoo\n").unwrap_err();
        assert!(matches!(err, TableError::Parse { line: 3, .. }));
    }
}
