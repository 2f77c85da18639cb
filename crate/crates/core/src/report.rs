//! Tabular reports: RFC-4180 CSV and aligned plain text.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("row {row} has {got} cells, header has {expected}")]
    Ragged {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("failed to write csv: {0}")]
    Csv(#[from] csv::Error),
}

/// Rounds half away from zero at `places` decimals, treating values within
/// float noise of a tie as the tie (so 0.125 and 1.005 both round up).
pub fn round_half_up(x: f64, places: u32) -> f64 {
    if !x.is_finite() {
        return x;
    }
    let scale = 10f64.powi(places as i32);
    let scaled = x.abs() * scale;
    let floor = scaled.floor();
    let frac = scaled - floor;
    let rounded = if frac >= 0.5 - 1e-9 {
        floor + 1.0
    } else {
        floor
    };
    (rounded / scale).copysign(x)
}

/// `x` rounded half-up and printed with exactly `places` decimals.
pub fn format_fixed(x: f64, places: u32) -> String {
    let r = round_half_up(x, places);
    let s = format!("{:.*}", places as usize, r);
    // avoid "-0.00"
    if r == 0.0 {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Num(f64),
    Int(i64),
}

impl Cell {
    fn full(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Num(x) if *x != 0.0 && (x.abs() < 1e-5 || x.abs() >= 1e16) => format!("{x:e}"),
            Cell::Num(x) => x.to_string(),
            Cell::Int(i) => i.to_string(),
        }
    }

    fn rounded(&self, places: u32) -> String {
        match self {
            Cell::Num(x) => format_fixed(*x, places),
            other => other.full(),
        }
    }
}

impl Cell {
    pub fn empty() -> Self {
        Cell::Text(String::new())
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_rows(columns: Vec<String>, rows: Vec<Vec<Cell>>) -> Result<Self, ReportError> {
        let mut t = Self::new(columns);
        for r in rows {
            t.push(r)?;
        }
        Ok(t)
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<(), ReportError> {
        if row.len() != self.columns.len() {
            return Err(ReportError::Ragged {
                row: self.rows.len() + 1,
                got: row.len(),
                expected: self.columns.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    /// CSV with numbers at full precision, or rounded when `places` is set.
    pub fn to_csv(&self, places: Option<u32>) -> Result<String, ReportError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| match places {
                Some(p) => c.rounded(p),
                None => c.full(),
            }))?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| ReportError::Csv(e.into_error().into()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Space-aligned text, numbers right-aligned and rounded to `places`.
    pub fn to_text(&self, places: u32) -> String {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|c| c.rounded(places)).collect())
            .collect();
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|i| {
                cells
                    .iter()
                    .map(|r| r[i].chars().count())
                    .chain(std::iter::once(self.columns[i].chars().count()))
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let numeric: Vec<bool> = (0..self.columns.len())
            .map(|i| {
                self.rows.iter().any(|r| !matches!(r[i], Cell::Text(_)))
                    && self
                        .rows
                        .iter()
                        .all(|r| !matches!(&r[i], Cell::Text(t) if !t.is_empty()))
            })
            .collect();

        let mut out = String::new();
        let line = |out: &mut String, vals: &[String]| {
            let parts: Vec<String> = vals
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    if numeric[i] {
                        format!("{v:>w$}", w = widths[i])
                    } else {
                        format!("{v:<w$}", w = widths[i])
                    }
                })
                .collect();
            let _ = writeln!(out, "{}", parts.join("  ").trim_end());
        };
        line(&mut out, &self.columns);
        for r in &cells {
            line(&mut out, r);
        }
        out
    }
}

/// `rows` under `columns`, as CSV (full precision) and text (rounded).
pub fn render_table(
    columns: &[&str],
    rows: Vec<Vec<Cell>>,
    places: u32,
) -> Result<(String, String), ReportError> {
    let t = Table::with_rows(columns.iter().map(|s| s.to_string()).collect(), rows)?;
    Ok((t.to_csv(None)?, t.to_text(places)))
}
