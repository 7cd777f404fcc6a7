//! Plot-ready delimited tables with `#` metadata headers.
//!
//! Layout:
//!
//! ```text
//! # key: value
//! # ...
//! col_a,col_b,col_c
//! 1,2.5000000000000000e0,label
//! ```
//!
//! Floats are always written with 17 significant digits so a reread is bit-exact.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{DyscoError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(i) => Some(*i as f64),
            Cell::Float(x) => Some(*x),
            Cell::Text(_) => None,
        }
    }

    fn parse(raw: &str) -> Cell {
        if let Ok(i) = raw.parse::<i64>() {
            return Cell::Int(i);
        }
        match raw.parse::<f64>() {
            Ok(x) if raw.contains(['e', 'E', '.']) || !x.is_finite() => Cell::Float(x),
            _ => Cell::Text(raw.to_string()),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
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

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(i) => write!(f, "{i}"),
            Cell::Float(x) => write!(f, "{}", format_float(*x)),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

/// 17 significant digits in scientific notation; `-0` is written as `0`.
pub fn format_float(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl ResultTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            metadata: Vec::new(),
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl fmt::Display) -> &mut Self {
        self.metadata.push((key.into(), value.to_string()));
        self
    }

    pub fn get_meta(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width must match the column count"
        );
        self.rows.push(row);
    }

    /// Numeric view of one column.
    pub fn column_f64(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        self.rows.iter().map(|r| r[idx].as_f64()).collect()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(ToString::to_string).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut table = ResultTable::default();
        let mut have_header = false;
        for (lineno, line) in text.lines().enumerate() {
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim_start();
                let (k, v) = rest.split_once(": ").unwrap_or((rest, ""));
                table.metadata.push((k.to_string(), v.to_string()));
            } else if !have_header {
                table.columns = line.split(',').map(str::to_string).collect();
                have_header = true;
            } else {
                let row: Vec<Cell> = line.split(',').map(Cell::parse).collect();
                if row.len() != table.columns.len() {
                    return Err(DyscoError::Table(format!(
                        "line {} has {} fields, expected {}",
                        lineno + 1,
                        row.len(),
                        table.columns.len()
                    )));
                }
                table.rows.push(row);
            }
        }
        if !have_header {
            return Err(DyscoError::Table("missing column header".into()));
        }
        Ok(table)
    }
}

/// Writes `table` to `path`, replacing any existing file.
pub fn emit_table(table: &ResultTable, path: &Path) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(table.render().as_bytes())?;
    Ok(())
}

pub fn read_table(path: &Path) -> Result<ResultTable> {
    ResultTable::parse(&fs::read_to_string(path)?)
}
