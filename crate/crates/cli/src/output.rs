use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use sis_core::{Error, Result};

use crate::args::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(usize),
    Real(f64),
    Bool(bool),
    Text(String),
    Empty,
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Real)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

/// 17 significant digits round-trip every double.
fn real(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            for (i, c) in row.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                match c {
                    Cell::Int(v) => write!(s, "{v}").unwrap(),
                    Cell::Real(v) => s.push_str(&real(*v)),
                    Cell::Bool(v) => write!(s, "{v}").unwrap(),
                    Cell::Text(v) => s.push_str(v),
                    Cell::Empty => {}
                }
            }
            s.push('\n');
        }
        s
    }
}

/// Data for one command, in both output shapes.
pub struct Output<T: Serialize> {
    pub json: T,
    pub table: Table,
}

impl<T: Serialize> Output<T> {
    pub fn render(&self, format: Format) -> Result<String> {
        Ok(match format {
            Format::Csv => self.table.to_csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).map_err(|e| Error::Config(format!("serialising output: {e}")))?;
                s.push('\n');
                s
            }
        })
    }
}

pub fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    let io = |e: std::io::Error| Error::Config(format!("writing output: {e}"));
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Config(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(io)?;
            stdout.flush().map_err(io)
        }
    }
}
