//! Report envelope and the three output formats.
//!
//! JSON reports are `{"provenance": …, "payload": …}`. Keys are sorted and the
//! payload carries no timestamps, so identical runs give identical bytes.

use std::fmt::Write as _;
use std::io::Write;

use clap::ValueEnum;
use orbitcodes::field::FieldDescriptor;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

/// A rectangular block of string cells.
#[derive(Debug, Clone, Default)]
pub struct Block {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Block {
    pub fn new(header: &[&str]) -> Block {
        Block {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Everything one command produces.
#[derive(Debug)]
pub struct Report {
    pub command: &'static str,
    pub field: Option<FieldDescriptor>,
    pub payload: Value,
    /// Key/value summary shown first in table output.
    pub summary: Vec<(String, String)>,
    /// Tabular sections for CSV and table output, in order.
    pub blocks: Vec<Block>,
    /// Verification failures; a non-empty list means exit code 1.
    pub failures: Vec<String>,
}

impl Report {
    pub fn new(command: &'static str, payload: impl Serialize) -> Result<Report, CliError> {
        Ok(Report {
            command,
            field: None,
            payload: to_value(payload)?,
            summary: Vec::new(),
            blocks: Vec::new(),
            failures: Vec::new(),
        })
    }

    pub fn summary(mut self, key: &str, value: impl ToString) -> Report {
        self.summary.push((key.into(), value.to_string()));
        self
    }
}

pub fn to_value(v: impl Serialize) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Output(e.to_string()))
}

fn provenance(r: &Report) -> Value {
    json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": r.command,
        "field": r.field,
    })
}

pub fn render(r: &Report, format: Format, out: &mut impl Write) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Output(e.to_string());
    match format {
        Format::Json => {
            let doc = json!({ "provenance": provenance(r), "payload": r.payload });
            serde_json::to_writer_pretty(&mut *out, &doc).map_err(|e| CliError::Output(e.to_string()))?;
            writeln!(out).map_err(io)?;
        }
        Format::Csv => {
            let csv_err = |e: csv::Error| CliError::Output(e.to_string());
            for (i, b) in r.blocks.iter().enumerate() {
                if i > 0 {
                    writeln!(out).map_err(io)?;
                }
                let mut w = csv::Writer::from_writer(&mut *out);
                w.write_record(&b.header).map_err(csv_err)?;
                for row in &b.rows {
                    w.write_record(row).map_err(csv_err)?;
                }
                w.flush().map_err(io)?;
            }
        }
        Format::Table => {
            out.write_all(table_text(r).as_bytes()).map_err(io)?;
        }
    }
    Ok(())
}

fn table_text(r: &Report) -> String {
    let mut s = String::new();
    if let Some(f) = &r.field {
        let _ = writeln!(s, "field: p={} h={} n={} modulus={:?}", f.p, f.h, f.n, f.modulus.as_deref().unwrap_or(&[]));
    }
    let width = r.summary.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    for (k, v) in &r.summary {
        let _ = writeln!(s, "{k:<width$}  {v}");
    }
    for b in &r.blocks {
        s.push('\n');
        let mut widths: Vec<usize> = b.header.iter().map(|h| h.chars().count()).collect();
        for row in &b.rows {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: &[String]| {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, &w)| format!("{c:<w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        let _ = writeln!(s, "{}", line(&b.header));
        for row in &b.rows {
            let _ = writeln!(s, "{}", line(row));
        }
    }
    if !r.failures.is_empty() {
        s.push('\n');
        for f in &r.failures {
            let _ = writeln!(s, "FAIL {f}");
        }
    }
    s
}

pub fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

pub fn joined<T: ToString>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}
