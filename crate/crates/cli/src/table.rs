//! Result tables and their CSV, JSON and plot-script renderings.

use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Map, Value};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    /// The exact mean is infinite.
    Divergent,
    /// Some replicates hit a cap, so the value is only a lower bound.
    Capped,
    /// Not defined for this row.
    Na,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    /// A float, or `na` when it is not finite.
    pub fn num(x: f64) -> Self {
        if x.is_finite() {
            Cell::Float(x)
        } else {
            Cell::Na
        }
    }

    pub fn opt(x: Option<f64>) -> Self {
        x.map_or(Cell::Na, Cell::num)
    }

    fn render(&self) -> String {
        match self {
            Cell::Float(x) => format!("{x:.16e}"),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Divergent => "divergent".into(),
            Cell::Capped => "capped".into(),
            Cell::Na => "na".into(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Float(x) => json!(x),
            Cell::Int(n) => json!(n),
            Cell::Bool(b) => json!(b),
            other => Value::String(other.render()),
        }
    }
}

pub type Row = Vec<(&'static str, Cell)>;

/// Which columns a plot script draws.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotHint {
    pub x: &'static str,
    pub y: Vec<&'static str>,
    pub log_x: bool,
    pub log_y: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub command: &'static str,
    pub notes: Vec<String>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Failed acceptance checks; non-empty means exit code 3.
    pub violations: Vec<String>,
    pub plot: Option<PlotHint>,
}

impl Table {
    pub fn new(name: &str, command: &'static str, rows: Vec<Row>) -> Self {
        let columns: Vec<&'static str> = rows
            .first()
            .map(|r| r.iter().map(|c| c.0).collect())
            .unwrap_or_default();
        let rows = rows
            .into_iter()
            .map(|r| {
                assert!(r.iter().map(|c| c.0).eq(columns.iter().copied()), "ragged table");
                r.into_iter().map(|c| c.1).collect()
            })
            .collect();
        Self {
            name: name.to_string(),
            command,
            notes: Vec::new(),
            columns,
            rows,
            violations: Vec::new(),
            plot: None,
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let k = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| &r[k]).collect())
    }

    /// Float values of a column; tokens become `None`.
    pub fn floats(&self, name: &str) -> Vec<Option<f64>> {
        self.column(name)
            .unwrap_or_default()
            .into_iter()
            .map(|c| match c {
                Cell::Float(x) => Some(*x),
                Cell::Int(n) => Some(*n as f64),
                _ => None,
            })
            .collect()
    }

    /// Comment lines, then an RFC 4180 header and records.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let io = |source| CliError::Io {
            path: "<output>".into(),
            source,
        };
        writeln!(out, "# generated-unix={}", unix_now()).map_err(io)?;
        for note in &self.notes {
            writeln!(out, "# note: {note}").map_err(io)?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush().map_err(io)?;
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(r)
                    .map(|(k, c)| (k.to_string(), c.to_json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        json!({
            "name": self.name,
            "command": self.command,
            "generated_unix": unix_now(),
            "notes": self.notes,
            "columns": self.columns,
            "rows": rows,
            "violations": self.violations,
        })
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, &self.to_json())?;
        writeln!(out).map_err(|source| CliError::Io {
            path: "<output>".into(),
            source,
        })
    }

    /// Python script that plots `csv_path` with matplotlib.
    pub fn plot_script(&self, csv_path: &str) -> Option<String> {
        let hint = self.plot.as_ref()?;
        let ys: Vec<String> = hint.y.iter().map(|y| format!("{y:?}")).collect();
        Some(format!(
            r##"#!/usr/bin/env python3
# Plots the `{command}` table `{name}`. Usage: python3 <this file> [csv]
import csv
import sys

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else {csv_path:?}
with open(path, newline="") as f:
    rows = list(csv.DictReader(line for line in f if not line.startswith("#")))


def col(name):
    out = []
    for r in rows:
        try:
            out.append(float(r[name]))
        except ValueError:
            out.append(float("nan"))
    return out


x = col({x:?})
fig, ax = plt.subplots(figsize=(6, 4))
for name in [{ys}]:
    ax.plot(x, col(name), marker="o", label=name)
ax.set_xlabel({x:?})
if {log_x}:
    ax.set_xscale("log")
if {log_y}:
    ax.set_yscale("log")
ax.set_title({name:?})
ax.legend()
fig.tight_layout()
fig.savefig(path.rsplit(".", 1)[0] + ".png", dpi=150)
"##,
            command = self.command,
            name = self.name,
            x = hint.x,
            ys = ys.join(", "),
            log_x = if hint.log_x { "True" } else { "False" },
            log_y = if hint.log_y { "True" } else { "False" },
        ))
    }
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}
