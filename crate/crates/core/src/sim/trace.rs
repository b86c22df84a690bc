//! Comma-separated traces and self-describing output files.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use crate::geometry::{OwnershipRaster, Point};

/// Shortest decimal text that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

/// Header-plus-rows table of preformatted cells.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width differs from header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Column `name` parsed as floats; empty cells become NaN.
    pub fn floats(&self, name: &str) -> Option<Vec<f64>> {
        let c = self.column(name)?;
        Some(self.rows.iter().map(|r| r[c].parse().unwrap_or(f64::NAN)).collect())
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// Parse text written by [`Table::write_csv`], skipping `#` lines.
    pub fn parse_csv(text: &str) -> Option<Table> {
        let mut lines = text.lines().filter(|l| !l.starts_with('#'));
        let columns = lines.next()?.split(',').map(String::from).collect();
        let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
        Some(Table { columns, rows })
    }
}

/// Column names `prefix{i}_{axis}` for `n` points of dimension `dim`.
pub fn point_columns(prefix: &str, n: usize, dim: usize) -> Vec<String> {
    let axes = ["x", "y", "z"];
    (0..n)
        .flat_map(|i| (0..dim).map(move |a| format!("{prefix}{i}_{}", axes[a])))
        .collect()
}

pub fn point_cells(points: &[Point]) -> Vec<String> {
    Point::flatten(points).into_iter().map(fmt_f64).collect()
}

pub fn float_cells(values: &[f64]) -> Vec<String> {
    values.iter().copied().map(fmt_f64).collect()
}

/// Regions of a run captured at event `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub k: u64,
    pub positions: Table,
    /// Cell ownership, only for planar workspaces.
    pub raster: Option<OwnershipRaster>,
}

/// Everything a run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    /// Resolved scenario, as TOML.
    pub scenario: String,
    pub trace: Table,
    /// Per-arrival records of the repair-routing runs.
    pub arrivals: Option<Table>,
    pub summary: toml::Table,
    pub snapshots: Vec<Snapshot>,
    pub floodmin: Option<Table>,
}

impl RunOutput {
    fn header<W: Write>(&self, out: &mut W) -> io::Result<()> {
        for line in self.scenario.lines() {
            writeln!(out, "# {line}")?;
        }
        Ok(())
    }

    pub fn trace_text(&self) -> String {
        let mut buf = Vec::new();
        self.header(&mut buf).and_then(|_| self.trace.write_csv(&mut buf)).expect("writing to memory");
        String::from_utf8(buf).expect("trace is ASCII")
    }

    pub fn summary_text(&self) -> String {
        let mut buf = Vec::new();
        self.header(&mut buf).expect("writing to memory");
        let mut text = String::from_utf8(buf).expect("header is UTF-8");
        text.push_str(&toml::to_string(&self.summary).expect("summaries serialize"));
        text
    }

    fn emit(&self, dir: &Path, name: &str, body: impl FnOnce(&mut Vec<u8>) -> io::Result<()>) -> io::Result<PathBuf> {
        let mut buf = Vec::new();
        self.header(&mut buf)?;
        body(&mut buf)?;
        let path = dir.join(name);
        fs::write(&path, buf)?;
        Ok(path)
    }

    /// Write every artifact into `dir` and return the paths written.
    pub fn write_dir(&self, dir: &Path) -> io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = vec![
            self.emit(dir, "trace.csv", |b| self.trace.write_csv(b))?,
            self.emit(dir, "summary.toml", |b| {
                b.extend_from_slice(toml::to_string(&self.summary).expect("summaries serialize").as_bytes());
                Ok(())
            })?,
        ];
        if let Some(a) = &self.arrivals {
            written.push(self.emit(dir, "arrivals.csv", |b| a.write_csv(b))?);
        }
        if let Some(f) = &self.floodmin {
            written.push(self.emit(dir, "floodmin.csv", |b| f.write_csv(b))?);
        }
        written.extend(self.write_snapshots(dir)?);
        Ok(written)
    }

    /// Write only the snapshot files into `dir`.
    pub fn write_snapshots(&self, dir: &Path) -> io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for s in &self.snapshots {
            let name = format!("snapshot_{:08}_positions.csv", s.k);
            written.push(self.emit(dir, &name, |b| s.positions.write_csv(b))?);
            if let Some(r) = &s.raster {
                let name = format!("snapshot_{:08}_raster.txt", s.k);
                written.push(self.emit(dir, &name, |b| r.write_to(b))?);
            }
        }
        Ok(written)
    }
}
