//! Grid sweeps: one run per grid point, executed in parallel, reported in
//! grid order.

use std::collections::BTreeSet;

use adaptive_deploy::sim::{fmt_f64, run};
use rayon::prelude::*;

use crate::load::{parse_assignment, parse_value, resolve, set_dotted};
use crate::Failure;

pub const MAX_GRID_KEYS: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub key: String,
    pub values: Vec<String>,
}

pub fn parse_grid(specs: &[String]) -> Result<Vec<Axis>, Failure> {
    if specs.is_empty() {
        return Err(Failure::Invalid("the grid is empty; pass --grid key=v1,v2,...".into()));
    }
    if specs.len() > MAX_GRID_KEYS {
        return Err(Failure::Invalid(format!("a sweep varies at most {MAX_GRID_KEYS} keys")));
    }
    let axes: Vec<Axis> = specs
        .iter()
        .map(|s| {
            let (key, list) = parse_assignment(s)?;
            let values: Vec<String> = list.split(',').map(str::trim).filter(|v| !v.is_empty()).map(String::from).collect();
            if values.is_empty() {
                return Err(Failure::Invalid(format!("grid key `{key}` has no values")));
            }
            Ok(Axis { key: key.to_string(), values })
        })
        .collect::<Result<_, _>>()?;
    if axes.len() == 2 && axes[0].key == axes[1].key {
        return Err(Failure::Invalid(format!("grid key `{}` appears twice", axes[0].key)));
    }
    Ok(axes)
}

/// Grid points in row-major order (the first axis varies slowest).
pub fn points(axes: &[Axis]) -> Vec<Vec<String>> {
    axes.iter().fold(vec![Vec::new()], |acc, axis| {
        acc.iter()
            .flat_map(|prefix| {
                axis.values.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push(v.clone());
                    p
                })
            })
            .collect()
    })
}

type PointResult = Result<toml::Table, String>;

pub struct SweepTable {
    pub keys: Vec<String>,
    pub rows: Vec<(Vec<String>, PointResult)>,
}

pub fn run_sweep(base: &toml::Table, sets: &[String], seed: Option<u64>, axes: &[Axis]) -> Result<SweepTable, Failure> {
    let grid = points(axes);
    let results: Vec<PointResult> = grid
        .par_iter()
        .map(|values| {
            let mut table = base.clone();
            for (axis, v) in axes.iter().zip(values) {
                set_dotted(&mut table, &axis.key, parse_value(v)).map_err(|e| e.to_string())?;
            }
            let scenario = resolve(table, sets, seed).map_err(|e| e.to_string())?;
            run(&scenario).map(|out| out.summary).map_err(|e| e.to_string())
        })
        .collect();
    Ok(SweepTable {
        keys: axes.iter().map(|a| a.key.clone()).collect(),
        rows: grid.into_iter().zip(results).collect(),
    })
}

fn scalar(v: &toml::Value) -> Option<String> {
    match v {
        toml::Value::Float(x) => Some(fmt_f64(*x)),
        toml::Value::Integer(i) => Some(i.to_string()),
        toml::Value::Boolean(b) => Some(b.to_string()),
        _ => None,
    }
}

impl SweepTable {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|(_, r)| r.is_err()).count()
    }

    /// CSV with the grid keys, a status column and every scalar summary
    /// metric reported by at least one point.
    pub fn to_csv(&self) -> String {
        let metrics: BTreeSet<&String> = self
            .rows
            .iter()
            .filter_map(|(_, r)| r.as_ref().ok())
            .flat_map(|s| s.iter().filter(|(_, v)| scalar(v).is_some()).map(|(k, _)| k))
            .collect();
        let mut out = self.keys.join(",");
        out.push_str(",status");
        for m in &metrics {
            out.push(',');
            out.push_str(m);
        }
        out.push('\n');
        for (values, result) in &self.rows {
            let mut cells = values.clone();
            match result {
                Ok(summary) => {
                    cells.push("ok".into());
                    cells.extend(metrics.iter().map(|m| summary.get(*m).and_then(scalar).unwrap_or_default()));
                }
                Err(e) => {
                    cells.push(format!("failed: {}", e.replace([',', '\n'], ";")));
                    cells.extend(metrics.iter().map(|_| String::new()));
                }
            }
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}
