//! Result tables and their CSV form.
//!
//! A table file starts with `#!` lines describing the sweep and `#@` lines
//! echoing the full configuration, followed by an ordinary CSV block.
//! Feeding the header back through [`reproduce`] reruns the same sweep.

use super::config::{config_echo, ConfigEntries};
use super::{run_sweep, Axis, Metric, SweepSpec};
use crate::channel::SystemConfig;
use crate::error::{Error, Result};
use crate::montecarlo::EveMode;
use std::io::Write;

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    /// Evaluation routes seen down the column, `|`-separated.
    pub method: String,
    pub values: Vec<f64>,
    pub std_error: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableMeta {
    pub config: SystemConfig,
    pub spec: SweepSpec,
    pub preset: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricTable {
    pub axis_name: String,
    pub axis_values: Vec<f64>,
    pub columns: Vec<Column>,
    pub meta: TableMeta,
}

impl MetricTable {
    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        let spec = &self.meta.spec;
        let list = |v: &[f64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        writeln!(out, "#! tool={TOOL_NAME} {TOOL_VERSION}")?;
        writeln!(
            out,
            "#! kind={}",
            if self.meta.preset.is_some() { "figure" } else { "sweep" }
        )?;
        if let Some(p) = &self.meta.preset {
            writeln!(out, "#! preset={p}")?;
        }
        writeln!(out, "#! axis={}", spec.axis.name())?;
        writeln!(out, "#! values={}", list(&spec.values))?;
        let metrics: Vec<&str> = spec.metrics.iter().map(|m| m.name()).collect();
        writeln!(out, "#! metrics={}", metrics.join(","))?;
        match &spec.n_values {
            Some(ns) => {
                let ns: Vec<String> = ns.iter().map(|n| n.to_string()).collect();
                writeln!(out, "#! n_values={}", ns.join(","))?;
            }
            None => writeln!(out, "#! n_values=-")?,
        }
        writeln!(out, "#! tie_eve={}", spec.tie_eve)?;
        writeln!(out, "#! eve_mode={}", spec.eve_mode.tag())?;
        writeln!(out, "#! seed={}", spec.seed)?;
        writeln!(out, "#! trials={}", spec.trials)?;
        let methods: Vec<String> = self
            .columns
            .iter()
            .map(|c| format!("{}:{}", c.name, c.method))
            .collect();
        writeln!(out, "#! methods={}", methods.join(";"))?;
        for (k, v) in config_echo(&self.meta.config) {
            writeln!(out, "#@ {k}={v}")?;
        }

        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![self.axis_name.clone()];
        for c in &self.columns {
            header.push(c.name.clone());
            if c.std_error.is_some() {
                header.push(format!("{}_se", c.name));
            }
        }
        w.write_record(&header)?;
        for (i, x) in self.axis_values.iter().enumerate() {
            let mut row = vec![x.to_string()];
            for c in &self.columns {
                row.push(cell(c.values[i]));
                if let Some(se) = &c.std_error {
                    row.push(cell(se[i]));
                }
            }
            w.write_record(&row)?;
        }
        let body = w
            .into_inner()
            .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
        out.extend_from_slice(&body);
        Ok(out)
    }
}

/// Shortest round-tripping text, in exponent form for very small or
/// large magnitudes.
fn cell(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

/// Parses the `#!`/`#@` header of a table file.
pub fn read_meta(text: &str) -> Result<TableMeta> {
    let mut entries = String::new();
    let mut fields: Vec<(usize, &str, &str)> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if let Some(rest) = line.strip_prefix("#@") {
            entries.push_str(rest.trim());
            entries.push('\n');
        } else if let Some(rest) = line.strip_prefix("#!") {
            let (k, v) = rest.trim().split_once('=').ok_or_else(|| Error::Parse {
                line: idx + 1,
                message: format!("malformed header line `{line}`"),
            })?;
            fields.push((idx + 1, k, v));
        }
    }
    let config = ConfigEntries::parse(&entries)?.build()?;
    let find = |key: &str| -> Result<(usize, &str)> {
        fields
            .iter()
            .find(|f| f.1 == key)
            .map(|f| (f.0, f.2))
            .ok_or_else(|| Error::Parse {
                line: 0,
                message: format!("table header lacks `{key}`"),
            })
    };
    let bad = |line: usize, what: &str, v: &str| Error::Parse {
        line,
        message: format!("bad {what} `{v}`"),
    };

    let (l, v) = find("axis")?;
    let axis = Axis::from_name(v).ok_or_else(|| bad(l, "axis", v))?;
    let (l, v) = find("values")?;
    let values = v
        .split(',')
        .map(|s| s.parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| bad(l, "values", v))?;
    let (l, v) = find("metrics")?;
    let metrics = v
        .split(',')
        .map(|s| Metric::from_name(s).ok_or_else(|| bad(l, "metric", s)))
        .collect::<Result<Vec<_>>>()?;
    let (l, v) = find("n_values")?;
    let n_values = if v == "-" {
        None
    } else {
        Some(
            v.split(',')
                .map(|s| s.parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| bad(l, "n_values", v))?,
        )
    };
    let (l, v) = find("tie_eve")?;
    let tie_eve = v.parse::<bool>().map_err(|_| bad(l, "tie_eve", v))?;
    let (l, v) = find("eve_mode")?;
    let eve_mode = match v {
        "random_eve" => EveMode::RandomEve,
        "mean_eve" => EveMode::MeanEve,
        _ => return Err(bad(l, "eve_mode", v)),
    };
    let (l, v) = find("seed")?;
    let seed = v.parse::<u64>().map_err(|_| bad(l, "seed", v))?;
    let (l, v) = find("trials")?;
    let trials = v.parse::<u64>().map_err(|_| bad(l, "trials", v))?;
    let preset = find("preset").ok().map(|(_, v)| v.to_string());

    Ok(TableMeta {
        config,
        spec: SweepSpec {
            axis,
            values,
            metrics,
            trials,
            seed,
            n_values,
            tie_eve,
            eve_mode,
        },
        preset,
    })
}

/// Reruns the sweep described by a table file's header.
pub fn reproduce(text: &str) -> Result<MetricTable> {
    let meta = read_meta(text)?;
    let mut table = run_sweep(&meta.config, &meta.spec)?;
    table.meta.preset = meta.preset;
    Ok(table)
}
