use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use tempfile::NamedTempFile;

use crate::error::{CliError, Result};
use crate::run::TimeSeries;

/// Version stamped into JSON metadata.
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

fn format_flag(x: f64) -> String {
    if x != 0.0 {
        "1".into()
    } else {
        "0".into()
    }
}

/// Writes `series` to `path` in `format`, replacing any existing file atomically.
pub fn export(series: &TimeSeries, format: Format, path: &Path) -> Result<()> {
    let bytes = match format {
        Format::Csv => csv_bytes(series)?,
        Format::Json => json_bytes(series)?,
    };
    write_atomic(path, &bytes)
}

pub fn csv_bytes(series: &TimeSeries) -> Result<Vec<u8>> {
    let header = series.header();
    let split = series.n_value_columns();
    let rows = series.records.iter().map(|r| {
        series
            .row(r)
            .into_iter()
            .enumerate()
            .map(|(i, x)| if i < split { format_float(x) } else { format_flag(x) })
            .collect::<Vec<_>>()
    });
    table_bytes(&header, rows)
}

/// CSV bytes of an arbitrary string table.
pub fn table_bytes<I>(header: &[String], rows: I) -> Result<Vec<u8>>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| CliError::Csv(e.into_error().into()))
}

pub fn json_bytes(series: &TimeSeries) -> Result<Vec<u8>> {
    let header = series.header();
    let split = series.n_value_columns();
    let rows: Vec<Value> = series
        .records
        .iter()
        .map(|r| {
            Value::Array(
                series
                    .row(r)
                    .into_iter()
                    .enumerate()
                    .map(|(i, x)| match i < split {
                        true if x.is_finite() => json!(x),
                        true => Value::Null,
                        false => json!(x != 0.0),
                    })
                    .collect(),
            )
        })
        .collect();
    let doc = json!({
        "metadata": {
            "artifact_version": ARTIFACT_VERSION,
            "seed": series.scenario.seed,
            "scenario": series.scenario,
        },
        "columns": header,
        "rows": rows,
    });
    let mut out = serde_json::to_vec_pretty(&doc)?;
    out.push(b'\n');
    Ok(out)
}

/// Writes through a temporary file in the target directory and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(tmp.path(), e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

/// A parsed CSV export: header plus numeric rows (flags read as 0/1).
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

fn parse_float(s: &str) -> Result<f64> {
    match s {
        "NaN" => Ok(f64::NAN),
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => s.parse().map_err(|_| CliError::Config(format!("'{s}' is not a number"))),
    }
}

pub fn parse_csv(bytes: &[u8]) -> Result<Table> {
    let mut r = csv::Reader::from_reader(bytes);
    let header = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec?.iter().map(parse_float).collect::<Result<_>>()?);
    }
    Ok(Table { header, rows })
}

pub fn read_csv(path: &Path) -> Result<Table> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    parse_csv(&bytes)
}
