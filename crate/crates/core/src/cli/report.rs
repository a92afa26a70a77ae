use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde_json::{Map, Number, Value as Json};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::param(format!("unknown format {other:?}"))),
        }
    }
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// One report cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Int(i64),
    Uint(u64),
    Float(f64),
    Text(String),
    Null,
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Uint(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Uint(v as u64)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(v: Option<T>) -> Self {
        v.map_or(Value::Null, Into::into)
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

impl Value {
    fn csv_cell(&self) -> String {
        match self {
            Value::Int(v) => v.to_string(),
            Value::Uint(v) => v.to_string(),
            Value::Float(v) => format_float(*v),
            Value::Text(s) => s.clone(),
            Value::Null => String::new(),
        }
    }

    fn json(&self) -> Json {
        match self {
            Value::Int(v) => Json::from(*v),
            Value::Uint(v) => Json::from(*v),
            Value::Float(v) if v.is_finite() => {
                Json::Number(Number::from_str(&format_float(*v)).expect("formatted float is valid JSON"))
            }
            Value::Float(_) | Value::Null => Json::Null,
            Value::Text(s) => Json::String(s.clone()),
        }
    }
}

/// A table with a fixed column list.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Report {
    pub fn new(columns: &[&str]) -> Self {
        Report {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::param(format!(
                "record has {} values for {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn to_bytes(&self, format: Format) -> Result<Vec<u8>> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns).map_err(csv_err)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Value::csv_cell)).map_err(csv_err)?;
                }
                w.into_inner().map_err(|e| Error::Io(e.to_string()))
            }
            Format::Json => {
                let records: Vec<Json> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Json> =
                            self.columns.iter().cloned().zip(row.iter().map(Value::json)).collect();
                        Json::Object(obj)
                    })
                    .collect();
                let mut out = serde_json::to_vec_pretty(&records).map_err(|e| Error::Io(e.to_string()))?;
                out.push(b'\n');
                Ok(out)
            }
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Writes `bytes` to `path` through a temporary file in the same directory
/// and a rename, so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    if !dir.is_dir() {
        fs::create_dir_all(dir)?;
    }
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error.to_string()))?;
    Ok(())
}

pub fn emit_report(report: &Report, format: Format, path: &Path) -> Result<()> {
    write_atomic(path, &report.to_bytes(format)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new(&["name", "count", "x"]);
        r.push(vec!["a,\"b\"".into(), 3u64.into(), 0.1.into()]).unwrap();
        r.push(vec!["plain".into(), Value::Null, f64::NAN.into()]).unwrap();
        r
    }

    #[test]
    fn header_only_csv() {
        let r = Report::new(&["a", "b"]);
        assert_eq!(String::from_utf8(r.to_bytes(Format::Csv).unwrap()).unwrap(), "a,b\n");
    }

    #[test]
    fn csv_quoting_and_digits() {
        let text = String::from_utf8(sample().to_bytes(Format::Csv).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "name,count,x");
        assert_eq!(lines[1], "\"a,\"\"b\"\"\",3,1.0000000000000001e-1");
        assert_eq!(lines[2], "plain,,NaN");
    }

    #[test]
    fn json_round_trip() {
        let mut r = Report::new(&["x", "n"]);
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 12345.678] {
            r.push(vec![x.into(), (-4i64).into()]).unwrap();
        }
        let parsed: Vec<Json> = serde_json::from_slice(&r.to_bytes(Format::Json).unwrap()).unwrap();
        for (row, obj) in r.rows.iter().zip(&parsed) {
            let Value::Float(x) = row[0] else { unreachable!() };
            assert_eq!(obj["x"].as_f64().unwrap(), x);
            assert_eq!(obj["n"].as_i64().unwrap(), -4);
        }
        let nan: Vec<Json> = serde_json::from_slice(&sample().to_bytes(Format::Json).unwrap()).unwrap();
        assert!(nan[1]["x"].is_null());
        assert!(nan[1]["count"].is_null());
    }

    #[test]
    fn mismatched_row_rejected() {
        let mut r = Report::new(&["a"]);
        assert!(r.push(vec![1u64.into(), 2u64.into()]).is_err());
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub").join("r.csv");
        emit_report(&sample(), Format::Csv, &p).unwrap();
        emit_report(&Report::new(&["z"]), Format::Csv, &p).unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "z\n");
        assert_eq!(fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
