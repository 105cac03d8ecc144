//! Self-describing result rows and their CSV form.
//!
//! Columns are `experiment, seed, code_version`, then every input as
//! `in:<name>` and every output as `out:<name>`. The first line is a `#`
//! comment pointing at the run manifest. Numbers are written in Rust's
//! shortest round-trip form, so parsing a file gives back the exact values.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{CliError, Result};

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Num(f64),
    Text(String),
}

impl Value {
    pub fn num(&self) -> Option<f64> {
        match self {
            Value::Num(x) => Some(*x),
            Value::Text(_) => None,
        }
    }

    fn parse(s: &str) -> Self {
        match s.parse::<f64>() {
            Ok(x) if !s.is_empty() => Value::Num(x),
            _ => Value::Text(s.to_string()),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Num(x) => write!(f, "{x}"),
            Value::Text(s) => f.write_str(s),
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Num(x)
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Num(x as f64)
    }
}

impl From<bool> for Value {
    fn from(x: bool) -> Self {
        Value::Text(x.to_string())
    }
}

impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Value::Text(x.to_string())
    }
}

impl From<String> for Value {
    fn from(x: String) -> Self {
        Value::Text(x)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultRecord {
    pub experiment: String,
    pub seed: u64,
    pub code_version: String,
    pub inputs: Vec<(String, Value)>,
    pub outputs: Vec<(String, Value)>,
}

impl ResultRecord {
    pub fn input(&self, name: &str) -> Option<&Value> {
        self.inputs.iter().find(|(k, _)| k == name).map(|(_, v)| v)
    }

    pub fn output(&self, name: &str) -> Option<&Value> {
        self.outputs.iter().find(|(k, _)| k == name).map(|(_, v)| v)
    }

    fn header(&self) -> Vec<String> {
        let mut h = vec!["experiment".to_string(), "seed".to_string(), "code_version".to_string()];
        h.extend(self.inputs.iter().map(|(k, _)| format!("in:{k}")));
        h.extend(self.outputs.iter().map(|(k, _)| format!("out:{k}")));
        h
    }
}

/// One CSV file worth of rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub records: Vec<ResultRecord>,
}

impl Table {
    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }
}

pub fn write_csv<W: Write>(out: W, records: &[ResultRecord]) -> Result<()> {
    let mut out = out;
    writeln!(out, "# manifest={MANIFEST_FILE}")?;
    let mut w = csv::Writer::from_writer(out);
    let Some(first) = records.first() else {
        return Ok(());
    };
    let header = first.header();
    w.write_record(&header)?;
    for r in records {
        if r.header() != header {
            return Err(CliError::Format(format!(
                "row columns {:?} differ from the header {:?}",
                r.header(),
                header
            )));
        }
        let mut row = vec![r.experiment.clone(), r.seed.to_string(), r.code_version.clone()];
        row.extend(r.inputs.iter().chain(&r.outputs).map(|(_, v)| v.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<ResultRecord>> {
    let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header.len() < 3 || header[..3] != ["experiment", "seed", "code_version"] {
        return Err(CliError::Format(format!("unexpected leading columns {header:?}")));
    }
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row?;
        let seed = row[1]
            .parse::<u64>()
            .map_err(|_| CliError::Format(format!("bad seed {:?}", &row[1])))?;
        let mut rec = ResultRecord {
            experiment: row[0].to_string(),
            seed,
            code_version: row[2].to_string(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        };
        for (h, cell) in header.iter().zip(row.iter()).skip(3) {
            if let Some(k) = h.strip_prefix("in:") {
                rec.inputs.push((k.to_string(), Value::parse(cell)));
            } else if let Some(k) = h.strip_prefix("out:") {
                rec.outputs.push((k.to_string(), Value::parse(cell)));
            } else {
                return Err(CliError::Format(format!("column {h:?} is neither in: nor out:")));
            }
        }
        out.push(rec);
    }
    Ok(out)
}

pub fn read_csv_file(path: &Path) -> Result<Vec<ResultRecord>> {
    read_csv(std::fs::File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(x: f64) -> ResultRecord {
        ResultRecord {
            experiment: "demo".into(),
            seed: 7,
            code_version: CODE_VERSION.into(),
            inputs: vec![("lambda".into(), x.into()), ("family".into(), "nme".into())],
            outputs: vec![("ggm".into(), (x * x / 3.0).into()), ("flat".into(), true.into())],
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let rows: Vec<_> = [0.1, 2.0 / 3.0, 1e-300, -0.0, 12345.678901234567]
            .into_iter()
            .map(rec)
            .collect();
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# manifest=manifest.json\n"));
        assert_eq!(read_csv(&buf[..]).unwrap(), rows);
    }

    #[test]
    fn mismatched_rows_are_rejected() {
        let mut b = rec(0.2);
        b.outputs.pop();
        assert!(write_csv(Vec::new(), &[rec(0.1), b]).is_err());
    }
}
