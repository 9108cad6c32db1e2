//! CSV tables and the JSON metadata sidecar.

use std::path::{Path, PathBuf};

use ccrenorm::{Error, Real};
use serde_json::{Map, Value};

use crate::CliError;

/// Result of one subcommand before serialization.
#[derive(Debug)]
pub struct Outcome {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub certified_depth: usize,
    pub tolerances: Map<String, Value>,
    pub summary: Map<String, Value>,
    /// Error that stopped the run early; the rows are still certified.
    pub halted: Option<Error>,
}

impl Outcome {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            rows: Vec::new(),
            certified_depth: 0,
            tolerances: Map::new(),
            summary: Map::new(),
            halted: None,
        }
    }

    /// Empty table for a run that failed before certifying anything.
    pub fn failed(header: Vec<&'static str>, err: Error) -> Self {
        Self {
            halted: Some(err),
            ..Self::new(header)
        }
    }
}

/// Decimal rendering at `bits/4` significant digits.
pub fn real<T: Real>(x: &T) -> String {
    x.to_sci(T::BITS as usize / 4)
}

/// `f64`-valued quantities carry at most 17 significant digits.
pub fn float<T: Real>(x: f64) -> String {
    x.to_sci((T::BITS as usize / 4).min(17))
}

pub fn opt_real<T: Real>(x: Option<&T>) -> String {
    x.map(real).unwrap_or_default()
}

pub fn opt_float<T: Real>(x: Option<f64>) -> String {
    x.map(float::<T>).unwrap_or_default()
}

/// JSON number, or null for non-finite values.
pub fn json_f64(x: Option<f64>) -> Value {
    x.and_then(serde_json::Number::from_f64)
        .map_or(Value::Null, Value::Number)
}

pub fn paths(stem: &Path) -> (PathBuf, PathBuf) {
    let with = |ext: &str| {
        let mut s = stem.as_os_str().to_owned();
        s.push(ext);
        PathBuf::from(s)
    };
    (with(".csv"), with(".meta.json"))
}

pub fn write_csv(path: &Path, outcome: &Outcome) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(io)?;
    w.write_record(&outcome.header).map_err(io)?;
    for row in &outcome.rows {
        w.write_record(row).map_err(io)?;
    }
    w.flush()
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_meta(path: &Path, meta: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(meta).expect("metadata serializes");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
