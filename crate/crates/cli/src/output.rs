//! Tables and their CSV / JSON serialization, written atomically.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Missing,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Missing, Into::into)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format_num(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) if s.contains(',') || s.contains('"') => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => num_json(*v),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Missing => Value::Null,
        }
    }
}

/// Shortest round-trip representation.
pub fn format_num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:e}")
    }
}

pub fn num_json(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width differs from header");
        self.rows.push(row);
    }
}

/// Everything a subcommand produces.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub table: Table,
    /// Scalar results (fits, totals); emitted in the metadata and the fit JSON.
    pub results: Map<String, Value>,
    /// Structured side data written only to JSON outputs.
    pub extra: Map<String, Value>,
    pub summary: String,
    /// Largest achieved error estimate, if the command has one.
    pub error_estimate: Option<f64>,
    pub converged: bool,
}

impl Outcome {
    pub fn new(table: Table) -> Self {
        Outcome {
            table,
            results: Map::new(),
            extra: Map::new(),
            summary: String::new(),
            error_estimate: None,
            converged: true,
        }
    }

    pub fn result(&mut self, key: &str, value: impl Into<ResultValue>) {
        self.results.insert(key.to_string(), value.into().0);
    }

    pub fn note_error(&mut self, e: f64) {
        self.error_estimate = Some(self.error_estimate.map_or(e, |x| x.max(e)));
    }
}

pub struct ResultValue(Value);

impl From<f64> for ResultValue {
    fn from(v: f64) -> Self {
        ResultValue(num_json(v))
    }
}

impl From<usize> for ResultValue {
    fn from(v: usize) -> Self {
        ResultValue(json!(v))
    }
}

impl From<bool> for ResultValue {
    fn from(v: bool) -> Self {
        ResultValue(json!(v))
    }
}

impl From<&str> for ResultValue {
    fn from(v: &str) -> Self {
        ResultValue(json!(v))
    }
}

impl From<Option<f64>> for ResultValue {
    fn from(v: Option<f64>) -> Self {
        ResultValue(v.map_or(Value::Null, num_json))
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(n) if n.is_f64() => format_num(n.as_f64().unwrap_or(f64::NAN)),
        other => other.to_string(),
    }
}

pub fn render_csv(cfg: &RunConfig, out: &Outcome) -> String {
    let mut s = String::new();
    s.push_str(&out.table.columns.join(","));
    s.push('\n');
    for row in &out.table.rows {
        let cells: Vec<String> = row.iter().map(Cell::csv).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s.push_str(&format!("# command={}\n", cfg.command));
    for (k, v) in cfg.entries() {
        s.push_str(&format!("# {k}={v}\n"));
    }
    for (k, v) in &out.results {
        s.push_str(&format!("# result.{k}={}\n", scalar_text(v)));
    }
    s.push_str(&format!("# converged={}\n", out.converged));
    s
}

fn config_json(cfg: &RunConfig) -> Value {
    Value::Object(cfg.entries().map(|(k, v)| (k.clone(), json!(v))).collect())
}

pub fn render_json(cfg: &RunConfig, out: &Outcome) -> String {
    let rows: Vec<Value> = out.table.rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
    let doc = json!({
        "command": cfg.command,
        "config": config_json(cfg),
        "columns": out.table.columns,
        "rows": rows,
        "results": out.results,
        "extra": out.extra,
        "converged": out.converged,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s
}

/// Companion document holding fit results next to a CSV table.
pub fn render_fit_json(cfg: &RunConfig, out: &Outcome) -> String {
    let doc = json!({
        "command": cfg.command,
        "config": config_json(cfg),
        "results": out.results,
        "extra": out.extra,
        "converged": out.converged,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s
}

/// `table.csv` → `table.fit.json`.
pub fn fit_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.fit.json"))
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Returns the list of files written (empty when printing to stdout).
pub fn emit(cfg: &RunConfig, format: Format, out: &Outcome) -> std::io::Result<Vec<PathBuf>> {
    let body = match format {
        Format::Csv => render_csv(cfg, out),
        Format::Json => render_json(cfg, out),
    };
    match cfg.output() {
        None => {
            std::io::stdout().lock().write_all(body.as_bytes())?;
            Ok(Vec::new())
        }
        Some(path) => {
            write_atomic(&path, &body)?;
            let mut written = vec![path.clone()];
            if format == Format::Csv && (!out.results.is_empty() || !out.extra.is_empty()) {
                let fp = fit_path(&path);
                write_atomic(&fp, &render_fit_json(cfg, out))?;
                written.push(fp);
            }
            Ok(written)
        }
    }
}
