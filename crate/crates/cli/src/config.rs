//! Run configuration: values from an optional config file overlaid by
//! command-line flags, with typed accessors that record every default they
//! hand out so the effective configuration can be written next to the data.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use crate::range::{parse_integers, parse_values};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Keys every subcommand accepts in addition to its own.
pub const COMMON_KEYS: &[&str] = &["output", "format", "threads"];

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: String,
    values: BTreeMap<String, String>,
    allowed: Vec<&'static str>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('_', "-")
}

/// Parses a flat `key = value` file or a JSON object into string values.
pub fn parse_config_text(text: &str, origin: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let err = |message: String| ConfigError {
        path: origin.to_string(),
        message,
    };
    if text.trim_start().starts_with('{') {
        let json: serde_json::Value = serde_json::from_str(text).map_err(|e| err(format!("invalid JSON: {e}")))?;
        let obj = json.as_object().ok_or_else(|| err("top level must be an object".into()))?;
        let mut out = Vec::new();
        for (k, v) in obj {
            let path = format!("{origin}.{k}");
            let s = json_scalar(v).ok_or_else(|| ConfigError {
                path,
                message: "expected a number, string, boolean or array of numbers".into(),
            })?;
            out.push((normalize(k), s));
        }
        return Ok(out);
    }
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| err(format!("line {}: expected `key = value`", i + 1)))?;
        out.push((normalize(k), v.trim().to_string()));
    }
    Ok(out)
}

fn json_scalar(v: &serde_json::Value) -> Option<String> {
    use serde_json::Value;
    match v {
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Array(items) => {
            let parts: Option<Vec<String>> = items.iter().map(|x| if x.is_array() { None } else { json_scalar(x) }).collect();
            parts.map(|p| p.join(","))
        }
        _ => None,
    }
}

impl RunConfig {
    /// File values first, then flags; any key outside `allowed` is rejected.
    pub fn build(command: &str, allowed: &[&'static str], file: Vec<(String, String)>, flags: Vec<(String, String)>) -> Result<Self, ConfigError> {
        let mut allowed_all: Vec<&'static str> = allowed.to_vec();
        allowed_all.extend_from_slice(COMMON_KEYS);
        let mut values = BTreeMap::new();
        for (k, v) in file.into_iter().chain(flags) {
            if !allowed_all.contains(&k.as_str()) {
                return Err(ConfigError {
                    path: format!("{command}.{k}"),
                    message: format!("unknown key for `{command}`"),
                });
            }
            values.insert(k, v);
        }
        Ok(RunConfig {
            command: command.to_string(),
            values,
            allowed: allowed_all,
        })
    }

    pub fn read_file(path: &Path) -> Result<Vec<(String, String)>, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            path: path.display().to_string(),
            message: format!("cannot read config file: {e}"),
        })?;
        parse_config_text(&text, &path.display().to_string())
    }

    fn err(&self, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError {
            path: format!("{}.{key}", self.command),
            message: message.into(),
        }
    }

    fn raw(&self, key: &str) -> Option<&str> {
        debug_assert!(self.allowed.contains(&key), "key `{key}` not declared");
        self.values.get(key).map(String::as_str)
    }

    fn set_default(&mut self, key: &str, value: String) {
        self.values.entry(key.to_string()).or_insert(value);
    }

    pub fn entries(&self) -> impl Iterator<Item = (&String, &String)> {
        self.values.iter()
    }

    pub fn string_or(&mut self, key: &str, default: &str) -> String {
        self.set_default(key, default.to_string());
        self.values[key].clone()
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some(s) => {
                let v: f64 = s.trim().parse().map_err(|_| self.err(key, format!("cannot parse number `{s}`")))?;
                if !v.is_finite() {
                    return Err(self.err(key, "must be finite"));
                }
                Ok(Some(v))
            }
        }
    }

    pub fn req_f64(&self, key: &str) -> Result<f64, ConfigError> {
        self.opt_f64(key)?.ok_or_else(|| self.err(key, "missing required value"))
    }

    pub fn f64_or(&mut self, key: &str, default: f64) -> Result<f64, ConfigError> {
        self.set_default(key, default.to_string());
        self.req_f64(key)
    }

    pub fn positive_f64_or(&mut self, key: &str, default: f64) -> Result<f64, ConfigError> {
        let v = self.f64_or(key, default)?;
        if v <= 0.0 {
            return Err(self.err(key, "must be positive"));
        }
        Ok(v)
    }

    pub fn opt_usize(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some(s) => s.trim().parse().map(Some).map_err(|_| self.err(key, format!("expected a non-negative integer, got `{s}`"))),
        }
    }

    pub fn req_usize(&self, key: &str) -> Result<usize, ConfigError> {
        self.opt_usize(key)?.ok_or_else(|| self.err(key, "missing required value"))
    }

    pub fn usize_or(&mut self, key: &str, default: usize) -> Result<usize, ConfigError> {
        self.set_default(key, default.to_string());
        self.req_usize(key)
    }

    pub fn bool_or(&mut self, key: &str, default: bool) -> Result<bool, ConfigError> {
        self.set_default(key, default.to_string());
        match self.raw(key).unwrap().trim() {
            "true" | "1" | "yes" => Ok(true),
            "false" | "0" | "no" => Ok(false),
            other => Err(self.err(key, format!("expected true or false, got `{other}`"))),
        }
    }

    pub fn req_list(&self, key: &str) -> Result<Vec<f64>, ConfigError> {
        let s = self.raw(key).ok_or_else(|| self.err(key, "missing required value"))?;
        parse_values(s).map_err(|m| self.err(key, m))
    }

    pub fn list_or(&mut self, key: &str, default: &str) -> Result<Vec<f64>, ConfigError> {
        self.set_default(key, default.to_string());
        self.req_list(key)
    }

    pub fn int_list_or(&mut self, key: &str, default: &str) -> Result<Vec<i64>, ConfigError> {
        self.set_default(key, default.to_string());
        parse_integers(self.raw(key).unwrap()).map_err(|m| self.err(key, m))
    }

    pub fn format(&mut self) -> Result<Format, ConfigError> {
        match self.string_or("format", "csv").to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(self.err("format", format!("expected csv or json, got `{other}`"))),
        }
    }

    pub fn output(&self) -> Option<PathBuf> {
        self.raw("output").filter(|s| *s != "-").map(PathBuf::from)
    }

    pub fn threads(&self) -> Result<Option<usize>, ConfigError> {
        let n = self.opt_usize("threads")?;
        if n == Some(0) {
            return Err(self.err("threads", "must be positive"));
        }
        Ok(n)
    }

    /// Turns a library parameter error into a config error on the same key.
    pub fn invalid(&self, key: &str, message: impl Into<String>) -> ConfigError {
        self.err(key, message)
    }
}
