//! `key=value` run configuration.
//!
//! One assignment per line, `#` starts a comment, blank lines are ignored.
//! Every value is validated at parse time and errors name the line and key.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use dnls_core::field::gaussian_data;
use dnls_core::solver::BOUNDARY_GUARD;
use dnls_core::{Config64, Grid64, InitialData, Params64};
use sha2::{Digest, Sha256};

use crate::CliError;

const REQUIRED: [&str; 9] = ["d", "p", "lambda_re", "lambda_im", "n", "half_width", "dt", "t_end", "data.kind"];
const OPTIONAL: [&str; 8] = [
    "sample_every",
    "gammas",
    "snapshot_times",
    "boundary_guard",
    "data.amplitude",
    "data.width",
    "data.momentum",
    "data.path",
];

/// Keys that hold a list and so cannot be swept over.
pub const LIST_KEYS: [&str; 3] = ["gammas", "snapshot_times", "data.momentum"];

pub fn is_known_key(key: &str) -> bool {
    REQUIRED.contains(&key) || OPTIONAL.contains(&key)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}: {}", self.key, self.message),
            None => write!(f, "{}: {}", self.key, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// One `key=value` assignment with the line it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub line: Option<usize>,
    pub key: String,
    pub value: String,
}

/// Splits text into entries without interpreting values.
pub fn tokenize(text: &str) -> Result<Vec<Entry>, ConfigError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            return Err(ConfigError {
                line: Some(line),
                key: body.to_string(),
                message: "expected key=value".into(),
            });
        };
        out.push(Entry { line: Some(line), key: key.trim().to_string(), value: value.trim().to_string() });
    }
    Ok(out)
}

/// A validated configuration and its canonical key=value form.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedConfig {
    pub config: Config64,
    pub canonical: BTreeMap<String, String>,
}

impl ParsedConfig {
    /// Sorted `key=value` lines with every default filled in.
    pub fn canonical_text(&self) -> String {
        self.canonical.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    /// First 16 hex digits of the SHA-256 of the canonical text.
    pub fn run_id(&self) -> String {
        hash_id(&self.canonical_text())
    }
}

pub fn hash_id(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

pub fn parse_config(path: &Path) -> Result<ParsedConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    Ok(parse_config_str(&text, Some(base))?)
}

/// Relative `data.path` values are resolved against `base`, if given.
pub fn parse_config_str(text: &str, base: Option<&Path>) -> Result<ParsedConfig, ConfigError> {
    from_entries(&tokenize(text)?, base)
}

pub fn from_map(map: &BTreeMap<String, String>) -> Result<ParsedConfig, ConfigError> {
    let entries: Vec<_> =
        map.iter().map(|(k, v)| Entry { line: None, key: k.clone(), value: v.clone() }).collect();
    from_entries(&entries, None)
}

struct Lookup<'a> {
    entries: BTreeMap<&'a str, &'a Entry>,
}

impl<'a> Lookup<'a> {
    fn err(&self, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError { line: self.entries.get(key).and_then(|e| e.line), key: key.to_string(), message: message.into() }
    }

    fn raw(&self, key: &str) -> Option<&'a str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    fn required(&self, key: &str) -> Result<&'a str, ConfigError> {
        self.raw(key).ok_or_else(|| ConfigError { line: None, key: key.to_string(), message: "missing required key".into() })
    }

    fn real(&self, key: &str) -> Result<f64, ConfigError> {
        let raw = self.required(key)?;
        parse_real(raw).map_err(|m| self.err(key, m))
    }

    fn real_or(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.raw(key) {
            Some(raw) => parse_real(raw).map_err(|m| self.err(key, m)),
            None => Ok(default),
        }
    }

    fn integer(&self, key: &str) -> Result<usize, ConfigError> {
        let raw = self.required(key)?;
        raw.parse::<usize>().map_err(|_| self.err(key, format!("expected a nonnegative integer, got {raw:?}")))
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        let Some(raw) = self.raw(key) else { return Ok(None) };
        if raw.is_empty() {
            return Ok(Some(Vec::new()));
        }
        raw.split(',').map(|s| parse_real(s.trim()).map_err(|m| self.err(key, m))).collect::<Result<_, _>>().map(Some)
    }
}

fn parse_real(raw: &str) -> Result<f64, String> {
    match raw.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(format!("expected a finite number, got {raw:?}")),
    }
}

/// Shortest text that parses back to the same `f64`.
pub fn format_real(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    format!("{x}")
}

fn format_list(xs: &[f64]) -> String {
    xs.iter().map(|&x| format_real(x)).collect::<Vec<_>>().join(",")
}

pub fn from_entries(entries: &[Entry], base: Option<&Path>) -> Result<ParsedConfig, ConfigError> {
    let mut map = BTreeMap::new();
    for e in entries {
        if !is_known_key(&e.key) {
            return Err(ConfigError { line: e.line, key: e.key.clone(), message: "unknown key".into() });
        }
        if map.insert(e.key.as_str(), e).is_some() {
            return Err(ConfigError { line: e.line, key: e.key.clone(), message: "duplicate key".into() });
        }
    }
    let cfg = Lookup { entries: map };

    let d = cfg.integer("d")?;
    if !(d == 1 || d == 2) {
        return Err(cfg.err("d", format!("d must be 1 or 2, got {d}")));
    }
    let p = cfg.real("p")?;
    if p <= 1.0 {
        return Err(cfg.err("p", "p must exceed 1"));
    }
    let lambda_re = cfg.real("lambda_re")?;
    let lambda_im = cfg.real("lambda_im")?;
    if lambda_im >= 0.0 {
        return Err(cfg.err("lambda_im", "Im λ must be negative"));
    }
    let n = cfg.integer("n")?;
    if n < 8 || !n.is_power_of_two() {
        return Err(cfg.err("n", format!("n must be a power of two >= 8, got {n}")));
    }
    let half_width = cfg.real("half_width")?;
    if half_width <= 0.0 {
        return Err(cfg.err("half_width", "half_width must be positive"));
    }
    let grid = Grid64::new(d, n, half_width).map_err(|e| cfg.err("n", e.to_string()))?;
    let dt = cfg.real("dt")?;
    if dt <= 0.0 {
        return Err(cfg.err("dt", "dt must be positive"));
    }
    let t_end = cfg.real("t_end")?;
    if t_end < dt {
        return Err(cfg.err("t_end", "t_end must be at least dt"));
    }
    let sample_every = match cfg.raw("sample_every") {
        Some(_) => cfg.integer("sample_every")?,
        None => 10,
    };
    if sample_every == 0 {
        return Err(cfg.err("sample_every", "sample_every must be at least 1"));
    }
    let gammas = cfg.list("gammas")?.unwrap_or_else(|| vec![0.0, 1.0]);
    if gammas.iter().any(|&g| g < 0.0) {
        return Err(cfg.err("gammas", "every γ must be nonnegative"));
    }
    let snapshot_times = cfg.list("snapshot_times")?.unwrap_or_default();
    if snapshot_times.iter().any(|&t| t < 0.0 || t > t_end) {
        return Err(cfg.err("snapshot_times", "snapshot times must lie in [0, t_end]"));
    }
    let boundary_guard = cfg.real_or("boundary_guard", BOUNDARY_GUARD)?;
    if boundary_guard <= 0.0 {
        return Err(cfg.err("boundary_guard", "boundary_guard must be positive"));
    }

    let mut canonical = BTreeMap::new();
    let mut put = |k: &str, v: String| {
        canonical.insert(k.to_string(), v);
    };
    put("d", d.to_string());
    put("p", format_real(p));
    put("lambda_re", format_real(lambda_re));
    put("lambda_im", format_real(lambda_im));
    put("n", n.to_string());
    put("half_width", format_real(half_width));
    put("dt", format_real(dt));
    put("t_end", format_real(t_end));
    put("sample_every", sample_every.to_string());
    put("gammas", format_list(&gammas));
    put("boundary_guard", format_real(boundary_guard));
    if !snapshot_times.is_empty() {
        put("snapshot_times", format_list(&snapshot_times));
    }

    let kind = cfg.required("data.kind")?;
    let data = match kind {
        "gaussian" => {
            for key in ["data.path"] {
                if cfg.raw(key).is_some() {
                    return Err(cfg.err(key, "not used by data.kind=gaussian"));
                }
            }
            let amplitude = cfg.real("data.amplitude")?;
            let width = cfg.real("data.width")?;
            let momentum = cfg.list("data.momentum")?.unwrap_or_default();
            if !momentum.is_empty() && momentum.len() != d {
                return Err(cfg.err("data.momentum", format!("expected {d} components, got {}", momentum.len())));
            }
            gaussian_data(&grid, amplitude, width, &momentum).map_err(|e| cfg.err("data.width", e.to_string()))?;
            put("data.kind", "gaussian".into());
            put("data.amplitude", format_real(amplitude));
            put("data.width", format_real(width));
            if !momentum.is_empty() {
                put("data.momentum", format_list(&momentum));
            }
            InitialData::Gaussian { amplitude, width, momentum }
        }
        "snapshot" => {
            for key in ["data.amplitude", "data.width", "data.momentum"] {
                if cfg.raw(key).is_some() {
                    return Err(cfg.err(key, "not used by data.kind=snapshot"));
                }
            }
            let raw = PathBuf::from(cfg.required("data.path")?);
            let path = match base {
                Some(b) if raw.is_relative() => b.join(raw),
                _ => raw,
            };
            put("data.kind", "snapshot".into());
            put("data.path", path.display().to_string());
            InitialData::Snapshot(path)
        }
        other => return Err(cfg.err("data.kind", format!("expected gaussian or snapshot, got {other:?}"))),
    };

    let params = Params64::new(d as u32, p, lambda_re, lambda_im).map_err(|e| cfg.err("p", e.to_string()))?;
    let mut config = Config64::new(params, grid, data, dt, t_end);
    config.sample_every = sample_every;
    config.gammas = gammas;
    config.snapshot_times = snapshot_times;
    config.boundary_guard = boundary_guard;
    Ok(ParsedConfig { config, canonical })
}
