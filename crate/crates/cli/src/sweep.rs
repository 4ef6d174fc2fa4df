//! Parameter sweeps: a base configuration, named axes of overrides, and a
//! summary table with one row per run.
//!
//! A sweep spec is a run configuration plus
//!
//! ```text
//! sweep.p = 1.5,2,2.5
//! sweep.data.amplitude = 0.5,1
//! parallelism = 4
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use dnls_core::exponents::{decay_exponent, DecayExponent};
use dnls_core::verify::{find_min_gamma, rate_fit, RateMode, Status};
use dnls_core::Series64;
use rayon::prelude::*;

use crate::config::{from_entries, hash_id, is_known_key, tokenize, ConfigError, Entry, LIST_KEYS};
use crate::run::run_to_dir;
use crate::series_csv::format_value;
use crate::CliError;

pub const MAX_SWEEP_RUNS: usize = 10_000;
pub const SUMMARY_FILE: &str = "summary.csv";

/// Check columns of the summary, in report order.
pub const CHECK_COLUMNS: [&str; 11] = [
    "exponent_identities",
    "boundary_guard",
    "mass_monotone",
    "mass_identity",
    "min_gamma",
    "augmented_monotone",
    "gradient_no_late_growth",
    "virial",
    "virial_linear",
    "decay_rate",
    "critical_compensated",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub key: String,
    pub line: Option<usize>,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: Vec<Entry>,
    pub axes: Vec<Axis>,
    pub parallelism: usize,
}

impl SweepSpec {
    pub fn size(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    /// Every combination, first axis slowest.
    pub fn points(&self) -> Vec<Vec<(String, String)>> {
        let mut points = vec![Vec::new()];
        for axis in &self.axes {
            points = points
                .into_iter()
                .flat_map(|pt: Vec<(String, String)>| {
                    axis.values.iter().map(move |v| {
                        let mut next = pt.clone();
                        next.push((axis.key.clone(), v.clone()));
                        next
                    })
                })
                .collect();
        }
        points
    }
}

pub fn parse_sweep_str(text: &str) -> Result<SweepSpec, ConfigError> {
    let mut base = Vec::new();
    let mut axes: Vec<Axis> = Vec::new();
    let mut parallelism = None;
    for e in tokenize(text)? {
        let err = |message: String| ConfigError { line: e.line, key: e.key.clone(), message };
        if e.key == "parallelism" {
            match e.value.parse::<usize>() {
                Ok(n) if n >= 1 && parallelism.is_none() => parallelism = Some(n),
                Ok(n) if n >= 1 => return Err(err("duplicate key".into())),
                _ => return Err(err(format!("expected an integer >= 1, got {:?}", e.value))),
            }
        } else if let Some(key) = e.key.strip_prefix("sweep.") {
            if !is_known_key(key) {
                return Err(err("unknown key".into()));
            }
            if LIST_KEYS.contains(&key) {
                return Err(err("list-valued keys cannot be swept".into()));
            }
            if axes.iter().any(|a| a.key == key) {
                return Err(err("duplicate key".into()));
            }
            let values: Vec<String> = e.value.split(',').map(|v| v.trim().to_string()).collect();
            if values.iter().any(String::is_empty) {
                return Err(err("empty axis value".into()));
            }
            let mut sorted = values.clone();
            sorted.sort();
            sorted.dedup();
            if sorted.len() != values.len() {
                return Err(err("repeated axis value".into()));
            }
            axes.push(Axis { key: key.to_string(), line: e.line, values });
        } else {
            base.push(e);
        }
    }
    let spec = SweepSpec { base, axes, parallelism: parallelism.unwrap_or(1) };
    let size = spec.axes.iter().try_fold(1usize, |acc, a| acc.checked_mul(a.values.len()));
    if size.is_none_or(|s| s > MAX_SWEEP_RUNS) {
        return Err(ConfigError {
            line: None,
            key: "sweep".into(),
            message: format!("cross product exceeds {MAX_SWEEP_RUNS} runs"),
        });
    }
    Ok(spec)
}

pub fn parse_sweep(path: &Path) -> Result<SweepSpec, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(parse_sweep_str(&text)?)
}

/// Workers used for `requested`, capped by `DNLS_THREADS` when set.
pub fn effective_parallelism(requested: usize) -> usize {
    let cap = std::env::var("DNLS_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&n| n >= 1);
    cap.map_or(requested, |c| requested.min(c)).max(1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub run_id: String,
    pub axis_values: Vec<String>,
    /// `completed`, `aborted` or `error`.
    pub status: String,
    pub regime: String,
    pub kappa_theory: Option<f64>,
    pub fitted_slope: Option<f64>,
    pub min_gamma: Option<f64>,
    pub sup_grad: Option<f64>,
    pub checks: BTreeMap<String, Status>,
    pub error: Option<String>,
}

fn fitted_slope(series: &Series64, critical: bool) -> Option<f64> {
    let t_end = series.config.t_end;
    let (mode, t_min) = if critical { (RateMode::Critical, (t_end / 10.0).max(1.0)) } else { (RateMode::Subcritical, t_end / 10.0) };
    rate_fit(series, mode, (t_min, t_end)).ok().map(|f| f.slope)
}

fn run_point(spec: &SweepSpec, point: &[(String, String)], out: &Path) -> SummaryRow {
    let axis_values: Vec<String> = point.iter().map(|(_, v)| v.clone()).collect();
    let mut entries: Vec<Entry> = spec.base.iter().filter(|e| !point.iter().any(|(k, _)| *k == e.key)).cloned().collect();
    for (axis, (key, value)) in spec.axes.iter().zip(point) {
        entries.push(Entry { line: axis.line, key: key.clone(), value: value.clone() });
    }
    let failed = |run_id: String, error: String| SummaryRow {
        run_id,
        axis_values: axis_values.clone(),
        status: "error".into(),
        regime: "NA".into(),
        kappa_theory: None,
        fitted_slope: None,
        min_gamma: None,
        sup_grad: None,
        checks: BTreeMap::new(),
        error: Some(error),
    };
    let parsed = match from_entries(&entries, None) {
        Ok(p) => p,
        Err(e) => {
            let raw: String = point.iter().map(|(k, v)| format!("{k}={v}\n")).collect();
            return failed(hash_id(&format!("invalid\n{raw}")), e.to_string());
        }
    };
    let run_id = parsed.run_id();
    let outcome = match run_to_dir(&parsed, &out.join("runs").join(&run_id)) {
        Ok(o) => o,
        Err(e) => return failed(run_id, e.to_string()),
    };
    let params = &parsed.config.params;
    let (regime, kappa, critical) = match decay_exponent(params) {
        Ok(DecayExponent::Subcritical { kappa }) => ("subcritical", Some(kappa), false),
        Ok(DecayExponent::Critical { .. }) => ("critical", None, true),
        Err(_) => ("supercritical", None, false),
    };
    let series = &outcome.series;
    let tol = 10.0 * parsed.config.dt * parsed.config.dt;
    SummaryRow {
        run_id,
        axis_values,
        status: if outcome.aborted.is_some() { "aborted" } else { "completed" }.into(),
        regime: regime.into(),
        kappa_theory: kappa,
        fitted_slope: if regime == "supercritical" { None } else { fitted_slope(series, critical) },
        min_gamma: if series.is_empty() { None } else { find_min_gamma(series, tol).gamma },
        sup_grad: series.records.iter().map(|r| r.grad).reduce(f64::max),
        checks: outcome.checks.iter().map(|l| (l.name.to_string(), l.status)).collect(),
        error: outcome.aborted,
    }
}

pub fn summary_header(spec: &SweepSpec) -> String {
    let mut cols = vec!["run_id".to_string()];
    cols.extend(spec.axes.iter().map(|a| a.key.clone()));
    cols.extend(["status", "regime", "kappa_theory", "fitted_slope", "min_gamma", "sup_grad"].map(String::from));
    cols.extend(CHECK_COLUMNS.map(String::from));
    cols.push("note".into());
    cols.join(",")
}

fn csv_cell(text: &str) -> String {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\"").replace('\n', " "))
    } else {
        text.to_string()
    }
}

impl SummaryRow {
    pub fn to_csv(&self) -> String {
        let num = |x: Option<f64>| x.map_or("NA".to_string(), format_value);
        let mut cells = vec![self.run_id.clone()];
        cells.extend(self.axis_values.iter().map(|v| csv_cell(v)));
        cells.push(self.status.clone());
        cells.push(self.regime.clone());
        cells.extend([num(self.kappa_theory), num(self.fitted_slope), num(self.min_gamma), num(self.sup_grad)]);
        cells.extend(CHECK_COLUMNS.iter().map(|c| self.checks.get(*c).map_or("NA".to_string(), |s| s.to_string())));
        cells.push(self.error.as_deref().map_or(String::new(), csv_cell));
        cells.join(",")
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub rows: Vec<SummaryRow>,
    pub workers: usize,
    pub summary: String,
}

/// Runs every point with at most `spec.parallelism` workers (capped by
/// `DNLS_THREADS`) and writes `summary.csv`, rows sorted by run id.
pub fn run_sweep(spec: &SweepSpec, out: &Path) -> Result<SweepOutcome, CliError> {
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let workers = effective_parallelism(spec.parallelism);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Setup(format!("thread pool: {e}")))?;
    let points = spec.points();
    let mut rows: Vec<SummaryRow> = pool.install(|| points.par_iter().map(|pt| run_point(spec, pt, out)).collect());
    rows.sort_by(|a, b| a.run_id.cmp(&b.run_id).then_with(|| a.axis_values.cmp(&b.axis_values)));
    let mut summary = summary_header(spec);
    summary.push('\n');
    for row in &rows {
        summary.push_str(&row.to_csv());
        summary.push('\n');
    }
    let path = out.join(SUMMARY_FILE);
    fs::write(&path, &summary).map_err(|e| CliError::io(&path, e))?;
    Ok(SweepOutcome { rows, workers, summary })
}
