//! Single runs: evolve a configuration and persist CSV, manifest and snapshots.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use dnls_core::solver::{evolve, EvolveError};
use dnls_core::verify::{run_suite, CheckLine, Status};
use dnls_core::Series64;
use serde::{Deserialize, Serialize};

use crate::config::{from_map, ParsedConfig};
use crate::series_csv::{read_series, write_series, LoadedSeries};
use crate::CliError;

pub const SERIES_FILE: &str = "series.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const REPORT_FILE: &str = "report.txt";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub name: String,
    pub status: String,
    /// `None` when not finite.
    pub measured: Option<f64>,
    pub tolerance: Option<f64>,
}

impl From<&CheckLine> for CheckSummary {
    fn from(l: &CheckLine) -> Self {
        let finite = |x: f64| x.is_finite().then_some(x);
        Self { name: l.name.to_string(), status: l.status.to_string(), measured: finite(l.measured), tolerance: finite(l.tolerance) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub run_id: String,
    pub config: BTreeMap<String, String>,
    /// Seconds since the Unix epoch.
    pub start_time: f64,
    pub end_time: f64,
    pub version: String,
    pub samples: usize,
    pub aborted: Option<String>,
    pub checks: Vec<CheckSummary>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub run_id: String,
    pub series: Series64,
    pub aborted: Option<String>,
    pub checks: Vec<CheckLine>,
}

impl RunOutcome {
    /// 0 on a completed run, 2 on an abort.
    pub fn exit_code(&self) -> i32 {
        if self.aborted.is_some() {
            2
        } else {
            0
        }
    }

    pub fn failed_checks(&self) -> usize {
        self.checks.iter().filter(|l| l.status == Status::Fail).count()
    }
}

fn now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64())
}

/// Evolves `parsed` and writes `series.csv`, `manifest.json` and any
/// `snapshot_<k>.bin` into `dir`.
pub fn run_to_dir(parsed: &ParsedConfig, dir: &Path) -> Result<RunOutcome, CliError> {
    let start_time = now();
    let (series, aborted) = match evolve(&parsed.config) {
        Ok(series) => (series, None),
        Err(EvolveError::Aborted { reason, partial }) => (*partial, Some(reason.to_string())),
        Err(EvolveError::Setup(e)) => return Err(CliError::Setup(e.to_string())),
    };
    let checks = if series.is_empty() { Vec::new() } else { run_suite(&series) };
    let end_time = now();

    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let csv_path = dir.join(SERIES_FILE);
    fs::write(&csv_path, write_series(&series, aborted.as_deref())).map_err(|e| CliError::io(&csv_path, e))?;
    for (k, snap) in series.snapshots.iter().enumerate() {
        let path = dir.join(format!("snapshot_{k}.bin"));
        let mut buf = Vec::new();
        snap.write_snapshot(&mut buf).map_err(|e| CliError::io(&path, e))?;
        fs::write(&path, buf).map_err(|e| CliError::io(&path, e))?;
    }
    let run_id = parsed.run_id();
    let manifest = RunManifest {
        run_id: run_id.clone(),
        config: parsed.canonical.clone(),
        start_time,
        end_time,
        version: env!("CARGO_PKG_VERSION").to_string(),
        samples: series.len(),
        aborted: aborted.clone(),
        checks: checks.iter().map(CheckSummary::from).collect(),
    };
    let path = dir.join(MANIFEST_FILE);
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Format(e.to_string()))?;
    fs::write(&path, json + "\n").map_err(|e| CliError::io(&path, e))?;
    Ok(RunOutcome { run_id, series, aborted, checks })
}

/// A run directory read back from disk.
#[derive(Debug, Clone)]
pub struct StoredRun {
    pub manifest: RunManifest,
    pub config: ParsedConfig,
    pub loaded: LoadedSeries,
}

pub fn load_run(dir: &Path) -> Result<StoredRun, CliError> {
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    let manifest: RunManifest =
        serde_json::from_str(&text).map_err(|e| CliError::Format(format!("{}: {e}", path.display())))?;
    let config = from_map(&manifest.config).map_err(|e| CliError::Format(format!("{}: config {e}", path.display())))?;
    let path = dir.join(SERIES_FILE);
    let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    let loaded = read_series(&text, &config.config).map_err(|e| CliError::Format(format!("{}: {e}", path.display())))?;
    Ok(StoredRun { manifest, config, loaded })
}

/// Report text for a stored run; a pure function of the directory contents.
pub fn report_text(run: &StoredRun) -> (String, bool) {
    let series = &run.loaded.series;
    let mut out = format!("run_id {}\nsamples {}\n", run.manifest.run_id, series.len());
    if let Some(reason) = &run.loaded.aborted {
        out.push_str(&format!("aborted {reason}\n"));
    }
    let lines = if series.is_empty() { Vec::new() } else { run_suite(series) };
    let failed = series.is_empty() || lines.iter().any(|l| l.status == Status::Fail);
    for l in &lines {
        out.push_str(&format!("{l}\n"));
    }
    out.push_str(if failed { "overall FAIL\n" } else { "overall PASS\n" });
    (out, !failed)
}

/// Runs the suite on a stored run and writes `report.txt`. Returns the
/// report and whether every check passed.
pub fn verify_dir(dir: &Path) -> Result<(String, bool), CliError> {
    let run = load_run(dir)?;
    let (text, ok) = report_text(&run);
    let path = dir.join(REPORT_FILE);
    fs::write(&path, &text).map_err(|e| CliError::io(&path, e))?;
    Ok((text, ok))
}
