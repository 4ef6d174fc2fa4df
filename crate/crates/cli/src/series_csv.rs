//! Diagnostics series as CSV: one header row, one row per sample, values at
//! 17 significant digits, LF line endings, optional `# aborted: ...` trailer.

use std::fmt::Write as _;

use dnls_core::{Config64, Record64, Series64};

use crate::config::format_real;

/// Column names for a run with the given γ values.
pub fn header(gammas: &[f64]) -> Vec<String> {
    let mut cols: Vec<String> =
        ["t", "mass", "l2", "grad", "lp1", "lq", "weighted", "energy"].iter().map(|s| s.to_string()).collect();
    cols.extend(gammas.iter().map(|&g| format!("eaug_{}", format_real(g))));
    cols.push("boundary_frac".into());
    cols.push("mass_residual".into());
    cols
}

/// `{:.16e}`: 17 significant digits, enough to round-trip any `f64`.
pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_series(series: &Series64, aborted: Option<&str>) -> String {
    let mut out = header(&series.config.gammas).join(",");
    out.push('\n');
    for k in 0..series.len() {
        let r = &series.records[k];
        let mut row = vec![series.times[k], r.mass, r.l2, r.grad, r.lp1, r.lq, r.weighted, r.energy];
        row.extend(&r.e_aug);
        row.push(r.boundary_mass_fraction);
        row.push(series.step_residuals[k]);
        let cells: Vec<_> = row.into_iter().map(format_value).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    if let Some(reason) = aborted {
        let _ = writeln!(out, "# aborted: {reason}");
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct CsvError {
    pub line: usize,
    pub message: String,
}

/// A series loaded back from CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedSeries {
    pub series: Series64,
    pub aborted: Option<String>,
}

pub fn read_series(text: &str, config: &Config64) -> Result<LoadedSeries, CsvError> {
    let err = |line: usize, message: String| CsvError { line, message };
    let expected = header(&config.gammas);
    let mut lines = text.split('\n').enumerate().map(|(i, l)| (i + 1, l));
    let (_, head) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    if head.split(',').ne(expected.iter().map(String::as_str)) {
        return Err(err(1, format!("header does not match, expected {}", expected.join(","))));
    }
    let mut series = Series64::empty(config.clone());
    let mut aborted = None;
    let n_gamma = config.gammas.len();
    for (line, raw) in lines {
        if raw.is_empty() {
            continue;
        }
        if aborted.is_some() {
            return Err(err(line, "content after the abort trailer".into()));
        }
        if raw.contains('\r') {
            return Err(err(line, "carriage return in line; expected LF endings".into()));
        }
        if let Some(rest) = raw.strip_prefix('#') {
            match rest.trim().strip_prefix("aborted:") {
                Some(reason) => {
                    aborted = Some(reason.trim().to_string());
                    continue;
                }
                None => return Err(err(line, "unexpected comment line".into())),
            }
        }
        let cells: Vec<&str> = raw.split(',').collect();
        if cells.len() != expected.len() {
            return Err(err(line, format!("expected {} fields, found {}", expected.len(), cells.len())));
        }
        let mut vals = Vec::with_capacity(cells.len());
        for (cell, name) in cells.iter().zip(&expected) {
            match cell.parse::<f64>() {
                Ok(x) if x.is_finite() => vals.push(x),
                _ => return Err(err(line, format!("column {name}: invalid number {cell:?}"))),
            }
        }
        let t = vals[0];
        if let Some(&prev) = series.times.last() {
            if t <= prev {
                return Err(err(line, format!("time {t} does not increase")));
            }
        } else if t != 0.0 {
            return Err(err(line, format!("first sample must be at t = 0, found {t}")));
        }
        let record = Record64 {
            mass: vals[1],
            l2: vals[2],
            grad: vals[3],
            lp1: vals[4],
            lq: vals[5],
            weighted: vals[6],
            energy: vals[7],
            e_aug: vals[8..8 + n_gamma].to_vec(),
            boundary_mass_fraction: vals[8 + n_gamma],
        };
        series.times.push(t);
        series.records.push(record);
        series.step_residuals.push(vals[9 + n_gamma]);
    }
    Ok(LoadedSeries { series, aborted })
}

#[cfg(test)]
mod tests {
    use super::*;
    use dnls_core::solver::evolve;
    use dnls_core::{Grid64, InitialData, Params64};

    fn config() -> Config64 {
        let params = Params64::new(1, 2.0, -1.0, -1.0).unwrap();
        let grid = Grid64::new(1, 128, 20.0).unwrap();
        let data = InitialData::Gaussian { amplitude: 1.0, width: 1.0, momentum: vec![] };
        let mut cfg = Config64::new(params, grid, data, 0.05, 1.0);
        cfg.gammas = vec![0.0, 0.5, 2.0];
        cfg.sample_every = 2;
        cfg
    }

    #[test]
    fn header_lists_gammas() {
        assert_eq!(
            header(&[0.0, 0.5]).join(","),
            "t,mass,l2,grad,lp1,lq,weighted,energy,eaug_0,eaug_0.5,boundary_frac,mass_residual"
        );
    }

    #[test]
    fn series_round_trips_exactly() {
        let cfg = config();
        let series = evolve(&cfg).unwrap();
        let text = write_series(&series, None);
        let loaded = read_series(&text, &cfg).unwrap();
        assert_eq!(loaded.series, series);
        assert_eq!(loaded.aborted, None);
        assert_eq!(write_series(&loaded.series, None), text);
    }

    #[test]
    fn trailer_is_kept() {
        let cfg = config();
        let series = evolve(&cfg).unwrap();
        let text = write_series(&series, Some("boundary mass fraction 1e-3 exceeds guard at t = 1"));
        assert!(text.ends_with("exceeds guard at t = 1\n"));
        let loaded = read_series(&text, &cfg).unwrap();
        assert_eq!(loaded.aborted.as_deref(), Some("boundary mass fraction 1e-3 exceeds guard at t = 1"));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let cfg = config();
        let text = write_series(&evolve(&cfg).unwrap(), None);
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        lines[3] = lines[3].replacen(',', ",x", 1);
        let e = read_series(&(lines.join("\n") + "\n"), &cfg).unwrap_err();
        assert_eq!(e.line, 4);
        assert!(e.message.contains("column mass"), "{e}");

        let short: String = text.lines().take(3).map(|l| format!("{l}\n")).collect::<String>() + "0,1\n";
        assert_eq!(read_series(&short, &cfg).unwrap_err().line, 4);
        assert_eq!(read_series("t,mass\n", &cfg).unwrap_err().line, 1);
    }
}
