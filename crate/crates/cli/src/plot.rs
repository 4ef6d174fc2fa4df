//! Whitespace-separated column files for external plotting tools.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use dnls_core::exponents::{decay_exponent, log_exponent, DecayExponent};
use dnls_core::Series64;

use crate::config::format_real;
use crate::run::load_run;
use crate::series_csv::format_value;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// `log(1+t)`, `log‖u‖₂`, and the `−κ` reference line through the first sample.
    Decay,
    /// `t`, `E`, then one `E + γM` column per configured γ.
    Energy,
    /// `t`, `‖xu‖₂`, and the bound `‖xu₀‖₂ + ∫₀ᵗ‖∇u‖₂`.
    Virial,
    /// `t`, `‖u‖₂`, `‖u‖₂·(log(1+t))^ℓ`.
    CriticalCompensated,
}

impl PlotKind {
    pub fn name(self) -> &'static str {
        match self {
            PlotKind::Decay => "decay",
            PlotKind::Energy => "energy",
            PlotKind::Virial => "virial",
            PlotKind::CriticalCompensated => "critical-compensated",
        }
    }
}

impl fmt::Display for PlotKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PlotKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "decay" => Ok(PlotKind::Decay),
            "energy" => Ok(PlotKind::Energy),
            "virial" => Ok(PlotKind::Virial),
            "critical-compensated" => Ok(PlotKind::CriticalCompensated),
            other => Err(format!("unknown plot kind {other:?}; expected decay, energy, virial or critical-compensated")),
        }
    }
}

fn render(columns: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> String {
    let mut out = format!("# {}\n", columns.join(" "));
    for row in rows {
        let cells: Vec<_> = row.into_iter().map(format_value).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

pub fn plot_data(series: &Series64, kind: PlotKind) -> Result<String, CliError> {
    let params = series.params();
    let samples = series.times.iter().zip(&series.records);
    Ok(match kind {
        PlotKind::Decay => {
            let kappa = match decay_exponent(params) {
                Ok(DecayExponent::Subcritical { kappa }) => kappa,
                _ => return Err(CliError::Usage("decay plot needs a subcritical power p < 1 + 2/d".into())),
            };
            let Some(first) = series.records.first().filter(|r| r.l2 > 0.0) else {
                return Err(CliError::Usage("decay plot needs a nonzero first sample".into()));
            };
            let y0 = first.l2.ln();
            render(
                &["log(1+t)", "log_l2", "reference"],
                samples.map(|(&t, r)| vec![t.ln_1p(), r.l2.ln(), y0 - kappa * t.ln_1p()]),
            )
        }
        PlotKind::Energy => {
            let mut cols = vec!["t".to_string(), "energy".to_string()];
            cols.extend(series.config.gammas.iter().map(|&g| format!("eaug_{}", format_real(g))));
            let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
            render(&cols, samples.map(|(&t, r)| [vec![t, r.energy], r.e_aug.clone()].concat()))
        }
        PlotKind::Virial => {
            let w0 = series.records.first().map_or(0.0, |r| r.weighted);
            let mut integral = 0.0;
            let mut prev: Option<(f64, f64)> = None;
            let rows = samples.map(|(&t, r)| {
                if let Some((t0, g0)) = prev {
                    integral += (t - t0) * (g0 + r.grad) / 2.0;
                }
                prev = Some((t, r.grad));
                vec![t, r.weighted, w0 + integral]
            });
            render(&["t", "weighted", "bound"], rows)
        }
        PlotKind::CriticalCompensated => {
            let ell = log_exponent(params);
            render(&["t", "l2", "compensated"], samples.map(|(&t, r)| vec![t, r.l2, r.l2 * t.ln_1p().powf(ell)]))
        }
    })
}

/// Writes `plot_<kind>.dat` into the run directory and returns its path.
pub fn plotdata_dir(dir: &Path, kind: PlotKind) -> Result<PathBuf, CliError> {
    let run = load_run(dir)?;
    let text = plot_data(&run.loaded.series, kind)?;
    let path = dir.join(format!("plot_{kind}.dat"));
    fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use dnls_core::{Config64, Grid64, InitialData, Params64, Record64};

    fn synthetic(p: f64, l2: impl Fn(f64) -> f64) -> Series64 {
        let params = Params64::new(1, p, -1.0, -1.0).unwrap();
        let grid = Grid64::new(1, 64, 10.0).unwrap();
        let data = InitialData::Gaussian { amplitude: 1.0, width: 1.0, momentum: vec![] };
        let mut cfg = Config64::new(params, grid, data, 0.1, 10.0);
        cfg.gammas = vec![0.0, 2.0];
        let mut s = Series64::empty(cfg);
        for k in 0..50 {
            let t = k as f64 * 0.2;
            let m = l2(t);
            s.push(
                t,
                Record64 {
                    mass: m * m,
                    l2: m,
                    grad: 1.0,
                    lp1: m,
                    weighted: 1.0 + t,
                    energy: -0.5,
                    e_aug: vec![-0.5, -0.5 + 2.0 * m * m],
                    lq: m,
                    boundary_mass_fraction: 0.0,
                },
            );
        }
        s
    }

    fn columns(text: &str) -> Vec<Vec<f64>> {
        text.lines().skip(1).map(|l| l.split(' ').map(|c| c.parse().unwrap()).collect()).collect()
    }

    #[test]
    fn decay_of_power_law_is_linear() {
        let s = synthetic(2.0, |t| 3.0 * (1.0 + t).powf(-0.4));
        let rows = columns(&plot_data(&s, PlotKind::Decay).unwrap());
        for r in &rows {
            assert!((r[1] - (3f64.ln() - 0.4 * r[0])).abs() < 1e-14);
            assert!((r[2] - (3f64.ln() - r[0] / 3.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn compensated_log_decay_is_constant() {
        let s = synthetic(3.0, |t| if t == 0.0 { 1.0 } else { 2.0 * t.ln_1p().powf(-1.0 / 3.0) });
        let rows = columns(&plot_data(&s, PlotKind::CriticalCompensated).unwrap());
        for r in rows.iter().skip(1) {
            assert!((r[2] - 2.0).abs() < 1e-14, "{r:?}");
        }
    }

    #[test]
    fn energy_has_one_column_per_gamma() {
        let s = synthetic(2.0, |t| (-t).exp());
        let text = plot_data(&s, PlotKind::Energy).unwrap();
        assert_eq!(text.lines().next().unwrap(), "# t energy eaug_0 eaug_2");
        assert!(columns(&text).iter().all(|r| r.len() == 4));
    }

    #[test]
    fn virial_bound_integrates_gradient() {
        let s = synthetic(2.0, |t| (-t).exp());
        let rows = columns(&plot_data(&s, PlotKind::Virial).unwrap());
        let last = rows.last().unwrap();
        assert!((last[2] - (1.0 + last[0])).abs() < 1e-12);
    }

    #[test]
    fn kinds_parse() {
        for k in [PlotKind::Decay, PlotKind::Energy, PlotKind::Virial, PlotKind::CriticalCompensated] {
            assert_eq!(k.name().parse::<PlotKind>().unwrap(), k);
        }
        assert!("spectrum".parse::<PlotKind>().is_err());
        assert!(plot_data(&synthetic(3.0, |_| 1.0), PlotKind::Decay).is_err());
    }
}
