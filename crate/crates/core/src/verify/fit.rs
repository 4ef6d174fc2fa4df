//! Least-squares fits and the closed-form decay envelope.

use num_traits::Float;

use super::VerifyError;
use crate::exponents::{decay_exponent, ExponentSet, PhysParams};
use crate::scalar::Real;
use crate::solver::DiagnosticsSeries;

/// Ordinary least-squares line `y ≈ intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit<T> {
    pub slope: T,
    pub intercept: T,
    /// Standard error of the slope; zero with fewer than three points.
    pub stderr: T,
    /// Largest absolute residual.
    pub max_residual: T,
}

/// `None` for fewer than two points or all-equal abscissae.
pub fn linear_fit<T: Real>(xs: &[T], ys: &[T]) -> Option<LinearFit<T>> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let nf = T::from_usize(n).unwrap();
    let mx = xs.iter().fold(T::zero(), |a, &b| a + b) / nf;
    let my = ys.iter().fold(T::zero(), |a, &b| a + b) / nf;
    let (mut sxx, mut sxy) = (T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        sxx = sxx + (x - mx) * (x - mx);
        sxy = sxy + (x - mx) * (y - my);
    }
    if !(sxx > T::zero()) {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ssr = T::zero();
    let mut max_residual = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        let r = y - (intercept + slope * x);
        ssr = ssr + r * r;
        max_residual = max_residual.max(Float::abs(r));
    }
    let stderr = if n > 2 {
        (ssr / T::from_usize(n - 2).unwrap() / sxx).sqrt()
    } else {
        T::zero()
    };
    Some(LinearFit { slope, intercept, stderr, max_residual })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateMode {
    /// `log‖u‖₂` against `log(1+t)`.
    Subcritical,
    /// `log‖u‖₂` against `log log(1+t)`.
    Critical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateFit<T> {
    pub mode: RateMode,
    pub window: (T, T),
    pub slope: T,
    pub stderr: T,
    pub residual: T,
    pub samples: usize,
}

pub const MIN_FIT_SAMPLES: usize = 20;

/// Fits the decay exponent of `‖u(t)‖₂` over `window` (inclusive).
pub fn rate_fit<T: Real>(
    series: &DiagnosticsSeries<T>,
    mode: RateMode,
    window: (T, T),
) -> Result<RateFit<T>, VerifyError> {
    let params = series.params();
    let residuals = ExponentSet::compute(params).identity_residuals(params);
    if !residuals.within(&T::lit(1e-12)) {
        return Err(VerifyError::Precondition(format!("exponent identities fail: {residuals:?}")));
    }
    let (t_min, t_max) = window;
    if mode == RateMode::Critical && t_min < T::one() {
        return Err(VerifyError::Precondition("critical fits need t_min >= 1".into()));
    }
    if !(t_min < t_max) {
        return Err(VerifyError::Precondition("empty fit window".into()));
    }
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (&t, r) in series.times.iter().zip(&series.records) {
        if t < t_min || t > t_max {
            continue;
        }
        if !(r.l2 > T::zero()) {
            return Err(VerifyError::Degenerate(format!("‖u‖₂ = 0 at t = {t}")));
        }
        let x = match mode {
            RateMode::Subcritical => t.ln_1p(),
            RateMode::Critical => t.ln_1p().ln(),
        };
        xs.push(x);
        ys.push(r.l2.ln());
    }
    if xs.len() < MIN_FIT_SAMPLES {
        return Err(VerifyError::TooFewSamples { needed: MIN_FIT_SAMPLES, got: xs.len() });
    }
    let fit = linear_fit(&xs, &ys).ok_or_else(|| VerifyError::Degenerate("all abscissae equal".into()))?;
    Ok(RateFit { mode, window, slope: fit.slope, stderr: fit.stderr, residual: fit.max_residual, samples: xs.len() })
}

/// `∫₀ᵗ (1+s)^{−a} ds` in closed form.
pub fn decay_integral<T: Real>(a: T, t: T) -> T {
    if a == T::one() {
        t.ln_1p()
    } else {
        let e = T::one() - a;
        ((T::one() + t).powf(e) - T::one()) / e
    }
}

/// Integrated bound `(m0^{−e} + c·I(t))^{−1/e}` with `e = (d+2)(p−1)/2` and
/// `I(t) = ∫₀ᵗ (1+s)^{−d(p−1)/2} ds`.
pub fn decay_ode_bound<T: Real>(m0: T, c: T, params: &PhysParams<T>, t: T) -> Result<T, VerifyError> {
    decay_exponent(params)?;
    if !(m0 > T::zero()) || !(c >= T::zero()) {
        return Err(VerifyError::Precondition("decay bound needs m0 > 0 and c >= 0".into()));
    }
    let d = params.dim();
    let pm1 = params.p - T::one();
    let e = (d + T::lit(2.0)) * pm1 / T::lit(2.0);
    let a = d * pm1 / T::lit(2.0);
    Ok((m0.powf(-e) + c * decay_integral(a, t)).powf(-T::one() / e))
}

/// Compensated quantity `‖u(t)‖₂·(log(1+t))^{ℓ}` for `t ≥ t_min`.
pub fn compensated<T: Real>(series: &DiagnosticsSeries<T>, log_exponent: T, t_min: T) -> Vec<(T, T)> {
    series
        .times
        .iter()
        .zip(&series.records)
        .filter(|(&t, _)| t >= t_min && t > T::zero())
        .map(|(&t, r)| (t, r.l2 * t.ln_1p().powf(log_exponent)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompensatedReport<T> {
    pub max_over_min: T,
    /// Least-squares slope of the compensated quantity against `t`.
    pub slope: T,
    pub samples: usize,
}

pub fn compensated_report<T: Real>(
    series: &DiagnosticsSeries<T>,
    log_exponent: T,
    window: (T, T),
) -> Result<CompensatedReport<T>, VerifyError> {
    let pts: Vec<(T, T)> =
        compensated(series, log_exponent, window.0).into_iter().filter(|&(t, _)| t <= window.1).collect();
    if pts.len() < 2 {
        return Err(VerifyError::TooFewSamples { needed: 2, got: pts.len() });
    }
    let max = pts.iter().fold(T::neg_infinity(), |a, &(_, v)| a.max(v));
    let min = pts.iter().fold(T::infinity(), |a, &(_, v)| a.min(v));
    let xs: Vec<T> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<T> = pts.iter().map(|p| p.1).collect();
    let fit = linear_fit(&xs, &ys).ok_or_else(|| VerifyError::Degenerate("all abscissae equal".into()))?;
    Ok(CompensatedReport { max_over_min: max / min, slope: fit.slope, samples: pts.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{EnergyRecord, GridSpec};
    use crate::solver::{InitialData, RunConfig};

    fn synthetic(p: f64, law: impl Fn(f64) -> f64) -> DiagnosticsSeries<f64> {
        let params = PhysParams::new(1, p, -1.0, -1.0).unwrap();
        let grid = GridSpec::new(1, 64, 10.0).unwrap();
        let data = InitialData::Gaussian { amplitude: 1.0, width: 1.0, momentum: vec![] };
        let mut s = DiagnosticsSeries::empty(RunConfig::new(params, grid, data, 0.5, 100.0));
        for k in 0..=200 {
            let t = 0.5 * k as f64;
            let l2 = law(t);
            let rec = EnergyRecord {
                mass: l2 * l2,
                l2,
                grad: 1.0,
                lp1: l2,
                weighted: 1.0,
                energy: 0.0,
                e_aug: vec![],
                lq: 1.0,
                boundary_mass_fraction: 0.0,
            };
            s.push(t, rec);
        }
        s
    }

    #[test]
    fn fit_recovers_exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        let f = linear_fit(&xs, &ys).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-14 && (f.intercept - 1.0).abs() < 1e-14);
        assert!(f.stderr < 1e-14 && f.max_residual < 1e-14);
        assert!(linear_fit(&[1.0, 1.0], &[0.0, 1.0]).is_none());
    }

    #[test]
    fn planted_power_law() {
        let s = synthetic(2.0, |t| (1.0 + t).powf(-1.0 / 3.0));
        let fit = rate_fit(&s, RateMode::Subcritical, (0.0, 100.0)).unwrap();
        assert!((fit.slope + 1.0 / 3.0).abs() < 1e-6);
        assert!(fit.stderr < 1e-10);
    }

    #[test]
    fn planted_log_law() {
        let s = synthetic(3.0, |t| if t > 0.0 { t.ln_1p().powf(-1.0 / 3.0) } else { 1.0 });
        let fit = rate_fit(&s, RateMode::Critical, (2.0, 100.0)).unwrap();
        assert!((fit.slope + 1.0 / 3.0).abs() < 1e-6);
        let rep = compensated_report(&s, 1.0 / 3.0, (2.0, 100.0)).unwrap();
        assert!((rep.max_over_min - 1.0).abs() < 1e-12 && rep.slope.abs() < 1e-12);
        assert!(rate_fit(&s, RateMode::Critical, (0.5, 100.0)).is_err());
    }

    #[test]
    fn rate_fit_rejects_short_windows() {
        let s = synthetic(2.0, |t| (1.0 + t).powf(-0.3));
        assert!(matches!(
            rate_fit(&s, RateMode::Subcritical, (0.0, 5.0)),
            Err(VerifyError::TooFewSamples { .. })
        ));
        assert!(rate_fit(&s, RateMode::Subcritical, (5.0, 5.0)).is_err());
    }

    #[test]
    fn decay_bound_examples() {
        let sub = PhysParams::new(1, 2.0, -1.0, -1.0).unwrap();
        assert!((decay_ode_bound(2.0, 1.0, &sub, 0.0).unwrap() - 2.0).abs() < 1e-14);
        assert!((decay_ode_bound(2.0, 0.0, &sub, 50.0).unwrap() - 2.0).abs() < 1e-14);
        let crit = PhysParams::new(1, 3.0, -1.0, -1.0).unwrap();
        let (m0, c, t) = (1.5f64, 0.7, 30.0);
        let expected = (m0.powi(-3) + c * t.ln_1p()).powf(-1.0 / 3.0);
        assert!((decay_ode_bound(m0, c, &crit, t).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn decay_integral_matches_quadrature() {
        for &a in &[0.25, 0.5, 1.0] {
            let t = 12.0;
            let n = 200_000;
            let h = t / n as f64;
            // composite Simpson
            let f = |s: f64| (1.0 + s).powf(-a);
            let mut sum = f(0.0) + f(t);
            for i in 1..n {
                sum += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            let quad = sum * h / 3.0;
            assert!((decay_integral(a, t) - quad).abs() < 1e-10, "a = {a}");
        }
    }

    #[test]
    fn decay_bound_monotone() {
        let params = PhysParams::new(1, 2.0, -1.0, -1.0).unwrap();
        let ts: Vec<f64> = (0..50).map(|k| k as f64 * 0.7).collect();
        for w in ts.windows(2) {
            assert!(decay_ode_bound(1.0, 0.3, &params, w[1]).unwrap() <= decay_ode_bound(1.0, 0.3, &params, w[0]).unwrap());
        }
        for k in 1..30 {
            let (a, b) = (0.1 * k as f64, 0.1 * (k + 1) as f64);
            assert!(decay_ode_bound(a, 0.3, &params, 5.0).unwrap() <= decay_ode_bound(b, 0.3, &params, 5.0).unwrap());
        }
    }
}
