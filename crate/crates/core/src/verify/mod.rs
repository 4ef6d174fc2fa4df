//! Executable checks over diagnostics series and single fields.
//!
//! Series checks never look at the solver; they only read recorded
//! [`EnergyRecord`](crate::field::EnergyRecord)s, so they run identically on an
//! in-memory series and on one loaded back from CSV.

mod fit;
mod inequality;
mod report;

pub use fit::{
    compensated, compensated_report, decay_integral, decay_ode_bound, linear_fit, rate_fit, CompensatedReport,
    LinearFit, RateFit, RateMode, MIN_FIT_SAMPLES,
};
pub use inequality::{
    check_gn, check_weighted_interpolation, gn_profile, interpolation_batch, interpolation_constant,
    interpolation_matrix, interpolation_range_ok, random_field, BatchOutcome, InterpolationCase, InterpolationCheck,
};
pub use report::{run_suite, CheckLine, Status};

use num_traits::Float;
use thiserror::Error;

use crate::exponents::{scaling_mu, ExponentError, ProofConstants};
use crate::field::FieldError;
use crate::scalar::Real;
use crate::solver::{mass_identity_residual, DiagnosticsSeries, MASS_INCREASE_TOL};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Exponent(#[from] ExponentError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassIdentityStats<T> {
    pub max_residual: T,
    pub mean_residual: T,
    /// Largest positive mass jump between samples; zero if none.
    pub max_increase: T,
    /// `max_increase > 10⁻¹²·M₀`.
    pub increase_flagged: bool,
}

/// Residuals of `ΔM = 2λ₂∫‖u‖_{p+1}^{p+1}` over each sampled interval,
/// with the integral taken by the trapezoid rule.
pub fn check_mass_identity<T: Real>(series: &DiagnosticsSeries<T>) -> Result<MassIdentityStats<T>, VerifyError> {
    if series.len() < 3 {
        return Err(VerifyError::TooFewSamples { needed: 3, got: series.len() });
    }
    let params = series.params();
    let m0 = series.records[0].mass;
    let mut max_residual = T::zero();
    let mut sum = T::zero();
    let mut max_increase = T::zero();
    for k in 1..series.len() {
        let (r0, r1) = (&series.records[k - 1], &series.records[k]);
        let res = mass_identity_residual(params, series.times[k - 1], r0, series.times[k], r1);
        max_residual = max_residual.max(res);
        sum = sum + res;
        max_increase = max_increase.max(r1.mass - r0.mass);
    }
    Ok(MassIdentityStats {
        max_residual,
        mean_residual: sum / T::from_usize(series.len() - 1).unwrap(),
        max_increase,
        increase_flagged: max_increase > T::lit(MASS_INCREASE_TOL) * m0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotonicityReport<T> {
    pub gamma: T,
    /// Largest increase of `E + γM` between consecutive samples, or zero.
    pub max_increase: T,
    pub violated: bool,
}

/// Scans `E + γ‖u‖₂²`; violated iff some increase exceeds `tol·(1+|E_aug(u₀)|)`.
pub fn check_augmented_monotone<T: Real>(series: &DiagnosticsSeries<T>, gamma: T, tol: T) -> MonotonicityReport<T> {
    let mut max_increase = T::zero();
    for w in series.records.windows(2) {
        max_increase = max_increase.max(w[1].augmented(gamma) - w[0].augmented(gamma));
    }
    let e0 = series.records.first().map_or(T::zero(), |r| r.augmented(gamma));
    MonotonicityReport { gamma, max_increase, violated: max_increase > tol * (T::one() + Float::abs(e0)) }
}

pub const GAMMA_GRID: std::ops::RangeInclusive<i32> = -20..=40;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinGamma<T> {
    /// Smallest `2^k` that makes the series monotone, or `None` if even
    /// `2^40` fails.
    pub gamma: Option<T>,
    pub exponent: Option<i32>,
    /// `μ⁻²` from the scaling argument with default constants, for comparison.
    pub theory_gamma: Option<T>,
}

pub fn find_min_gamma<T: Real>(series: &DiagnosticsSeries<T>, tol: T) -> MinGamma<T> {
    let two = T::lit(2.0);
    let exponent = GAMMA_GRID.into_iter().find(|&k| !check_augmented_monotone(series, two.powi(k), tol).violated);
    let theory_gamma = series.records.first().and_then(|r| {
        let h1 = r.h1_norm();
        scaling_mu(series.params(), h1, &ProofConstants::default()).ok().map(|(_, g)| g)
    });
    MinGamma { gamma: exponent.map(|k| two.powi(k)), exponent, theory_gamma }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientBound<T> {
    pub sup: T,
    pub attained_time: T,
    /// Supremum over `t ≤ T/2`.
    pub early_sup: T,
    /// Supremum over `t ≥ T/2`.
    pub late_sup: T,
    /// `late_sup ≤ 1.01·early_sup`.
    pub no_late_growth: bool,
}

pub fn check_gradient_bound<T: Real>(series: &DiagnosticsSeries<T>) -> GradientBound<T> {
    let t_end = series.times.last().copied().unwrap_or(T::zero());
    let half = t_end / T::lit(2.0);
    let (mut sup, mut attained_time) = (T::zero(), T::zero());
    let (mut early_sup, mut late_sup) = (T::zero(), T::zero());
    for (&t, r) in series.times.iter().zip(&series.records) {
        if r.grad > sup {
            sup = r.grad;
            attained_time = t;
        }
        if t <= half {
            early_sup = early_sup.max(r.grad);
        }
        if t >= half {
            late_sup = late_sup.max(r.grad);
        }
    }
    GradientBound { sup, attained_time, early_sup, late_sup, no_late_growth: late_sup <= T::lit(1.01) * early_sup }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VirialReport<T> {
    /// `‖xu(t_k)‖₂ ≤ ‖xu₀‖₂ + ∫₀^{t_k}‖∇u‖₂ + tol·(1+t_k)·sup‖∇u‖₂` at every sample.
    pub holds: bool,
    pub first_violation: Option<(usize, T)>,
    /// Largest `‖xu(t_k)‖₂ − (‖xu₀‖₂ + ∫₀^{t_k}‖∇u‖₂)`; negative means slack.
    pub max_excess: T,
    /// `C = ‖xu₀‖₂ + sup‖∇u‖₂`.
    pub linear_constant: T,
    /// `max_k ‖xu(t_k)‖₂ / (1 + t_k)`.
    pub max_linear_ratio: T,
    pub linear_holds: bool,
}

pub fn check_virial<T: Real>(series: &DiagnosticsSeries<T>, tol: T) -> VirialReport<T> {
    let sup_grad = series.records.iter().fold(T::zero(), |a, r| a.max(r.grad));
    let w0 = series.records.first().map_or(T::zero(), |r| r.weighted);
    let linear_constant = w0 + sup_grad;
    let mut integral = T::zero();
    let mut first_violation = None;
    let mut max_excess = T::neg_infinity();
    let mut max_linear_ratio = T::zero();
    for k in 0..series.len() {
        let (t, r) = (series.times[k], &series.records[k]);
        if k > 0 {
            let prev = &series.records[k - 1];
            integral = integral + (t - series.times[k - 1]) * (prev.grad + r.grad) / T::lit(2.0);
        }
        let excess = r.weighted - (w0 + integral);
        max_excess = max_excess.max(excess);
        if first_violation.is_none() && excess > tol * (T::one() + t) * sup_grad {
            first_violation = Some((k, t));
        }
        max_linear_ratio = max_linear_ratio.max(r.weighted / (T::one() + t));
    }
    if series.is_empty() {
        max_excess = T::zero();
    }
    VirialReport {
        holds: first_violation.is_none(),
        first_violation,
        max_excess,
        linear_constant,
        max_linear_ratio,
        linear_holds: max_linear_ratio <= linear_constant * (T::one() + tol),
    }
}

/// `max_t ‖u‖_{p+1}^{p+1} < threshold`.
pub fn check_sup_lp1<T: Real>(series: &DiagnosticsSeries<T>, threshold: T) -> bool {
    let p = series.params().p;
    let sup = series.records.iter().fold(T::zero(), |a, r| a.max(r.power_integral(p)));
    sup < threshold
}
