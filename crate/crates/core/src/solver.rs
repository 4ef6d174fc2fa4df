//! Strang splitting for `i∂ₜu + ½Δu = λ|u|^{p−1}u`.
//!
//! One step is `N(dt/2) ∘ L(dt) ∘ N(dt/2)` where `L` is the free Schrödinger
//! group applied as a Fourier multiplier and `N` is the exact pointwise flow
//! of `i∂ₜu = λ|u|^{p−1}u`. With `λ₂ = Im λ ≤ 0` and `B = (1−p)λ₂ ≥ 0` that
//! flow is
//!
//! ```text
//! |u(τ)| = (|u₀|^{1−p} + Bτ)^{−1/(p−1)}
//! arg u(τ) − arg u₀ = −(λ₁/B)·log(1 + Bτ|u₀|^{p−1})      (B > 0)
//!                   = −λ₁τ|u₀|^{p−1}                       (B = 0)
//! ```
//!
//! `L` is unitary and `N` never increases `|u|`, so the composite step is
//! mass-nonincreasing for any `dt`.

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use num_complex::Complex;
use num_traits::Zero;
use thiserror::Error;

use crate::exponents::PhysParams;
use crate::field::{gaussian_data, EnergyRecord, Field, FieldError, GridSpec, Spectral};
use crate::scalar::Real;
use crate::verify::linear_fit;

/// Default run-validity threshold on the outer-shell mass fraction.
pub const BOUNDARY_GUARD: f64 = 1e-6;

/// Relative mass increase between samples that is treated as a solver fault.
pub const MASS_INCREASE_TOL: f64 = 1e-12;

/// The convergence reference uses `min(dts) / REFERENCE_REFINEMENT`.
pub const REFERENCE_REFINEMENT: usize = 8;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("Im λ must not be positive for the dissipative substep, got {0}")]
    Amplifying(String),
    #[error("invalid run configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Where the initial field comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialData<T> {
    Gaussian { amplitude: T, width: T, momentum: Vec<T> },
    /// Binary snapshot in the layout of [`Field::write_snapshot`].
    Snapshot(PathBuf),
    /// An explicit field on the run grid.
    Samples(Field<T>),
}

impl<T: Real> InitialData<T> {
    pub fn build(&self, grid: &GridSpec<T>) -> Result<Field<T>, SolverError> {
        let field = match self {
            InitialData::Gaussian { amplitude, width, momentum } => {
                gaussian_data(grid, *amplitude, *width, momentum)?
            }
            InitialData::Snapshot(path) => {
                let file = File::open(path).map_err(FieldError::from)?;
                Field::read_snapshot(BufReader::new(file))?
            }
            InitialData::Samples(f) => f.clone(),
        };
        if field.grid != *grid {
            return Err(SolverError::Config("initial field grid does not match the run grid".into()));
        }
        Ok(Field { time: T::zero(), ..field })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig<T> {
    pub params: PhysParams<T>,
    pub grid: GridSpec<T>,
    pub data: InitialData<T>,
    pub dt: T,
    pub t_end: T,
    /// Steps between diagnostic records.
    pub sample_every: usize,
    /// γ values for which `E + γ‖u‖₂²` is recorded.
    pub gammas: Vec<T>,
    /// Times at which the field itself is kept.
    pub snapshot_times: Vec<T>,
    /// Abort when the outer-shell mass fraction exceeds this.
    pub boundary_guard: T,
}

impl<T: Real> RunConfig<T> {
    pub fn new(params: PhysParams<T>, grid: GridSpec<T>, data: InitialData<T>, dt: T, t_end: T) -> Self {
        Self {
            params,
            grid,
            data,
            dt,
            t_end,
            sample_every: 10,
            gammas: vec![T::zero(), T::one()],
            snapshot_times: Vec::new(),
            boundary_guard: T::lit(BOUNDARY_GUARD),
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if self.params.lambda_im > T::zero() {
            return Err(SolverError::Amplifying(self.params.lambda_im.to_string()));
        }
        if !(self.dt > T::zero()) {
            return Err(SolverError::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= self.dt) {
            return Err(SolverError::Config(format!("t_end must be at least dt, got {}", self.t_end)));
        }
        if self.sample_every == 0 {
            return Err(SolverError::Config("sample_every must be at least 1".into()));
        }
        if let Some(g) = self.gammas.iter().find(|&&g| !(g >= T::zero())) {
            return Err(SolverError::Config(format!("gammas must be nonnegative, got {g}")));
        }
        if self.params.d as usize != self.grid.d {
            return Err(SolverError::Config("params.d and grid.d differ".into()));
        }
        Ok(())
    }

    /// Number of steps, `round(t_end / dt)`.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round().to_usize().unwrap_or(0)
    }
}

/// Pointwise exact flow of `i∂ₜu = λ|u|^{p−1}u`.
#[derive(Debug, Clone, Copy)]
struct NonlinearFlow<T> {
    half_pm1: T,
    inv_pm1: T,
    lambda_re: T,
    /// `B = (1−p)λ₂`
    b: T,
}

impl<T: Real> NonlinearFlow<T> {
    fn new(params: &PhysParams<T>) -> Result<Self, SolverError> {
        if params.lambda_im > T::zero() {
            return Err(SolverError::Amplifying(params.lambda_im.to_string()));
        }
        let pm1 = params.p - T::one();
        Ok(Self {
            half_pm1: pm1 / T::lit(2.0),
            inv_pm1: T::one() / pm1,
            lambda_re: params.lambda_re,
            b: -pm1 * params.lambda_im,
        })
    }

    #[inline]
    fn apply(&self, z: Complex<T>, tau: T) -> Complex<T> {
        let r2 = z.norm_sqr();
        if r2 == T::zero() {
            return Complex::zero();
        }
        // r₀^{p−1}
        let s = r2.powf(self.half_pm1);
        let (factor, dtheta) = if self.b > T::zero() {
            let l = (self.b * tau * s).ln_1p();
            ((-l * self.inv_pm1).exp(), -(self.lambda_re / self.b) * l)
        } else {
            (T::one(), -self.lambda_re * tau * s)
        };
        z * Complex::from_polar(factor, dtheta)
    }

    fn apply_all(&self, values: &mut [Complex<T>], tau: T) {
        for z in values.iter_mut() {
            *z = self.apply(*z, tau);
        }
    }
}

/// Multiplies the transform by `exp(−i|ξ|²τ/2)`.
fn propagator<T: Real>(spectral: &Spectral<T>, tau: T) -> Vec<Complex<T>> {
    (0..spectral.grid().len())
        .map(|k| Complex::from_polar(T::one(), -spectral.xi_sq(k) * tau / T::lit(2.0)))
        .collect()
}

/// Fixed-step Strang integrator for one grid and one `dt`.
pub struct Stepper<T: Real> {
    spectral: Spectral<T>,
    flow: NonlinearFlow<T>,
    dt: T,
    linear: Vec<Complex<T>>,
}

impl<T: Real> Stepper<T> {
    pub fn new(params: &PhysParams<T>, grid: &GridSpec<T>, dt: T) -> Result<Self, SolverError> {
        let spectral = Spectral::new(grid);
        let linear = propagator(&spectral, dt);
        Ok(Self { flow: NonlinearFlow::new(params)?, spectral, dt, linear })
    }

    pub fn spectral(&self) -> &Spectral<T> {
        &self.spectral
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    /// One Strang step in place; the field's time advances by `dt`.
    pub fn step(&self, f: &mut Field<T>) {
        let half = self.dt / T::lit(2.0);
        self.flow.apply_all(&mut f.values, half);
        self.spectral.forward(&mut f.values);
        for (z, m) in f.values.iter_mut().zip(&self.linear) {
            *z = *z * *m;
        }
        self.spectral.inverse(&mut f.values);
        self.flow.apply_all(&mut f.values, half);
        f.time = f.time + self.dt;
    }
}

/// Free evolution `e^{iτΔ/2}f`; `tau` may be negative.
pub fn linear_step<T: Real>(f: &Field<T>, tau: T) -> Field<T> {
    let spectral = Spectral::new(&f.grid);
    let mut out = f.clone();
    spectral.forward(&mut out.values);
    for (z, m) in out.values.iter_mut().zip(propagator(&spectral, tau)) {
        *z = *z * m;
    }
    spectral.inverse(&mut out.values);
    out
}

/// Exact nonlinear substep over time `tau ≥ 0`.
pub fn nonlinear_step<T: Real>(f: &Field<T>, tau: T, params: &PhysParams<T>) -> Result<Field<T>, SolverError> {
    if tau < T::zero() {
        return Err(SolverError::Config(format!("nonlinear substep needs tau >= 0, got {tau}")));
    }
    let flow = NonlinearFlow::new(params)?;
    let mut out = f.clone();
    flow.apply_all(&mut out.values, tau);
    Ok(out)
}

/// `N(dt/2) ∘ L(dt) ∘ N(dt/2)`.
pub fn strang_step<T: Real>(f: &Field<T>, dt: T, params: &PhysParams<T>) -> Result<Field<T>, SolverError> {
    if !(dt > T::zero()) {
        return Err(SolverError::Config(format!("dt must be positive, got {dt}")));
    }
    let stepper = Stepper::new(params, &f.grid, dt)?;
    let mut out = f.clone();
    stepper.step(&mut out);
    Ok(out)
}

/// Integrates `u0` for `steps` steps of size `dt` without recording.
pub fn integrate<T: Real>(
    u0: &Field<T>,
    params: &PhysParams<T>,
    dt: T,
    steps: usize,
) -> Result<Field<T>, SolverError> {
    let stepper = Stepper::new(params, &u0.grid, dt)?;
    let mut u = u0.clone();
    for _ in 0..steps {
        stepper.step(&mut u);
    }
    Ok(u)
}

/// Time-indexed diagnostics of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsSeries<T> {
    pub config: RunConfig<T>,
    pub times: Vec<T>,
    pub records: Vec<EnergyRecord<T>>,
    /// `|ΔM − 2λ₂·trapezoid(‖u‖_{p+1}^{p+1})|` over the interval ending at each
    /// sample; zero for the first.
    pub step_residuals: Vec<T>,
    pub snapshots: Vec<Field<T>>,
}

impl<T: Real> DiagnosticsSeries<T> {
    pub fn empty(config: RunConfig<T>) -> Self {
        Self { config, times: Vec::new(), records: Vec::new(), step_residuals: Vec::new(), snapshots: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn params(&self) -> &PhysParams<T> {
        &self.config.params
    }

    /// Appends a record, computing its mass-identity residual against the
    /// previous sample.
    pub fn push(&mut self, t: T, record: EnergyRecord<T>) {
        let residual = match (self.times.last(), self.records.last()) {
            (Some(&t0), Some(prev)) => mass_identity_residual(&self.config.params, t0, prev, t, &record),
            _ => T::zero(),
        };
        self.times.push(t);
        self.records.push(record);
        self.step_residuals.push(residual);
    }
}

/// `|ΔM − 2λ₂·(t₁−t₀)(P₀+P₁)/2|` with `P = ‖u‖_{p+1}^{p+1}`.
pub fn mass_identity_residual<T: Real>(
    params: &PhysParams<T>,
    t0: T,
    r0: &EnergyRecord<T>,
    t1: T,
    r1: &EnergyRecord<T>,
) -> T {
    let trapezoid = (t1 - t0) * (r0.power_integral(params.p) + r1.power_integral(params.p)) / T::lit(2.0);
    num_traits::Float::abs(r1.mass - r0.mass - T::lit(2.0) * params.lambda_im * trapezoid)
}

#[derive(Debug, Clone, PartialEq)]
pub enum AbortReason<T> {
    BoundaryContamination { time: T, fraction: T },
    NonFinite { step: usize },
    MassIncrease { time: T, increase: T },
}

impl<T: Real> std::fmt::Display for AbortReason<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AbortReason::BoundaryContamination { time, fraction } => {
                write!(f, "boundary mass fraction {fraction:e} exceeds guard at t = {time}")
            }
            AbortReason::NonFinite { step } => write!(f, "non-finite sample after step {step}"),
            AbortReason::MassIncrease { time, increase } => {
                write!(f, "mass increased by {increase:e} at t = {time}")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum EvolveError<T: Real> {
    #[error(transparent)]
    Setup(#[from] SolverError),
    #[error("run aborted: {reason}")]
    Aborted { reason: AbortReason<T>, partial: Box<DiagnosticsSeries<T>> },
}

/// Runs `config` from `t = 0` to `t_end`, recording every `sample_every` steps.
///
/// Aborts (returning the series so far) on a non-finite sample, a recorded
/// mass increase beyond roundoff, or a boundary mass fraction above the guard.
pub fn evolve<T: Real>(config: &RunConfig<T>) -> Result<DiagnosticsSeries<T>, EvolveError<T>> {
    config.validate()?;
    let mut u = config.data.build(&config.grid)?;
    let stepper = Stepper::new(&config.params, &config.grid, config.dt)?;
    let mut series = DiagnosticsSeries::empty(config.clone());
    let steps = config.steps();
    let mass_tol = T::lit(MASS_INCREASE_TOL);
    let mut pending_snapshots: Vec<T> = config.snapshot_times.clone();

    let abort = |reason, series: DiagnosticsSeries<T>| EvolveError::Aborted { reason, partial: Box::new(series) };

    for k in 0..=steps {
        if k > 0 {
            stepper.step(&mut u);
            if u.first_non_finite().is_some() {
                return Err(abort(AbortReason::NonFinite { step: k }, series));
            }
        }
        let t = T::from_usize(k).unwrap() * config.dt;
        u.time = t;
        pending_snapshots.retain(|&ts| {
            if num_traits::Float::abs(ts - t) <= config.dt / T::lit(2.0) {
                series.snapshots.push(u.clone());
                false
            } else {
                true
            }
        });
        if k % config.sample_every != 0 {
            continue;
        }
        let record = stepper.spectral().record(&u, &config.params, &config.gammas);
        let fraction = record.boundary_mass_fraction;
        let increase = series.records.last().map(|prev| record.mass - prev.mass);
        let m0 = series.records.first().map_or(record.mass, |r| r.mass);
        series.push(t, record);
        if fraction > config.boundary_guard {
            return Err(abort(AbortReason::BoundaryContamination { time: t, fraction }, series));
        }
        if let Some(inc) = increase {
            if inc > mass_tol * m0 {
                return Err(abort(AbortReason::MassIncrease { time: t, increase: inc }, series));
            }
        }
    }
    Ok(series)
}

#[derive(Debug, Clone, PartialEq)]
pub enum ObservedOrder<T> {
    /// Errors are at roundoff; the scheme is exact for this problem.
    Exact,
    Order(T),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport<T> {
    /// Step sizes, coarsest first.
    pub dts: Vec<T>,
    /// `‖u_dt(t_end) − u_ref(t_end)‖₂`, aligned with `dts`.
    pub errors: Vec<T>,
    pub reference_dt: T,
    pub order: ObservedOrder<T>,
}

/// Observed temporal order at `t_end` over geometrically spaced `dts`.
///
/// The reference solution uses `min(dts) / 8`, so that its own error does not
/// bias the slope over the requested step sizes.
pub fn convergence_study<T: Real>(config: &RunConfig<T>, dts: &[T]) -> Result<ConvergenceReport<T>, SolverError> {
    if dts.len() < 3 {
        return Err(SolverError::Config("convergence study needs at least 3 step sizes".into()));
    }
    let mut dts = dts.to_vec();
    dts.sort_by(|a, b| b.partial_cmp(a).expect("finite dt"));
    if !(dts[dts.len() - 1] > T::zero()) {
        return Err(SolverError::Config("step sizes must be positive".into()));
    }
    let ratio = dts[0] / dts[1];
    let geometric = ratio > T::one()
        && dts.windows(2).all(|w| num_traits::Float::abs(w[0] / w[1] - ratio) <= T::lit(1e-9) * ratio);
    if !geometric {
        return Err(SolverError::Config("step sizes must be geometrically spaced".into()));
    }
    let u0 = config.data.build(&config.grid)?;
    let run = |dt: T| -> Result<Field<T>, SolverError> {
        let steps = (config.t_end / dt).round().to_usize().unwrap_or(0);
        integrate(&u0, &config.params, dt, steps)
    };
    let reference_dt = dts[dts.len() - 1] / T::from_usize(REFERENCE_REFINEMENT).unwrap();
    let reference = run(reference_dt)?;
    let mut errors = Vec::with_capacity(dts.len());
    for &dt in &dts {
        let u = run(dt)?;
        let diff: Vec<Complex<T>> = u.values.iter().zip(&reference.values).map(|(a, b)| a - b).collect();
        errors.push(Field { values: diff, ..u }.l2_norm());
    }
    let scale = T::one() + reference.l2_norm();
    let max_err = errors.iter().fold(T::zero(), |a, &b| a.max(b));
    let order = if max_err <= T::lit(1e-12) * scale {
        ObservedOrder::Exact
    } else {
        let xs: Vec<T> = dts.iter().map(|d| d.ln()).collect();
        let ys: Vec<T> = errors.iter().map(|e| e.ln()).collect();
        ObservedOrder::Order(linear_fit(&xs, &ys).map(|f| f.slope).unwrap_or(T::nan()))
    };
    Ok(ConvergenceReport { dts, errors, reference_dt, order })
}
