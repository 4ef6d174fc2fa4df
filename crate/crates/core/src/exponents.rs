//! Closed-form exponents, rate laws and regime classification.
//!
//! Everything here is a pure function of the equation data `(d, p, λ)`.
//! The arithmetic-only formulas are generic over [`Scalar`] so that the
//! exponent identities can be asserted exactly with rational `p`; anything
//! that needs `powf`/`ln` is restricted to [`Real`].

use thiserror::Error;

use crate::scalar::{Real, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExponentError {
    #[error("dimension must be at least 1, got {0}")]
    Dimension(u32),
    #[error("p must exceed 1, got {0}")]
    PowerTooSmall(String),
    #[error("p = {p} lies outside the decay range 1 < p <= 1 + 2/d (d = {d})")]
    OutsideDecayRange { d: u32, p: String },
    #[error("p = {p} lies outside 1 < p < 1 + 4/d (d = {d})")]
    OutsideEnergyRange { d: u32, p: String },
    #[error("Im λ must be negative, got {0}")]
    NotDissipative(String),
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: String },
    #[error("p1 must exceed 1 for g to have a positive root, got {0}")]
    NoPositiveRoot(String),
    #[error("the critical rate is only defined for t >= 1, got t = {0}")]
    CriticalTimeTooSmall(String),
}

/// Equation data: dimension, power and the complex coefficient λ = λ₁ + iλ₂.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysParams<T> {
    pub d: u32,
    pub p: T,
    pub lambda_re: T,
    pub lambda_im: T,
}

impl<T: Scalar> PhysParams<T> {
    /// Checks `d >= 1` and `p > 1`. The sign of `Im λ` is checked by the
    /// operations that need it, since `Im λ = 0` is useful for free-evolution
    /// tests.
    pub fn new(d: u32, p: T, lambda_re: T, lambda_im: T) -> Result<Self, ExponentError> {
        if d == 0 {
            return Err(ExponentError::Dimension(d));
        }
        if p <= T::one() {
            return Err(ExponentError::PowerTooSmall(format!("{p:?}")));
        }
        Ok(Self { d, p, lambda_re, lambda_im })
    }

    pub fn dim(&self) -> T {
        T::int(self.d as i64)
    }

    /// `1 + 2/d`, the power at which the decay becomes logarithmic.
    pub fn critical_power(&self) -> T {
        T::one() + T::int(2) / self.dim()
    }

    /// `1 + 4/d`, the upper end of the energy argument.
    pub fn energy_power_limit(&self) -> T {
        T::one() + T::int(4) / self.dim()
    }

    pub fn is_dissipative(&self) -> bool {
        self.lambda_im < T::zero()
    }

    pub fn is_attractive(&self) -> bool {
        self.lambda_re < T::zero()
    }

    fn p_string(&self) -> String {
        format!("{:?}", self.p)
    }
}

/// Decay exponent of `‖u(t)‖₂`.
#[derive(Debug, Clone, PartialEq)]
pub enum DecayExponent<T> {
    /// `‖u(t)‖₂ ≲ (1+t)^{−κ}`.
    Subcritical { kappa: T },
    /// `‖u(t)‖₂ ≲ (log(1+t))^{−ℓ}` at `p = 1 + 2/d`.
    Critical { log_exponent: T },
}

impl<T: Clone> DecayExponent<T> {
    pub fn is_critical(&self) -> bool {
        matches!(self, DecayExponent::Critical { .. })
    }

    /// κ for the power law, ℓ for the logarithmic law.
    pub fn value(&self) -> T {
        match self {
            DecayExponent::Subcritical { kappa } => kappa.clone(),
            DecayExponent::Critical { log_exponent } => log_exponent.clone(),
        }
    }
}

/// `2/((d+2)(p−1))`.
pub fn log_exponent<T: Scalar>(params: &PhysParams<T>) -> T {
    T::int(2) / ((params.dim() + T::int(2)) * (params.p.clone() - T::one()))
}

pub fn decay_exponent<T: Scalar>(params: &PhysParams<T>) -> Result<DecayExponent<T>, ExponentError> {
    let critical = params.critical_power();
    if params.p <= T::one() || params.p > critical {
        return Err(ExponentError::OutsideDecayRange { d: params.d, p: params.p_string() });
    }
    let ell = log_exponent(params);
    if params.p == critical {
        return Ok(DecayExponent::Critical { log_exponent: ell });
    }
    let d = params.dim();
    let kappa = ell * (T::one() - d * (params.p.clone() - T::one()) / T::int(2));
    Ok(DecayExponent::Subcritical { kappa })
}

/// Hölder data `(q, α, β)` used to bound `‖u‖_{p+1}^{p+1}` from below.
#[derive(Debug, Clone, PartialEq)]
pub struct HolderExponents<T> {
    pub q: T,
    pub alpha: T,
    pub beta: T,
}

pub fn holder_exponents<T: Scalar>(params: &PhysParams<T>) -> HolderExponents<T> {
    let d = params.dim();
    let q = if params.d == 1 {
        T::one()
    } else {
        T::int(2) * (d.clone() + T::one()) / (d + T::int(2))
    };
    let alpha = T::one() / q.clone() - T::ratio(1, 2);
    let beta = ((params.p.clone() + T::one()) / q.clone() - T::one()) / alpha.clone();
    debug_assert!(beta > params.p.clone() + T::one());
    HolderExponents { q, alpha, beta }
}

/// Gagliardo–Nirenberg exponent θ and the Young exponent p₁.
#[derive(Debug, Clone, PartialEq)]
pub struct GnParameters<T> {
    pub theta: T,
    pub p1: T,
}

pub fn gn_parameters<T: Scalar>(params: &PhysParams<T>) -> Result<GnParameters<T>, ExponentError> {
    if params.p >= params.energy_power_limit() {
        return Err(ExponentError::OutsideEnergyRange { d: params.d, p: params.p_string() });
    }
    let d = params.dim();
    let p = params.p.clone();
    let spread = d.clone() * (p.clone() - T::one());
    let theta = spread.clone() / (T::int(4) * p.clone());
    let p1 = (T::int(4) * p.clone() - spread.clone()) / (T::int(2) * (p + T::one()) - spread);
    Ok(GnParameters { theta, p1 })
}

/// Every derived exponent for one `(d, p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentSet<T> {
    pub q: T,
    pub alpha: T,
    pub beta: T,
    /// `None` when `p ≥ 1 + 4/d`.
    pub theta: Option<T>,
    pub p1: Option<T>,
    /// `None` when `p > 1 + 2/d`.
    pub kappa: Option<DecayExponent<T>>,
    pub log_exp: T,
}

impl<T: Scalar> ExponentSet<T> {
    pub fn compute(params: &PhysParams<T>) -> Self {
        let HolderExponents { q, alpha, beta } = holder_exponents(params);
        let gn = gn_parameters(params).ok();
        Self {
            q,
            alpha,
            beta,
            theta: gn.as_ref().map(|g| g.theta.clone()),
            p1: gn.map(|g| g.p1),
            kappa: decay_exponent(params).ok(),
            log_exp: log_exponent(params),
        }
    }

    /// Residuals of the exponent identities used in the decay argument.
    /// All are exactly zero for rational `p`.
    pub fn identity_residuals(&self, params: &PhysParams<T>) -> IdentityResiduals<T> {
        let d = params.dim();
        let p = params.p.clone();
        let rate = (p.clone() + T::one() - self.beta.clone()) * d.clone() * self.alpha.clone()
            - d.clone() * (T::one() - p.clone()) / T::int(2);
        let holder = self.beta.clone() * self.alpha.clone()
            - ((p.clone() + T::one()) / self.q.clone() - T::one());
        let theta = self
            .theta
            .clone()
            .map(|th| th * T::int(4) * p.clone() / (d * (p - T::one())) - T::one());
        IdentityResiduals { rate, holder, theta }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityResiduals<T> {
    /// `(p+1−β)dα − d(1−p)/2`
    pub rate: T,
    /// `βα − ((p+1)/q − 1)`
    pub holder: T,
    /// `θ·4p/(d(p−1)) − 1`
    pub theta: Option<T>,
}

impl<T: Scalar> IdentityResiduals<T> {
    pub fn within(&self, tol: &T) -> bool {
        let small = |x: &T| {
            let a = if *x < T::zero() { -x.clone() } else { x.clone() };
            a <= *tol
        };
        small(&self.rate) && small(&self.holder) && self.theta.as_ref().is_none_or(small)
    }
}

/// Result of testing the strong dissipative condition `(p−1)|λ| ≤ (p+1)|Im λ|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SdcReport {
    pub satisfied: bool,
    /// `Re λ < 0`.
    pub attractive: bool,
}

/// Compares squares, so this is exact for rational inputs.
pub fn sdc_check<T: Scalar>(params: &PhysParams<T>) -> Result<SdcReport, ExponentError> {
    if !params.is_dissipative() {
        return Err(ExponentError::NotDissipative(format!("{:?}", params.lambda_im)));
    }
    let re = params.lambda_re.clone();
    let im = params.lambda_im.clone();
    let pm = params.p.clone() - T::one();
    let pp = params.p.clone() + T::one();
    let lhs = pm.clone() * pm * (re.clone() * re + im.clone() * im.clone());
    let rhs = pp.clone() * pp * im.clone() * im;
    Ok(SdcReport { satisfied: lhs <= rhs, attractive: params.is_attractive() })
}

/// Constants the energy argument only needs to exist. They are inputs, never
/// ground truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProofConstants<T> {
    pub eps0: T,
    pub c_h: T,
    pub c_e: T,
}

impl<T: Real> Default for ProofConstants<T> {
    fn default() -> Self {
        Self { eps0: T::lit(1e-2), c_h: T::one(), c_e: T::lit(2.0) }
    }
}

/// `g(X) = C_E|λ₂|X^{p₁} − 2|λ₂|X`.
pub fn g_function<T: Real>(x: T, p1: T, c_e: T, lambda_im: T) -> T {
    let l2 = num_traits::Float::abs(lambda_im);
    c_e * l2 * x.powf(p1) - T::lit(2.0) * l2 * x
}

/// Positive zero of [`g_function`]: `(2/C_E)^{1/(p₁−1)}`, independent of λ₂.
pub fn g_root<T: Real>(p1: T, c_e: T) -> Result<T, ExponentError> {
    if p1 <= T::one() {
        return Err(ExponentError::NoPositiveRoot(p1.to_string()));
    }
    if c_e <= T::zero() {
        return Err(ExponentError::NonPositive { name: "c_e", value: c_e.to_string() });
    }
    Ok((T::lit(2.0) / c_e).powf(T::one() / (p1 - T::one())))
}

/// Scaling parameter μ that makes the rescaled data small, and γ = μ⁻².
pub fn scaling_mu<T: Real>(
    params: &PhysParams<T>,
    h1_norm: T,
    consts: &ProofConstants<T>,
) -> Result<(T, T), ExponentError> {
    if params.p >= params.energy_power_limit() {
        return Err(ExponentError::OutsideEnergyRange { d: params.d, p: params.p.to_string() });
    }
    for (name, value) in [("h1_norm", h1_norm), ("eps0", consts.eps0), ("c_h", consts.c_h)] {
        if value <= T::zero() {
            return Err(ExponentError::NonPositive { name, value: value.to_string() });
        }
    }
    let p = params.p;
    let exponent = T::lit(2.0) / (p - T::one()) - params.dim() / T::lit(2.0);
    let target = consts.eps0.powf(T::one() / (p + T::one()));
    let mu = (target / (consts.c_h * h1_norm)).powf(T::one() / exponent).min(T::one());
    Ok((mu, T::one() / (mu * mu)))
}

/// Rate envelope `c(1+t)^{−κ}` or `c(log(1+t))^{−ℓ}`.
pub fn hln_rate_bound<T: Real>(params: &PhysParams<T>, t: T, c: T) -> Result<T, ExponentError> {
    match decay_exponent(params)? {
        DecayExponent::Subcritical { kappa } => Ok(c * (T::one() + t).powf(-kappa)),
        DecayExponent::Critical { log_exponent } => {
            if t < T::one() {
                return Err(ExponentError::CriticalTimeTooSmall(t.to_string()));
            }
            Ok(c * t.ln_1p().powf(-log_exponent))
        }
    }
}
