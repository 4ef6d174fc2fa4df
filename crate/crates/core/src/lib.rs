//! Pseudospectral simulation and verification for the attractive-dissipative
//! nonlinear Schrödinger equation
//!
//! ```text
//! i ∂ₜu + ½Δu = λ|u|^{p−1}u,   Im λ < 0,   x ∈ [−L, L)^d (periodic)
//! ```
//!
//! The crate is split into four layers:
//!
//! * [`exponents`]: closed-form exponents, rates and regime classification.
//!   Generic over any field-like [`Scalar`], so identities can be checked
//!   exactly with [`Rational`].
//! * [`field`]: periodic grids, complex fields, norms and energies.
//! * [`solver`]: Strang splitting with an exactly solved dissipative substep.
//! * [`verify`]: executable checks over diagnostics series and fields.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the aliases below
//! pin the common concrete choices.

pub mod exponents;
pub mod field;
pub mod scalar;
pub mod solver;
pub mod verify;

pub use exponents::{DecayExponent, ExponentError, ExponentSet, PhysParams, ProofConstants};
pub use field::{EnergyRecord, Field, FieldError, GridSpec, Spectral};
pub use scalar::{Real, Scalar};
pub use solver::{DiagnosticsSeries, InitialData, RunConfig, SolverError, Stepper};

/// Exact rational scalar used for exponent bookkeeping.
pub type Rational = num_rational::Rational64;

pub type Params64 = PhysParams<f64>;
pub type ExactParams = PhysParams<Rational>;
pub type Exponents64 = ExponentSet<f64>;
pub type ExactExponents = ExponentSet<Rational>;
pub type Grid64 = GridSpec<f64>;
pub type Field64 = Field<f64>;
pub type Field32 = Field<f32>;
pub type Record64 = EnergyRecord<f64>;
pub type Config64 = RunConfig<f64>;
pub type Series64 = DiagnosticsSeries<f64>;
