//! Periodic grids, complex fields, and the norms and energies measured on them.
//!
//! The domain is `[−L, L)^d` with `n` samples per axis, stored row-major with
//! the first axis slowest. Integrals use the rectangle rule, which is
//! spectrally accurate for smooth periodic integrands and matches Parseval
//! for the discrete transform exactly.

use std::io::{self, Read, Write};
use std::sync::Arc;

use num_complex::Complex;
use num_traits::{Float, Zero};
use rustfft::{Fft, FftPlanner};
use thiserror::Error;

use crate::exponents::{holder_exponents, PhysParams};
use crate::scalar::Real;

/// Samples with `max_i |x_i| ≥ 0.9 L` form the outer shell.
pub const BOUNDARY_SHELL: f64 = 0.9;

const MAX_SAMPLES: usize = 1 << 28;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("invalid initial data: {0}")]
    Data(String),
    #[error("field length {got} does not match grid size {expected}")]
    Length { expected: usize, got: usize },
    #[error("field contains a non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("snapshot: {0}")]
    Snapshot(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Uniform periodic grid on `[−L, L)^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec<T> {
    pub d: usize,
    pub n: usize,
    pub half_width: T,
}

impl<T: Real> GridSpec<T> {
    pub fn new(d: usize, n: usize, half_width: T) -> Result<Self, FieldError> {
        if !(d == 1 || d == 2) {
            return Err(FieldError::Grid(format!("d must be 1 or 2, got {d}")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(FieldError::Grid(format!("n must be a power of two >= 8, got {n}")));
        }
        if !(half_width > T::zero()) || !half_width.is_finite() {
            return Err(FieldError::Grid(format!("half_width must be positive, got {half_width}")));
        }
        if n.checked_pow(d as u32).is_none_or(|len| len > MAX_SAMPLES) {
            return Err(FieldError::Grid(format!("{n}^{d} samples is too many")));
        }
        Ok(Self { d, n, half_width })
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dx(&self) -> T {
        T::lit(2.0) * self.half_width / T::from_usize(self.n).unwrap()
    }

    /// Quadrature weight `dx^d`.
    pub fn cell_volume(&self) -> T {
        self.dx().powi(self.d as i32)
    }

    pub fn coordinate(&self, i: usize) -> T {
        -self.half_width + T::from_usize(i).unwrap() * self.dx()
    }

    /// Axis indices of a flat index, first axis slowest.
    pub fn axes(&self, flat: usize) -> [usize; 2] {
        if self.d == 1 {
            [flat, 0]
        } else {
            [flat / self.n, flat % self.n]
        }
    }

    /// Coordinates of a flat index; only the first `d` entries are meaningful.
    pub fn point(&self, flat: usize) -> [T; 2] {
        let [i, j] = self.axes(flat);
        [self.coordinate(i), if self.d == 2 { self.coordinate(j) } else { T::zero() }]
    }

    pub fn radius_sq(&self, flat: usize) -> T {
        let x = self.point(flat);
        x[0] * x[0] + x[1] * x[1]
    }

    /// Signed mode number of transform index `i`: `i` below `n/2`, `i − n` above.
    pub fn mode(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// `ξ = π k / L` for transform index `i`.
    pub fn wavenumber(&self, i: usize) -> T {
        T::PI() * T::from_i64(self.mode(i)).unwrap() / self.half_width
    }
}

/// Complex samples of `u(t, ·)` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<T> {
    pub grid: GridSpec<T>,
    pub values: Vec<Complex<T>>,
    pub time: T,
}

impl<T: Real> Field<T> {
    pub fn zeros(grid: &GridSpec<T>) -> Self {
        Self { grid: grid.clone(), values: vec![Complex::zero(); grid.len()], time: T::zero() }
    }

    pub fn from_values(grid: &GridSpec<T>, values: Vec<Complex<T>>, time: T) -> Result<Self, FieldError> {
        if values.len() != grid.len() {
            return Err(FieldError::Length { expected: grid.len(), got: values.len() });
        }
        let field = Self { grid: grid.clone(), values, time };
        if let Some(idx) = field.first_non_finite() {
            return Err(FieldError::NonFinite(idx));
        }
        Ok(field)
    }

    /// Samples `f(x)` at every grid point; `x` has length `d`.
    pub fn from_fn(grid: &GridSpec<T>, mut f: impl FnMut(&[T]) -> Complex<T>) -> Self {
        let values = (0..grid.len())
            .map(|k| {
                let x = grid.point(k);
                f(&x[..grid.d])
            })
            .collect();
        Self { grid: grid.clone(), values, time: T::zero() }
    }

    pub fn first_non_finite(&self) -> Option<usize> {
        self.values.iter().position(|z| !(z.re.is_finite() && z.im.is_finite()))
    }

    pub fn scaled(&self, c: Complex<T>) -> Self {
        Self { values: self.values.iter().map(|z| *z * c).collect(), ..self.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|z| z.is_zero())
    }

    /// `(Σ |u|^r dx^d)^{1/r}` for `r ≥ 1`.
    pub fn lp_norm(&self, r: T) -> T {
        assert!(r >= T::one(), "Lebesgue exponent must be at least 1");
        let half = r / T::lit(2.0);
        let sum = if r == T::lit(2.0) {
            self.values.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b)
        } else {
            self.values.iter().map(|z| z.norm_sqr().powf(half)).fold(T::zero(), |a, b| a + b)
        };
        (sum * self.grid.cell_volume()).powf(T::one() / r)
    }

    /// `‖u‖₂²`.
    pub fn mass(&self) -> T {
        self.values.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b) * self.grid.cell_volume()
    }

    pub fn l2_norm(&self) -> T {
        self.mass().sqrt()
    }

    /// `‖u‖_{p+1}^{p+1}`.
    pub fn power_integral(&self, p: T) -> T {
        let e = (p + T::one()) / T::lit(2.0);
        self.values.iter().map(|z| z.norm_sqr().powf(e)).fold(T::zero(), |a, b| a + b)
            * self.grid.cell_volume()
    }

    /// `‖|x|^m u‖₂` with `x` the grid coordinate (not the periodic distance).
    pub fn weighted_norm(&self, m: u32) -> T {
        assert!(m >= 1, "weight power must be at least 1");
        let sum = self
            .values
            .iter()
            .enumerate()
            .map(|(k, z)| self.grid.radius_sq(k).powi(m as i32) * z.norm_sqr())
            .fold(T::zero(), |a, b| a + b);
        (sum * self.grid.cell_volume()).sqrt()
    }

    /// Fraction of the mass in the outer shell `max_i |x_i| ≥ 0.9 L`; zero for
    /// the zero field.
    pub fn boundary_mass_fraction(&self) -> T {
        let edge = T::lit(BOUNDARY_SHELL) * self.grid.half_width;
        let mut outer = T::zero();
        let mut total = T::zero();
        for (k, z) in self.values.iter().enumerate() {
            let x = self.grid.point(k);
            let m = z.norm_sqr();
            total = total + m;
            if Float::abs(x[0]) >= edge || (self.grid.d == 2 && Float::abs(x[1]) >= edge) {
                outer = outer + m;
            }
        }
        if total > T::zero() {
            outer / total
        } else {
            T::zero()
        }
    }

    /// Flat little-endian layout: `d`, `n` (u64), `L`, `t` (f64), then
    /// interleaved re/im f64 samples in row-major order.
    pub fn write_snapshot<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(&(self.grid.d as u64).to_le_bytes())?;
        w.write_all(&(self.grid.n as u64).to_le_bytes())?;
        w.write_all(&self.grid.half_width.as_f64().to_le_bytes())?;
        w.write_all(&self.time.as_f64().to_le_bytes())?;
        for z in &self.values {
            w.write_all(&z.re.as_f64().to_le_bytes())?;
            w.write_all(&z.im.as_f64().to_le_bytes())?;
        }
        w.flush()
    }

    pub fn read_snapshot<R: Read>(mut r: R) -> Result<Self, FieldError> {
        let mut word = [0u8; 8];
        let mut next = |r: &mut R| -> Result<[u8; 8], FieldError> {
            r.read_exact(&mut word)?;
            Ok(word)
        };
        let d = u64::from_le_bytes(next(&mut r)?) as usize;
        let n = u64::from_le_bytes(next(&mut r)?) as usize;
        let half_width = f64::from_le_bytes(next(&mut r)?);
        let time = f64::from_le_bytes(next(&mut r)?);
        let grid = GridSpec::new(d, n, T::lit(half_width))?;
        let mut values = Vec::with_capacity(grid.len());
        for _ in 0..grid.len() {
            let re = f64::from_le_bytes(next(&mut r)?);
            let im = f64::from_le_bytes(next(&mut r)?);
            values.push(Complex::new(T::lit(re), T::lit(im)));
        }
        let mut rest = Vec::new();
        r.read_to_end(&mut rest)?;
        if !rest.is_empty() {
            return Err(FieldError::Snapshot(format!("{} trailing bytes", rest.len())));
        }
        Self::from_values(&grid, values, T::lit(time))
    }
}

/// Samples `a·exp(−|x|²/(2σ²))·exp(i k·x)`.
pub fn gaussian_data<T: Real>(
    grid: &GridSpec<T>,
    amplitude: T,
    width: T,
    momentum: &[T],
) -> Result<Field<T>, FieldError> {
    if !(width > T::zero()) {
        return Err(FieldError::Data(format!("width must be positive, got {width}")));
    }
    if T::lit(6.0) * width > grid.half_width {
        return Err(FieldError::Data(format!(
            "width {width} too large for half_width {} (need 6σ <= L)",
            grid.half_width
        )));
    }
    if !momentum.is_empty() && momentum.len() != grid.d {
        return Err(FieldError::Data(format!("momentum has {} components, d = {}", momentum.len(), grid.d)));
    }
    let two_var = T::lit(2.0) * width * width;
    Ok(Field::from_fn(grid, |x| {
        let r2 = x.iter().fold(T::zero(), |a, &xi| a + xi * xi);
        let phase = x.iter().zip(momentum).fold(T::zero(), |a, (&xi, &ki)| a + xi * ki);
        Complex::from_polar(amplitude * (-r2 / two_var).exp(), phase)
    }))
}

/// Transform context for one grid: FFT plans and wavenumbers.
///
/// Scratch space is allocated per call, so a `Spectral` can be shared between
/// threads.
pub struct Spectral<T: Real> {
    grid: GridSpec<T>,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    xi: Vec<T>,
}

impl<T: Real> Spectral<T> {
    pub fn new(grid: &GridSpec<T>) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            grid: grid.clone(),
            forward: planner.plan_fft_forward(grid.n),
            inverse: planner.plan_fft_inverse(grid.n),
            xi: (0..grid.n).map(|i| grid.wavenumber(i)).collect(),
        }
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    /// Wavenumbers in transform order.
    pub fn wavenumbers(&self) -> &[T] {
        &self.xi
    }

    fn run(&self, plan: &Arc<dyn Fft<T>>, buf: &mut [Complex<T>]) {
        let mut scratch = vec![Complex::zero(); plan.get_inplace_scratch_len()];
        plan.process_with_scratch(buf, &mut scratch);
        if self.grid.d == 2 {
            transpose(buf, self.grid.n);
            plan.process_with_scratch(buf, &mut scratch);
            transpose(buf, self.grid.n);
        }
    }

    /// Unnormalized forward DFT in place.
    pub fn forward(&self, buf: &mut [Complex<T>]) {
        self.run(&self.forward, buf);
    }

    /// Inverse DFT in place, normalized so that `inverse ∘ forward = id`.
    pub fn inverse(&self, buf: &mut [Complex<T>]) {
        self.run(&self.inverse, buf);
        let scale = T::one() / T::from_usize(buf.len()).unwrap();
        for z in buf.iter_mut() {
            *z = *z * scale;
        }
    }

    /// Derivative wavenumber: `ξ`, except zero at the Nyquist index.
    fn derivative_xi(&self, i: usize) -> T {
        if i == self.grid.n / 2 {
            T::zero()
        } else {
            self.xi[i]
        }
    }

    /// `|ξ|²` at a flat transform index, Nyquist included.
    pub fn xi_sq(&self, flat: usize) -> T {
        let [i, j] = self.grid.axes(flat);
        let a = self.xi[i];
        if self.grid.d == 2 {
            a * a + self.xi[j] * self.xi[j]
        } else {
            a * a
        }
    }

    fn derivative_xi_sq(&self, flat: usize) -> T {
        let [i, j] = self.grid.axes(flat);
        let a = self.derivative_xi(i);
        if self.grid.d == 2 {
            let b = self.derivative_xi(j);
            a * a + b * b
        } else {
            a * a
        }
    }

    fn spectrum(&self, f: &Field<T>) -> Vec<Complex<T>> {
        debug_assert_eq!(f.grid, self.grid);
        let mut buf = f.values.clone();
        self.forward(&mut buf);
        buf
    }

    /// `‖∇u‖₂` by Parseval: `dx^d/N · Σ |ξ|² |û|²`.
    pub fn grad_norm(&self, f: &Field<T>) -> T {
        let hat = self.spectrum(f);
        let sum = hat
            .iter()
            .enumerate()
            .map(|(k, z)| self.derivative_xi_sq(k) * z.norm_sqr())
            .fold(T::zero(), |a, b| a + b);
        (sum * self.grid.cell_volume() / T::from_usize(hat.len()).unwrap()).sqrt()
    }

    /// `‖u‖₂` evaluated in transform space.
    pub fn l2_norm_spectral(&self, f: &Field<T>) -> T {
        let hat = self.spectrum(f);
        let sum = hat.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b);
        (sum * self.grid.cell_volume() / T::from_usize(hat.len()).unwrap()).sqrt()
    }

    /// Components of `∇u` obtained by multiplying the transform by `iξ`.
    pub fn gradient(&self, f: &Field<T>) -> Vec<Field<T>> {
        let hat = self.spectrum(f);
        (0..self.grid.d)
            .map(|axis| {
                let mut buf: Vec<Complex<T>> = hat
                    .iter()
                    .enumerate()
                    .map(|(k, z)| {
                        let xi = self.derivative_xi(self.grid.axes(k)[axis]);
                        *z * Complex::new(T::zero(), xi)
                    })
                    .collect();
                self.inverse(&mut buf);
                Field { grid: self.grid.clone(), values: buf, time: f.time }
            })
            .collect()
    }

    /// `E(u) = ½‖∇u‖₂² + λ₁/(p+1)·‖u‖_{p+1}^{p+1}`.
    pub fn energy(&self, f: &Field<T>, params: &PhysParams<T>) -> T {
        let g = self.grad_norm(f);
        energy_from_parts(g, f.power_integral(params.p), params)
    }

    /// `E(u) + γ‖u‖₂²`.
    pub fn augmented_energy(&self, f: &Field<T>, params: &PhysParams<T>, gamma: T) -> T {
        self.energy(f, params) + gamma * f.mass()
    }

    /// All diagnostics for one sample.
    pub fn record(&self, f: &Field<T>, params: &PhysParams<T>, gammas: &[T]) -> EnergyRecord<T> {
        let mass = f.mass();
        let grad = self.grad_norm(f);
        let power = f.power_integral(params.p);
        let energy = energy_from_parts(grad, power, params);
        let q = holder_exponents(params).q;
        EnergyRecord {
            mass,
            l2: mass.sqrt(),
            grad,
            lp1: power.powf(T::one() / (params.p + T::one())),
            weighted: f.weighted_norm(1),
            energy,
            e_aug: gammas.iter().map(|&g| energy + g * mass).collect(),
            lq: f.lp_norm(q),
            boundary_mass_fraction: f.boundary_mass_fraction(),
        }
    }
}

pub fn energy_from_parts<T: Real>(grad: T, power_integral: T, params: &PhysParams<T>) -> T {
    T::lit(0.5) * grad * grad + params.lambda_re / (params.p + T::one()) * power_integral
}

fn transpose<T: Copy>(buf: &mut [T], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}

/// Diagnostics recorded at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyRecord<T> {
    pub mass: T,
    pub l2: T,
    pub grad: T,
    /// `‖u‖_{p+1}`
    pub lp1: T,
    /// `‖xu‖₂`
    pub weighted: T,
    pub energy: T,
    /// `E + γ‖u‖₂²`, one per configured γ.
    pub e_aug: Vec<T>,
    pub lq: T,
    pub boundary_mass_fraction: T,
}

impl<T: Real> EnergyRecord<T> {
    /// `‖u‖_{p+1}^{p+1}`
    pub fn power_integral(&self, p: T) -> T {
        self.lp1.powf(p + T::one())
    }

    pub fn augmented(&self, gamma: T) -> T {
        self.energy + gamma * self.mass
    }

    pub fn h1_norm(&self) -> T {
        (self.mass + self.grad * self.grad).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn line(n: usize, l: f64) -> GridSpec<f64> {
        GridSpec::new(1, n, l).unwrap()
    }

    fn unit_gaussian() -> Field<f64> {
        gaussian_data(&line(1024, 20.0), 1.0, 1.0, &[]).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(3, 64, 1.0).is_err());
        assert!(GridSpec::new(1, 100, 1.0).is_err());
        assert!(GridSpec::new(1, 4, 1.0).is_err());
        assert!(GridSpec::new(1, 64, 0.0).is_err());
        let g = line(8, 4.0);
        assert_eq!(g.dx(), 1.0);
        assert_eq!(g.coordinate(0), -4.0);
        assert_eq!(g.mode(4), -4);
        assert_eq!(g.mode(7), -1);
        assert_eq!(g.wavenumber(1), PI / 4.0);
    }

    #[test]
    fn gaussian_norms_match_analytic_values() {
        let u = unit_gaussian();
        let sp = Spectral::new(&u.grid);
        assert!((u.mass() - PI.sqrt()).abs() < 1e-8);
        assert!((u.lp_norm(2.0) - PI.powf(0.25)).abs() < 1e-10);
        // ∫ e^{−3x²/2} = √(2π/3)
        assert!((u.lp_norm(3.0) - (2.0 * PI / 3.0).sqrt().powf(1.0 / 3.0)).abs() < 1e-10);
        let g = sp.grad_norm(&u);
        assert!((g * g - PI.sqrt() / 2.0).abs() < 1e-8);
        let w = u.weighted_norm(1);
        assert!((w * w - PI.sqrt() / 2.0).abs() < 1e-8);
        assert!(u.boundary_mass_fraction() < 1e-10);
    }

    #[test]
    fn gaussian_rejects_bad_widths() {
        let g = line(64, 5.0);
        assert!(gaussian_data(&g, 1.0, 0.0, &[]).is_err());
        assert!(gaussian_data(&g, 1.0, 1.0, &[]).is_err());
        assert!(gaussian_data(&g, 1.0, 0.5, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn zero_amplitude_gives_zero_norms() {
        let u = gaussian_data(&line(64, 10.0), 0.0, 1.0, &[]).unwrap();
        let sp = Spectral::new(&u.grid);
        assert_eq!(u.mass(), 0.0);
        assert_eq!(u.lp_norm(3.0), 0.0);
        assert_eq!(u.weighted_norm(2), 0.0);
        assert_eq!(sp.grad_norm(&u), 0.0);
        assert_eq!(u.boundary_mass_fraction(), 0.0);
        let params = PhysParams::new(1, 3.0, -1.0, -1.0).unwrap();
        let rec = sp.record(&u, &params, &[0.0, 1.0]);
        assert_eq!(rec.mass, 0.0);
        assert_eq!(rec.energy, 0.0);
        assert_eq!(rec.e_aug, vec![0.0, 0.0]);
        assert_eq!(rec.boundary_mass_fraction, 0.0);
    }

    #[test]
    fn plane_wave_gradient_is_exact() {
        let g = line(64, 8.0);
        let xi0 = g.wavenumber(5);
        let u = Field::from_fn(&g, |x| Complex::from_polar(1.0, xi0 * x[0]));
        let sp = Spectral::new(&g);
        let rel = (sp.grad_norm(&u) - xi0.abs() * u.l2_norm()).abs() / (xi0 * u.l2_norm());
        assert!(rel < 1e-12);
        let c = Field::from_fn(&g, |_| Complex::new(2.0, -1.0));
        assert!(sp.grad_norm(&c) < 1e-12);
    }

    #[test]
    fn gradient_components_match_parseval() {
        let g = GridSpec::new(2, 64, 12.0).unwrap();
        let u = gaussian_data(&g, 1.0, 1.5, &[0.5, -0.25]).unwrap();
        let sp = Spectral::new(&g);
        let parts = sp.gradient(&u);
        let sum: f64 = parts.iter().map(|f| f.mass()).sum();
        assert!((sum.sqrt() - sp.grad_norm(&u)).abs() < 1e-10);
        // ‖∇u‖² = σ²... for 2D Gaussian: |k|²‖u‖² + (d/2σ²)‖u‖²
        let expected = (0.5f64.powi(2) + 0.25f64.powi(2) + 1.0 / (1.5 * 1.5)) * u.mass();
        assert!((sum - expected).abs() < 1e-8);
    }

    #[test]
    fn energy_examples() {
        let u = unit_gaussian();
        let sp = Spectral::new(&u.grid);
        let params = PhysParams::new(1, 3.0, -1.0, -1.0).unwrap();
        let expected = 0.5 * (PI.sqrt() / 2.0) - 0.25 * (PI / 2.0).sqrt();
        let e = sp.energy(&u, &params);
        assert!((e - expected).abs() < 1e-8);
        let aug = sp.augmented_energy(&u, &params, 16.0);
        assert!((aug - (expected + 16.0 * PI.sqrt())).abs() < 1e-8);
        assert_eq!(sp.augmented_energy(&u, &params, 0.0), e);
        let free = PhysParams::new(1, 3.0, 0.0, -1.0).unwrap();
        let g = sp.grad_norm(&u);
        assert_eq!(sp.energy(&u, &free), 0.5 * g * g);
    }

    #[test]
    fn record_composite_gaussian() {
        let u = unit_gaussian();
        let sp = Spectral::new(&u.grid);
        let params = PhysParams::new(1, 3.0, -1.0, -1.0).unwrap();
        let rec = sp.record(&u, &params, &[0.0, 16.0]);
        assert!((rec.mass - PI.sqrt()).abs() < 1e-8);
        assert!((rec.mass - rec.l2 * rec.l2).abs() <= 1e-15 * rec.mass);
        assert!((rec.lp1.powi(4) - (PI / 2.0).sqrt()).abs() < 1e-8);
        // q = 1 for d = 1: ‖u‖₁ = √(2π)
        assert!((rec.lq - (2.0 * PI).sqrt()).abs() < 1e-8);
        assert!((rec.e_aug[1] - rec.energy - 16.0 * rec.mass).abs() < 1e-12);
        assert!((rec.h1_norm().powi(2) - 1.5 * PI.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn weighted_norm_single_sample_at_origin() {
        let g = line(16, 4.0);
        let mut u = Field::zeros(&g);
        u.values[8] = Complex::new(3.0, 0.0);
        assert_eq!(g.coordinate(8), 0.0);
        assert_eq!(u.weighted_norm(1), 0.0);
        assert_eq!(u.weighted_norm(3), 0.0);
    }

    #[test]
    fn snapshot_round_trip_and_truncation() {
        let g = GridSpec::new(2, 8, 3.0).unwrap();
        let mut u = gaussian_data(&g, 1.0, 0.4, &[1.0, 0.0]).unwrap();
        u.time = 1.25;
        let mut bytes = Vec::new();
        u.write_snapshot(&mut bytes).unwrap();
        assert_eq!(bytes.len(), 32 + 16 * 64);
        assert_eq!(&bytes[..8], &2u64.to_le_bytes());
        let back: Field<f64> = Field::read_snapshot(&bytes[..]).unwrap();
        assert_eq!(back, u);
        assert!(Field::<f64>::read_snapshot(&bytes[..40]).is_err());
    }

    #[test]
    fn from_values_rejects_nan() {
        let g = line(8, 1.0);
        let mut v = vec![Complex::new(0.0, 0.0); 8];
        v[3] = Complex::new(f64::NAN, 0.0);
        assert!(matches!(Field::from_values(&g, v, 0.0), Err(FieldError::NonFinite(3))));
        assert!(Field::from_values(&g, vec![Complex::new(0.0, 0.0); 7], 0.0).is_err());
    }

    #[test]
    fn generic_over_f32() {
        let g = GridSpec::<f32>::new(1, 256, 10.0).unwrap();
        let u = gaussian_data(&g, 1.0f32, 1.0, &[]).unwrap();
        assert!((u.mass() - std::f32::consts::PI.sqrt()).abs() < 1e-5);
    }
}
