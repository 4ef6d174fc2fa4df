//! Weighted interpolation and Gagliardo–Nirenberg checks on single fields.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::VerifyError;
use crate::exponents::{gn_parameters, PhysParams};
use crate::field::{Field, GridSpec, Spectral};
use crate::scalar::Real;

/// Adaptive Simpson on `[a, b]`.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Whether `(d, q, m)` lies in the range of the weighted interpolation inequality.
pub fn interpolation_range_ok(d: usize, q: f64, m: u32) -> bool {
    if d == 1 {
        (1.0..2.0).contains(&q)
    } else {
        q > 2.0 * d as f64 / (d as f64 + 2.0 * m as f64) && q < 2.0
    }
}

/// `K = ‖(1+|y|^m)^{−1}‖_{L^s(ℝ^d)}` with `s = 2q/(2−q)`.
///
/// Radial reduction splits at `r = 1`; substituting `r = w^{1/d}` on the
/// inner part and `r = v^{−1/(ms−d)}` on the outer part leaves two bounded
/// integrands on `[0, 1]`.
pub fn interpolation_constant(d: usize, q: f64, m: u32) -> Result<f64, VerifyError> {
    if q == 2.0 {
        return Err(VerifyError::Precondition("q = 2 makes the Hölder exponent 2q/(2−q) infinite".into()));
    }
    if !interpolation_range_ok(d, q, m) {
        return Err(VerifyError::Precondition(format!("q = {q} is outside the range for d = {d}, m = {m}")));
    }
    let s = 2.0 * q / (2.0 - q);
    let (df, mf) = (d as f64, m as f64);
    let tail = mf * s - df;
    let sphere = if d == 1 { 2.0 } else { 2.0 * std::f64::consts::PI };
    let inner = simpson(&|w: f64| (1.0 + w.powf(mf / df)).powf(-s), 0.0, 1.0, 1e-15) / df;
    let outer = simpson(&|v: f64| (1.0 + v.powf(mf / tail)).powf(-s), 0.0, 1.0, 1e-15) / tail;
    Ok((sphere * (inner + outer)).powf(1.0 / s))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolationCheck<T> {
    pub lhs: T,
    pub rhs: T,
    pub ratio: T,
}

/// `‖f‖_q` against `2K‖f‖₂^{1−dα/m}‖|x|^m f‖₂^{dα/m}`, `α = 1/q − 1/2`.
pub fn check_weighted_interpolation<T: Real>(f: &Field<T>, q: T, m: u32) -> Result<InterpolationCheck<T>, VerifyError> {
    if f.is_zero() {
        return Err(VerifyError::Precondition("interpolation check needs a nonzero field".into()));
    }
    let d = f.grid.d;
    let k = T::lit(interpolation_constant(d, q.as_f64(), m)?);
    let alpha = T::one() / q - T::lit(0.5);
    let e = T::from_usize(d).unwrap() * alpha / T::from_u32(m).unwrap();
    let lhs = f.lp_norm(q);
    let rhs = T::lit(2.0) * k * f.l2_norm().powf(T::one() - e) * f.weighted_norm(m).powf(e);
    Ok(InterpolationCheck { lhs, rhs, ratio: lhs / rhs })
}

/// `|u|^{(p+1)/2}`, the profile the energy argument feeds to Gagliardo–Nirenberg.
pub fn gn_profile<T: Real>(u: &Field<T>, p: T) -> Field<T> {
    let e = (p + T::one()) / T::lit(4.0);
    Field {
        values: u.values.iter().map(|z| Complex::new(z.norm_sqr().powf(e), T::zero())).collect(),
        ..u.clone()
    }
}

/// `‖f‖_{4p/(p+1)} / (‖f‖₂^{1−θ}‖∇f‖₂^θ)` with `θ = d(p−1)/(4p)`.
pub fn check_gn<T: Real>(f: &Field<T>, params: &PhysParams<T>) -> Result<T, VerifyError> {
    if f.is_zero() {
        return Err(VerifyError::Precondition("Gagliardo–Nirenberg check needs a nonzero field".into()));
    }
    let theta = gn_parameters(params)?.theta;
    let spectral = Spectral::new(&f.grid);
    let r = T::lit(4.0) * params.p / (params.p + T::one());
    let grad = spectral.grad_norm(f);
    Ok(f.lp_norm(r) / (f.l2_norm().powf(T::one() - theta) * grad.powf(theta)))
}

/// A smooth, effectively band-limited random field: a sum of 1–4 modulated
/// Gaussian bumps with random complex weights, centers, widths and momenta.
/// Every bump keeps `6σ` inside the central half of the domain.
pub fn random_field<T: Real, R: Rng>(grid: &GridSpec<T>, rng: &mut R) -> Field<T> {
    let l = grid.half_width.as_f64();
    let bumps: Vec<(Complex<f64>, [f64; 2], f64, [f64; 2])> = (0..rng.gen_range(1..=4))
        .map(|_| {
            let weight = Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let center = [rng.gen_range(-0.25 * l..0.25 * l), rng.gen_range(-0.25 * l..0.25 * l)];
            let width = rng.gen_range(0.01 * l..0.04 * l);
            let momentum = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            (weight, center, width, momentum)
        })
        .collect();
    Field::from_fn(grid, |x| {
        let mut acc = Complex::new(0.0, 0.0);
        for (w, c, s, k) in &bumps {
            let (mut r2, mut phase) = (0.0, 0.0);
            for (i, xi) in x.iter().enumerate() {
                let y = xi.as_f64() - c[i];
                r2 += y * y;
                phase += k[i] * y;
            }
            acc += w * Complex::from_polar((-r2 / (2.0 * s * s)).exp(), phase);
        }
        Complex::new(T::lit(acc.re), T::lit(acc.im))
    })
}

/// One `(d, q, m)` combination of the interpolation batch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolationCase {
    pub d: usize,
    pub q: f64,
    pub m: u32,
}

/// The combinations exercised by [`interpolation_batch`].
pub fn interpolation_matrix() -> Vec<InterpolationCase> {
    let mut cases = Vec::new();
    for &q in &[1.0, 1.25, 1.5] {
        for m in 1..=2 {
            cases.push(InterpolationCase { d: 1, q, m });
        }
    }
    cases.push(InterpolationCase { d: 2, q: 1.5, m: 1 });
    cases
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchOutcome {
    pub seed: u64,
    pub case: InterpolationCase,
    pub ratio: f64,
}

/// Checks `count` random fields per case. Seeds are `base_seed..base_seed+count`;
/// work fans out across threads and results are sorted by `(case, seed)`.
pub fn interpolation_batch(base_seed: u64, count: usize) -> Result<Vec<BatchOutcome>, VerifyError> {
    let line = GridSpec::new(1, 1024, 40.0)?;
    let plane = GridSpec::new(2, 128, 20.0)?;
    let cases = interpolation_matrix();
    let jobs: Vec<(usize, u64)> =
        (0..cases.len()).flat_map(|c| (0..count as u64).map(move |s| (c, base_seed + s))).collect();
    let mut out: Vec<(usize, BatchOutcome)> = jobs
        .par_iter()
        .map(|&(c, seed)| {
            let case = cases[c];
            let grid = if case.d == 1 { &line } else { &plane };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f: Field<f64> = random_field(grid, &mut rng);
            let check = check_weighted_interpolation(&f, case.q, case.m)?;
            Ok((c, BatchOutcome { seed, case, ratio: check.ratio }))
        })
        .collect::<Result<_, VerifyError>>()?;
    out.sort_by_key(|a| (a.0, a.1.seed));
    Ok(out.into_iter().map(|(_, o)| o).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::gaussian_data;
    use std::f64::consts::PI;

    #[test]
    fn interpolation_constant_anchor() {
        let k = interpolation_constant(1, 1.0, 1).unwrap();
        assert!((k - 2f64.sqrt()).abs() < 1e-10, "K = {k}");
    }

    #[test]
    fn interpolation_constant_other_closed_forms() {
        // d = 1, m = 2, q = 1: ∫(1+y²)^{-2} = π/2
        let k = interpolation_constant(1, 1.0, 2).unwrap();
        assert!((k - (PI / 2.0).sqrt()).abs() < 1e-10);
        // d = 2, m = 1, q = 1.5 (s = 6): 2π∫ r(1+r)^{-6} dr = 2π/20
        let k = interpolation_constant(2, 1.5, 1).unwrap();
        assert!((k - (2.0 * PI / 20.0).powf(1.0 / 6.0)).abs() < 1e-10);
    }

    #[test]
    fn interpolation_range_is_enforced() {
        assert!(interpolation_constant(1, 2.0, 1).is_err());
        assert!(interpolation_constant(1, 0.9, 1).is_err());
        assert!(interpolation_constant(2, 1.0, 1).is_err());
        assert!(interpolation_constant(2, 1.1, 1).is_ok());
    }

    #[test]
    fn gaussian_interpolation_example() {
        let g = GridSpec::new(1, 1024, 20.0).unwrap();
        let f = gaussian_data(&g, 1.0, 1.0, &[]).unwrap();
        let c = check_weighted_interpolation(&f, 1.0, 1).unwrap();
        assert!((c.lhs - (2.0 * PI).sqrt()).abs() < 1e-8);
        assert!(c.ratio <= 1.0);
        assert!(check_weighted_interpolation(&Field::zeros(&g), 1.0, 1).is_err());
    }

    #[test]
    fn interpolation_ratio_is_dilation_invariant() {
        let g = GridSpec::<f64>::new(1, 2048, 40.0).unwrap();
        let base = gaussian_data(&g, 1.0, 1.0, &[0.3]).unwrap();
        let r0 = check_weighted_interpolation(&base, 1.25, 1).unwrap().ratio;
        for s in [0.5, 2.0] {
            let f = Field::from_fn(&g, |x| {
                let y = x[0] / s;
                Complex::from_polar((-y * y / 2.0).exp(), 0.3 * y)
            });
            let r = check_weighted_interpolation(&f, 1.25, 1).unwrap().ratio;
            assert!((r - r0).abs() < 1e-6, "s = {s}: {r} vs {r0}");
        }
    }

    #[test]
    fn gn_ratio_invariances() {
        let g = GridSpec::<f64>::new(1, 2048, 40.0).unwrap();
        let params = PhysParams::new(1, 3.0, -1.0, -1.0).unwrap();
        let u = gaussian_data(&g, 1.3, 1.0, &[]).unwrap();
        let f = gn_profile(&u, params.p);
        let r0 = check_gn(&f, &params).unwrap();
        let r1 = check_gn(&f.scaled(Complex::new(0.0, 3.0)), &params).unwrap();
        assert!((r0 - r1).abs() < 1e-12 * r0);
        let dilated = Field::from_fn(&g, |x| {
            let y = x[0] / 2.0;
            Complex::new((-y * y).exp(), 0.0)
        });
        let base = Field::from_fn(&g, |x| Complex::new((-x[0] * x[0]).exp(), 0.0));
        let (a, b) = (check_gn(&base, &params).unwrap(), check_gn(&dilated, &params).unwrap());
        assert!((a - b).abs() < 1e-8 * a);
        assert!(check_gn(&Field::zeros(&g), &params).is_err());
    }

    #[test]
    fn small_batch_passes() {
        let out = interpolation_batch(7, 5).unwrap();
        assert_eq!(out.len(), 5 * interpolation_matrix().len());
        assert!(out.iter().all(|o| o.ratio <= 1.0 + 1e-6));
        assert_eq!(out, interpolation_batch(7, 5).unwrap());
    }
}
