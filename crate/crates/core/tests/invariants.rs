use dnls_core::exponents::{decay_exponent, sdc_check, DecayExponent};
use dnls_core::solver::{linear_step, nonlinear_step};
use dnls_core::{ExactExponents, ExactParams, Field64, Grid64, Params64, Rational, Spectral};
use num_complex::Complex;
use proptest::prelude::*;

fn bumps(grid: &Grid64, centers: &[(f64, f64, f64)]) -> Field64 {
    Field64::from_fn(grid, |x| {
        centers.iter().fold(Complex::new(0.0, 0.0), |acc, &(c, w, k)| {
            let r2: f64 = x.iter().map(|xi| (xi - c) * (xi - c)).sum();
            acc + Complex::from_polar((-r2 / (2.0 * w * w)).exp(), k * x[0])
        })
    })
}

fn bump_strategy() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec((-5.0..5.0f64, 0.5..2.0f64, -2.0..2.0f64), 1..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lp_norm_is_absolutely_homogeneous(b in bump_strategy(), c in 0.01..10.0f64, r in 1.0..6.0f64) {
        let grid = Grid64::new(1, 256, 20.0).unwrap();
        let f = bumps(&grid, &b);
        let g = f.scaled(Complex::from_polar(c, 0.7));
        let (lhs, rhs) = (g.lp_norm(r), c * f.lp_norm(r));
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
    }

    #[test]
    fn parseval_holds(b in bump_strategy(), d in 1usize..3) {
        let grid = Grid64::new(d, if d == 1 { 256 } else { 32 }, 12.0).unwrap();
        let f = bumps(&grid, &b);
        let spec = Spectral::new(&grid);
        let (x, k) = (f.l2_norm(), spec.l2_norm_spectral(&f));
        prop_assert!((x - k).abs() <= 1e-12 * x);
    }

    #[test]
    fn weighted_norm_bounded_by_box(b in bump_strategy(), m in 1u32..3) {
        let grid = Grid64::new(1, 256, 20.0).unwrap();
        let f = bumps(&grid, &b);
        prop_assert!(f.weighted_norm(m) <= 20f64.powi(m as i32) * f.l2_norm() * (1.0 + 1e-14));
    }

    #[test]
    fn sdc_is_invariant_under_positive_rescaling(
        re in -50i64..50, im in 1i64..50, c in 1i64..20, pn in 1i64..40
    ) {
        let p = Rational::new(20 + pn, 20);
        let base = ExactParams::new(1, p, Rational::from(re), Rational::from(-im)).unwrap();
        let scaled = ExactParams::new(1, p, Rational::from(re * c), Rational::from(-im * c)).unwrap();
        prop_assert_eq!(sdc_check(&base).unwrap(), sdc_check(&scaled).unwrap());
    }

    #[test]
    fn kappa_decreases_in_p(a in 1i64..39, b in 1i64..39) {
        prop_assume!(a < b);
        let kappa = |k: i64| {
            let params = ExactParams::new(1, Rational::new(20 + k, 20), -Rational::from(1), -Rational::from(1)).unwrap();
            match decay_exponent(&params).unwrap() {
                DecayExponent::Subcritical { kappa } => kappa,
                other => panic!("unexpected {other:?}"),
            }
        };
        prop_assert!(kappa(a) > kappa(b));
    }

    #[test]
    fn exact_identities_on_rational_powers(num in 1i64..200, den in 1i64..50, d in 1u32..3) {
        let p = Rational::from(1) + Rational::new(num, den);
        let params = ExactParams::new(d, p, -Rational::from(1), -Rational::from(1)).unwrap();
        let set = ExactExponents::compute(&params);
        let res = set.identity_residuals(&params);
        prop_assert!(res.within(&Rational::from(0)));
        prop_assert!(set.beta > p + Rational::from(1));
    }

    #[test]
    fn nonlinear_step_commutes_with_phase(
        b in bump_strategy(), phi in -3.0..3.0f64, tau in 0.0..0.5f64, re in -3.0..3.0f64, im in -3.0..0.0f64
    ) {
        let grid = Grid64::new(1, 64, 10.0).unwrap();
        let params = Params64::new(1, 2.5, re, im).unwrap();
        let f = bumps(&grid, &b);
        let rot = Complex::from_polar(1.0, phi);
        let a = nonlinear_step(&f.scaled(rot), tau, &params).unwrap();
        let b = nonlinear_step(&f, tau, &params).unwrap().scaled(rot);
        for (x, y) in a.values.iter().zip(&b.values) {
            prop_assert!((x - y).norm() <= 1e-12 * (1.0 + y.norm()));
        }
    }

    #[test]
    fn nonlinear_step_never_adds_mass(b in bump_strategy(), tau in 0.0..1.0f64, im in -3.0..0.0f64) {
        let grid = Grid64::new(1, 64, 10.0).unwrap();
        let params = Params64::new(1, 3.0, -1.0, im).unwrap();
        let f = bumps(&grid, &b);
        prop_assert!(nonlinear_step(&f, tau, &params).unwrap().mass() <= f.mass());
    }

    #[test]
    fn linear_step_is_unitary(b in bump_strategy(), tau in -2.0..2.0f64) {
        let grid = Grid64::new(1, 128, 15.0).unwrap();
        let f = bumps(&grid, &b);
        let g = linear_step(&f, tau);
        prop_assert!((g.mass() - f.mass()).abs() <= 1e-12 * f.mass());
    }

    #[test]
    fn snapshot_round_trip(b in bump_strategy(), t in 0.0..100.0f64) {
        let grid = Grid64::new(1, 64, 10.0).unwrap();
        let mut f = bumps(&grid, &b);
        f.time = t;
        let mut buf = Vec::new();
        f.write_snapshot(&mut buf).unwrap();
        prop_assert_eq!(Field64::read_snapshot(buf.as_slice()).unwrap(), f);
    }
}
