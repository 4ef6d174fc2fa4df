use dnls_core::solver::{convergence_study, evolve, AbortReason, EvolveError, ObservedOrder};
use dnls_core::verify::{run_suite, Status};
use dnls_core::{Config64, Grid64, InitialData, Params64};

fn config(p: f64, amplitude: f64, t_end: f64) -> Config64 {
    let params = Params64::new(1, p, -1.0, -1.0).unwrap();
    let grid = Grid64::new(1, 512, 40.0).unwrap();
    let data = InitialData::Gaussian { amplitude, width: 1.0, momentum: vec![] };
    Config64::new(params, grid, data, 0.01, t_end)
}

#[test]
fn evolve_then_suite_has_no_failures() {
    for p in [1.5, 2.0, 3.0] {
        let series = evolve(&config(p, 1.0, 3.0)).unwrap();
        let lines = run_suite(&series);
        assert!(lines.iter().all(|l| l.status != Status::Fail), "p = {p}: {lines:#?}");
    }
}

#[test]
fn strang_order_is_two() {
    let cfg = config(2.0, 1.0, 1.0);
    let report = convergence_study(&cfg, &[0.04, 0.02, 0.01]).unwrap();
    match report.order {
        ObservedOrder::Order(k) => assert!((1.8..=2.2).contains(&k), "order {k}"),
        ObservedOrder::Exact => panic!("nonlinear problem reported exact"),
    }
}

#[test]
fn guard_abort_keeps_partial_series() {
    let mut cfg = config(2.0, 1.0, 40.0);
    cfg.grid = Grid64::new(1, 256, 8.0).unwrap();
    match evolve(&cfg) {
        Err(EvolveError::Aborted { reason: AbortReason::BoundaryContamination { fraction, .. }, partial }) => {
            assert!(fraction > 1e-6);
            assert!(!partial.is_empty());
        }
        other => panic!("expected guard abort, got {:?}", other.map(|s| s.len())),
    }
}

#[test]
fn runs_are_bit_identical() {
    let a = evolve(&config(2.0, 2.0, 1.0)).unwrap();
    let b = evolve(&config(2.0, 2.0, 1.0)).unwrap();
    assert_eq!(a.records, b.records);
    assert_eq!(a.times, b.times);
}
