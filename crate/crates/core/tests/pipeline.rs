use std::sync::Arc;

use hyperbaker::algebra::Rational;
use hyperbaker::baker::{baker_matrix, DivisorSpec};
use hyperbaker::curve::{parse_curve_json, CurveV, ScaledModel, Symbols};
use hyperbaker::harness::report::canonical_string;
use hyperbaker::harness::{run_suite, RunConfig, Suite};
use hyperbaker::hfunc::{shifted, HEvaluator, Route};
use hyperbaker::numerics::periods::{ExactStage, Precision};
use hyperbaker::omega;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn evaluator(c: &CurveV) -> HEvaluator {
    HEvaluator::for_curve(Arc::new(ExactStage::new(c).unwrap()), Precision::Double, 0).unwrap()
}

#[test]
fn generic_genus_two_exact_stage() {
    let sym = Symbols::generic(2);
    let bm = baker_matrix(&sym, &DivisorSpec::Symbolic).unwrap();
    assert!(bm.is_symmetric());
    assert!(bm.weights_ok());
    let od = omega::compute(&ScaledModel::new(sym)).unwrap();
    assert!(od.is_symmetric());
    assert!(od.weights_ok());
    assert_eq!(od.kappa_numer.len(), 2);
}

#[test]
fn concrete_divisor_on_the_quartic() {
    let c = CurveV::exact(1, &[1, 0, 0, 0, -1], 1).unwrap();
    let sym = Symbols::concrete(&c, None).unwrap();
    let bm = baker_matrix(&sym, &DivisorSpec::Concrete(vec![Rational::new(3, 2)])).unwrap();
    assert_eq!(bm.p(2, 2).to_string(), "10");
    // x = a is a branch point and gives a pole
    assert!(baker_matrix(&sym, &DivisorSpec::Concrete(vec![Rational::one()])).is_err());
}

#[test]
fn repeated_points_are_rejected() {
    let c = CurveV::random_rational(2, 3);
    let sym = Symbols::concrete(&c, None).unwrap();
    let x = Rational::new(7, 5);
    assert!(baker_matrix(&sym, &DivisorSpec::Concrete(vec![x.clone(), x])).is_err());
}

#[test]
fn genus_two_numeric_pipeline() {
    let h = evaluator(&CurveV::random_rational(2, 3));
    let bm = h.baker_matrix().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..3 {
        let pts = h.random_divisor(&mut rng);
        assert!(h.end_to_end(&bm, &pts).unwrap() < 1e-7);
    }
    for _ in 0..3 {
        let v = h.random_v(&mut rng).unwrap();
        let a = h.log_h(&v, Route::Theta).unwrap();
        let b = h.log_h(&v, Route::Definition).unwrap();
        assert!(((a - b).exp() - 1.0).norm() < 1e-9);
        assert!(h.quasi_periodicity_residual(&v, &[1, 0], &[0, -1]).unwrap() < 1e-8);
        let w = shifted(&v, &h.pd, &[2, 1], &[1, 0]);
        assert!(h.baker_from_h(&w).is_ok());
        assert!(h.p_wp_residual(&v).unwrap() < 1e-7);
    }
}

#[test]
fn periods_report_is_deterministic() {
    let cfg = RunConfig::new(Suite::Periods, 2, 4);
    let a = run_suite(&cfg).unwrap();
    let b = run_suite(&cfg).unwrap();
    assert!(a.all_pass(), "{:?}", a.failures().map(|c| c.line()).collect::<Vec<_>>());
    let (ja, jb) = (canonical_string(&a.to_json()), canonical_string(&b.to_json()));
    assert_eq!(ja, jb);
    assert!(!ja.contains("elapsed"));
}

#[test]
fn curve_files() {
    let ok = parse_curve_json(r#"{"genus": 1, "nu": ["1", 0, 0, 0, -1], "branch_point": "1"}"#).unwrap();
    assert_eq!(ok.curve.genus(), 1);
    let by_index = parse_curve_json(r#"{"genus": 1, "nu": [1, 0, 0, 0, -1], "branch_point": {"index": 0}}"#).unwrap();
    assert!(by_index.curve.n_at(&Rational::zero()).is_negative());
    for bad in [
        r#"{"genus": 1, "nu": [1, 0, 0, 0, -1], "branch_point": "2"}"#,
        r#"{"genus": 1, "nu": [1, 0, 0, -1], "branch_point": "1"}"#,
        r#"{"genus": 1, "nu": [1, 0, -2, 0, 1], "branch_point": "1"}"#,
        r#"{"genus": 1, "nu": [1, 0, 0, 0, -1]}"#,
        "not json",
    ] {
        assert!(parse_curve_json(bad).is_err(), "{bad}");
    }
}

#[test]
fn configuration_is_validated() {
    assert!(run_suite(&RunConfig::new(Suite::Algebraic, 4, 0)).is_err());
    let mut cfg = RunConfig::new(Suite::Algebraic, 1, 0);
    cfg.tolerances.insert("x".into(), f64::NAN);
    assert!(run_suite(&cfg).is_err());
    assert!("bogus".parse::<Suite>().is_err());
}
