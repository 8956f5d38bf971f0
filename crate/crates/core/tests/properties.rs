use std::sync::OnceLock;

use hyperbaker::algebra::{MultiPoly, Rational};
use hyperbaker::harness::report::canonical_string;
use hyperbaker::series::p_polynomials;
use proptest::prelude::*;
use serde_json::{json, Value};

fn rational() -> impl Strategy<Value = Rational> {
    (-50i64..50, 1i64..30).prop_map(|(p, q)| Rational::new(p, q))
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    rational().prop_filter("nonzero", |q| !q.is_zero())
}

const VARS: [&str; 3] = ["x1", "x2", "nu0"];

fn poly() -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec((rational(), prop::collection::vec(0u16..3, 3)), 0..5).prop_map(|terms| {
        let mut p = MultiPoly::zero();
        for (c, e) in terms {
            let mut m = MultiPoly::constant(c);
            for (v, k) in VARS.iter().zip(e) {
                m = m.mul(&MultiPoly::var(v).pow(k as u32));
            }
            p = p.add(&m);
        }
        p
    })
}

fn p_table() -> &'static [MultiPoly] {
    static P: OnceLock<Vec<MultiPoly>> = OnceLock::new();
    P.get_or_init(|| p_polynomials(24))
}

proptest! {
    #[test]
    fn rationals_form_a_field(a in rational(), b in rational(), c in rational(), d in nonzero_rational()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        prop_assert!((&d * &d.recip().unwrap()).is_one());
        prop_assert_eq!(&(&a / &d) * &d, a.clone());
    }

    #[test]
    fn rational_text_round_trip(a in rational()) {
        let back: Rational = a.to_canonical().parse().unwrap();
        prop_assert_eq!(&back, &a);
        let back: Rational = a.to_string().parse().unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn rational_to_f64_is_close(p in -1000i64..1000, q in 1i64..1000) {
        let x = Rational::new(p, q).to_f64();
        prop_assert!((x - p as f64 / q as f64).abs() <= 1e-15 * (1.0 + x.abs()));
    }

    #[test]
    fn polynomials_form_a_ring(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert!(a.sub(&a).is_zero());
        prop_assert_eq!(a.mul(&MultiPoly::one()), a.clone());
    }

    #[test]
    fn exact_division_inverts_multiplication(a in poly(), b in poly()) {
        prop_assume!(!b.is_zero());
        prop_assert_eq!(a.mul(&b).exact_divide(&b).unwrap(), a);
    }

    #[test]
    fn derivative_obeys_leibniz(a in poly(), b in poly()) {
        let d = |p: &MultiPoly| p.differentiate("x1", 1);
        prop_assert_eq!(d(&a.mul(&b)), d(&a).mul(&b).add(&a.mul(&d(&b))));
        prop_assert!(a.differentiate("x9", 1).is_zero());
    }

    #[test]
    fn partial_evaluation_agrees_with_numeric(a in poly(), x in rational(), y in rational()) {
        let p = a.eval_partial(&[("x1", x.clone()), ("x2", y.clone())]);
        prop_assert!(!p.contains_var("x1") && !p.contains_var("x2"));
        let full = p.eval_partial(&[("nu0", Rational::new(1, 3))]);
        let want = a
            .eval_c64(|n| match n {
                "x1" => Some(x.to_f64().into()),
                "x2" => Some(y.to_f64().into()),
                "nu0" => Some((1.0 / 3.0).into()),
                _ => None,
            })
            .unwrap();
        let got = full.constant_value().unwrap_or_else(Rational::zero).to_f64();
        prop_assert!((got - want.re).abs() <= 1e-9 * (1.0 + want.re.abs()));
    }

    #[test]
    fn canonical_json_is_stable(
        xs in prop::collection::vec(-1e12f64..1e12, 0..6),
        keys in prop::collection::vec("[a-z]{1,6}", 0..6),
        n in any::<i64>(),
    ) {
        let obj: serde_json::Map<String, Value> = keys.iter().cloned().zip(xs.iter().map(|x| json!(x))).collect();
        let v = json!({"floats": xs, "obj": obj, "n": n, "s": "p/q", "z": [1.5, -0.25]});
        let s = canonical_string(&v);
        let back: Value = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(canonical_string(&back), s.clone());
        for (a, b) in xs.iter().zip(back["floats"].as_array().unwrap()) {
            prop_assert_eq!(*a, b.as_f64().unwrap());
        }
        prop_assert!(!s.contains(' '));
    }

    #[test]
    fn p_polynomials_match_the_generating_function(ts in prop::collection::vec(-1.0f64..1.0, 6), k in -0.3f64..0.3) {
        // sum_n p_n(T) k^n = exp(sum_j T_j k^j)
        let p = p_table();
        let bind = |name: &str| name.strip_prefix('T').and_then(|j| j.parse::<usize>().ok()).map(|j| ts.get(j - 1).copied().unwrap_or(0.0).into());
        let lhs: f64 = p.iter().enumerate().map(|(n, q)| q.eval_c64(bind).unwrap().re * k.powi(n as i32)).sum();
        let rhs = ts.iter().enumerate().map(|(j, t)| t * k.powi(j as i32 + 1)).sum::<f64>().exp();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1.0), "{} vs {}", lhs, rhs);
    }
}

#[test]
fn p_polynomials_are_weighted_homogeneous() {
    for (n, p) in p_polynomials(8).iter().enumerate() {
        for (mono, _) in p.terms() {
            let w: usize = p
                .vars()
                .iter()
                .zip(mono.iter())
                .map(|(v, e)| v.to_string().trim_start_matches('T').parse::<usize>().unwrap() * *e as usize)
                .sum();
            assert_eq!(w, n);
        }
    }
}
