use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use super::*;
use crate::error::Error;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn parse(text: &str) -> LaurentPolynomial {
    parse_polynomial(text, None, &ParseOptions::default())
        .unwrap()
        .0
}

fn parse_with(text: &str, vars: &[&str]) -> LaurentPolynomial {
    let vars: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
    parse_polynomial(text, Some(&vars), &ParseOptions::default())
        .unwrap()
        .0
}

#[test]
fn parse_simple_line() {
    let p = parse("1 + x + y");
    assert_eq!(p.num_vars(), 2);
    let terms: Vec<_> = p.terms().map(|(e, c)| (e.entries().to_vec(), *c)).collect();
    assert_eq!(
        terms,
        vec![
            (vec![0, 0], c(1.0, 0.0)),
            (vec![0, 1], c(1.0, 0.0)),
            (vec![1, 0], c(1.0, 0.0)),
        ]
    );
}

#[test]
fn parse_cancellation_is_empty() {
    let err = parse_polynomial("x*y^-1 - x*y^-1", None, &ParseOptions::default()).unwrap_err();
    assert!(matches!(err, Error::EmptyPolynomial));
}

#[test]
fn parse_complex_coefficient_term() {
    let p = parse("(2-1i)*x^2*y^-3");
    assert_eq!(p.num_terms(), 1);
    let (e, coeff) = p.terms().next().unwrap();
    assert_eq!(e.entries(), &[2, -3]);
    assert_eq!(*coeff, c(2.0, -1.0));
}

#[test]
fn parse_leading_minus_terms() {
    let p = parse("-x + 1");
    let terms: Vec<_> = p
        .terms()
        .map(|(e, c)| (e.entries().to_vec(), *c))
        .collect();
    assert_eq!(
        terms,
        vec![(vec![0], c(1.0, 0.0)), (vec![1], c(-1.0, 0.0))]
    );
    let q = parse("-2.5*x");
    assert_eq!(*q.terms().next().unwrap().1, c(-2.5, 0.0));
}

// a first term with coefficient exactly -1 prints as `-x`; it must parse back
#[test]
fn round_trip_of_minus_one_coefficient() {
    let vars = vec!["x".to_string(), "y".to_string()];
    let p = LaurentPolynomial::from_terms(
        2,
        [
            (ExponentVector::new(vec![1, 0]), c(-1.0, 0.0)),
            (ExponentVector::new(vec![2, 1]), c(3.0, 0.0)),
        ],
    )
    .unwrap();
    let text = p.to_text(&vars);
    assert_eq!(text, "-x + 3*x^2*y");
    let (back, _) = parse_polynomial(&text, Some(&vars), &ParseOptions::default()).unwrap();
    assert_eq!(p, back);
}

#[test]
fn parse_unknown_variable() {
    let vars = vec!["x".to_string(), "y".to_string()];
    let err = parse_polynomial("1 + z", Some(&vars), &ParseOptions::default()).unwrap_err();
    assert!(matches!(err, Error::UnknownVariable { name, .. } if name == "z"));
}

#[test]
fn parse_exponent_out_of_range() {
    let err = parse_polynomial("x^65", None, &ParseOptions::default()).unwrap_err();
    assert!(matches!(
        err,
        Error::ExponentOutOfRange {
            value: 65,
            bound: 64
        }
    ));
}

#[test]
fn parse_reports_position() {
    let err = parse_polynomial("1 + @", None, &ParseOptions::default()).unwrap_err();
    match err {
        Error::Parse { line, col, .. } => {
            assert_eq!(line, 1);
            assert_eq!(col, 5);
        }
        other => panic!("unexpected error {other:?}"),
    }
}

#[test]
fn format_line_canonical() {
    let p = parse("1 + x + y");
    assert_eq!(p.to_text(&["x".into(), "y".into()]), "1 + x + y");
}

#[test]
fn format_single_complex_term() {
    let p = LaurentPolynomial::from_terms(2, [(ExponentVector::new(vec![2, -3]), c(2.0, -1.0))])
        .unwrap();
    assert_eq!(p.to_text(&["x".into(), "y".into()]), "(2-1i)*x^2*y^-3");
}

#[test]
fn evaluate_line_at_unit_points() {
    let p = parse("1 + x + y");
    let z = LogPolarPoint::new(vec![0.0, 0.0], vec![0.0, 0.0]).unwrap();
    assert_eq!(p.evaluate(&z).unwrap(), c(3.0, 0.0));
    let z = LogPolarPoint::new(vec![0.0, 0.0], vec![PI, PI]).unwrap();
    let v = p.evaluate(&z).unwrap();
    assert!((v - c(-1.0, 0.0)).norm() < 1e-14);
}

#[test]
fn evaluate_monomial_ratio() {
    let p = parse_with("x*y^-1", &["x", "y"]);
    let z = LogPolarPoint::new(vec![2f64.ln(), 4f64.ln()], vec![0.0, 0.0]).unwrap();
    let v = p.evaluate(&z).unwrap();
    assert!((v - c(0.5, 0.0)).norm() < 1e-15);
}

#[test]
fn evaluate_overflow_guard() {
    let p = parse_with("x^10", &["x", "y"]);
    let z = LogPolarPoint::new(vec![100.0, 0.0], vec![0.0, 0.0]).unwrap();
    assert!(matches!(p.evaluate(&z), Err(Error::EvalOverflow(..))));
}

#[test]
fn jacobian_w_of_line_at_one() {
    let sys = system("vars: x, y\nf1: 1 + x + y\n");
    let z = LogPolarPoint::identity(2);
    let (vals, jac) = sys.eval_with_jacobian_w(&z).unwrap();
    assert_eq!(vals[0], c(3.0, 0.0));
    assert_eq!(jac[(0, 0)], c(1.0, 0.0));
    assert_eq!(jac[(0, 1)], c(1.0, 0.0));
}

#[test]
fn jacobian_w_of_square_monomial() {
    // z d(z^2)/dz = 2 z^2 = 18 at z = 3
    let p = parse_with("x^2", &["x", "y"]);
    let z = LogPolarPoint::new(vec![3f64.ln(), 0.0], vec![0.0, 0.0]).unwrap();
    let (_, grad) = p.eval_with_gradient(&z).unwrap();
    assert!((grad[0] - c(18.0, 0.0)).norm() < 1e-12);
}

#[test]
fn conjugate_examples() {
    let p = parse("1 + x + y");
    assert_eq!(p.conjugate(), p);
    let q = parse("(2-1i)*x").conjugate();
    let (e, coeff) = q.terms().next().unwrap();
    assert_eq!(e.entries(), &[1]);
    assert_eq!(*coeff, c(2.0, 1.0));
}

#[test]
fn conjugate_reciprocal_examples() {
    let p = parse("1 + x + y");
    let q = p.conjugate_reciprocal();
    assert_eq!(q.to_text(&["x".into(), "y".into()]), "1 + x^-1 + y^-1");
    let r = parse("(2-1i)*x^2*y^-1").conjugate_reciprocal();
    let (e, coeff) = r.terms().next().unwrap();
    assert_eq!(e.entries(), &[-2, 1]);
    assert_eq!(*coeff, c(2.0, 1.0));
}

#[test]
fn translate_examples() {
    let p = parse("1 + x + y");
    let id = LogPolarPoint::identity(2);
    assert_eq!(p.translated(&id).unwrap(), p);

    let x = parse_with("x", &["x", "y"]);
    let eps = LogPolarPoint::new(vec![2f64.ln(), 0.0], vec![0.0, 0.0]).unwrap();
    let g = x.translated(&eps).unwrap();
    let (_, coeff) = g.terms().next().unwrap();
    assert!((coeff - c(2.0, 0.0)).norm() < 1e-15);
}

fn system(text: &str) -> PolySystem {
    parse_system(text, &ParseOptions::default()).unwrap()
}

#[test]
fn system_requires_half_dimension() {
    let err = parse_system(
        "vars: x, y, z\nf1: 1 + x + y + z\n",
        &ParseOptions::default(),
    )
    .unwrap_err();
    assert!(matches!(err, Error::DimensionMismatch(_)));
}

#[test]
fn system_json_round_trip() {
    let sys = system("vars: x, y\nf1: 1 + (0+2i)*x - y^-2\n");
    let json = sys.to_json().to_string();
    let back = system_from_json(&json).unwrap();
    assert_eq!(sys, back);
}

#[test]
fn system_text_round_trip() {
    let sys = system("vars: x, y\nf1: 1 + (0+2i)*x - 3.5*y^-2\n");
    let back = parse_system(&sys.to_text(), &ParseOptions::default()).unwrap();
    assert_eq!(sys, back);
}

// strategy for random Laurent polynomials in 2 variables; coefficients mix
// continuous draws with exact small integers (the integer cases exercise
// the +/-1 formatting branches)
fn arb_poly() -> impl Strategy<Value = LaurentPolynomial> {
    let coefficient = prop_oneof![
        (-4.0f64..4.0, -4.0f64..4.0),
        ((-2i64..=2).prop_map(|v| v as f64), Just(0.0)),
        (Just(0.0), (-2i64..=2).prop_map(|v| v as f64)),
    ];
    prop::collection::vec((prop::collection::vec(-6i64..=6, 2), coefficient), 1..6)
        .prop_filter_map("all terms cancelled", |raw| {
            LaurentPolynomial::from_terms(
                2,
                raw.into_iter()
                    .map(|(e, (re, im))| (ExponentVector::new(e), Complex64::new(re, im))),
            )
            .ok()
        })
}

fn arb_point(dim: usize) -> impl Strategy<Value = LogPolarPoint> {
    (
        prop::collection::vec(-1.5f64..1.5, dim),
        prop::collection::vec(0.0f64..TWO_PI, dim),
    )
        .prop_map(|(q, theta)| LogPolarPoint::new(q, theta).unwrap())
}

proptest! {
    #[test]
    fn parse_format_round_trip(p in arb_poly()) {
        let vars = vec!["x".to_string(), "y".to_string()];
        let text = p.to_text(&vars);
        let (back, _) = parse_polynomial(&text, Some(&vars), &ParseOptions::default()).unwrap();
        prop_assert_eq!(p, back);
    }

    #[test]
    fn conjugations_are_involutions(p in arb_poly()) {
        prop_assert_eq!(p.conjugate().conjugate(), p.clone());
        prop_assert_eq!(p.conjugate_reciprocal().conjugate_reciprocal(), p);
    }

    // evaluate(conjugate(f), (q, -theta)) == conj(evaluate(f, (q, theta)))
    #[test]
    fn conjugate_evaluation_identity(p in arb_poly(), z in arb_point(2)) {
        let mirrored = LogPolarPoint::new(
            z.q().to_vec(),
            z.theta().iter().map(|t| -t).collect(),
        ).unwrap();
        let lhs = p.conjugate().evaluate(&mirrored).unwrap();
        let rhs = p.evaluate(&z).unwrap().conj();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
    }

    // g = conjugate_reciprocal(f) satisfies g(1/conj(z)) == conj(f(z)),
    // and 1/conj(z) has log-polar coordinates (-q, theta).
    #[test]
    fn conjugate_reciprocal_evaluation_identity(p in arb_poly(), z in arb_point(2)) {
        let mirrored = LogPolarPoint::new(
            z.q().iter().map(|q| -q).collect(),
            z.theta().to_vec(),
        ).unwrap();
        let lhs = p.conjugate_reciprocal().evaluate(&mirrored).unwrap();
        let rhs = p.evaluate(&z).unwrap().conj();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
    }

    // evaluate(translate(f, eps), z) == evaluate(f, eps * z)
    #[test]
    fn translate_evaluation_identity(p in arb_poly(), eps in arb_point(2), z in arb_point(2)) {
        let lhs = p.translated(&eps).unwrap().evaluate(&z).unwrap();
        let rhs = p.evaluate(&eps.componentwise_mul(&z).unwrap()).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
    }

    // gradient in w matches central finite differences of evaluate
    #[test]
    fn gradient_matches_finite_differences(p in arb_poly(), z in arb_point(2)) {
        let (_, grad) = p.eval_with_gradient(&z).unwrap();
        let h = 1e-6;
        for k in 0..2 {
            // vary q_k: d/dq_k = Re part of d/dw_k acting holomorphically
            let mut q_plus = z.q().to_vec();
            q_plus[k] += h;
            let mut q_minus = z.q().to_vec();
            q_minus[k] -= h;
            let f_plus = p
                .evaluate(&LogPolarPoint::new(q_plus, z.theta().to_vec()).unwrap())
                .unwrap();
            let f_minus = p
                .evaluate(&LogPolarPoint::new(q_minus, z.theta().to_vec()).unwrap())
                .unwrap();
            let fd = (f_plus - f_minus) / (2.0 * h);
            let scale = 1.0 + grad[k].norm();
            prop_assert!((fd - grad[k]).norm() <= 1e-6 * scale,
                "fd {fd} vs grad {expected}", expected = grad[k]);
        }
    }
}
