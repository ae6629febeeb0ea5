//! Randomized structural laws: parse/render round-trips on canonical
//! expressions, value preservation of the rewrite engine, the defining
//! equation of the reciprocal fold, coefficient-list symmetries, and
//! agreement between the two evaluation strategies.

use paraminv::expr::eval::{evaluate, evaluate_signed, Bindings};
use paraminv::expr::parser::parse;
use paraminv::expr::Expr;
use paraminv::rational::rat;
use paraminv::rewrite::{rewrite_full, Assumptions};
use paraminv::symmetry::{fold_residue, PolyCoeffs};
use proptest::prelude::*;

/// Leaves of a canonical expression: numbers, pi, the integration variable,
/// and two parameter names.
fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-9i64..=9).prop_map(Expr::int),
        ((-9i64..=9), (1i64..=9)).prop_map(|(n, d)| Expr::number(rat(n, d))),
        Just(Expr::pi()),
        Just(Expr::var("x")),
        Just(Expr::param("a")),
        Just(Expr::param("b")),
    ]
}

/// Arbitrary canonical expressions, built exclusively through the smart
/// constructors (the only way certificate payloads are ever built).
fn canonical_expr() -> impl Strategy<Value = Expr> {
    let exponent = prop_oneof![
        (-3i64..=3).prop_filter("nonzero", |n| *n != 0).prop_map(Expr::int),
        Just(Expr::number(rat(1, 2))),
        Just(Expr::number(rat(-1, 2))),
    ];
    leaf().prop_recursive(4, 24, 4, move |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 1..4).prop_map(Expr::sum),
            prop::collection::vec(inner.clone(), 1..4).prop_map(Expr::product),
            (inner.clone(), exponent.clone()).prop_map(|(b, e)| Expr::power(b, e)),
            inner.clone().prop_map(Expr::ln),
            inner.clone().prop_map(Expr::atan),
            inner.clone().prop_map(Expr::acot),
            inner.clone().prop_map(Expr::cos),
            inner.clone().prop_map(Expr::sin),
        ]
    })
}

/// Expressions that evaluate to a strictly positive value whenever
/// `x > 0` and `a > 0`: sums, products, and integer powers of positive
/// leaves.
fn positive_expr() -> impl Strategy<Value = Expr> {
    let leaves = prop_oneof![
        (1i64..=6).prop_map(Expr::int),
        Just(Expr::pi()),
        Just(Expr::var("x")),
        Just(Expr::param("a")),
    ];
    leaves.prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 1..3).prop_map(Expr::sum),
            prop::collection::vec(inner.clone(), 1..3).prop_map(Expr::product),
            (
                inner.clone(),
                (-2i64..=2).prop_filter("nonzero", |n| *n != 0)
            )
                .prop_map(|(b, e)| Expr::power(b, Expr::int(e))),
        ]
    })
}

/// Expressions the rewrite rules actually fire on: logs, arctangents, and
/// arccotangents of positive arguments, combined freely.
fn rewritable_expr() -> impl Strategy<Value = Expr> {
    positive_expr().prop_recursive(3, 16, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(Expr::ln),
            inner.clone().prop_map(Expr::atan),
            inner.clone().prop_map(Expr::acot),
            inner.clone().prop_map(Expr::cos),
            inner.clone().prop_map(Expr::sin),
            prop::collection::vec(inner.clone(), 1..3).prop_map(Expr::sum),
            prop::collection::vec(inner.clone(), 1..3).prop_map(Expr::product),
            inner
                .clone()
                .prop_map(|e| Expr::product(vec![Expr::int(-1), e])),
        ]
    })
}

fn bindings(x: f64, a: f64) -> Bindings {
    Bindings::new().with("x", x).with("a", a).with("b", 1.5)
}

fn rel_close(u: f64, v: f64, tol: f64) -> bool {
    (u - v).abs() <= tol * (1.0 + u.abs().max(v.abs()))
}

proptest! {
    /// Rendering a canonical expression and parsing it back is the
    /// identity. This is the contract certificate serialization relies on.
    #[test]
    fn parse_inverts_render(e in canonical_expr()) {
        let rendered = e.to_string();
        let back = parse(&rendered, "x");
        prop_assert!(back.is_ok(), "rendered form {rendered:?} failed to parse: {back:?}");
        prop_assert_eq!(back.unwrap(), e, "round-trip changed {}", rendered);
    }

    /// The rewrite engine may only replace an expression by one with the
    /// same value on the positive axis.
    #[test]
    fn rewriting_preserves_values(e in rewritable_expr()) {
        let mut assume = Assumptions::new();
        assume.assume_positive("a");
        let rewritten = rewrite_full(&e, &assume);
        for &x in &[0.3, 1.0, 2.7] {
            for &a in &[0.5, 2.0] {
                let b = bindings(x, a);
                let Ok(orig) = evaluate(&e, &b) else { continue };
                if !orig.is_finite() {
                    continue;
                }
                let out = evaluate(&rewritten, &b);
                prop_assert!(out.is_ok(), "rewrite broke evaluation of {e} at x={x}, a={a}");
                let out = out.unwrap();
                prop_assert!(
                    rel_close(orig, out, 1e-9),
                    "rewrite changed {e} from {orig} to {out} at x={x}, a={a}"
                );
            }
        }
    }

    /// The fold residue satisfies its defining equation
    /// `g(x) = f(x) + f(1/x)/x^2` pointwise.
    #[test]
    fn fold_residue_satisfies_its_equation(
        f in rewritable_expr(),
        x in 0.2f64..5.0,
    ) {
        let g = fold_residue(&f, "x");
        let here = bindings(x, 1.7);
        let there = bindings(1.0 / x, 1.7);
        let (Ok(fx), Ok(finv), Ok(gx)) =
            (evaluate(&f, &here), evaluate(&f, &there), evaluate(&g, &here))
        else {
            return Ok(());
        };
        let expected = fx + finv / (x * x);
        if !expected.is_finite() {
            return Ok(());
        }
        prop_assert!(
            rel_close(gx, expected, 1e-9),
            "residue of {f} is {gx} at x={x}, expected {expected}"
        );
    }

    /// Reversing a coefficient list with nonzero ends twice is the identity.
    #[test]
    fn coefficient_reversal_is_an_involution(
        mut v in prop::collection::vec(-9i64..=9, 1..7),
    ) {
        if *v.first().unwrap() == 0 {
            v[0] = 1;
        }
        if *v.last().unwrap() == 0 {
            *v.last_mut().unwrap() = 1;
        }
        let p = PolyCoeffs::from_ints(&v);
        prop_assert_eq!(p.reversed().reversed(), p);
    }

    /// A list mirrored around its middle is palindromic; multiplying a
    /// palindromic list by `x - 1` makes it antipalindromic.
    #[test]
    fn mirror_symmetry_laws(
        mut half in prop::collection::vec(-9i64..=9, 1..4),
        mid in proptest::option::of(-9i64..=9),
    ) {
        if half[0] == 0 {
            half[0] = 2;
        }
        let mut full = half.clone();
        match mid {
            Some(m) => full.push(m),
            None => {}
        }
        full.extend(half.iter().rev());
        let p = PolyCoeffs::from_ints(&full);
        prop_assert!(p.is_palindromic(), "{full:?} should be palindromic");

        // multiply by (x - 1): coefficients convolve with [-1, 1]
        let mut shifted = vec![0i64];
        shifted.extend(&full);
        let negated: Vec<i64> = full.iter().map(|c| -c).chain([0]).collect();
        let product: Vec<i64> = shifted
            .iter()
            .zip(&negated)
            .map(|(s, n)| s + n)
            .collect();
        let q = PolyCoeffs::from_ints(&product);
        prop_assert!(
            q.is_antipalindromic(),
            "(x - 1) * {full:?} = {product:?} should be antipalindromic"
        );
    }

    /// The log-magnitude evaluator agrees with direct evaluation wherever
    /// both succeed.
    #[test]
    fn signed_evaluation_matches_direct(e in rewritable_expr(), x in 0.2f64..5.0) {
        let b = bindings(x, 1.3);
        let (Ok(direct), Ok(signed)) = (evaluate(&e, &b), evaluate_signed(&e, &b)) else {
            return Ok(());
        };
        if !direct.is_finite() {
            return Ok(());
        }
        prop_assert!(
            rel_close(direct, signed.to_f64(), 1e-9),
            "evaluators disagree on {e} at x={x}: {direct} vs {}",
            signed.to_f64()
        );
    }
}
