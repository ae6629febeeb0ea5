//! Accuracy of the numeric integrators against closed-form values, mutual
//! agreement between the two independent semi-infinite integrators, honesty
//! of reported error estimates, and bit-level determinism.

use paraminv::catalog::builtin_catalog;
use paraminv::expr::eval::Bindings;
use paraminv::expr::parser::parse;
use paraminv::expr::Expr;
use paraminv::prover::Domain;
use paraminv::quadrature::{
    integrate_folded_semi_infinite, integrate_interval, integrate_periodic,
    integrate_semi_infinite_naive, QuadResult,
};
use paraminv::sampling::sample_params;

const PI: f64 = std::f64::consts::PI;

fn expr(src: &str) -> Expr {
    parse(src, "x").expect("test integrand parses")
}

/// Known-value battery over the semi-infinite domain. Each row is
/// (integrand, exact value); values carry an inline derivation.
fn semi_infinite_table() -> Vec<(Expr, f64)> {
    vec![
        // primitive is atan: atan(inf) - atan(0) = pi/2
        (expr("1/(1 + x^2)"), PI / 2.0),
        // complete the square: 2/sqrt(3) * (pi/2 - atan(1/sqrt(3))) = 2*pi/(3*sqrt(3))
        (expr("1/(1 + x + x^2)"), 2.0 * PI / (3.0 * 3.0f64.sqrt())),
        // x -> 1/x maps the integrand onto pi/2 - itself, so it equals pi^2/8
        (expr("atan(x^2)/(1 + x^2)"), PI * PI / 8.0),
        // x -> 1/x negates ln while fixing the weight, so the integral is 0
        (expr("ln(x)/(1 + x^2)"), 0.0),
        // primitive is -(1+x)^(-1): limit 0 at infinity minus -1 at the origin
        (expr("1/(1 + x)^2"), 1.0),
    ]
}

#[test]
fn folded_rule_reproduces_closed_values() {
    for (f, exact) in semi_infinite_table() {
        let r = integrate_folded_semi_infinite(&f, &Bindings::new(), 1e-12)
            .expect("folded quadrature succeeds");
        assert!(r.converged, "folded rule did not converge on {f}");
        assert!(
            (r.value - exact).abs() <= 1e-11,
            "folded value {} for {f}, expected {exact}",
            r.value
        );
    }
}

#[test]
fn naive_rule_reproduces_closed_values() {
    for (f, exact) in semi_infinite_table() {
        let r = integrate_semi_infinite_naive(&f, &Bindings::new(), 1e-9)
            .expect("naive quadrature succeeds");
        assert!(r.converged, "naive rule did not converge on {f}");
        assert!(
            (r.value - exact).abs() <= 1e-8,
            "naive value {} for {f}, expected {exact}",
            r.value
        );
    }
}

#[test]
fn interval_rule_reaches_known_values() {
    let cases = vec![
        (expr("1/(1 + x^2)"), 0.0, 1.0, PI / 4.0),
        (expr("1/(1 + x)^2"), 0.0, 1.0, 0.5),
        // integrable endpoint singularity at 0: primitive 2*sqrt(x)
        (expr("x^(-1/2)"), 0.0, 1.0, 2.0),
        (expr("ln(x)"), 0.0, 1.0, -1.0),
    ];
    for (f, lo, hi, exact) in cases {
        let r = integrate_interval(&f, &Bindings::new(), lo, hi, 1e-12)
            .expect("interval quadrature succeeds");
        assert!(r.converged, "interval rule did not converge on {f}");
        assert!(
            (r.value - exact).abs() <= 1e-11,
            "interval value {} for {f}, expected {exact}",
            r.value
        );
    }
}

#[test]
fn periodic_rule_is_spectrally_accurate() {
    let one = parse("1", "phi").expect("parses");
    let r = integrate_periodic(&one, &Bindings::new(), 16, 1e-12).expect("succeeds");
    assert!((r.value - 2.0 * PI).abs() <= 1e-12, "constant integrates to the period");

    let cos2 = parse("cos(phi)^2", "phi").expect("parses");
    let r = integrate_periodic(&cos2, &Bindings::new(), 16, 1e-12).expect("succeeds");
    assert!((r.value - PI).abs() <= 1e-11, "cos^2 averages to 1/2 over a period");

    // mean of cos is zero, so only the offset survives
    let shifted = parse("3 + cos(phi)", "phi").expect("parses");
    let r = integrate_periodic(&shifted, &Bindings::new(), 16, 1e-12).expect("succeeds");
    assert!((r.value - 6.0 * PI).abs() <= 1e-11, "cosine mean vanishes over a period");
}

/// The two semi-infinite integrators share no machinery; on every
/// semi-infinite catalog integrand at sampled parameter bindings they must
/// nonetheless agree.
#[test]
fn independent_integrators_agree_on_catalog_instances() {
    for entry in builtin_catalog() {
        if !matches!(entry.spec.domain, Domain::SemiInfinite) {
            continue;
        }
        for bindings in sample_params(&entry.spec, 2, 17) {
            let folded = integrate_folded_semi_infinite(&entry.spec.integrand, &bindings, 1e-11)
                .unwrap_or_else(|e| panic!("folded quadrature failed on {}: {e}", entry.family));
            let naive = integrate_semi_infinite_naive(&entry.spec.integrand, &bindings, 1e-9)
                .unwrap_or_else(|e| panic!("naive quadrature failed on {}: {e}", entry.family));
            let gap = (folded.value - naive.value).abs();
            assert!(
                gap <= 1e-7 * (1.0 + folded.value.abs()),
                "integrators disagree on {} (folded {}, naive {}, gap {gap})",
                entry.family,
                folded.value,
                naive.value
            );
        }
    }
}

#[test]
fn repeated_integration_is_bit_identical() {
    let f = expr("atan(x^2)/(1 + x^2)");
    let a = integrate_folded_semi_infinite(&f, &Bindings::new(), 1e-12).expect("succeeds");
    let b = integrate_folded_semi_infinite(&f, &Bindings::new(), 1e-12).expect("succeeds");
    assert_eq!(a.value.to_bits(), b.value.to_bits(), "folded rule is deterministic");

    let a = integrate_semi_infinite_naive(&f, &Bindings::new(), 1e-9).expect("succeeds");
    let b = integrate_semi_infinite_naive(&f, &Bindings::new(), 1e-9).expect("succeeds");
    assert_eq!(a.value.to_bits(), b.value.to_bits(), "naive rule is deterministic");

    let g = parse("cos(phi)^2", "phi").expect("parses");
    let a = integrate_periodic(&g, &Bindings::new(), 16, 1e-12).expect("succeeds");
    let b = integrate_periodic(&g, &Bindings::new(), 16, 1e-12).expect("succeeds");
    assert_eq!(a.value.to_bits(), b.value.to_bits(), "periodic rule is deterministic");
}

/// A converged result's reported error estimate must bound the true error
/// up to a small safety factor.
#[test]
fn error_estimates_bound_the_true_error() {
    let check = |r: QuadResult, exact: f64, label: &str| {
        assert!(r.converged, "{label} did not converge");
        let true_err = (r.value - exact).abs();
        assert!(
            true_err <= 10.0 * r.error_estimate + 1e-13,
            "{label}: true error {true_err} exceeds 10x the estimate {}",
            r.error_estimate
        );
    };
    for (f, exact) in semi_infinite_table() {
        let label = format!("folded on {f}");
        check(
            integrate_folded_semi_infinite(&f, &Bindings::new(), 1e-12).expect("succeeds"),
            exact,
            &label,
        );
        let label = format!("naive on {f}");
        check(
            integrate_semi_infinite_naive(&f, &Bindings::new(), 1e-9).expect("succeeds"),
            exact,
            &label,
        );
    }
    check(
        integrate_interval(&expr("x^(-1/2)"), &Bindings::new(), 0.0, 1.0, 1e-12)
            .expect("succeeds"),
        2.0,
        "interval with endpoint singularity",
    );
}
