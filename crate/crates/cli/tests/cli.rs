//! End-to-end tests for the command-line interface: exit-code contract,
//! output formats, and reparseability of structured output.

use std::process::{Command, Output};

fn paraminv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paraminv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

#[test]
fn gen_coeffs_prints_the_fourth_row() {
    let out = paraminv(&["gen-coeffs", "--n", "4"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "1 -23 23 -1");
}

#[test]
fn gen_coeffs_structured_reparses() {
    let out = paraminv(&["gen-coeffs", "--n", "3", "--format", "structured"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["n"], 3);
    assert_eq!(
        v["coefficients"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| c.as_str().unwrap())
            .collect::<Vec<_>>(),
        vec!["1", "-6", "1"]
    );
}

#[test]
fn prove_certifies_the_power_family() {
    let out = paraminv(&[
        "prove",
        "--expr",
        "atan(x^a)/(1+x^2)",
        "--var",
        "x",
        "--domain",
        "semi-infinite",
    ]);
    assert!(out.status.success(), "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("conclusion: value = pi^2/8"), "{text}");
    assert!(text.contains("re-verification: passed"), "{text}");
}

#[test]
fn prove_failure_exits_one() {
    let out = paraminv(&[
        "prove",
        "--expr",
        "1/(1+a*x+x^2)",
        "--param-range",
        "a=0:2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("not proved"));
}

#[test]
fn detect_reports_not_invariant_with_exit_zero() {
    let out = paraminv(&[
        "detect",
        "--expr",
        "1/(1+a*x+x^2)",
        "--var",
        "x",
        "--domain",
        "semi-infinite",
        "--param-range",
        "a=0:2",
        "--samples",
        "3",
    ]);
    assert!(out.status.success(), "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("verdict: not invariant"), "{text}");
    assert!(text.contains("certificate: none"), "{text}");
}

#[test]
fn detect_structured_contains_probes_and_steps() {
    let out = paraminv(&[
        "detect",
        "--expr",
        "atan(x^b)/(1+x^2)",
        "--param-range",
        "b=-4:4",
        "--format",
        "structured",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["numeric_verdict"], "invariant");
    let probes = v["probes"].as_array().unwrap();
    assert!(probes.len() >= 2);
    for p in probes {
        assert!(p["value"].as_f64().is_some(), "{p}");
        assert!(p["params"]["b"].as_f64().is_some(), "{p}");
    }
    let steps = v["certificate"]["steps"].as_array().unwrap();
    assert!(!steps.is_empty());
    for s in steps {
        assert!(s["rule"].as_str().is_some());
        assert!(s["before"].as_str().is_some());
        assert!(s["after"].as_str().is_some());
    }
}

#[test]
fn quad_reaches_the_closed_value_at_a_zero() {
    let out = paraminv(&[
        "quad",
        "--expr",
        "1/(1+a*x+x^2)",
        "--params",
        "a=0",
        "--format",
        "structured",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let value = v["value"].as_f64().unwrap();
    assert!((value - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
    assert_eq!(v["converged"], true);
}

#[test]
fn quad_periodic_log_ratio_vanishes() {
    let out = paraminv(&[
        "quad",
        "--expr",
        "ln((z^2+(c+r*cos(t))^2)/(z^2+(c-r*cos(t))^2))",
        "--var",
        "t",
        "--domain",
        "periodic-2pi",
        "--params",
        "z=0.7,c=1.4,r=0.6",
        "--format",
        "structured",
    ]);
    assert!(out.status.success(), "{out:?}");
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert!(v["value"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn quad_with_unbound_parameter_is_a_usage_error() {
    let out = paraminv(&["quad", "--expr", "1/(1+a*x+x^2)"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_expression_is_a_usage_error() {
    let out = paraminv(&["quad", "--expr", "1/(1+"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("cannot parse"), "{err}");
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = paraminv(&["detect", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_catalog_passes_and_summarizes() {
    let out = paraminv(&["verify-catalog"]);
    assert!(out.status.success(), "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("0 failed"), "{text}");
    let structured = paraminv(&["verify-catalog", "--format", "structured"]);
    assert!(structured.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&structured).trim()).unwrap();
    assert_eq!(v["failed"], 0);
    assert!(v["passed"].as_u64().unwrap() >= 20);
    assert!(v["worst_deviation"].as_f64().unwrap() < 1e-9);
}
