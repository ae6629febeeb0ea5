//! End-to-end detection: probe numerically, then try to prove.
//!
//! The two-step algorithm is deliberately ordered — integrate the spec at
//! a few different parameter draws first, and only attempt the symbolic
//! proof when the numbers already agree. A numeric disagreement is itself
//! a conclusive (and cheap) answer; a proof attempt on such a spec could
//! never succeed.

use serde_json::{json, Value as Json};

use crate::expr::eval::{evaluate, Bindings};
use crate::prover::{prove, Conclusion, IntegralSpec, ProofCertificate};
use crate::quadrature::{probe_invariance, ProbeVerdict};
use crate::sampling::sample_params;

/// Everything a detection run learned, kept for audit.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionReport {
    pub spec: IntegralSpec,
    pub numeric_verdict: ProbeVerdict,
    /// Mean of the probe values when the verdict is `Invariant`.
    pub value_estimate: Option<f64>,
    /// Present only when the prover closed the integral and its value
    /// agrees with the numeric estimate within 1e-9.
    pub certificate: Option<ProofCertificate>,
    /// Every probe attempted, across all sampling rounds; `None` marks a
    /// probe whose quadrature failed or did not converge.
    pub probes: Vec<(Bindings, Option<f64>)>,
}

/// Max discrepancy tolerated between the certified value and the numeric
/// estimate before the certificate is withheld.
pub const CERTIFICATE_AGREEMENT_TOL: f64 = 1e-9;

/// Runs the probe-then-prove pipeline. Deterministic in `seed`. A probe
/// round that cannot decide (quadrature failure on some draw) is retried
/// once with fresh samples before the report settles on `Undecided`.
pub fn detect(spec: &IntegralSpec, sample_count: usize, tol: f64, seed: u64) -> DetectionReport {
    let mut report = DetectionReport {
        spec: spec.clone(),
        numeric_verdict: ProbeVerdict::Undecided,
        value_estimate: None,
        certificate: None,
        probes: Vec::new(),
    };
    if spec.validate().is_err() {
        return report;
    }
    let sample_count = sample_count.max(2);

    let mut deciding: Vec<f64> = Vec::new();
    for round in 0..2u64 {
        let samples = sample_params(spec, sample_count, seed.wrapping_add(round));
        let probe = probe_invariance(spec, &samples, tol);
        report
            .probes
            .extend(samples.into_iter().zip(probe.values.iter().copied()));
        report.numeric_verdict = probe.verdict;
        if probe.verdict != ProbeVerdict::Undecided {
            deciding = probe.values.into_iter().flatten().collect();
            break;
        }
    }

    if report.numeric_verdict == ProbeVerdict::Invariant {
        let mean = deciding.iter().sum::<f64>() / deciding.len() as f64;
        report.value_estimate = Some(mean);
        let cert = prove(spec);
        if let Conclusion::Value(v) = &cert.conclusion {
            let certified = evaluate(v, &Bindings::new()).unwrap_or(f64::NAN);
            if (certified - mean).abs() <= CERTIFICATE_AGREEMENT_TOL {
                report.certificate = Some(cert);
            }
        }
    }
    report
}

impl DetectionReport {
    pub fn to_json(&self) -> Json {
        json!({
            "spec": self.spec.to_json(),
            "numeric_verdict": match self.numeric_verdict {
                ProbeVerdict::Invariant => "invariant",
                ProbeVerdict::NotInvariant => "not-invariant",
                ProbeVerdict::Undecided => "undecided",
            },
            "value_estimate": self.value_estimate,
            "certificate": self.certificate.as_ref().map(|c| c.to_json()),
            "probes": self.probes.iter().map(|(b, v)| json!({
                "params": b.iter().map(|(k, x)| (k.to_string(), json!(x)))
                    .collect::<serde_json::Map<_, _>>(),
                "value": v,
            })).collect::<Vec<_>>(),
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("JSON value serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parser::parse;
    use crate::prover::Constraint;

    #[test]
    fn invariant_family_gets_a_certificate() {
        let spec = IntegralSpec::semi_infinite(
            parse("atan(x^a)/(1 + x^2)", "x").unwrap(),
            "x",
        )
        .with_param("a", -3.0, 3.0);
        let report = detect(&spec, 3, 1e-9, 0);
        assert_eq!(report.numeric_verdict, ProbeVerdict::Invariant);
        let estimate = report.value_estimate.unwrap();
        let expected = std::f64::consts::PI * std::f64::consts::PI / 8.0;
        assert!((estimate - expected).abs() < 1e-9);
        let cert = report.certificate.expect("certificate attached");
        assert!(matches!(cert.conclusion, Conclusion::Value(_)));
        assert!(report.probes.len() >= 3);
        assert!(report.probes.iter().all(|(_, v)| v.is_some()));
    }

    #[test]
    fn parameter_dependent_integral_is_rejected_numerically() {
        let spec = IntegralSpec::semi_infinite(
            parse("1/(1 + a*x + x^2)", "x").unwrap(),
            "x",
        )
        .with_param("a", 0.0, 2.0)
        .with_constraint(Constraint::MinExclusive("a".into(), -2.0));
        let report = detect(&spec, 3, 1e-9, 0);
        assert_eq!(report.numeric_verdict, ProbeVerdict::NotInvariant);
        assert!(report.certificate.is_none());
        assert!(report.value_estimate.is_none());
        // honesty: the report shows two probes that genuinely differ
        let vals: Vec<f64> = report.probes.iter().filter_map(|(_, v)| *v).collect();
        let spread = vals
            .iter()
            .flat_map(|a| vals.iter().map(move |b| (a - b).abs()))
            .fold(0.0f64, f64::max);
        let max_abs = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(spread > 1e-9 * (1.0 + max_abs));
    }

    #[test]
    fn zero_family_detects_and_certifies_zero() {
        let spec = IntegralSpec::semi_infinite(
            parse("ln(x)^3/(1 + b*x + x^2)", "x").unwrap(),
            "x",
        )
        .with_param("b", -1.5, 3.0)
        .with_constraint(Constraint::MinExclusive("b".into(), -2.0));
        let report = detect(&spec, 3, 1e-9, 42);
        assert_eq!(report.numeric_verdict, ProbeVerdict::Invariant);
        assert!(report.value_estimate.unwrap().abs() < 1e-10);
        let cert = report.certificate.expect("zero certificate");
        assert_eq!(cert.conclusion, Conclusion::Value(crate::expr::Expr::zero()));
    }

    #[test]
    fn detection_is_deterministic() {
        let spec = IntegralSpec::semi_infinite(
            parse("atan(x^a)/(1 + x^2)", "x").unwrap(),
            "x",
        )
        .with_param("a", -3.0, 3.0);
        let a = detect(&spec, 3, 1e-9, 7);
        let b = detect(&spec, 3, 1e-9, 7);
        assert_eq!(a, b);
    }

    #[test]
    fn report_serializes() {
        let spec = IntegralSpec::semi_infinite(
            parse("atan(x^a)/(1 + x^2)", "x").unwrap(),
            "x",
        )
        .with_param("a", -3.0, 3.0);
        let report = detect(&spec, 3, 1e-9, 0);
        let j = report.to_json();
        assert_eq!(j["numeric_verdict"], "invariant");
        assert!(j["certificate"]["conclusion"]["expr"].is_string());
        assert_eq!(j["probes"].as_array().unwrap().len(), report.probes.len());
    }
}
