//! Certificate-producing prover for parameter-invariant integrals.
//!
//! The method is fixed and small: split the domain in half, map the second
//! half onto the first by a formal substitution (`x -> 1/x` on (0, inf),
//! `phi -> phi + pi` on (0, 2*pi)), combine, and simplify with a closed
//! identity table. If the combined integrand collapses to zero or to a
//! constant multiple of a weight with a known base integral, the original
//! integral has a closed, parameter-free value — and the recorded steps
//! form a certificate any third party can re-check numerically, because
//! every step is a pointwise identity.

use serde_json::{json, Value as Json};

use crate::expr::eval::{evaluate, Bindings};
use crate::expr::parser::{parse, ParseError};
use crate::expr::render::render;
use crate::expr::Expr;
use crate::quadrature::period_is_two_pi;
use crate::rewrite::{self, Assumptions};
use crate::sampling::{halton, sample_params};
use crate::symmetry::fold_image_raw;

/// A parameter together with its real validity box, used for sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpec {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
}

/// Where the integral lives.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    /// `(0, inf)`.
    SemiInfinite,
    /// `(lo, hi)` with exact expression bounds (parameters allowed).
    Interval { lo: Expr, hi: Expr },
    /// One full period starting at 0; only `2*pi` is currently provable.
    Periodic { period: Expr },
}

impl Domain {
    pub fn name(&self) -> &'static str {
        match self {
            Domain::SemiInfinite => "semi-infinite",
            Domain::Interval { .. } => "interval",
            Domain::Periodic { .. } => "periodic",
        }
    }
}

/// A validity constraint on parameter values.
#[derive(Debug, Clone, PartialEq)]
pub enum Constraint {
    /// `param > 0`.
    Positive(String),
    /// `param != 0`.
    NonZero(String),
    /// `param > min` (e.g. `b > -2` keeps `1 + b*x + x^2` positive).
    MinExclusive(String, f64),
    /// `|first| > |second|`.
    AbsGreater(String, String),
    /// At least one alternative holds.
    AnyOf(Vec<Constraint>),
}

impl Constraint {
    pub fn satisfied(&self, b: &Bindings) -> bool {
        match self {
            Constraint::Positive(n) => b.get(n).is_some_and(|v| v > 0.0),
            Constraint::NonZero(n) => b.get(n).is_some_and(|v| v != 0.0),
            Constraint::MinExclusive(n, m) => b.get(n).is_some_and(|v| v > *m),
            Constraint::AbsGreater(a, c) => match (b.get(a), b.get(c)) {
                (Some(va), Some(vc)) => va.abs() > vc.abs(),
                _ => false,
            },
            Constraint::AnyOf(opts) => opts.iter().any(|o| o.satisfied(b)),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Constraint::Positive(n) => format!("{n} > 0"),
            Constraint::NonZero(n) => format!("{n} != 0"),
            Constraint::MinExclusive(n, m) => format!("{n} > {m}"),
            Constraint::AbsGreater(a, c) => format!("|{a}| > |{c}|"),
            Constraint::AnyOf(opts) => {
                let parts: Vec<String> =
                    opts.iter().map(|o| format!("({})", o.describe())).collect();
                parts.join(" or ")
            }
        }
    }

    fn param_names(&self, out: &mut Vec<String>) {
        match self {
            Constraint::Positive(n)
            | Constraint::NonZero(n)
            | Constraint::MinExclusive(n, _) => out.push(n.clone()),
            Constraint::AbsGreater(a, c) => {
                out.push(a.clone());
                out.push(c.clone());
            }
            Constraint::AnyOf(opts) => {
                for o in opts {
                    o.param_names(out);
                }
            }
        }
    }
}

/// A fully described integral: integrand, variable, domain, and the
/// parameter boxes plus constraints under which it is claimed valid.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralSpec {
    pub integrand: Expr,
    pub variable: String,
    pub domain: Domain,
    pub parameters: Vec<ParamSpec>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpecError {
    #[error("integrand uses variable '{found}' but the spec variable is '{variable}'")]
    ForeignVariable { found: String, variable: String },
    #[error("integrand uses parameter '{0}' which is not declared")]
    UndeclaredParam(String),
    #[error("constraint references undeclared parameter '{0}'")]
    UndeclaredConstraintParam(String),
    #[error("parameter '{name}' has an inverted validity box [{lo}, {hi}]")]
    InvertedBox { name: String, lo: f64, hi: f64 },
    #[error("domain bound contains the integration variable")]
    VariableInBound,
    #[error("period must be a closed expression (no variable, no parameters)")]
    OpenPeriod,
}

impl IntegralSpec {
    /// Convenience constructor for `(0, inf)` specs with no parameters.
    pub fn semi_infinite(integrand: Expr, variable: &str) -> Self {
        IntegralSpec {
            integrand,
            variable: variable.to_string(),
            domain: Domain::SemiInfinite,
            parameters: Vec::new(),
            constraints: Vec::new(),
        }
    }

    /// Convenience constructor for one full `2*pi` period.
    pub fn periodic_two_pi(integrand: Expr, variable: &str) -> Self {
        IntegralSpec {
            integrand,
            variable: variable.to_string(),
            domain: Domain::Periodic {
                period: Expr::product(vec![Expr::int(2), Expr::Pi]),
            },
            parameters: Vec::new(),
            constraints: Vec::new(),
        }
    }

    pub fn with_param(mut self, name: &str, lo: f64, hi: f64) -> Self {
        self.parameters.push(ParamSpec {
            name: name.to_string(),
            lo,
            hi,
        });
        self
    }

    pub fn with_constraint(mut self, c: Constraint) -> Self {
        self.constraints.push(c);
        self
    }

    /// Checks the structural invariants: the integrand's free symbols are
    /// the variable plus declared parameters, constraint names are
    /// declared, boxes are not inverted, and domain bounds are closed
    /// enough to evaluate.
    pub fn validate(&self) -> Result<(), SpecError> {
        for v in self.integrand.var_names() {
            if v != self.variable {
                return Err(SpecError::ForeignVariable {
                    found: v,
                    variable: self.variable.clone(),
                });
            }
        }
        let declared: Vec<&str> = self.parameters.iter().map(|p| p.name.as_str()).collect();
        for p in self.integrand.param_names() {
            if !declared.contains(&p.as_str()) {
                return Err(SpecError::UndeclaredParam(p));
            }
        }
        let mut cnames = Vec::new();
        for c in &self.constraints {
            c.param_names(&mut cnames);
        }
        for n in cnames {
            if !declared.contains(&n.as_str()) {
                return Err(SpecError::UndeclaredConstraintParam(n));
            }
        }
        for p in &self.parameters {
            if !(p.lo <= p.hi) {
                return Err(SpecError::InvertedBox {
                    name: p.name.clone(),
                    lo: p.lo,
                    hi: p.hi,
                });
            }
        }
        match &self.domain {
            Domain::SemiInfinite => {}
            Domain::Interval { lo, hi } => {
                for bound in [lo, hi] {
                    if bound.contains_var() {
                        return Err(SpecError::VariableInBound);
                    }
                    for p in bound.param_names() {
                        if !declared.contains(&p.as_str()) {
                            return Err(SpecError::UndeclaredParam(p));
                        }
                    }
                }
            }
            Domain::Periodic { period } => {
                if period.contains_var() || !period.param_names().is_empty() {
                    return Err(SpecError::OpenPeriod);
                }
            }
        }
        Ok(())
    }

    /// The rewriting assumptions this spec justifies, plus human-readable
    /// notes recorded on certificates.
    fn assumptions(&self) -> (Assumptions, Vec<String>) {
        let mut a = Assumptions::new();
        let mut notes = Vec::new();
        match &self.domain {
            Domain::SemiInfinite => {
                notes.push(format!("{} > 0 on the integration domain", self.variable));
            }
            Domain::Periodic { period } => {
                notes.push(format!(
                    "integrand has period {} in {}",
                    render(period),
                    self.variable
                ));
            }
            Domain::Interval { .. } => {}
        }
        for c in &self.constraints {
            match c {
                Constraint::Positive(n) => a.assume_positive(n),
                Constraint::NonZero(n) => a.assume_nonzero(n),
                Constraint::MinExclusive(n, m) if *m >= 0.0 => a.assume_positive(n),
                _ => {}
            }
            notes.push(c.describe());
        }
        (a, notes)
    }
}

/// How a proof step must be re-checked numerically.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    /// `after(x) = before(x)` pointwise.
    Rewrite,
    /// `after(x) = before(x) + before(1/x) * x^-2` on (0, 1).
    ReciprocalFold,
    /// `after(phi) = before(phi) + before(phi + pi)` on (0, pi).
    HalfPeriodShift,
}

pub const FOLD_RULE: &str = "reciprocal-fold";
pub const SHIFT_RULE: &str = "half-period-shift";

/// One recorded move of the proof.
#[derive(Debug, Clone, PartialEq)]
pub struct ProofStep {
    pub rule: String,
    pub kind: StepKind,
    pub before: Expr,
    pub after: Expr,
    pub justification: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Conclusion {
    /// Closed value, free of the variable and of every parameter — the
    /// invariance claim itself.
    Value(Expr),
    NotProved,
}

/// A machine-checkable record of the proof attempt.
#[derive(Debug, Clone, PartialEq)]
pub struct ProofCertificate {
    pub spec: IntegralSpec,
    pub assumptions: Vec<String>,
    pub steps: Vec<ProofStep>,
    pub conclusion: Conclusion,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProverError {
    #[error("operation requires a {expected} domain, got {found}")]
    DomainMismatch {
        expected: &'static str,
        found: &'static str,
    },
}

/// Splits `(0, inf)` at 1 and maps `(1, inf)` onto `(0, 1)` by `x -> 1/x`:
/// returns the combined one-interval integrand `f(x) + f(1/x) * x^-2`
/// (canonicalized but not yet identity-rewritten) and the step recording
/// the substitution.
pub fn split_and_fold(spec: &IntegralSpec) -> Result<(Expr, ProofStep), ProverError> {
    if spec.domain != Domain::SemiInfinite {
        return Err(ProverError::DomainMismatch {
            expected: "semi-infinite",
            found: spec.domain.name(),
        });
    }
    let v = &spec.variable;
    let folded = Expr::sum(vec![
        spec.integrand.clone(),
        fold_image_raw(&spec.integrand, v),
    ]);
    let step = ProofStep {
        rule: FOLD_RULE.to_string(),
        kind: StepKind::ReciprocalFold,
        before: spec.integrand.clone(),
        after: folded.clone(),
        justification: format!(
            "split (0, inf) at {v} = 1; substitute {v} -> 1/{v} on (1, inf), \
             whose Jacobian {v}^-2 maps it onto (0, 1)"
        ),
    };
    Ok((folded, step))
}

/// Splits one `2*pi` period at `pi` and shifts the second half back:
/// returns `f(phi) + f(phi + pi)` (canonicalized; identity rewriting, e.g.
/// `cos(phi + pi) -> -cos(phi)`, is applied separately by [`prove`]) and
/// the recording step, valid on `(0, pi)`.
pub fn half_period_shift(spec: &IntegralSpec) -> Result<(Expr, ProofStep), ProverError> {
    let ok = matches!(&spec.domain, Domain::Periodic { period } if period_is_two_pi(period));
    if !ok {
        return Err(ProverError::DomainMismatch {
            expected: "periodic with period 2*pi",
            found: spec.domain.name(),
        });
    }
    let v = &spec.variable;
    let shifted = spec
        .integrand
        .substitute(v, &Expr::sum(vec![Expr::var(v), Expr::Pi]));
    let combined = Expr::sum(vec![spec.integrand.clone(), shifted]);
    let step = ProofStep {
        rule: SHIFT_RULE.to_string(),
        kind: StepKind::HalfPeriodShift,
        before: spec.integrand.clone(),
        after: combined.clone(),
        justification: format!(
            "split (0, 2*pi) at pi; substitute {v} -> {v} + pi on (pi, 2*pi), \
             mapping it onto (0, pi)"
        ),
    };
    Ok((combined, step))
}

/// Applies the identity table to a fixed point, recording each applied
/// rule as a pointwise-checkable step.
pub fn rewrite_with_trace(e: &Expr, assumptions: &Assumptions) -> (Expr, Vec<ProofStep>) {
    let (out, apps) = rewrite::rewrite_with_trace(e, assumptions);
    let steps = apps
        .into_iter()
        .map(|a| ProofStep {
            rule: a.rule.to_string(),
            kind: StepKind::Rewrite,
            before: a.before,
            after: a.after,
            justification: a.justification.to_string(),
        })
        .collect();
    (out, steps)
}

/// Base integrals over `(0, 1)` for concluding constant-residue proofs.
/// Deliberately tiny: unknown weights yield `NotProved`, never a guess.
fn base_integrals(var: &str) -> Vec<(Expr, Expr)> {
    let x = || Expr::var(var);
    vec![
        (
            // 1/(1+x^2) on (0,1) -> pi/4
            Expr::power(
                Expr::sum(vec![Expr::one(), Expr::power(x(), Expr::int(2))]),
                Expr::int(-1),
            ),
            Expr::product(vec![Expr::number(crate::rational::rat(1, 4)), Expr::Pi]),
        ),
        (
            // 1/(1+x)^2 on (0,1) -> 1/2
            Expr::power(
                Expr::sum(vec![Expr::one(), x()]),
                Expr::int(-2),
            ),
            Expr::number(crate::rational::rat(1, 2)),
        ),
    ]
}

fn closed_value(e: &Expr) -> bool {
    !e.contains_var() && e.param_names().is_empty()
}

fn conclude_fold(residue: &Expr, var: &str) -> Conclusion {
    if residue.is_zero() {
        return Conclusion::Value(Expr::zero());
    }
    if closed_value(residue) {
        // the (0,1) integral of a constant is the constant itself
        return Conclusion::Value(residue.clone());
    }
    let factors: Vec<Expr> = match residue {
        Expr::Product(fs) => fs.clone(),
        other => vec![other.clone()],
    };
    let (consts, weight_parts): (Vec<Expr>, Vec<Expr>) =
        factors.into_iter().partition(closed_value);
    if consts.is_empty() || weight_parts.is_empty() {
        return Conclusion::NotProved;
    }
    let weight = Expr::product(weight_parts);
    for (w, base) in base_integrals(var) {
        if w == weight {
            let mut parts = consts;
            parts.push(base);
            return Conclusion::Value(Expr::product(parts));
        }
    }
    Conclusion::NotProved
}

fn conclude_shift(combined: &Expr) -> Conclusion {
    if combined.is_zero() {
        return Conclusion::Value(Expr::zero());
    }
    if closed_value(combined) {
        // integrate the constant over the half period (0, pi)
        return Conclusion::Value(Expr::product(vec![combined.clone(), Expr::Pi]));
    }
    Conclusion::NotProved
}

/// Runs the whole method on a spec. Never errors: anything the fixed
/// identity table cannot close comes back as `NotProved`.
pub fn prove(spec: &IntegralSpec) -> ProofCertificate {
    let (assumptions, notes) = spec.assumptions();
    let certificate = |steps: Vec<ProofStep>, conclusion: Conclusion| {
        let conclusion = match conclusion {
            Conclusion::Value(v) if !closed_value(&v) => Conclusion::NotProved,
            c => c,
        };
        ProofCertificate {
            spec: spec.clone(),
            assumptions: notes.clone(),
            steps,
            conclusion,
        }
    };
    if spec.validate().is_err() {
        return certificate(Vec::new(), Conclusion::NotProved);
    }

    match &spec.domain {
        Domain::SemiInfinite => {
            let mut steps = Vec::new();
            let (pre, pre_steps) = rewrite_with_trace(&spec.integrand, &assumptions);
            steps.extend(pre_steps);
            let pre_spec = IntegralSpec {
                integrand: pre,
                ..spec.clone()
            };
            let (folded, fold_step) = split_and_fold(&pre_spec).expect("domain checked");
            steps.push(fold_step);
            let (residue, rw_steps) = rewrite_with_trace(&folded, &assumptions);
            steps.extend(rw_steps);
            certificate(steps, conclude_fold(&residue, &spec.variable))
        }
        Domain::Periodic { period } if period_is_two_pi(period) => {
            let mut steps = Vec::new();
            let (combined, shift_step) = half_period_shift(spec).expect("domain checked");
            steps.push(shift_step);
            let (reduced, rw_steps) = rewrite_with_trace(&combined, &assumptions);
            steps.extend(rw_steps);
            certificate(steps, conclude_shift(&reduced))
        }
        _ => certificate(Vec::new(), Conclusion::NotProved),
    }
}

// ---------------------------------------------------------------------
// Certificate verification: every step is a pointwise identity
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VerifyError {
    #[error("certificate spec is invalid: {0}")]
    BadSpec(#[from] SpecError),
    #[error(
        "step {index} ({rule}) failed its numeric self-check at {variable} = {x}: \
         {lhs} vs {rhs}"
    )]
    StepMismatch {
        index: usize,
        rule: String,
        variable: String,
        x: f64,
        lhs: f64,
        rhs: f64,
    },
    #[error("step {index} ({rule}) could be evaluated at only {valid} of 20 points")]
    TooFewPoints {
        index: usize,
        rule: String,
        valid: usize,
    },
    #[error("step {index} does not chain: its input is not the previous step's output")]
    BrokenChain { index: usize },
    #[error("conclusion is not closed: it mentions the variable or a parameter")]
    OpenConclusion,
    #[error(
        "concluded value {claimed} disagrees with a numeric integral of the final \
         integrand ({numeric})"
    )]
    ConclusionMismatch { claimed: f64, numeric: f64 },
    #[error("the concluded value could not be checked numerically at any sampled binding")]
    ConclusionUnchecked,
}

const CHECK_POINTS: usize = 20;
const MIN_VALID_POINTS: usize = 15;
const STEP_REL_TOL: f64 = 1e-9;

/// What a step claims, evaluated at one point.
fn step_sides(
    step: &ProofStep,
    var: &str,
    bindings: &Bindings,
) -> Result<(f64, f64), crate::expr::eval::EvalError> {
    let lhs = match step.kind {
        StepKind::Rewrite => evaluate(&step.before, bindings)?,
        StepKind::ReciprocalFold => {
            let x = bindings.get(var).expect("variable bound");
            let direct = evaluate(&step.before, bindings)?;
            let mut inv = bindings.clone();
            inv.set(var, 1.0 / x);
            let mirrored = evaluate(&step.before, &inv)?;
            direct + mirrored / (x * x)
        }
        StepKind::HalfPeriodShift => {
            let phi = bindings.get(var).expect("variable bound");
            let direct = evaluate(&step.before, bindings)?;
            let mut shifted = bindings.clone();
            shifted.set(var, phi + std::f64::consts::PI);
            direct + evaluate(&step.before, &shifted)?
        }
    };
    let rhs = evaluate(&step.after, bindings)?;
    Ok((lhs, rhs))
}

/// Sample abscissa for the step's check domain.
fn check_abscissa(kind: StepKind, domain: &Domain, u: f64) -> f64 {
    match kind {
        StepKind::ReciprocalFold => u,                       // (0, 1)
        StepKind::HalfPeriodShift => u * std::f64::consts::PI, // (0, pi)
        StepKind::Rewrite => match domain {
            Domain::Periodic { .. } => u * 2.0 * std::f64::consts::PI,
            _ => (4.0 * u - 2.0).exp(), // log-spread over (e^-2, e^2)
        },
    }
}

/// Re-checks a certificate: the spec validates, the steps chain, each
/// step's pointwise identity holds at 20 sampled points (relative 1e-9),
/// and a `Value` conclusion is closed. Deterministic in `seed`.
pub fn verify_certificate(cert: &ProofCertificate, seed: u64) -> Result<(), VerifyError> {
    cert.spec.validate()?;
    if let Conclusion::Value(v) = &cert.conclusion {
        if !closed_value(v) {
            return Err(VerifyError::OpenConclusion);
        }
    }
    if let Some(first) = cert.steps.first() {
        if first.before != cert.spec.integrand {
            return Err(VerifyError::BrokenChain { index: 0 });
        }
    }
    for (i, pair) in cert.steps.windows(2).enumerate() {
        if pair[1].before != pair[0].after {
            return Err(VerifyError::BrokenChain { index: i + 1 });
        }
    }

    let param_draws = sample_params(&cert.spec, CHECK_POINTS, seed);
    for (index, step) in cert.steps.iter().enumerate() {
        let mut valid = 0usize;
        for (i, params) in param_draws.iter().enumerate() {
            let u = halton(seed % 101 + 23 + i as u64, 2);
            let x = check_abscissa(step.kind, &cert.spec.domain, u);
            let mut bindings = params.clone();
            bindings.set(&cert.spec.variable, x);
            let Ok((lhs, rhs)) = step_sides(step, &cert.spec.variable, &bindings) else {
                continue;
            };
            if !(lhs.is_finite() && rhs.is_finite()) {
                continue;
            }
            valid += 1;
            let tol = STEP_REL_TOL * (1.0 + lhs.abs().max(rhs.abs()));
            if (lhs - rhs).abs() > tol {
                return Err(VerifyError::StepMismatch {
                    index,
                    rule: step.rule.clone(),
                    variable: cert.spec.variable.clone(),
                    x,
                    lhs,
                    rhs,
                });
            }
        }
        if valid < MIN_VALID_POINTS {
            return Err(VerifyError::TooFewPoints {
                index,
                rule: step.rule.clone(),
                valid,
            });
        }
    }
    check_conclusion(cert, seed)
}

/// Integrates the final integrand of the step chain numerically and
/// compares with the concluded value, so a certificate cannot claim a
/// value its own steps do not support. A fold step moves the integral
/// onto (0, 1); a shift step onto (0, pi); otherwise the original
/// domain applies.
fn check_conclusion(cert: &ProofCertificate, seed: u64) -> Result<(), VerifyError> {
    use crate::quadrature::{
        integrate_folded_semi_infinite, integrate_interval, integrate_periodic,
    };
    let Conclusion::Value(claimed) = &cert.conclusion else {
        return Ok(());
    };
    let claimed = evaluate(claimed, &Bindings::new()).map_err(|_| VerifyError::OpenConclusion)?;
    let last = cert
        .steps
        .last()
        .map(|s| s.after.clone())
        .unwrap_or_else(|| cert.spec.integrand.clone());
    let folded = cert.steps.iter().any(|s| s.kind == StepKind::ReciprocalFold);
    let shifted = cert
        .steps
        .iter()
        .any(|s| s.kind == StepKind::HalfPeriodShift);
    let tol = STEP_REL_TOL / 10.0;
    let mut checked = false;
    for params in sample_params(&cert.spec, 3, seed.wrapping_add(5)) {
        let numeric = if folded {
            integrate_interval(&last, &params, 0.0, 1.0, tol)
        } else if shifted {
            integrate_interval(&last, &params, 0.0, std::f64::consts::PI, tol)
        } else {
            match &cert.spec.domain {
                Domain::SemiInfinite => integrate_folded_semi_infinite(&last, &params, tol),
                Domain::Periodic { .. } => integrate_periodic(&last, &params, 64, tol),
                Domain::Interval { lo, hi } => {
                    let (Ok(lo), Ok(hi)) = (evaluate(lo, &params), evaluate(hi, &params)) else {
                        continue;
                    };
                    integrate_interval(&last, &params, lo, hi, tol)
                }
            }
        };
        let Ok(numeric) = numeric else { continue };
        if !numeric.value.is_finite() {
            continue;
        }
        checked = true;
        if (numeric.value - claimed).abs() > STEP_REL_TOL * (1.0 + claimed.abs()) {
            return Err(VerifyError::ConclusionMismatch {
                claimed,
                numeric: numeric.value,
            });
        }
    }
    if checked {
        Ok(())
    } else {
        Err(VerifyError::ConclusionUnchecked)
    }
}

// ---------------------------------------------------------------------
// Certificate serialization (JSON; expressions as rendered strings with
// reparse equality, not byte equality, as the round-trip contract)
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CertError {
    #[error("missing or mistyped field '{0}'")]
    Field(String),
    #[error("unknown {what} tag '{tag}'")]
    UnknownTag { what: &'static str, tag: String },
    #[error("failed to parse expression '{src}': {err}")]
    Expr { src: String, err: ParseError },
    #[error("invalid JSON: {0}")]
    Syntax(String),
}

fn domain_to_json(d: &Domain) -> Json {
    match d {
        Domain::SemiInfinite => json!({ "type": "semi-infinite" }),
        Domain::Interval { lo, hi } => json!({
            "type": "interval",
            "lo": render(lo),
            "hi": render(hi),
        }),
        Domain::Periodic { period } => json!({
            "type": "periodic",
            "period": render(period),
        }),
    }
}

fn constraint_to_json(c: &Constraint) -> Json {
    match c {
        Constraint::Positive(n) => json!({ "kind": "positive", "name": n }),
        Constraint::NonZero(n) => json!({ "kind": "non-zero", "name": n }),
        Constraint::MinExclusive(n, m) =>

            json!({ "kind": "min-exclusive", "name": n, "min": m }),
        Constraint::AbsGreater(a, b) => {
            json!({ "kind": "abs-greater", "larger": a, "smaller": b })
        }
        Constraint::AnyOf(opts) => json!({
            "kind": "any-of",
            "options": opts.iter().map(constraint_to_json).collect::<Vec<_>>(),
        }),
    }
}

impl IntegralSpec {
    pub fn to_json(&self) -> Json {
        json!({
            "integrand": render(&self.integrand),
            "variable": self.variable,
            "domain": domain_to_json(&self.domain),
            "parameters": self.parameters.iter().map(|p| json!({
                "name": p.name, "lo": p.lo, "hi": p.hi,
            })).collect::<Vec<_>>(),
            "constraints": self.constraints.iter().map(constraint_to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Json) -> Result<Self, CertError> {
        let variable = str_field(v, "variable")?.to_string();
        let integrand = parse_expr(str_field(v, "integrand")?, &variable)?;
        let domain = domain_from_json(
            v.get("domain").ok_or_else(|| CertError::Field("domain".into()))?,
            &variable,
        )?;
        let mut parameters = Vec::new();
        if let Some(arr) = v.get("parameters").and_then(Json::as_array) {
            for p in arr {
                parameters.push(ParamSpec {
                    name: str_field(p, "name")?.to_string(),
                    lo: num_field(p, "lo")?,
                    hi: num_field(p, "hi")?,
                });
            }
        }
        let mut constraints = Vec::new();
        if let Some(arr) = v.get("constraints").and_then(Json::as_array) {
            for c in arr {
                constraints.push(constraint_from_json(c)?);
            }
        }
        Ok(IntegralSpec {
            integrand,
            variable,
            domain,
            parameters,
            constraints,
        })
    }
}

fn str_field<'a>(v: &'a Json, name: &str) -> Result<&'a str, CertError> {
    v.get(name)
        .and_then(Json::as_str)
        .ok_or_else(|| CertError::Field(name.into()))
}

fn num_field(v: &Json, name: &str) -> Result<f64, CertError> {
    v.get(name)
        .and_then(Json::as_f64)
        .ok_or_else(|| CertError::Field(name.into()))
}

fn parse_expr(src: &str, var: &str) -> Result<Expr, CertError> {
    parse(src, var).map_err(|err| CertError::Expr {
        src: src.to_string(),
        err,
    })
}

fn domain_from_json(v: &Json, var: &str) -> Result<Domain, CertError> {
    match str_field(v, "type")? {
        "semi-infinite" => Ok(Domain::SemiInfinite),
        "interval" => Ok(Domain::Interval {
            lo: parse_expr(str_field(v, "lo")?, var)?,
            hi: parse_expr(str_field(v, "hi")?, var)?,
        }),
        "periodic" => Ok(Domain::Periodic {
            period: parse_expr(str_field(v, "period")?, var)?,
        }),
        other => Err(CertError::UnknownTag {
            what: "domain",
            tag: other.to_string(),
        }),
    }
}

fn constraint_from_json(v: &Json) -> Result<Constraint, CertError> {
    match str_field(v, "kind")? {
        "positive" => Ok(Constraint::Positive(str_field(v, "name")?.to_string())),
        "non-zero" => Ok(Constraint::NonZero(str_field(v, "name")?.to_string())),
        "min-exclusive" => Ok(Constraint::MinExclusive(
            str_field(v, "name")?.to_string(),
            num_field(v, "min")?,
        )),
        "abs-greater" => Ok(Constraint::AbsGreater(
            str_field(v, "larger")?.to_string(),
            str_field(v, "smaller")?.to_string(),
        )),
        "any-of" => {
            let arr = v
                .get("options")
                .and_then(Json::as_array)
                .ok_or_else(|| CertError::Field("options".into()))?;
            Ok(Constraint::AnyOf(
                arr.iter()
                    .map(constraint_from_json)
                    .collect::<Result<_, _>>()?,
            ))
        }
        other => Err(CertError::UnknownTag {
            what: "constraint",
            tag: other.to_string(),
        }),
    }
}

fn kind_for_rule(rule: &str) -> StepKind {
    match rule {
        FOLD_RULE => StepKind::ReciprocalFold,
        SHIFT_RULE => StepKind::HalfPeriodShift,
        _ => StepKind::Rewrite,
    }
}

impl ProofCertificate {
    pub fn to_json(&self) -> Json {
        json!({
            "spec": self.spec.to_json(),
            "assumptions": self.assumptions,
            "steps": self.steps.iter().map(|s| json!({
                "rule": s.rule,
                "before": render(&s.before),
                "after": render(&s.after),
                "justification": s.justification,
            })).collect::<Vec<_>>(),
            "conclusion": match &self.conclusion {
                Conclusion::Value(e) => json!({ "type": "value", "expr": render(e) }),
                Conclusion::NotProved => json!({ "type": "not-proved" }),
            },
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("JSON value serializes")
    }

    pub fn from_json(v: &Json) -> Result<Self, CertError> {
        let spec = IntegralSpec::from_json(
            v.get("spec").ok_or_else(|| CertError::Field("spec".into()))?,
        )?;
        let var = spec.variable.clone();
        let assumptions = v
            .get("assumptions")
            .and_then(Json::as_array)
            .map(|arr| {
                arr.iter()
                    .map(|a| {
                        a.as_str()
                            .map(str::to_string)
                            .ok_or_else(|| CertError::Field("assumptions".into()))
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()?
            .unwrap_or_default();
        let mut steps = Vec::new();
        if let Some(arr) = v.get("steps").and_then(Json::as_array) {
            for s in arr {
                let rule = str_field(s, "rule")?.to_string();
                steps.push(ProofStep {
                    kind: kind_for_rule(&rule),
                    before: parse_expr(str_field(s, "before")?, &var)?,
                    after: parse_expr(str_field(s, "after")?, &var)?,
                    justification: str_field(s, "justification")
                        .map(str::to_string)
                        .unwrap_or_default(),
                    rule,
                });
            }
        }
        let cv = v
            .get("conclusion")
            .ok_or_else(|| CertError::Field("conclusion".into()))?;
        let conclusion = match str_field(cv, "type")? {
            "value" => Conclusion::Value(parse_expr(str_field(cv, "expr")?, &var)?),
            "not-proved" => Conclusion::NotProved,
            other => {
                return Err(CertError::UnknownTag {
                    what: "conclusion",
                    tag: other.to_string(),
                })
            }
        };
        Ok(ProofCertificate {
            spec,
            assumptions,
            steps,
            conclusion,
        })
    }

    pub fn from_json_str(s: &str) -> Result<Self, CertError> {
        let v: Json =
            serde_json::from_str(s).map_err(|e| CertError::Syntax(e.to_string()))?;
        Self::from_json(&v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parser::parse;

    fn p(s: &str) -> Expr {
        parse(s, "x").unwrap()
    }

    fn arctan_spec() -> IntegralSpec {
        IntegralSpec::semi_infinite(p("atan(x^a)/(1 + x^2)"), "x").with_param("a", -5.0, 5.0)
    }

    #[test]
    fn arctan_family_proves_pi_squared_over_eight() {
        let cert = prove(&arctan_spec());
        assert_eq!(cert.conclusion, Conclusion::Value(p("pi^2/8")));
        assert!(cert.steps.iter().any(|s| s.kind == StepKind::ReciprocalFold));
        verify_certificate(&cert, 11).unwrap();
    }

    #[test]
    fn odd_log_weight_proves_zero() {
        // single log over a shifted weight
        let spec = IntegralSpec::semi_infinite(p("ln(x)/(1 + b*x + x^2)"), "x")
            .with_param("b", -2.0, 5.0)
            .with_constraint(Constraint::MinExclusive("b".into(), -2.0));
        let cert = prove(&spec);
        assert_eq!(cert.conclusion, Conclusion::Value(Expr::zero()));
        verify_certificate(&cert, 3).unwrap();
    }

    #[test]
    fn bare_weight_proves_half_pi() {
        let spec = IntegralSpec::semi_infinite(p("1/(1 + x^2)"), "x");
        let cert = prove(&spec);
        // residue 2/(1+x^2); base integral pi/4; value pi/2
        assert_eq!(cert.conclusion, Conclusion::Value(p("pi/2")));
        verify_certificate(&cert, 5).unwrap();
    }

    #[test]
    fn parameter_dependent_weight_is_not_proved() {
        let spec = IntegralSpec::semi_infinite(p("1/(1 + a*x + x^2)"), "x")
            .with_param("a", 0.0, 2.0)
            .with_constraint(Constraint::MinExclusive("a".into(), -2.0));
        let cert = prove(&spec);
        assert_eq!(cert.conclusion, Conclusion::NotProved);
        // the attempt is still a valid (if inconclusive) certificate
        verify_certificate(&cert, 7).unwrap();
    }

    #[test]
    fn periodic_log_ratio_proves_zero() {
        let f = parse(
            "ln((z^2 + (a + r*cos(t))^2)/(z^2 + (a - r*cos(t))^2))",
            "t",
        )
        .unwrap();
        let spec = IntegralSpec::periodic_two_pi(f, "t")
            .with_param("z", 0.25, 2.0)
            .with_param("a", 0.5, 2.5)
            .with_param("r", 0.1, 0.9)
            .with_constraint(Constraint::AnyOf(vec![
                Constraint::NonZero("z".into()),
                Constraint::AbsGreater("a".into(), "r".into()),
            ]));
        let cert = prove(&spec);
        assert_eq!(cert.conclusion, Conclusion::Value(Expr::zero()));
        assert!(cert
            .steps
            .iter()
            .any(|s| s.kind == StepKind::HalfPeriodShift));
        verify_certificate(&cert, 2).unwrap();
    }

    #[test]
    fn constant_periodic_integrand() {
        let spec = IntegralSpec::periodic_two_pi(p("3"), "t");
        let cert = prove(&spec);
        // combined integrand 6 on (0, pi): integral 6*pi
        assert_eq!(cert.conclusion, Conclusion::Value(p("6*pi")));
    }

    #[test]
    fn acot_variant_also_proves() {
        let spec = IntegralSpec::semi_infinite(p("acot(x^3)/(1 + x^2)"), "x");
        let cert = prove(&spec);
        assert_eq!(cert.conclusion, Conclusion::Value(p("pi^2/8")));
        verify_certificate(&cert, 13).unwrap();
    }

    #[test]
    fn interval_domains_are_not_proved() {
        let spec = IntegralSpec {
            integrand: p("1/(1 + x^2)"),
            variable: "x".into(),
            domain: Domain::Interval {
                lo: Expr::zero(),
                hi: Expr::one(),
            },
            parameters: vec![],
            constraints: vec![],
        };
        assert_eq!(prove(&spec).conclusion, Conclusion::NotProved);
    }

    #[test]
    fn validation_catches_undeclared_symbols() {
        let spec = IntegralSpec::semi_infinite(p("atan(x^a)/(1 + x^2)"), "x");
        assert!(matches!(
            spec.validate(),
            Err(SpecError::UndeclaredParam(ref n)) if n == "a"
        ));
        assert_eq!(prove(&spec).conclusion, Conclusion::NotProved);
    }

    #[test]
    fn tampered_certificates_fail_verification() {
        let cert = prove(&arctan_spec());
        verify_certificate(&cert, 1).unwrap();

        // flip a step's output
        let mut bad = cert.clone();
        let last = bad.steps.len() - 1;
        bad.steps[last].after = p("pi/(3*(1 + x^2))");
        assert!(matches!(
            verify_certificate(&bad, 1),
            Err(VerifyError::StepMismatch { .. }) | Err(VerifyError::BrokenChain { .. })
        ));

        // claim an open conclusion
        let mut open = cert.clone();
        open.conclusion = Conclusion::Value(p("a"));
        assert!(matches!(
            verify_certificate(&open, 1),
            Err(VerifyError::OpenConclusion)
        ));

        // break the chain
        let mut chain = cert;
        chain.steps[0].before = p("atan(x^a)/(2 + x^2)");
        assert!(matches!(
            verify_certificate(&chain, 1),
            Err(VerifyError::BrokenChain { index: 0 })
        ));
    }

    #[test]
    fn certificates_round_trip_through_json() {
        for cert in [
            prove(&arctan_spec()),
            prove(
                &IntegralSpec::semi_infinite(p("1/(1 + a*x + x^2)"), "x")
                    .with_param("a", 0.0, 2.0)
                    .with_constraint(Constraint::AnyOf(vec![
                        Constraint::MinExclusive("a".into(), -2.0),
                        Constraint::Positive("a".into()),
                    ])),
            ),
        ] {
            let text = cert.to_json_string();
            let back = ProofCertificate::from_json_str(&text).unwrap();
            assert_eq!(back, cert);
        }
    }

    #[test]
    fn fold_step_is_the_documented_two_term_sum() {
        let spec = arctan_spec();
        let (folded, step) = split_and_fold(&spec).unwrap();
        assert_eq!(
            folded,
            p("atan(x^a)/(1 + x^2) + atan(x^(-a))/(1 + x^2)")
        );
        assert_eq!(step.kind, StepKind::ReciprocalFold);
        let err = split_and_fold(&IntegralSpec::periodic_two_pi(p("cos(x)"), "x"));
        assert!(err.is_err());
    }

    #[test]
    fn shift_examples() {
        // sin integrand cancels after the trig shift rule
        let spec = IntegralSpec::periodic_two_pi(p("sin(x)"), "x");
        let cert = prove(&spec);
        assert_eq!(cert.conclusion, Conclusion::Value(Expr::zero()));

        let (combined, _) = half_period_shift(&spec).unwrap();
        assert_eq!(combined, p("sin(x) + sin(x + pi)"));
    }
}
