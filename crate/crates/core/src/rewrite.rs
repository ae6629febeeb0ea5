//! Assumption-aware identity rewriting with a recorded trace.
//!
//! The rule table is small and auditable; every rule is an identity on the
//! domain `var > 0` (plus whatever parameter facts the caller asserts), so a
//! rewrite never changes the value of an expression at any valid point. The
//! engine applies the rules in a fixed order, bottom-up, one whole-tree
//! sweep per rule, until a pass changes nothing (hard cap: 64 passes).
//! Each sweep that changed something is recorded as a [`RuleApplication`],
//! which downstream proof certificates re-check numerically.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::expr::{factor_slice, materialize_term, split_coeff, Expr};
use crate::rational::{rat, small_integer, Rational};

/// Facts about parameters that license sign-sensitive rules. The
/// integration variable is always assumed positive (every supported domain
/// lies in `x > 0` or `phi in (0, 2pi)`).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assumptions {
    positive: BTreeSet<String>,
    nonnegative: BTreeSet<String>,
    nonzero: BTreeSet<String>,
}

impl Assumptions {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn assume_positive(&mut self, name: &str) {
        self.positive.insert(name.to_string());
    }

    pub fn assume_nonnegative(&mut self, name: &str) {
        self.nonnegative.insert(name.to_string());
    }

    pub fn assume_nonzero(&mut self, name: &str) {
        self.nonzero.insert(name.to_string());
    }

    pub fn is_positive(&self, name: &str) -> bool {
        self.positive.contains(name)
    }

    pub fn is_nonnegative(&self, name: &str) -> bool {
        self.nonnegative.contains(name) || self.positive.contains(name)
    }

    pub fn is_nonzero(&self, name: &str) -> bool {
        self.nonzero.contains(name) || self.positive.contains(name)
    }
}

/// Provable sign of an expression on the positive-variable domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Positive,
    NonNegative,
    Unknown,
}

/// Conservative sign analysis: `Positive`/`NonNegative` are guarantees,
/// `Unknown` is the safe default.
pub fn sign_of(e: &Expr, a: &Assumptions) -> Sign {
    match e {
        Expr::Number(r) => {
            if r.is_positive() {
                Sign::Positive
            } else if r.is_zero() {
                Sign::NonNegative
            } else {
                Sign::Unknown
            }
        }
        Expr::Pi => Sign::Positive,
        Expr::Var(_) => Sign::Positive,
        Expr::Param(n) => {
            if a.is_positive(n) {
                Sign::Positive
            } else if a.is_nonnegative(n) {
                Sign::NonNegative
            } else {
                Sign::Unknown
            }
        }
        Expr::Power(b, ex) => {
            match sign_of(b, a) {
                // positive base: any real exponent keeps it positive
                Sign::Positive => Sign::Positive,
                s => {
                    if let Expr::Number(k) = ex.as_ref() {
                        if k.is_integer() && k.numer().bit(0) == false && !k.is_zero() {
                            // even power: nonnegative always, positive if the
                            // base is provably nonzero
                            return if provably_nonzero(b, a) {
                                Sign::Positive
                            } else {
                                Sign::NonNegative
                            };
                        }
                        if s == Sign::NonNegative && k.is_positive() {
                            return Sign::NonNegative;
                        }
                    }
                    Sign::Unknown
                }
            }
        }
        // principal arc-cotangent has range (0, pi)
        Expr::Acot(_) => Sign::Positive,
        Expr::Atan(arg) => match sign_of(arg, a) {
            Sign::Positive => Sign::Positive,
            Sign::NonNegative => Sign::NonNegative,
            Sign::Unknown => Sign::Unknown,
        },
        Expr::Ln(_) | Expr::Cos(_) | Expr::Sin(_) => Sign::Unknown,
        Expr::Product(fs) => {
            let mut all_positive = true;
            for f in fs {
                match sign_of(f, a) {
                    Sign::Positive => {}
                    Sign::NonNegative => all_positive = false,
                    Sign::Unknown => return Sign::Unknown,
                }
            }
            if all_positive {
                Sign::Positive
            } else {
                Sign::NonNegative
            }
        }
        Expr::Sum(ts) => {
            let mut has_positive = false;
            for t in ts {
                match sign_of(t, a) {
                    Sign::Positive => has_positive = true,
                    Sign::NonNegative => {}
                    Sign::Unknown => return Sign::Unknown,
                }
            }
            if has_positive {
                Sign::Positive
            } else {
                Sign::NonNegative
            }
        }
    }
}

/// True only when the expression provably cannot be zero at any valid point.
pub fn provably_nonzero(e: &Expr, a: &Assumptions) -> bool {
    match e {
        Expr::Number(r) => !r.is_zero(),
        Expr::Pi | Expr::Var(_) => true,
        Expr::Param(n) => a.is_nonzero(n),
        Expr::Power(b, _) => provably_nonzero(b, a),
        Expr::Product(fs) => fs.iter().all(|f| provably_nonzero(f, a)),
        _ => sign_of(e, a) == Sign::Positive,
    }
}

/// One recorded rule application: the whole expression before and after the
/// sweep in which the rule fired.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleApplication {
    pub rule: &'static str,
    pub justification: &'static str,
    pub before: Expr,
    pub after: Expr,
}

struct Rule {
    name: &'static str,
    justification: &'static str,
    local: fn(&Expr, &Assumptions) -> Option<Expr>,
}

const MAX_PASSES: usize = 64;

const RULES: &[Rule] = &[
    Rule {
        name: "acot-to-atan",
        justification: "acot(u) = pi/2 - atan(u) for u > 0",
        local: acot_to_atan,
    },
    Rule {
        name: "cos-half-period",
        justification: "cos(t + k*pi) = (-1)^k * cos(t) for integer k",
        local: cos_half_period,
    },
    Rule {
        name: "sin-half-period",
        justification: "sin(t + k*pi) = (-1)^k * sin(t) for integer k",
        local: sin_half_period,
    },
    Rule {
        name: "ln-power",
        justification: "ln(u^e) = e*ln(u) for u > 0",
        local: ln_power,
    },
    Rule {
        name: "ln-split",
        justification: "ln(u*v) = ln(u) + ln(v) for u, v > 0",
        local: ln_split,
    },
    Rule {
        name: "distribute",
        justification: "multiplication distributes over addition",
        local: distribute,
    },
    Rule {
        name: "atan-reciprocal-pair",
        justification: "atan(u) + atan(1/u) = pi/2 for u > 0",
        local: atan_pair,
    },
    Rule {
        name: "ln-reciprocal-pair",
        justification: "ln(u) + ln(1/u) = 0 wherever both logs are defined",
        local: ln_pair,
    },
];

/// Rewrites to a fixed point, returning the result and one trace entry per
/// rule sweep that changed the expression.
pub fn rewrite_with_trace(e: &Expr, a: &Assumptions) -> (Expr, Vec<RuleApplication>) {
    let mut cur = e.clone();
    let mut trace = Vec::new();
    for _ in 0..MAX_PASSES {
        let mut changed = false;
        for rule in RULES {
            let next = sweep(&cur, a, rule.local);
            if next != cur {
                trace.push(RuleApplication {
                    rule: rule.name,
                    justification: rule.justification,
                    before: cur.clone(),
                    after: next.clone(),
                });
                cur = next;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    (cur, trace)
}

/// Rewrites to a fixed point, discarding the trace.
pub fn rewrite_full(e: &Expr, a: &Assumptions) -> Expr {
    rewrite_with_trace(e, a).0
}

fn sweep(e: &Expr, a: &Assumptions, local: fn(&Expr, &Assumptions) -> Option<Expr>) -> Expr {
    let rebuilt = e.map_children(|c| sweep(c, a, local));
    match local(&rebuilt, a) {
        Some(next) => next,
        None => rebuilt,
    }
}

fn acot_to_atan(e: &Expr, a: &Assumptions) -> Option<Expr> {
    if let Expr::Acot(u) = e {
        if sign_of(u, a) == Sign::Positive {
            let half_pi = Expr::product(vec![Expr::number(rat(1, 2)), Expr::pi()]);
            return Some(Expr::sub(half_pi, Expr::atan((**u).clone())));
        }
    }
    None
}

/// Extracts the integer multiple of pi carried by a canonical sum (or a
/// single `k*pi` term), returning `(k, argument - k*pi)`.
fn split_pi_shift(arg: &Expr) -> Option<(i64, Expr)> {
    let terms: Vec<Expr> = match arg {
        Expr::Sum(ts) => ts.clone(),
        other => vec![other.clone()],
    };
    let mut k = 0i64;
    let mut rest = Vec::new();
    for t in terms {
        let (c, r) = split_coeff(t.clone());
        if r == Expr::Pi {
            if let Some(n) = small_integer(&c, 1_000_000) {
                k = n;
                continue;
            }
        }
        rest.push(t);
    }
    if k == 0 {
        return None;
    }
    Some((k, Expr::sum(rest)))
}

fn cos_half_period(e: &Expr, _a: &Assumptions) -> Option<Expr> {
    if let Expr::Cos(arg) = e {
        let (k, rest) = split_pi_shift(arg)?;
        let sign = if k.rem_euclid(2) == 0 { 1 } else { -1 };
        return Some(Expr::product(vec![Expr::int(sign), Expr::cos(rest)]));
    }
    None
}

fn sin_half_period(e: &Expr, _a: &Assumptions) -> Option<Expr> {
    if let Expr::Sin(arg) = e {
        let (k, rest) = split_pi_shift(arg)?;
        let sign = if k.rem_euclid(2) == 0 { 1 } else { -1 };
        return Some(Expr::product(vec![Expr::int(sign), Expr::sin(rest)]));
    }
    None
}

fn ln_power(e: &Expr, a: &Assumptions) -> Option<Expr> {
    if let Expr::Ln(arg) = e {
        if let Expr::Power(u, ex) = arg.as_ref() {
            if sign_of(u, a) == Sign::Positive {
                return Some(Expr::product(vec![(**ex).clone(), Expr::ln((**u).clone())]));
            }
        }
    }
    None
}

fn ln_split(e: &Expr, a: &Assumptions) -> Option<Expr> {
    if let Expr::Ln(arg) = e {
        if let Expr::Product(fs) = arg.as_ref() {
            if fs.iter().all(|f| sign_of(f, a) == Sign::Positive) {
                return Some(Expr::sum(fs.iter().map(|f| Expr::ln(f.clone())).collect()));
            }
        }
    }
    None
}

fn contains_inverse_function(e: &Expr) -> bool {
    match e {
        Expr::Ln(_) | Expr::Atan(_) | Expr::Acot(_) => true,
        Expr::Number(_) | Expr::Pi | Expr::Var(_) | Expr::Param(_) => false,
        Expr::Power(b, ex) => contains_inverse_function(b) || contains_inverse_function(ex),
        Expr::Cos(arg) | Expr::Sin(arg) => contains_inverse_function(arg),
        Expr::Product(cs) | Expr::Sum(cs) => cs.iter().any(contains_inverse_function),
    }
}

fn is_var_power(e: &Expr) -> bool {
    match e {
        Expr::Var(_) => true,
        Expr::Power(b, _) => matches!(b.as_ref(), Expr::Var(_)),
        _ => false,
    }
}

/// Expands a sum factor that carries ln/atan/acot terms over its non-numeric
/// co-factors, exposing term shapes the pair rules match. Numeric and bare
/// variable-power co-factors stay outside: canonical sums factor exactly
/// those back out, and carrying them in would oscillate forever.
fn distribute(e: &Expr, _a: &Assumptions) -> Option<Expr> {
    let Expr::Product(fs) = e else { return None };
    let idx = fs.iter().position(
        |f| matches!(f, Expr::Sum(_)) && contains_inverse_function(f),
    )?;
    let Expr::Sum(terms) = &fs[idx] else {
        return None;
    };
    let mut carried = Vec::new();
    let mut outside = Vec::new();
    for (i, f) in fs.iter().enumerate() {
        if i == idx {
            continue;
        }
        if matches!(f, Expr::Number(_)) || is_var_power(f) {
            outside.push(f.clone());
        } else {
            carried.push(f.clone());
        }
    }
    if carried.is_empty() {
        return None;
    }
    let expanded = Expr::sum(
        terms
            .iter()
            .map(|t| {
                let mut fac = carried.clone();
                fac.push(t.clone());
                Expr::product(fac)
            })
            .collect(),
    );
    outside.push(expanded);
    Some(Expr::product(outside))
}

/// Decomposes a term into `(coefficient, single ln/atan factor with its odd
/// power, remaining factors)`.
struct FnTerm {
    coeff: Rational,
    arg: Expr,
    power: Rational,
    rest: Vec<Expr>,
}

fn match_fn_term(t: &Expr, want_atan: bool) -> Option<FnTerm> {
    let (coeff, rest_expr) = split_coeff(t.clone());
    let mut hit: Option<(Expr, Rational)> = None;
    let mut rest = Vec::new();
    for f in factor_slice(&rest_expr) {
        let (inner, power) = match f {
            Expr::Power(b, ex) => {
                if let Expr::Number(k) = ex.as_ref() {
                    ((**b).clone(), k.clone())
                } else {
                    rest.push(f.clone());
                    continue;
                }
            }
            other => (other.clone(), Rational::one()),
        };
        let matched = match (&inner, want_atan) {
            (Expr::Atan(u), true) | (Expr::Ln(u), false) => Some((**u).clone()),
            _ => None,
        };
        match (matched, &hit) {
            (Some(u), None) => hit = Some((u, power)),
            (Some(_), Some(_)) => return None, // two candidate factors: ambiguous
            (None, _) => rest.push(f.clone()),
        }
    }
    let (arg, power) = hit?;
    Some(FnTerm {
        coeff,
        arg,
        power,
        rest,
    })
}

fn args_are_reciprocal(u: &Expr, v: &Expr) -> bool {
    Expr::product(vec![u.clone(), v.clone()]).is_one()
}

/// atan(u) + atan(1/u) = pi/2 (u > 0), applied to term pairs that agree in
/// coefficient and co-factors.
fn atan_pair(e: &Expr, a: &Assumptions) -> Option<Expr> {
    let Expr::Sum(terms) = e else { return None };
    for i in 0..terms.len() {
        let Some(ti) = match_fn_term(&terms[i], true) else {
            continue;
        };
        if !ti.power.is_one() {
            continue;
        }
        for j in (i + 1)..terms.len() {
            let Some(tj) = match_fn_term(&terms[j], true) else {
                continue;
            };
            if !tj.power.is_one()
                || ti.coeff != tj.coeff
                || ti.rest != tj.rest
                || !args_are_reciprocal(&ti.arg, &tj.arg)
            {
                continue;
            }
            if sign_of(&ti.arg, a) != Sign::Positive && sign_of(&tj.arg, a) != Sign::Positive {
                continue;
            }
            let mut out: Vec<Expr> = Vec::with_capacity(terms.len() - 1);
            for (k, t) in terms.iter().enumerate() {
                if k != i && k != j {
                    out.push(t.clone());
                }
            }
            let mut fac = ti.rest.clone();
            fac.push(Expr::number(rat(1, 2)));
            fac.push(Expr::pi());
            out.push(materialize_term(ti.coeff, Expr::product(fac)));
            return Some(Expr::sum(out));
        }
    }
    None
}

/// ln(u)^p + ln(1/u)^p = 0 for odd p, wherever the logs are defined; applied
/// to term pairs that agree in coefficient, power, and co-factors.
fn ln_pair(e: &Expr, _a: &Assumptions) -> Option<Expr> {
    let Expr::Sum(terms) = e else { return None };
    for i in 0..terms.len() {
        let Some(ti) = match_fn_term(&terms[i], false) else {
            continue;
        };
        let odd = ti
            .power
            .is_integer()
            .then(|| ti.power.numer().bit(0))
            .unwrap_or(false);
        if !odd || ti.power.is_negative() {
            continue;
        }
        for j in (i + 1)..terms.len() {
            let Some(tj) = match_fn_term(&terms[j], false) else {
                continue;
            };
            if tj.power != ti.power
                || tj.coeff != ti.coeff
                || tj.rest != ti.rest
                || !args_are_reciprocal(&ti.arg, &tj.arg)
            {
                continue;
            }
            let out: Vec<Expr> = terms
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != i && *k != j)
                .map(|(_, t)| t.clone())
                .collect();
            return Some(Expr::sum(out));
        }
    }
    None
}
