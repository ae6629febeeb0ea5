//! Numeric evaluation: a plain `f64` evaluator for general use, and a
//! sign/log-magnitude evaluator the quadrature engine uses so that extreme
//! abscissae (x near 1e-300) cannot produce `inf * 0 = NaN` in integrands
//! like `x^a / (1 + x^(2a))^n`.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use thiserror::Error;

use crate::rational::rat_to_f64;

use super::Expr;

/// Symbol environment for evaluation; binds both the integration variable
/// and the parameters.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Bindings {
    vals: BTreeMap<String, f64>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, v: f64) -> Self {
        self.vals.insert(name.to_string(), v);
        self
    }

    pub fn set(&mut self, name: &str, v: f64) {
        self.vals.insert(name.to_string(), v);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.vals.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.vals.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

impl<'a> FromIterator<(&'a str, f64)> for Bindings {
    fn from_iter<T: IntoIterator<Item = (&'a str, f64)>>(iter: T) -> Self {
        Bindings {
            vals: iter
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("symbol '{0}' is not bound")]
    Unbound(String),
    #[error("domain error: {0}")]
    Domain(String),
}

fn is_integer_f64(v: f64) -> bool {
    v.fract() == 0.0 && v.abs() < 9.0e15
}

/// Direct `f64` evaluation. Errors on unbound symbols and on domain
/// violations (log of a nonpositive value, `0` to a nonpositive power, a
/// negative base under a non-integer exponent).
pub fn evaluate(e: &Expr, b: &Bindings) -> Result<f64, EvalError> {
    match e {
        Expr::Number(r) => Ok(rat_to_f64(r)),
        Expr::Pi => Ok(PI),
        Expr::Var(n) | Expr::Param(n) => {
            b.get(n).ok_or_else(|| EvalError::Unbound(n.clone()))
        }
        Expr::Power(base, exp) => {
            let bv = evaluate(base, b)?;
            let ev = evaluate(exp, b)?;
            if bv > 0.0 {
                Ok(bv.powf(ev))
            } else if bv == 0.0 {
                if ev > 0.0 {
                    Ok(0.0)
                } else {
                    Err(EvalError::Domain(
                        "zero raised to a nonpositive power".to_string(),
                    ))
                }
            } else if is_integer_f64(ev) {
                Ok(bv.powf(ev))
            } else {
                Err(EvalError::Domain(
                    "negative base under a non-integer exponent".to_string(),
                ))
            }
        }
        Expr::Ln(a) => {
            let v = evaluate(a, b)?;
            if v > 0.0 {
                Ok(v.ln())
            } else {
                Err(EvalError::Domain("log of a nonpositive value".to_string()))
            }
        }
        Expr::Atan(a) => Ok(evaluate(a, b)?.atan()),
        // principal arc-cotangent with range (0, pi), continuous at 0
        Expr::Acot(a) => Ok(FRAC_PI_2 - evaluate(a, b)?.atan()),
        Expr::Cos(a) => Ok(evaluate(a, b)?.cos()),
        Expr::Sin(a) => Ok(evaluate(a, b)?.sin()),
        Expr::Product(fs) => {
            let mut acc = 1.0;
            for f in fs {
                acc *= evaluate(f, b)?;
            }
            Ok(acc)
        }
        Expr::Sum(ts) => {
            let mut acc = 0.0;
            for t in ts {
                acc += evaluate(t, b)?;
            }
            Ok(acc)
        }
    }
}

/// A real number as sign and natural log of magnitude. Zero is
/// `{sign: 0, ln_abs: -inf}`. Representable magnitudes reach far beyond
/// `f64` range, which is the point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub sign: i8,
    pub ln_abs: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog {
        sign: 0,
        ln_abs: f64::NEG_INFINITY,
    };

    pub fn from_f64(v: f64) -> SignedLog {
        if v == 0.0 {
            return SignedLog::ZERO;
        }
        SignedLog {
            sign: if v > 0.0 { 1 } else { -1 },
            ln_abs: v.abs().ln(),
        }
    }

    /// Back to `f64`; overflows to `+-inf` and underflows to 0.
    pub fn to_f64(self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            f64::from(self.sign) * self.ln_abs.exp()
        }
    }

    pub fn mul(self, o: SignedLog) -> SignedLog {
        if self.sign == 0 || o.sign == 0 {
            return SignedLog::ZERO;
        }
        SignedLog {
            sign: self.sign * o.sign,
            ln_abs: self.ln_abs + o.ln_abs,
        }
    }
}

/// Signed-sum via a max-shifted log-sum-exp, so magnitudes never leave log
/// space.
fn signed_sum(parts: &[SignedLog]) -> SignedLog {
    let m = parts
        .iter()
        .filter(|p| p.sign != 0)
        .map(|p| p.ln_abs)
        .fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return SignedLog::ZERO;
    }
    let mut acc = 0.0;
    for p in parts {
        if p.sign != 0 {
            acc += f64::from(p.sign) * (p.ln_abs - m).exp();
        }
    }
    if acc == 0.0 {
        return SignedLog::ZERO;
    }
    SignedLog {
        sign: if acc > 0.0 { 1 } else { -1 },
        ln_abs: m + acc.abs().ln(),
    }
}

/// Saturating conversion for feeding bounded functions (atan, cos, sin).
fn saturated(v: SignedLog) -> f64 {
    if v.sign == 0 {
        0.0
    } else if v.ln_abs > 700.0 {
        f64::from(v.sign) * f64::INFINITY
    } else {
        v.to_f64()
    }
}

/// Evaluation in sign/log space. Exponents are evaluated with the plain
/// evaluator (they are small in magnitude by construction); bases, products,
/// and sums stay in log space throughout.
pub fn evaluate_signed(e: &Expr, b: &Bindings) -> Result<SignedLog, EvalError> {
    match e {
        Expr::Number(r) => Ok(SignedLog::from_f64(rat_to_f64(r))),
        Expr::Pi => Ok(SignedLog::from_f64(PI)),
        Expr::Var(n) | Expr::Param(n) => b
            .get(n)
            .map(SignedLog::from_f64)
            .ok_or_else(|| EvalError::Unbound(n.clone())),
        Expr::Power(base, exp) => {
            let bv = evaluate_signed(base, b)?;
            let ev = evaluate(exp, b)?;
            if bv.sign == 0 {
                return if ev > 0.0 {
                    Ok(SignedLog::ZERO)
                } else {
                    Err(EvalError::Domain(
                        "zero raised to a nonpositive power".to_string(),
                    ))
                };
            }
            let sign = if bv.sign > 0 {
                1
            } else if is_integer_f64(ev) {
                if (ev.abs() % 2.0) == 1.0 {
                    -1
                } else {
                    1
                }
            } else {
                return Err(EvalError::Domain(
                    "negative base under a non-integer exponent".to_string(),
                ));
            };
            Ok(SignedLog {
                sign,
                ln_abs: bv.ln_abs * ev,
            })
        }
        // ln(u) for u > 0 is exactly the stored log magnitude
        Expr::Ln(a) => {
            let v = evaluate_signed(a, b)?;
            if v.sign > 0 && v.ln_abs > f64::NEG_INFINITY {
                Ok(SignedLog::from_f64(v.ln_abs))
            } else {
                Err(EvalError::Domain("log of a nonpositive value".to_string()))
            }
        }
        Expr::Atan(a) => Ok(SignedLog::from_f64(
            saturated(evaluate_signed(a, b)?).atan(),
        )),
        Expr::Acot(a) => Ok(SignedLog::from_f64(
            FRAC_PI_2 - saturated(evaluate_signed(a, b)?).atan(),
        )),
        Expr::Cos(a) => Ok(SignedLog::from_f64(
            saturated(evaluate_signed(a, b)?).cos(),
        )),
        Expr::Sin(a) => Ok(SignedLog::from_f64(
            saturated(evaluate_signed(a, b)?).sin(),
        )),
        Expr::Product(fs) => {
            let mut acc = SignedLog::from_f64(1.0);
            for f in fs {
                acc = acc.mul(evaluate_signed(f, b)?);
            }
            Ok(acc)
        }
        Expr::Sum(ts) => {
            let mut parts = Vec::with_capacity(ts.len());
            for t in ts {
                parts.push(evaluate_signed(t, b)?);
            }
            Ok(signed_sum(&parts))
        }
    }
}
