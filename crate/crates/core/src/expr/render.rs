//! Plain-text rendering, the inverse of the parser on canonical forms:
//! `parse(render(e), var) == e` for every canonical `e`.
//!
//! Products are printed as a quotient — negative-exponent factors and the
//! coefficient's denominator move below the bar — so `Product(1/2, pi,
//! (1+x^2)^-1)` prints as `pi/(2*(1 + x^2))`.

use std::fmt;

use num_traits::{One, Signed};

use crate::rational::Rational;

use super::{factor_slice, split_coeff, Expr};

/// Binding strength used to decide parenthesization: 0 sums, 1 products and
/// signed or fractional numerals, 2 powers, 3 atoms.
fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Sum(_) => 0,
        Expr::Product(_) => 1,
        Expr::Number(r) => {
            if r.is_negative() || !r.is_integer() {
                1
            } else {
                3
            }
        }
        Expr::Power(_, _) => 2,
        _ => 3,
    }
}

fn render_at(e: &Expr, min_prec: u8) -> String {
    let s = raw(e);
    if prec(e) < min_prec {
        format!("({s})")
    } else {
        s
    }
}

fn rational_string(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn exponent_string(e: &Expr) -> String {
    // Bare only when unambiguous after `^`: a nonnegative integer or a
    // single symbol. `x^3/2` would re-parse as (x^3)/2, hence the parens.
    match e {
        Expr::Number(r) if r.is_integer() && !r.is_negative() => rational_string(r),
        Expr::Pi | Expr::Var(_) | Expr::Param(_) => raw(e),
        _ => format!("({})", raw(e)),
    }
}

fn product_string(factors: &[Expr]) -> String {
    let mut negative = false;
    let mut num: Vec<String> = Vec::new();
    let mut den: Vec<String> = Vec::new();
    for f in factors {
        match f {
            Expr::Number(r) => {
                if r.is_negative() {
                    negative = !negative;
                }
                let a = r.abs();
                if !a.numer().is_one() {
                    num.push(a.numer().to_string());
                }
                if !a.denom().is_one() {
                    den.push(a.denom().to_string());
                }
            }
            Expr::Power(b, e) => {
                let (c, rest) = split_coeff((**e).clone());
                if c.is_negative() {
                    let flipped = Expr::power((**b).clone(), super::materialize_term(-c, rest));
                    den.push(render_at(&flipped, 2));
                } else {
                    num.push(render_at(f, 2));
                }
            }
            other => num.push(render_at(other, 2)),
        }
    }
    let num_str = if num.is_empty() {
        "1".to_string()
    } else {
        num.join("*")
    };
    let body = if den.is_empty() {
        num_str
    } else if den.len() == 1 {
        format!("{num_str}/{}", den[0])
    } else {
        format!("{num_str}/({})", den.join("*"))
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

fn sum_string(terms: &[Expr]) -> String {
    let mut out = String::new();
    for (i, t) in terms.iter().enumerate() {
        let s = render_at(t, 1);
        if i == 0 {
            out.push_str(&s);
        } else if let Some(tail) = s.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(tail);
        } else {
            out.push_str(" + ");
            out.push_str(&s);
        }
    }
    out
}

fn raw(e: &Expr) -> String {
    match e {
        Expr::Number(r) => rational_string(r),
        Expr::Pi => "pi".to_string(),
        Expr::Var(n) | Expr::Param(n) => n.clone(),
        Expr::Ln(a) => format!("ln({})", raw(a)),
        Expr::Atan(a) => format!("atan({})", raw(a)),
        Expr::Acot(a) => format!("acot({})", raw(a)),
        Expr::Cos(a) => format!("cos({})", raw(a)),
        Expr::Sin(a) => format!("sin({})", raw(a)),
        Expr::Power(b, e) => format!("{}^{}", render_at(b, 3), exponent_string(e)),
        Expr::Product(_) => product_string(factor_slice(e)),
        Expr::Sum(ts) => sum_string(ts),
    }
}

/// Renders a canonical expression to the parser's syntax.
pub fn render(e: &Expr) -> String {
    raw(e)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&raw(self))
    }
}
