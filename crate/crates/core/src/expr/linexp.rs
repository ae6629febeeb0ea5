//! Linear forms over symbols with rational coefficients.
//!
//! Exponents in this crate are almost always of the shape `c0 + c1*a` with
//! rational `ci`. Representing them as linear forms gives a total
//! (lexicographic) order, which is what lets sums of powers of the
//! integration variable pick a canonical factor to pull out.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::Zero;

use crate::rational::{rat_int, Rational};

use super::Expr;

/// `constant + sum coeff_s * s` over symbol names `s`. The `None` key holds
/// the constant part; `BTreeMap` keeps key order deterministic.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinExp {
    terms: BTreeMap<Option<String>, Rational>,
}

impl LinExp {
    pub fn constant(c: Rational) -> Self {
        let mut l = LinExp::default();
        l.add_const(c);
        l
    }

    pub fn symbol(name: &str, coeff: Rational) -> Self {
        let mut l = LinExp::default();
        l.add_symbol(name, coeff);
        l
    }

    fn add_const(&mut self, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(None).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&None);
        }
    }

    fn add_symbol(&mut self, name: &str, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let key = Some(name.to_string());
        let slot = self.terms.entry(key.clone()).or_insert_with(Rational::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&mut self, other: &LinExp) {
        for (k, v) in &other.terms {
            match k {
                None => self.add_const(v.clone()),
                Some(s) => self.add_symbol(s, v.clone()),
            }
        }
    }

    pub fn sub(&self, other: &LinExp) -> LinExp {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            match k {
                None => out.add_const(-v.clone()),
                Some(s) => out.add_symbol(s, -v.clone()),
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Lexicographic order over the union of keys (constant slot first,
    /// then symbols in name order); purely a tie-breaking order, not a
    /// magnitude comparison.
    pub fn lex_cmp(&self, other: &LinExp) -> Ordering {
        let keys: std::collections::BTreeSet<&Option<String>> =
            self.terms.keys().chain(other.terms.keys()).collect();
        let zero = Rational::zero();
        for k in keys {
            let a = self.terms.get(k).unwrap_or(&zero);
            let b = other.terms.get(k).unwrap_or(&zero);
            match a.cmp(b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }

    /// Rebuilds the linear form as a canonical expression, with `sym` used
    /// to decide whether a name is the integration variable.
    pub fn to_expr(&self, make: impl Fn(&str) -> Expr) -> Expr {
        let mut parts = Vec::new();
        for (k, v) in &self.terms {
            match k {
                None => parts.push(Expr::number(v.clone())),
                Some(s) => parts.push(Expr::product(vec![Expr::number(v.clone()), make(s)])),
            }
        }
        Expr::sum(parts)
    }

    /// Tries to read an exponent expression as a linear form. Returns `None`
    /// for anything beyond rational-linear structure (products of symbols,
    /// functions, pi, ...), in which case callers skip power factoring.
    pub fn from_expr(e: &Expr) -> Option<LinExp> {
        match e {
            Expr::Number(r) => Some(LinExp::constant(r.clone())),
            Expr::Var(n) | Expr::Param(n) => Some(LinExp::symbol(n, rat_int(1))),
            Expr::Sum(terms) => {
                let mut acc = LinExp::default();
                for t in terms {
                    acc.add(&LinExp::from_expr(t)?);
                }
                Some(acc)
            }
            Expr::Product(fs) => {
                let mut coeff = rat_int(1);
                let mut sym: Option<&str> = None;
                for f in fs {
                    match f {
                        Expr::Number(r) => coeff *= r,
                        Expr::Var(n) | Expr::Param(n) => {
                            if sym.is_some() {
                                return None;
                            }
                            sym = Some(n);
                        }
                        _ => return None,
                    }
                }
                match sym {
                    Some(s) => Some(LinExp::symbol(s, coeff)),
                    None => Some(LinExp::constant(coeff)),
                }
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn linear_reading_and_order() {
        let two_a = Expr::product(vec![Expr::int(2), Expr::param("a")]);
        let l = LinExp::from_expr(&two_a).unwrap();
        assert_eq!(l, LinExp::symbol("a", rat(2, 1)));

        let zero = LinExp::default();
        let neg = LinExp::symbol("a", rat(-2, 1));
        assert_eq!(neg.lex_cmp(&zero), Ordering::Less);
        assert_eq!(zero.lex_cmp(&LinExp::symbol("a", rat(2, 1))), Ordering::Less);
        assert_eq!(
            LinExp::constant(rat(-1, 1)).lex_cmp(&LinExp::symbol("a", rat(1, 1))),
            Ordering::Less
        );
    }

    #[test]
    fn nonlinear_exponents_are_rejected() {
        let ab = Expr::product(vec![Expr::param("a"), Expr::param("b")]);
        assert!(LinExp::from_expr(&ab).is_none());
        assert!(LinExp::from_expr(&Expr::pi()).is_none());
    }
}
