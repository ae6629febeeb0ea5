//! Immutable symbolic expressions with canonicalizing constructors.
//!
//! Every `Expr` in the crate is built through the smart constructors below,
//! which keep a canonical form: sums and products are flattened and sorted,
//! numeric subterms are folded exactly, like bases in a product merge into a
//! single power, and a sum of powers of the integration variable pulls the
//! lexicographically smallest power out front. Canonically equal expressions
//! therefore compare equal with `==`.
//!
//! All power algebra (`(x^r)^e = x^(r*e)`, factoring `x^m` out of a sum)
//! assumes the integration variable ranges over positive reals, which is the
//! domain every supported integral lives on.

pub mod eval;
pub mod linexp;
pub mod parser;
pub mod render;

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::rational::{rat_gcd, rat_int, rat_pow, small_integer, Rational};

use linexp::LinExp;

/// Expression node. Variant order defines the canonical node ordering used
/// to sort children, so it is part of the public contract.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Expr {
    /// Exact rational constant.
    Number(Rational),
    /// The circle constant, kept symbolic.
    Pi,
    /// The designated integration variable.
    Var(String),
    /// A free parameter of the integral.
    Param(String),
    Power(Box<Expr>, Box<Expr>),
    Ln(Box<Expr>),
    Atan(Box<Expr>),
    Acot(Box<Expr>),
    Cos(Box<Expr>),
    Sin(Box<Expr>),
    /// Flattened n-ary product; a leading `Number` holds the coefficient.
    Product(Vec<Expr>),
    /// Flattened n-ary sum; terms are ordered by their non-numeric part.
    Sum(Vec<Expr>),
}

impl Expr {
    pub fn number(r: Rational) -> Expr {
        Expr::Number(r)
    }

    pub fn int(n: i64) -> Expr {
        Expr::Number(rat_int(n))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn pi() -> Expr {
        Expr::Pi
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn param(name: &str) -> Expr {
        Expr::Param(name.to_string())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Number(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Number(r) if r.is_one())
    }

    pub fn ln(arg: Expr) -> Expr {
        if arg.is_one() {
            return Expr::zero();
        }
        Expr::Ln(Box::new(arg))
    }

    pub fn atan(arg: Expr) -> Expr {
        if arg.is_zero() {
            return Expr::zero();
        }
        if arg.is_one() {
            // atan(1) = pi/4
            return Expr::product(vec![Expr::number(crate::rational::rat(1, 4)), Expr::Pi]);
        }
        Expr::Atan(Box::new(arg))
    }

    pub fn acot(arg: Expr) -> Expr {
        Expr::Acot(Box::new(arg))
    }

    pub fn cos(arg: Expr) -> Expr {
        if arg.is_zero() {
            return Expr::one();
        }
        if arg == Expr::Pi {
            return Expr::int(-1);
        }
        Expr::Cos(Box::new(arg))
    }

    pub fn sin(arg: Expr) -> Expr {
        if arg.is_zero() || arg == Expr::Pi {
            return Expr::zero();
        }
        Expr::Sin(Box::new(arg))
    }

    pub fn neg(self) -> Expr {
        Expr::product(vec![Expr::int(-1), self])
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::sum(vec![a, b.neg()])
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::product(vec![a, Expr::power(b, Expr::int(-1))])
    }

    pub fn recip(self) -> Expr {
        Expr::power(self, Expr::int(-1))
    }

    /// Canonical power. `e^0` folds to 1 (including the symbolic `x^0`),
    /// nested powers collapse when sound on the positive domain, and integer
    /// powers distribute over products.
    pub fn power(base: Expr, exp: Expr) -> Expr {
        if exp.is_one() {
            return base;
        }
        if exp.is_zero() || base.is_one() {
            return Expr::one();
        }
        if let (Expr::Number(b), Expr::Number(e)) = (&base, &exp) {
            if b.is_zero() {
                if e.is_positive() {
                    return Expr::zero();
                }
            } else if let Some(k) = small_integer(e, 128) {
                if let Some(r) = rat_pow(b, k) {
                    return Expr::Number(r);
                }
            }
        }
        let exp_is_integer = matches!(&exp, Expr::Number(e) if e.is_integer());
        match base {
            // (b^r)^e = b^(r*e): exact for integer e; for rational inner r it
            // relies on b > 0, which holds for the variable domain here.
            Expr::Power(b2, e2) => {
                let inner_numeric = matches!(e2.as_ref(), Expr::Number(_));
                if inner_numeric || exp_is_integer {
                    return Expr::power(*b2, Expr::product(vec![*e2, exp]));
                }
                Expr::Power(Box::new(Expr::Power(b2, e2)), Box::new(exp))
            }
            Expr::Product(fs) if exp_is_integer => {
                Expr::product(fs.into_iter().map(|f| Expr::power(f, exp.clone())).collect())
            }
            b => Expr::Power(Box::new(b), Box::new(exp)),
        }
    }

    /// Canonical product: flattens, folds the rational coefficient, and
    /// merges equal bases by adding exponents.
    pub fn product(factors: Vec<Expr>) -> Expr {
        let mut pieces = factors;
        // Distribution of integer powers over products can expose new
        // products; a couple of passes reaches a fixpoint.
        for _ in 0..8 {
            let mut coeff = Rational::one();
            let mut bases: BTreeMap<Expr, Vec<Expr>> = BTreeMap::new();
            let mut stack: Vec<Expr> = pieces;
            stack.reverse();
            while let Some(p) = stack.pop() {
                match p {
                    Expr::Product(fs) => {
                        for f in fs.into_iter().rev() {
                            stack.push(f);
                        }
                    }
                    Expr::Number(r) => {
                        if r.is_zero() {
                            return Expr::zero();
                        }
                        coeff *= r;
                    }
                    Expr::Power(b, e) => bases.entry(*b).or_default().push(*e),
                    other => bases.entry(other).or_default().push(Expr::one()),
                }
            }
            let mut rebuilt: Vec<Expr> = Vec::with_capacity(bases.len());
            let mut dirty = false;
            for (base, exps) in bases {
                let total = Expr::sum(exps);
                match Expr::power(base, total) {
                    Expr::Number(r) => {
                        if r.is_zero() {
                            return Expr::zero();
                        }
                        coeff *= r;
                    }
                    f @ Expr::Product(_) => {
                        rebuilt.push(f);
                        dirty = true;
                    }
                    f => rebuilt.push(f),
                }
            }
            if dirty {
                rebuilt.push(Expr::Number(coeff));
                pieces = rebuilt;
                continue;
            }
            if rebuilt.is_empty() {
                return Expr::Number(coeff);
            }
            if rebuilt.len() == 1 && coeff.is_one() {
                return rebuilt.pop().unwrap();
            }
            rebuilt.sort();
            if !coeff.is_one() {
                rebuilt.insert(0, Expr::Number(coeff));
            }
            return Expr::Product(rebuilt);
        }
        unreachable!("product canonicalization did not stabilize");
    }

    /// Canonical sum: flattens, collects like terms by their non-numeric
    /// part, factors out the smallest power of the integration variable, and
    /// normalizes integer content and leading sign.
    pub fn sum(terms: Vec<Expr>) -> Expr {
        let mut collected: BTreeMap<Expr, Rational> = BTreeMap::new();
        let mut stack: Vec<Expr> = terms;
        stack.reverse();
        while let Some(t) = stack.pop() {
            match t {
                Expr::Sum(ts) => {
                    for t in ts.into_iter().rev() {
                        stack.push(t);
                    }
                }
                other => {
                    let (c, rest) = split_coeff(other);
                    if c.is_zero() {
                        continue;
                    }
                    // A numeric multiple of a sum (as produced by sign or
                    // content extraction) flattens term by term, so that
                    // cancellation against sibling terms stays visible.
                    if let Expr::Sum(ts) = rest {
                        for t in ts.into_iter().rev() {
                            stack.push(Expr::product(vec![Expr::number(c.clone()), t]));
                        }
                        continue;
                    }
                    let slot = collected.entry(rest).or_insert_with(Rational::zero);
                    *slot += c;
                }
            }
        }
        collected.retain(|_, c| !c.is_zero());
        if collected.is_empty() {
            return Expr::zero();
        }
        if collected.len() == 1 {
            let (rest, c) = collected.into_iter().next().unwrap();
            return materialize_term(c, rest);
        }

        // Pull x^mu out front, mu the lexicographic minimum of the explicit
        // variable exponents. This is what turns 1 + b/x + 1/x^2 into
        // x^-2 * (x^2 + b*x + 1) and makes reversed polynomials line up.
        if let Some((name, mu)) = common_var_shift(&collected) {
            let neg_mu = LinExp::default().sub(&mu);
            let make = |s: &str| {
                if s == name {
                    Expr::var(s)
                } else {
                    Expr::param(s)
                }
            };
            let shift = Expr::power(Expr::var(&name), neg_mu.to_expr(make));
            let inner = Expr::sum(
                collected
                    .into_iter()
                    .map(|(rest, c)| {
                        materialize_term(c, Expr::product(vec![rest, shift.clone()]))
                    })
                    .collect(),
            );
            let make2 = |s: &str| {
                if s == name {
                    Expr::var(s)
                } else {
                    Expr::param(s)
                }
            };
            return Expr::product(vec![Expr::power(Expr::var(&name), mu.to_expr(make2)), inner]);
        }

        // Integer content and leading sign. Content stays integer-only so
        // rational coefficients inside a sum are left alone, keeping the
        // normal form stable under redistribution.
        let first = collected.values().next().unwrap().clone();
        let mut g = Rational::zero();
        for c in collected.values() {
            g = rat_gcd(&g, c);
        }
        let mut factor = if g.is_integer() && g > Rational::one() {
            g
        } else {
            Rational::one()
        };
        if first.is_negative() {
            factor = -factor;
        }
        if !factor.is_one() {
            let inv = factor.recip();
            let terms: Vec<Expr> = collected
                .into_iter()
                .map(|(rest, c)| materialize_term(c * inv.clone(), rest))
                .collect();
            return Expr::product(vec![Expr::Number(factor), Expr::Sum(terms)]);
        }
        let terms: Vec<Expr> = collected
            .into_iter()
            .map(|(rest, c)| materialize_term(c, rest))
            .collect();
        Expr::Sum(terms)
    }

    /// Rebuilds this node with `f` applied to each child, re-running the
    /// canonical constructors. Atoms are cloned.
    pub fn map_children(&self, mut f: impl FnMut(&Expr) -> Expr) -> Expr {
        match self {
            Expr::Number(_) | Expr::Pi | Expr::Var(_) | Expr::Param(_) => self.clone(),
            Expr::Power(b, e) => Expr::power(f(b), f(e)),
            Expr::Ln(a) => Expr::ln(f(a)),
            Expr::Atan(a) => Expr::atan(f(a)),
            Expr::Acot(a) => Expr::acot(f(a)),
            Expr::Cos(a) => Expr::cos(f(a)),
            Expr::Sin(a) => Expr::sin(f(a)),
            Expr::Product(fs) => Expr::product(fs.iter().map(f).collect()),
            Expr::Sum(ts) => Expr::sum(ts.iter().map(f).collect()),
        }
    }

    /// Replaces every symbol (variable or parameter) named `name` by
    /// `replacement`, re-canonicalizing bottom-up. Substitution is
    /// capture-free because the tree has no binders.
    pub fn substitute(&self, name: &str, replacement: &Expr) -> Expr {
        match self {
            Expr::Var(n) | Expr::Param(n) if n == name => replacement.clone(),
            _ => self.map_children(|c| c.substitute(name, replacement)),
        }
    }

    /// Re-canonicalizes an arbitrarily built tree. Idempotent, and the
    /// identity on anything produced by the constructors in this module.
    pub fn simplify_basic(&self) -> Expr {
        self.map_children(|c| c.simplify_basic())
    }

    /// Names of integration variables appearing in the tree. A well-formed
    /// integrand has at most one.
    pub fn var_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |e| {
            if let Expr::Var(n) = e {
                out.insert(n.clone());
            }
        });
        out
    }

    /// Names of free parameters appearing in the tree.
    pub fn param_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |e| {
            if let Expr::Param(n) = e {
                out.insert(n.clone());
            }
        });
        out
    }

    pub fn contains_var(&self) -> bool {
        !self.var_names().is_empty()
    }

    fn walk(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Number(_) | Expr::Pi | Expr::Var(_) | Expr::Param(_) => {}
            Expr::Power(b, e) => {
                b.walk(f);
                e.walk(f);
            }
            Expr::Ln(a) | Expr::Atan(a) | Expr::Acot(a) | Expr::Cos(a) | Expr::Sin(a) => a.walk(f),
            Expr::Product(cs) | Expr::Sum(cs) => {
                for c in cs {
                    c.walk(f);
                }
            }
        }
    }

    /// Total node count; handy for size assertions in tests.
    pub fn node_count(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }
}

/// Splits a canonical term into its rational coefficient and the remaining
/// factor product (`1` when the term is purely numeric).
pub(crate) fn split_coeff(term: Expr) -> (Rational, Expr) {
    match term {
        Expr::Number(r) => (r, Expr::one()),
        Expr::Product(fs) => {
            if let Some(Expr::Number(_)) = fs.first() {
                let mut it = fs.into_iter();
                let c = match it.next() {
                    Some(Expr::Number(r)) => r,
                    _ => unreachable!(),
                };
                let rest: Vec<Expr> = it.collect();
                if rest.len() == 1 {
                    (c, rest.into_iter().next().unwrap())
                } else {
                    (c, Expr::Product(rest))
                }
            } else {
                (Rational::one(), Expr::Product(fs))
            }
        }
        other => (Rational::one(), other),
    }
}

/// Inverse of `split_coeff` for canonical parts.
pub(crate) fn materialize_term(c: Rational, rest: Expr) -> Expr {
    if c.is_zero() {
        return Expr::zero();
    }
    if rest.is_one() {
        return Expr::Number(c);
    }
    if c.is_one() {
        return rest;
    }
    match rest {
        Expr::Product(mut fs) => {
            // Merge with an existing numeric factor: a product must never
            // carry two leading numbers, or coefficient collection keys it
            // apart from its canonical twin.
            if let Some(Expr::Number(r)) = fs.first() {
                let merged = c * r.clone();
                fs.remove(0);
                let tail = if fs.len() == 1 {
                    fs.pop().unwrap()
                } else {
                    Expr::Product(fs)
                };
                return materialize_term(merged, tail);
            }
            fs.insert(0, Expr::Number(c));
            Expr::Product(fs)
        }
        other => Expr::Product(vec![Expr::Number(c), other]),
    }
}

/// View of an expression as a list of factors.
pub(crate) fn factor_slice(e: &Expr) -> &[Expr] {
    match e {
        Expr::Product(fs) => fs.as_slice(),
        other => std::slice::from_ref(other),
    }
}

/// Explicit power of the integration variable carried by a term: `x` counts
/// as exponent 1, `x^e` as `e` when `e` is rational-linear. Powers of the
/// variable hidden inside functions or nested sums contribute nothing.
fn term_var_exponent(rest: &Expr) -> Option<(Option<String>, LinExp)> {
    let mut name: Option<String> = None;
    let mut exp = LinExp::default();
    for f in factor_slice(rest) {
        match f {
            Expr::Var(n) => {
                if name.as_deref().is_some_and(|m| m != n) {
                    return None;
                }
                name = Some(n.clone());
                exp.add(&LinExp::constant(rat_int(1)));
            }
            Expr::Power(b, e) => {
                if let Expr::Var(n) = b.as_ref() {
                    if name.as_deref().is_some_and(|m| m != n) {
                        return None;
                    }
                    name = Some(n.clone());
                    exp.add(&LinExp::from_expr(e)?);
                }
            }
            _ => {}
        }
    }
    Some((name, exp))
}

/// Decides whether a collected sum should have a common variable power
/// factored out, returning the variable name and the lex-minimal exponent.
fn common_var_shift(collected: &BTreeMap<Expr, Rational>) -> Option<(String, LinExp)> {
    let mut name: Option<String> = None;
    let mut exps = Vec::with_capacity(collected.len());
    for rest in collected.keys() {
        let (n, e) = term_var_exponent(rest)?;
        if let Some(n) = n {
            match &name {
                Some(m) if *m != n => return None,
                _ => name = Some(n),
            }
        }
        exps.push(e);
    }
    let name = name?;
    let mu = exps
        .into_iter()
        .min_by(|a, b| a.lex_cmp(b))
        .expect("nonempty sum");
    if mu.is_zero() {
        return None;
    }
    Some((name, mu))
}
