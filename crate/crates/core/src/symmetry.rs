//! The reciprocal fold `x -> 1/x` and the symmetry classes it induces.
//!
//! Splitting an integral over (0, inf) at 1 and substituting `x -> 1/x` on
//! the outer half maps it onto (0, 1) with Jacobian `x^-2`. How the
//! integrand transforms under `f(x) -> f(1/x)/x^2` decides everything:
//! anti-dual integrands (image = -f) integrate to zero, self-dual weights
//! pass through unchanged, and mixed cases leave a parameter-free residue.
//! Palindromic coefficient lists are the polynomial fingerprint of these
//! symmetries: `P(1/x) = x^-deg * reverse(P)(x)`.

use num_traits::Zero;

use crate::expr::Expr;
use crate::expr::eval::{evaluate, Bindings};
use crate::rational::{rat_int, Rational};
use crate::rewrite::{rewrite_full, Assumptions};

/// Dense polynomial coefficients, index = power. Trailing zeros are
/// trimmed; the zero polynomial is the single coefficient `[0]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyCoeffs {
    coeffs: Vec<Rational>,
}

impl PolyCoeffs {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Rational::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Rational::zero());
        }
        PolyCoeffs { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| rat_int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    pub fn reversed(&self) -> PolyCoeffs {
        let mut c = self.coeffs.clone();
        c.reverse();
        PolyCoeffs::new(c)
    }

    pub fn negated(&self) -> PolyCoeffs {
        PolyCoeffs::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }

    /// True iff `p_k = p_{deg-k}` for all k.
    pub fn is_palindromic(&self) -> bool {
        *self == self.reversed()
    }

    /// True iff `p_k = -p_{deg-k}` for all k.
    pub fn is_antipalindromic(&self) -> bool {
        *self == self.reversed().negated()
    }

    /// The polynomial as a canonical expression in `var`.
    pub fn to_expr(&self, var: &str) -> Expr {
        Expr::sum(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    Expr::product(vec![
                        Expr::number(c.clone()),
                        Expr::power(Expr::var(var), Expr::int(k as i64)),
                    ])
                })
                .collect(),
        )
    }
}

/// How an integrand transforms under the reciprocal fold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DualityClass {
    /// `f(1/x)/x^2 = f(x)`: the fold doubles the integrand.
    SelfDual,
    /// `f(1/x)/x^2 = -f(x)`: the integral over (0, inf) is zero.
    AntiDual,
    /// The fold residue is `constant * weight` with a variable-free constant
    /// and a self-dual weight, e.g. `(pi/2) * 1/(1+x^2)`.
    ConstantResidue { constant: Expr, weight: Expr },
    Neither,
}

/// The raw fold image `f(1/x) * x^-2`, canonicalized but with no identity
/// rewriting (logs of reciprocal powers are left intact for the trace).
pub(crate) fn fold_image_raw(f: &Expr, var: &str) -> Expr {
    let inv = Expr::power(Expr::var(var), Expr::int(-1));
    Expr::product(vec![
        f.substitute(var, &inv),
        Expr::power(Expr::var(var), Expr::int(-2)),
    ])
}

/// The fold image `f(1/x) * x^-2`, simplified with the identity table, so
/// that e.g. `ln(x)*w(x)` maps to `-ln(x)*w(x)` for a self-dual `w`.
pub fn fold_image(f: &Expr, var: &str) -> Expr {
    rewrite_full(&fold_image_raw(f, var), &Assumptions::new())
}

/// The combined one-interval integrand `f(x) + f(1/x)/x^2`, simplified:
/// its integral over (0, 1) equals the integral of `f` over (0, inf).
pub fn fold_residue(f: &Expr, var: &str) -> Expr {
    let raw = Expr::sum(vec![f.clone(), fold_image_raw(f, var)]);
    rewrite_full(&raw, &Assumptions::new())
}

/// A valid constant-residue weight: a product of negative integer powers of
/// polynomial sums involving the variable (the `1/(1+bx+x^2)` shapes).
fn is_weight_shape(e: &Expr) -> bool {
    let factors: &[Expr] = match e {
        Expr::Product(fs) => fs,
        other => std::slice::from_ref(other),
    };
    !factors.is_empty()
        && factors.iter().all(|f| match f {
            Expr::Power(b, ex) => {
                matches!(b.as_ref(), Expr::Sum(_))
                    && b.contains_var()
                    && matches!(ex.as_ref(), Expr::Number(k) if k.is_integer() && *k < Rational::zero())
            }
            _ => false,
        })
}

fn probe_bindings(f: &Expr, var: &str, x: f64) -> Bindings {
    let mut b = Bindings::new().with(var, x);
    for (i, p) in f.param_names().iter().enumerate() {
        b.set(p, 0.9 + 0.4 * i as f64);
    }
    b
}

/// Classifies `f` under the fold. A numeric pre-filter (20 log-spaced probe
/// points) rejects hopeless branches fast; the verdict itself always rests
/// on an exact rewrite.
pub fn classify_duality(f: &Expr, var: &str) -> DualityClass {
    let assumptions = Assumptions::new();
    let image_raw = fold_image_raw(f, var);
    let residue_raw = Expr::sum(vec![f.clone(), image_raw.clone()]);

    // numeric pre-filter
    let mut probes = Vec::new();
    for i in 0..20 {
        let x = (-3.0 + 6.0 * (i as f64) / 19.0).exp();
        let b = probe_bindings(f, var, x);
        if let (Ok(vf), Ok(vi)) = (evaluate(f, &b), evaluate(&image_raw, &b)) {
            if vf.is_finite() && vi.is_finite() {
                probes.push((vf, vi));
            }
        }
    }
    let enough = probes.len() >= 8;
    let near = |u: f64, v: f64| (u - v).abs() <= 1e-9 * (1.0 + u.abs().max(v.abs()));
    let residue_zeroish = !enough || probes.iter().all(|&(vf, vi)| near(vf + vi, 0.0));
    let self_dualish = !enough || probes.iter().all(|&(vf, vi)| near(vf, vi));

    if residue_zeroish && rewrite_full(&residue_raw, &assumptions).is_zero() {
        return DualityClass::AntiDual;
    }
    if self_dualish && rewrite_full(&image_raw, &assumptions) == rewrite_full(f, &assumptions) {
        return DualityClass::SelfDual;
    }

    let residue = rewrite_full(&residue_raw, &assumptions);
    if !residue.is_zero() {
        let factors: Vec<Expr> = match &residue {
            Expr::Product(fs) => fs.clone(),
            other => vec![other.clone()],
        };
        let (constant, weight): (Vec<Expr>, Vec<Expr>) = factors
            .into_iter()
            .partition(|f| !f.contains_var() && f.param_names().is_empty());
        if !constant.is_empty() && !weight.is_empty() {
            let weight = Expr::product(weight);
            if is_weight_shape(&weight) && fold_image(&weight, var) == weight {
                return DualityClass::ConstantResidue {
                    constant: Expr::product(constant),
                    weight,
                };
            }
        }
    }
    DualityClass::Neither
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parser::parse;
    use crate::rational::rat;

    fn p(s: &str) -> Expr {
        parse(s, "x").unwrap()
    }

    #[test]
    fn palindromy_tests() {
        assert!(PolyCoeffs::from_ints(&[1, 4, 1]).is_palindromic());
        assert!(PolyCoeffs::from_ints(&[2, 5, 5, 2]).is_palindromic());
        assert!(!PolyCoeffs::from_ints(&[1, -1]).is_palindromic());
        assert!(PolyCoeffs::from_ints(&[1, -1]).is_antipalindromic());
        assert!(PolyCoeffs::from_ints(&[1, 3, -3, -1]).is_antipalindromic());
        assert!(!PolyCoeffs::from_ints(&[1, 4, 1]).is_antipalindromic());
        // rational coefficients
        let q = PolyCoeffs::new(vec![rat(1, 2), rat(7, 3), rat(1, 2)]);
        assert!(q.is_palindromic());
    }

    #[test]
    fn reversal_law() {
        let samples = [
            PolyCoeffs::from_ints(&[1, 4, 1]),
            PolyCoeffs::from_ints(&[1, -1]),
            PolyCoeffs::from_ints(&[3, 0, 0, 7]),
            PolyCoeffs::from_ints(&[0]),
        ];
        for s in &samples {
            assert_eq!(s.is_palindromic(), *s == s.reversed());
            assert_eq!(s.is_antipalindromic(), *s == s.reversed().negated());
        }
    }

    #[test]
    fn trailing_zeros_trim() {
        let a = PolyCoeffs::from_ints(&[1, 2, 0, 0]);
        assert_eq!(a.degree(), 1);
        assert_eq!(a, PolyCoeffs::from_ints(&[1, 2]));
        assert!(PolyCoeffs::from_ints(&[0, 0]).is_zero());
    }

    #[test]
    fn fold_image_examples() {
        // arctan integrand maps to the reciprocal power, weight unchanged
        let f = p("atan(x^a)/(1 + x^2)");
        let expected = p("atan(x^(-a))/(1 + x^2)");
        assert_eq!(fold_image(&f, "x"), expected);

        // self-dual weight
        let w = p("1/(1 + x^2)");
        assert_eq!(fold_image(&w, "x"), w);
        let wb = p("1/(1 + b*x + x^2)");
        assert_eq!(fold_image(&wb, "x"), wb);
        let w2 = p("1/(1 + x)^2");
        assert_eq!(fold_image(&w2, "x"), w2);

        // odd log flips sign
        let g = p("ln(x)/(1 + b*x + x^2)");
        let neg = p("-ln(x)/(1 + b*x + x^2)");
        assert_eq!(fold_image(&g, "x"), neg);
    }

    #[test]
    fn fold_residue_examples() {
        assert_eq!(fold_residue(&p("ln(x)^3/(1 + x^2)"), "x"), Expr::zero());
        assert_eq!(
            fold_residue(&p("1/(1 + x^2)"), "x"),
            p("2/(1 + x^2)")
        );
        assert_eq!(
            fold_residue(&p("atan(x^a)/(1 + x^2)"), "x"),
            p("pi/(2*(1 + x^2))")
        );
    }

    #[test]
    fn fold_is_an_involution_numerically() {
        let cases = [
            "atan(x^a)/(1 + x^2)",
            "ln(x)/(1 + b*x + x^2)",
            "(1 - x)/(1 + x + x^2)",
        ];
        for s in cases {
            let f = p(s);
            let ff = fold_image(&fold_image(&f, "x"), "x");
            for &x in &[0.3, 0.8, 1.7, 4.2] {
                let b = Bindings::new().with("x", x).with("a", 1.4).with("b", 0.6);
                let v1 = evaluate(&f, &b).unwrap();
                let v2 = evaluate(&ff, &b).unwrap();
                assert!(
                    (v1 - v2).abs() <= 1e-12 * (1.0 + v1.abs()),
                    "{s}: {v1} vs {v2}"
                );
            }
        }
    }

    #[test]
    fn palindromic_ratio_law() {
        // palindromic / palindromic is fold-invariant; antipalindromic over
        // palindromic flips sign
        let pp = PolyCoeffs::from_ints(&[1, 4, 1]).to_expr("x");
        let qq = PolyCoeffs::from_ints(&[2, 7, 2]).to_expr("x");
        let ratio = Expr::div(pp, qq);
        let image = ratio.substitute("x", &p("x^(-1)"));
        for &x in &[0.2, 0.9, 3.1] {
            let b = Bindings::new().with("x", x);
            let v = evaluate(&ratio, &b).unwrap();
            let vi = evaluate(&image, &b).unwrap();
            assert!((v - vi).abs() <= 1e-12 * (1.0 + v.abs()));
        }

        let anti = PolyCoeffs::from_ints(&[1, 3, -3, -1]).to_expr("x");
        let pal = PolyCoeffs::from_ints(&[2, 1, 1, 2]).to_expr("x");
        let ratio2 = Expr::div(anti, pal);
        let image2 = ratio2.substitute("x", &p("x^(-1)"));
        for &x in &[0.2, 0.9, 3.1] {
            let b = Bindings::new().with("x", x);
            let v = evaluate(&ratio2, &b).unwrap();
            let vi = evaluate(&image2, &b).unwrap();
            assert!((v + vi).abs() <= 1e-12 * (1.0 + v.abs()));
        }
    }

    #[test]
    fn classification() {
        // first-derivative integrand: anti-dual
        let d1 = p("x^a*ln(x)/((1 + x^(2*a))*(1 + x^2))");
        assert_eq!(classify_duality(&d1, "x"), DualityClass::AntiDual);

        // arctan integrand: constant residue (pi/2) * weight
        let f = p("atan(x^a)/(1 + x^2)");
        match classify_duality(&f, "x") {
            DualityClass::ConstantResidue { constant, weight } => {
                assert_eq!(constant, p("pi/2"));
                assert_eq!(weight, p("1/(1 + x^2)"));
            }
            other => panic!("expected constant residue, got {other:?}"),
        }

        // even log power with an odd ratio: anti-dual
        let g = p("ln(x)^2*(1 - x)/((1 + x)*(1 + x^2))");
        assert_eq!(classify_duality(&g, "x"), DualityClass::AntiDual);

        // bare weight: self-dual, even with a parameter present
        let w = p("1/(1 + a*x + x^2)");
        assert_eq!(classify_duality(&w, "x"), DualityClass::SelfDual);

        // no special structure
        let n = p("x/(1 + x^3)");
        assert_eq!(classify_duality(&n, "x"), DualityClass::Neither);
    }
}
