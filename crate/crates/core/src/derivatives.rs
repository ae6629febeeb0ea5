//! Integer coefficient rows generated by repeated parameter differentiation.
//!
//! Differentiating `atan(x^a)/(1+x^2)` with respect to `a` under the
//! integral sign, n times, produces integrands of the form
//!
//! ```text
//! ln(x)^n * (C_1 x^a + C_2 x^(3a) + ... + C_n x^((2n-1)a))
//! ---------------------------------------------------------
//!              (1 + x^(2a))^n * (1 + x^2)
//! ```
//!
//! The integer rows `C` follow a two-term recurrence and are palindromic
//! for odd `n`, antipalindromic for even `n` — exactly the symmetry that
//! makes every such integral vanish under the reciprocal fold.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::expr::Expr;
use crate::rational::Rational;

/// Row `n` of the derivative coefficients, `coeffs[m-1] = C_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffRow {
    pub n: u32,
    pub coeffs: Vec<BigInt>,
}

/// Which reversal symmetry a row satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSymmetry {
    /// `C_m = C_{n-m+1}` (odd rows).
    Symmetric,
    /// `C_m = -C_{n-m+1}` (even rows).
    Antisymmetric,
}

/// A coefficient pair that breaks the expected reversal symmetry.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error(
    "row {n} expects {expected:?} reversal symmetry but C_{first} = {left} \
     and C_{second} = {right} break it"
)]
pub struct RowSymmetryViolation {
    pub n: u32,
    pub expected: RowSymmetry,
    /// 1-based positions of the offending pair.
    pub first: usize,
    pub second: usize,
    pub left: BigInt,
    pub right: BigInt,
}

/// Generates row `n >= 1` by the recurrence
/// `D_1 = C_1`, `D_{n+1} = -C_n`,
/// `D_m = (2m-1) C_m - (2n-2m+3) C_{m-1}` for `2 <= m <= n`.
///
/// Each step is cross-checked against the reversed-index form of the same
/// recurrence, `D_{n-m+2} = (2n-2m+3) C_{n-m+2} - (2m-1) C_{n-m+1}`, which
/// must produce identical values; a mismatch would indicate a broken row
/// and panics.
pub fn derivative_coeffs(n: u32) -> CoeffRow {
    assert!(n >= 1, "rows are defined for n >= 1");
    let mut c: Vec<BigInt> = vec![BigInt::one()];
    let mut row: u32 = 1;
    while row < n {
        let k = row as usize;
        let coef = |v: i64| BigInt::from(v);
        let mut d = vec![BigInt::zero(); k + 1];
        d[0] = c[0].clone();
        d[k] = -c[k - 1].clone();
        for m in 2..=k {
            d[m - 1] = coef(2 * m as i64 - 1) * &c[m - 1]
                - coef(2 * row as i64 - 2 * m as i64 + 3) * &c[m - 2];
        }
        for m in 2..=k {
            let alt = coef(2 * row as i64 - 2 * m as i64 + 3) * &c[k + 1 - m]
                - coef(2 * m as i64 - 1) * &c[k - m];
            assert_eq!(
                d[k + 1 - m],
                alt,
                "recurrence self-check failed while building row {}",
                row + 1
            );
        }
        c = d;
        row += 1;
    }
    CoeffRow { n, coeffs: c }
}

/// Checks the reversal symmetry expected from the parity of `n` and reports
/// the first offending pair if it fails.
pub fn row_symmetry_kind(row: &CoeffRow) -> Result<RowSymmetry, RowSymmetryViolation> {
    let n = row.n as usize;
    assert_eq!(row.coeffs.len(), n, "row length must equal its index");
    let expected = if row.n % 2 == 1 {
        RowSymmetry::Symmetric
    } else {
        RowSymmetry::Antisymmetric
    };
    for m in 1..=n {
        let left = &row.coeffs[m - 1];
        let mirror = &row.coeffs[n - m];
        let ok = match expected {
            RowSymmetry::Symmetric => left == mirror,
            RowSymmetry::Antisymmetric => *left == -mirror.clone(),
        };
        if !ok {
            return Err(RowSymmetryViolation {
                n: row.n,
                expected,
                first: m,
                second: n - m + 1,
                left: left.clone(),
                right: mirror.clone(),
            });
        }
    }
    Ok(expected)
}

/// Maximum row for [`build_derivative_integrand`], bounding expression size.
pub const MAX_DERIVATIVE_ORDER: u32 = 64;

/// The full integrand for row `n`, in variable `x` and parameter `a`:
/// `ln(x)^n * sum_k C_k x^((2k-1)a) / ((1 + x^(2a))^n * (1 + x^2))`.
pub fn build_derivative_integrand(n: u32) -> Expr {
    assert!(
        (1..=MAX_DERIVATIVE_ORDER).contains(&n),
        "order must be in 1..={MAX_DERIVATIVE_ORDER}"
    );
    let row = derivative_coeffs(n);
    let numerator = Expr::sum(
        row.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let k = i as i64 + 1;
                Expr::product(vec![
                    Expr::number(Rational::from(c.clone())),
                    Expr::power(
                        Expr::var("x"),
                        Expr::product(vec![Expr::int(2 * k - 1), Expr::param("a")]),
                    ),
                ])
            })
            .collect(),
    );
    let ln_pow = Expr::power(Expr::ln(Expr::var("x")), Expr::int(n as i64));
    let inner = Expr::sum(vec![
        Expr::one(),
        Expr::power(
            Expr::var("x"),
            Expr::product(vec![Expr::int(2), Expr::param("a")]),
        ),
    ]);
    let outer = Expr::sum(vec![Expr::one(), Expr::power(Expr::var("x"), Expr::int(2))]);
    Expr::product(vec![
        ln_pow,
        numerator,
        Expr::power(inner, Expr::int(-(n as i64))),
        Expr::power(outer, Expr::int(-1)),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parser::parse;
    use crate::symmetry::{classify_duality, DualityClass};

    fn ints(row: &CoeffRow) -> Vec<i64> {
        row.coeffs
            .iter()
            .map(|c| i64::try_from(c).expect("fits"))
            .collect()
    }

    #[test]
    fn first_rows_match_hand_computed_values() {
        assert_eq!(ints(&derivative_coeffs(1)), vec![1]);
        assert_eq!(ints(&derivative_coeffs(2)), vec![1, -1]);
        assert_eq!(ints(&derivative_coeffs(3)), vec![1, -6, 1]);
        assert_eq!(ints(&derivative_coeffs(4)), vec![1, -23, 23, -1]);
        assert_eq!(ints(&derivative_coeffs(5)), vec![1, -76, 230, -76, 1]);
        assert_eq!(
            ints(&derivative_coeffs(6)),
            vec![1, -237, 1682, -1682, 237, -1]
        );
        assert_eq!(
            ints(&derivative_coeffs(7)),
            vec![1, -722, 10543, -23548, 10543, -722, 1]
        );
    }

    /// Independent oracle: with `N(y) = sum_k C_k y^(2k-1)`, differentiating
    /// `ln^n(x) * N(x^a)/(1+x^(2a))^n` in `a` gives the next row via the
    /// polynomial identity `M(y) = y*(N'(y)*(1+y^2) - 2n*y*N(y))`. This
    /// exercises only dense polynomial arithmetic, none of the recurrence.
    #[test]
    fn rows_reproduce_symbolic_differentiation() {
        type Poly = Vec<BigInt>; // dense, index = power of y

        fn poly_derivative(p: &Poly) -> Poly {
            p.iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| BigInt::from(i) * c)
                .collect()
        }
        fn poly_mul(p: &Poly, q: &Poly) -> Poly {
            let mut out = vec![BigInt::zero(); p.len() + q.len() - 1];
            for (i, a) in p.iter().enumerate() {
                for (j, b) in q.iter().enumerate() {
                    out[i + j] += a * b;
                }
            }
            out
        }
        fn poly_sub(p: &Poly, q: &Poly) -> Poly {
            let mut out = p.clone();
            out.resize(out.len().max(q.len()), BigInt::zero());
            for (i, b) in q.iter().enumerate() {
                out[i] -= b;
            }
            out
        }

        for n in 1..=5u32 {
            let row = derivative_coeffs(n);
            // N(y) as a dense polynomial with odd-power slots filled
            let mut nn: Poly = vec![BigInt::zero(); 2 * n as usize];
            for (i, c) in row.coeffs.iter().enumerate() {
                nn[2 * i + 1] = c.clone();
            }
            let one_plus_y2: Poly =
                vec![BigInt::one(), BigInt::zero(), BigInt::one()];
            let scale = vec![BigInt::from(2 * n)];
            // y * (N'(y)*(1+y^2) - 2n*y*N(y))
            let lhs = poly_mul(&poly_derivative(&nn), &one_plus_y2);
            let mut rhs = poly_mul(&scale, &nn);
            rhs.insert(0, BigInt::zero()); // multiply by y
            let mut m = poly_sub(&lhs, &rhs);
            m.insert(0, BigInt::zero()); // outer factor y

            let next = derivative_coeffs(n + 1);
            for (pow, c) in m.iter().enumerate() {
                if pow % 2 == 1 {
                    let k = (pow - 1) / 2;
                    let expected = next.coeffs.get(k).cloned().unwrap_or_default();
                    assert_eq!(*c, expected, "row {} power {pow}", n + 1);
                } else {
                    assert!(c.is_zero(), "even power {pow} must vanish");
                }
            }
        }
    }

    #[test]
    fn reversal_symmetry_alternates_with_parity() {
        for n in 1..=12u32 {
            let row = derivative_coeffs(n);
            let kind = row_symmetry_kind(&row).expect("symmetry holds");
            if n % 2 == 1 {
                assert_eq!(kind, RowSymmetry::Symmetric);
            } else {
                assert_eq!(kind, RowSymmetry::Antisymmetric);
            }
            assert_eq!(row.coeffs[0], BigInt::one());
            assert_eq!(
                row.coeffs[n as usize - 1].magnitude(),
                BigInt::one().magnitude()
            );
        }
    }

    #[test]
    fn violations_name_the_offending_pair() {
        let mut row = derivative_coeffs(4);
        row.coeffs[1] += 1; // break C_2 = -C_3
        let err = row_symmetry_kind(&row).unwrap_err();
        assert_eq!((err.first, err.second), (2, 3));
        assert_eq!(err.expected, RowSymmetry::Antisymmetric);
        let msg = err.to_string();
        assert!(msg.contains("C_2"), "message was: {msg}");
    }

    #[test]
    fn integrand_shapes() {
        assert_eq!(
            build_derivative_integrand(1),
            parse("x^a*ln(x)/((1 + x^(2*a))*(1 + x^2))", "x").unwrap()
        );
        assert_eq!(
            build_derivative_integrand(2),
            parse(
                "ln(x)^2*(x^a - x^(3*a))/((1 + x^(2*a))^2*(1 + x^2))",
                "x"
            )
            .unwrap()
        );
        assert_eq!(
            build_derivative_integrand(3),
            parse(
                "ln(x)^3*(x^a - 6*x^(3*a) + x^(5*a))/((1 + x^(2*a))^3*(1 + x^2))",
                "x"
            )
            .unwrap()
        );
    }

    #[test]
    fn integrands_are_anti_dual() {
        for n in 1..=4 {
            let f = build_derivative_integrand(n);
            assert_eq!(
                classify_duality(&f, "x"),
                DualityClass::AntiDual,
                "row {n}"
            );
        }
    }

    #[test]
    #[should_panic(expected = "order must be in 1..=")]
    fn order_is_capped() {
        let _ = build_derivative_integrand(65);
    }
}
