//! Generators for every supported integral family, plus a verify-all
//! runner and seeded random instances for property testing.
//!
//! Families whose names carry a `gr-…` tag correspond to entries of the
//! Gradshteyn–Ryzhik integral table (4.538.1, 4.127.7, 4.297.2); the
//! rest are parameterized generalizations built from the same fold
//! symmetry. One family, `even-log-as-printed`, is deliberately kept
//! with expectation `NotInvariant`: its stated symmetry condition
//! (numerator and denominator both antipalindromic) makes the ratio
//! even under `x -> 1/x`, so the even log power does not cancel — the
//! corrected variant (`even-log-corrected`) is the one that vanishes.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::detector::detect;
use crate::expr::eval::{evaluate, Bindings};
use crate::expr::Expr;
use crate::prover::{verify_certificate, Conclusion, Constraint, IntegralSpec};
use crate::quadrature::ProbeVerdict;
use crate::rational::{rat, rat_int, Rational};
use crate::symmetry::PolyCoeffs;

/// Which inverse trig function a fixed-power entry uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrigFunc {
    Atan,
    Acot,
}

/// Identifies one integral family together with its structural data
/// (integer orders and coefficient lists). Real-valued knobs (the
/// exponent `a`, the weight shift `b`, the periodic family's `z, a, r`)
/// stay free parameters of the generated spec, so the detector can vary
/// them.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilyId {
    /// `atan(x^k)/(1+x^2)` or `acot(x^k)/(1+x^2)` for k in {2, 3};
    /// table entry 4.538.1. All four variants equal `pi^2/8`.
    Gr45381 { func: TrigFunc, power: u32 },
    /// `atan(x^a)/(1+x^2)` with `a` a free real parameter; equals
    /// `pi^2/8` for every `a`.
    ArctanPower { lo: f64, hi: f64 },
    /// Row `n` of the repeated parameter derivative of the arctan
    /// family; always integrates to 0.
    DerivativeRow { n: u32 },
    /// `ln[(z^2+(a+r cos t)^2)/(z^2+(a-r cos t)^2)]` over one full
    /// period; equals 0 whenever it is defined.
    PeriodicLogRatio,
    /// `ln(x)^(2n+1)/(1+bx+x^2)` for `b > -2`; table entry 4.127.7
    /// generalized to odd log powers; equals 0.
    Gr41277 { n: u32 },
    /// `ln(x)^(2n+1) P(x) / ((1+bx+x^2) Q(x))` with `P`, `Q` palindromic
    /// of equal even degree and `Q` positive; equals 0.
    OddLogPalindromic { n: u32, p: PolyCoeffs, q: PolyCoeffs },
    /// `ln(x)^(2n) P(x) / ((1+bx+x^2) Q(x))` with BOTH `P` and `Q`
    /// antipalindromic of equal odd degree, as the symmetry condition
    /// was originally stated. The ratio is then even under `x -> 1/x`
    /// and the integral is parameter-dependent: expected `NotInvariant`.
    EvenLogAsPrinted { n: u32, p: PolyCoeffs, q: PolyCoeffs },
    /// The corrected even-log condition: `P` antipalindromic, `Q`
    /// palindromic (equal odd degree, `Q` positive); the ratio is odd
    /// under `x -> 1/x` and the integral is 0.
    EvenLogCorrected { n: u32, p: PolyCoeffs, q: PolyCoeffs },
    /// `ln((a x + b)/(b x + a))/(1+x)^2` for `a, b > 0`; table entry
    /// 4.297.2; equals 0.
    Gr42972,
    /// `ln(P(x)/reverse(P)(x))/(1+bx+x^2)` with all coefficients of `P`
    /// positive; equals 0 for every such `P` and every `b > -2`.
    LogPalindromicRatio { p: PolyCoeffs },
}

impl FamilyId {
    /// Stable kebab-case tag used in reports and the CLI.
    pub fn name(&self) -> &'static str {
        match self {
            FamilyId::Gr45381 { .. } => "gr-4.538.1",
            FamilyId::ArctanPower { .. } => "arctan-power",
            FamilyId::DerivativeRow { .. } => "derivative-row",
            FamilyId::PeriodicLogRatio => "periodic-log-ratio",
            FamilyId::Gr41277 { .. } => "gr-4.127.7",
            FamilyId::OddLogPalindromic { .. } => "odd-log-palindromic",
            FamilyId::EvenLogAsPrinted { .. } => "even-log-as-printed",
            FamilyId::EvenLogCorrected { .. } => "even-log-corrected",
            FamilyId::Gr42972 => "gr-4.297.2",
            FamilyId::LogPalindromicRatio { .. } => "log-palindromic-ratio",
        }
    }
}

impl std::fmt::Display for FamilyId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// What an entry's integral should come out to.
#[derive(Debug, Clone, PartialEq)]
pub enum Expected {
    /// Closed parameter-free value.
    Value(Expr),
    NotInvariant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub family: FamilyId,
    pub spec: IntegralSpec,
    pub expected: Expected,
}

/// A structural condition the requested family parameters violate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{0}")]
pub struct FamilyError(pub String);

fn err(msg: impl Into<String>) -> FamilyError {
    FamilyError(msg.into())
}

const PI_SQUARED_OVER_EIGHT: fn() -> Expr =
    || Expr::product(vec![Expr::number(rat(1, 8)), Expr::power(Expr::Pi, Expr::int(2))]);

fn shifted_weight(var: &str) -> Expr {
    // 1/(1 + b*x + x^2) with b a free parameter
    Expr::power(
        Expr::sum(vec![
            Expr::one(),
            Expr::product(vec![Expr::param("b"), Expr::var(var)]),
            Expr::power(Expr::var(var), Expr::int(2)),
        ]),
        Expr::int(-1),
    )
}

fn plain_weight(var: &str) -> Expr {
    Expr::power(
        Expr::sum(vec![Expr::one(), Expr::power(Expr::var(var), Expr::int(2))]),
        Expr::int(-1),
    )
}

fn with_shift_param(spec: IntegralSpec) -> IntegralSpec {
    spec.with_param("b", -1.9, 4.0)
        .with_constraint(Constraint::MinExclusive("b".into(), -2.0))
}

/// `(x - 1) * p`, the antipalindromic completion of a palindromic half.
fn mul_x_minus_one(p: &PolyCoeffs) -> PolyCoeffs {
    let c = p.coeffs();
    let mut out = vec![Rational::zero(); c.len() + 1];
    for (i, v) in c.iter().enumerate() {
        out[i] -= v;
        out[i + 1] += v;
    }
    PolyCoeffs::new(out)
}

/// Exact quotient `p / (x - 1)` when the division is exact.
fn div_x_minus_one(p: &PolyCoeffs) -> Option<PolyCoeffs> {
    let c = p.coeffs();
    if c.len() < 2 {
        return None;
    }
    let mut quotient = vec![Rational::zero(); c.len() - 1];
    let mut carry = Rational::zero();
    for j in (0..c.len() - 1).rev() {
        carry = c[j + 1].clone() + carry;
        quotient[j] = carry.clone();
    }
    let remainder = c[0].clone() + carry;
    remainder.is_zero().then(|| PolyCoeffs::new(quotient))
}

fn all_positive(p: &PolyCoeffs) -> bool {
    p.coeffs().iter().all(|c| *c > Rational::zero())
}

fn one_signed(p: &PolyCoeffs) -> bool {
    all_positive(p) || p.coeffs().iter().all(|c| *c < Rational::zero())
}

/// Builds the log-power rational-ratio integrand shared by the
/// palindromic families: `ln(x)^power * P/(Q * (1+bx+x^2))`.
fn log_ratio_integrand(power: u32, p: &PolyCoeffs, q: &PolyCoeffs) -> Expr {
    Expr::product(vec![
        Expr::power(Expr::ln(Expr::var("x")), Expr::int(power as i64)),
        p.to_expr("x"),
        Expr::power(q.to_expr("x"), Expr::int(-1)),
        shifted_weight("x"),
    ])
}

/// Instantiates a family, checking its structural symmetry conditions.
/// Violations name the failing condition.
pub fn instantiate_family(id: &FamilyId) -> Result<CatalogEntry, FamilyError> {
    let spec = match id {
        FamilyId::Gr45381 { func, power } => {
            if !(*power == 2 || *power == 3) {
                return Err(err("power must be 2 or 3"));
            }
            let arg = Expr::power(Expr::var("x"), Expr::int(*power as i64));
            let trig = match func {
                TrigFunc::Atan => Expr::atan(arg),
                TrigFunc::Acot => Expr::acot(arg),
            };
            IntegralSpec::semi_infinite(
                Expr::product(vec![trig, plain_weight("x")]),
                "x",
            )
        }
        FamilyId::ArctanPower { lo, hi } => {
            if !(lo < hi) {
                return Err(err("exponent range must satisfy lo < hi"));
            }
            IntegralSpec::semi_infinite(
                Expr::product(vec![
                    Expr::atan(Expr::power(Expr::var("x"), Expr::param("a"))),
                    plain_weight("x"),
                ]),
                "x",
            )
            .with_param("a", *lo, *hi)
        }
        FamilyId::DerivativeRow { n } => {
            if !(1..=crate::derivatives::MAX_DERIVATIVE_ORDER).contains(n) {
                return Err(err("derivative order must be in 1..=64"));
            }
            IntegralSpec::semi_infinite(crate::derivatives::build_derivative_integrand(*n), "x")
                .with_param("a", -3.0, 3.7)
        }
        FamilyId::PeriodicLogRatio => {
            let sq = |e: Expr| Expr::power(e, Expr::int(2));
            let z2 = sq(Expr::param("z"));
            let rcos = Expr::product(vec![Expr::param("r"), Expr::cos(Expr::var("phi"))]);
            let plus = Expr::sum(vec![z2.clone(), sq(Expr::sum(vec![
                Expr::param("a"),
                rcos.clone(),
            ]))]);
            let minus = Expr::sum(vec![z2, sq(Expr::sum(vec![
                Expr::param("a"),
                Expr::product(vec![Expr::int(-1), rcos]),
            ]))]);
            IntegralSpec::periodic_two_pi(
                Expr::ln(Expr::div(plus, minus)),
                "phi",
            )
            .with_param("z", 0.25, 2.5)
            .with_param("a", 0.5, 2.5)
            .with_param("r", 0.1, 0.95)
            .with_constraint(Constraint::AnyOf(vec![
                Constraint::NonZero("z".into()),
                Constraint::AbsGreater("a".into(), "r".into()),
            ]))
        }
        FamilyId::Gr41277 { n } => {
            if *n > 6 {
                return Err(err("log half-power n must be at most 6"));
            }
            with_shift_param(IntegralSpec::semi_infinite(
                Expr::product(vec![
                    Expr::power(Expr::ln(Expr::var("x")), Expr::int(2 * *n as i64 + 1)),
                    shifted_weight("x"),
                ]),
                "x",
            ))
        }
        FamilyId::OddLogPalindromic { n, p, q } => {
            if !p.is_palindromic() {
                return Err(err("p is not palindromic"));
            }
            if !q.is_palindromic() {
                return Err(err("q is not palindromic"));
            }
            if p.degree() != q.degree() {
                return Err(err("p and q must have the same degree"));
            }
            if p.degree() % 2 != 0 {
                return Err(err("degree must be even (2m)"));
            }
            if !all_positive(q) {
                return Err(err(
                    "q coefficients must all be positive so the denominator cannot vanish",
                ));
            }
            with_shift_param(IntegralSpec::semi_infinite(
                log_ratio_integrand(2 * n + 1, p, q),
                "x",
            ))
        }
        FamilyId::EvenLogAsPrinted { n, p, q } => {
            if *n == 0 {
                return Err(err("log power 2n must be positive: n >= 1"));
            }
            if !p.is_antipalindromic() {
                return Err(err("p is not antipalindromic"));
            }
            if !q.is_antipalindromic() {
                return Err(err("q is not antipalindromic"));
            }
            if p.degree() != q.degree() {
                return Err(err("p and q must have the same degree"));
            }
            if p.degree() % 2 != 1 {
                return Err(err("degree must be odd (2m+1)"));
            }
            let reduced = div_x_minus_one(q)
                .ok_or_else(|| err("q must be divisible by (x - 1)"))?;
            if !one_signed(&reduced) {
                return Err(err(
                    "q/(x - 1) must have one-signed coefficients so the only positive \
                     root of q is x = 1",
                ));
            }
            with_shift_param(IntegralSpec::semi_infinite(
                log_ratio_integrand(2 * n, p, q),
                "x",
            ))
        }
        FamilyId::EvenLogCorrected { n, p, q } => {
            if *n == 0 {
                return Err(err("log power 2n must be positive: n >= 1"));
            }
            if !p.is_antipalindromic() {
                return Err(err("p is not antipalindromic"));
            }
            if !q.is_palindromic() {
                return Err(err("q is not palindromic"));
            }
            if p.degree() != q.degree() {
                return Err(err("p and q must have the same degree"));
            }
            if p.degree() % 2 != 1 {
                return Err(err("degree must be odd (2m+1)"));
            }
            if !all_positive(q) {
                return Err(err(
                    "q coefficients must all be positive so the denominator cannot vanish",
                ));
            }
            with_shift_param(IntegralSpec::semi_infinite(
                log_ratio_integrand(2 * n, p, q),
                "x",
            ))
        }
        FamilyId::Gr42972 => {
            let num = Expr::sum(vec![
                Expr::product(vec![Expr::param("a"), Expr::var("x")]),
                Expr::param("b"),
            ]);
            let den = Expr::sum(vec![
                Expr::product(vec![Expr::param("b"), Expr::var("x")]),
                Expr::param("a"),
            ]);
            IntegralSpec::semi_infinite(
                Expr::product(vec![
                    Expr::ln(Expr::div(num, den)),
                    Expr::power(
                        Expr::sum(vec![Expr::one(), Expr::var("x")]),
                        Expr::int(-2),
                    ),
                ]),
                "x",
            )
            .with_param("a", 0.4, 4.0)
            .with_param("b", 0.4, 4.0)
            .with_constraint(Constraint::Positive("a".into()))
            .with_constraint(Constraint::Positive("b".into()))
        }
        FamilyId::LogPalindromicRatio { p } => {
            if !all_positive(p) {
                return Err(err("all p coefficients must be positive"));
            }
            let ratio = Expr::div(p.to_expr("x"), p.reversed().to_expr("x"));
            with_shift_param(IntegralSpec::semi_infinite(
                Expr::product(vec![Expr::ln(ratio), shifted_weight("x")]),
                "x",
            ))
        }
    };
    let expected = match id {
        FamilyId::Gr45381 { .. } | FamilyId::ArctanPower { .. } => {
            Expected::Value(PI_SQUARED_OVER_EIGHT())
        }
        FamilyId::EvenLogAsPrinted { .. } => Expected::NotInvariant,
        _ => Expected::Value(Expr::zero()),
    };
    Ok(CatalogEntry {
        family: id.clone(),
        spec,
        expected,
    })
}

// ---------------------------------------------------------------------
// Seeded random instances
// ---------------------------------------------------------------------

fn family_salt(id: &FamilyId) -> u64 {
    match id {
        FamilyId::Gr45381 { .. } => 0x01,
        FamilyId::ArctanPower { .. } => 0x02,
        FamilyId::DerivativeRow { .. } => 0x03,
        FamilyId::PeriodicLogRatio => 0x04,
        FamilyId::Gr41277 { .. } => 0x05,
        FamilyId::OddLogPalindromic { .. } => 0x06,
        FamilyId::EvenLogAsPrinted { .. } => 0x07,
        FamilyId::EvenLogCorrected { .. } => 0x08,
        FamilyId::Gr42972 => 0x09,
        FamilyId::LogPalindromicRatio { .. } => 0x0a,
    }
}

fn random_rational(rng: &mut ChaCha8Rng, signed: bool) -> Rational {
    let den = rng.gen_range(1..=10i64);
    let num = rng.gen_range(1..=100i64);
    let sign = if signed && rng.gen_bool(0.5) { -1 } else { 1 };
    rat(sign * num, den)
}

fn random_palindromic(rng: &mut ChaCha8Rng, degree: usize, positive: bool) -> PolyCoeffs {
    let half = degree / 2 + 1;
    let mut coeffs = vec![Rational::zero(); degree + 1];
    for i in 0..half {
        let c = random_rational(rng, !positive);
        coeffs[i] = c.clone();
        coeffs[degree - i] = c;
    }
    if coeffs[0].is_zero() {
        coeffs[0] = rat_int(1);
        coeffs[degree] = rat_int(1);
    }
    PolyCoeffs::new(coeffs)
}

fn random_antipalindromic(rng: &mut ChaCha8Rng, degree: usize) -> PolyCoeffs {
    // degree must be odd; mirror the free half with a sign flip
    let half = (degree + 1) / 2;
    let mut coeffs = vec![Rational::zero(); degree + 1];
    for i in 0..half {
        let c = random_rational(rng, true);
        coeffs[i] = c.clone();
        coeffs[degree - i] = -c;
    }
    if coeffs[0].is_zero() {
        coeffs[0] = rat_int(1);
        coeffs[degree] = rat_int(-1);
    }
    PolyCoeffs::new(coeffs)
}

/// Draws a reproducible instance of the same family as `template`,
/// redrawing all structural data from the seed: integer orders within
/// documented bounds (m <= 4, n <= 3), rational coefficients with
/// numerator at most 100 and denominator at most 10, symmetry
/// conditions enforced by construction.
pub fn random_instance(template: &FamilyId, seed: u64) -> CatalogEntry {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e3779b9).wrapping_add(family_salt(template)));
    let id = match template {
        FamilyId::Gr45381 { .. } => FamilyId::Gr45381 {
            func: if rng.gen_bool(0.5) {
                TrigFunc::Atan
            } else {
                TrigFunc::Acot
            },
            power: rng.gen_range(2..=3),
        },
        FamilyId::ArctanPower { .. } => {
            let lo = rng.gen_range(-5.0..2.9f64);
            FamilyId::ArctanPower {
                lo,
                hi: lo + rng.gen_range(2.0..2.1f64),
            }
        }
        FamilyId::DerivativeRow { .. } => FamilyId::DerivativeRow {
            n: rng.gen_range(1..=6),
        },
        FamilyId::PeriodicLogRatio => FamilyId::PeriodicLogRatio,
        FamilyId::Gr41277 { .. } => FamilyId::Gr41277 {
            n: rng.gen_range(0..=3),
        },
        FamilyId::OddLogPalindromic { .. } => {
            let m = rng.gen_range(1..=4usize);
            FamilyId::OddLogPalindromic {
                n: rng.gen_range(0..=2),
                p: random_palindromic(&mut rng, 2 * m, false),
                q: random_palindromic(&mut rng, 2 * m, true),
            }
        }
        FamilyId::EvenLogAsPrinted { .. } => {
            let m = rng.gen_range(0..=3usize);
            FamilyId::EvenLogAsPrinted {
                n: rng.gen_range(1..=3),
                p: mul_x_minus_one(&random_palindromic(&mut rng, 2 * m, false)),
                q: mul_x_minus_one(&random_palindromic(&mut rng, 2 * m, true)),
            }
        }
        FamilyId::EvenLogCorrected { .. } => {
            let m = rng.gen_range(0..=3usize);
            FamilyId::EvenLogCorrected {
                n: rng.gen_range(1..=3),
                p: random_antipalindromic(&mut rng, 2 * m + 1),
                q: random_palindromic(&mut rng, 2 * m + 1, true),
            }
        }
        FamilyId::Gr42972 => FamilyId::Gr42972,
        FamilyId::LogPalindromicRatio { .. } => {
            let len = rng.gen_range(2..=5usize);
            let coeffs = (0..len).map(|_| random_rational(&mut rng, false)).collect();
            FamilyId::LogPalindromicRatio {
                p: PolyCoeffs::new(coeffs),
            }
        }
    };
    instantiate_family(&id).expect("random draws satisfy the family conditions by construction")
}

// ---------------------------------------------------------------------
// Symmetry-broken mutants
// ---------------------------------------------------------------------

fn perturb_first(p: &PolyCoeffs) -> PolyCoeffs {
    let mut coeffs = p.coeffs().to_vec();
    coeffs[0] += rat_int(1);
    PolyCoeffs::new(coeffs)
}

/// A minimally perturbed copy of the entry that breaks the symmetry its
/// invariance rests on (one coefficient bumped by +1, always away from
/// the middle, or the self-dual weight unbalanced). Expected verdict is
/// `NotInvariant`. Returns `None` for families with no free parameter to
/// vary (their mutants could not be probed) and for the already
/// non-invariant as-printed family.
pub fn symmetry_broken_mutant(entry: &CatalogEntry) -> Option<CatalogEntry> {
    let spec = &entry.spec;
    let mutated_integrand = match &entry.family {
        FamilyId::Gr45381 { .. } | FamilyId::EvenLogAsPrinted { .. } => return None,
        FamilyId::ArctanPower { .. } => {
            // unbalance the self-dual weight: 1/(1+x^2) -> 1/(2+x^2)
            Expr::product(vec![
                Expr::atan(Expr::power(Expr::var("x"), Expr::param("a"))),
                Expr::power(
                    Expr::sum(vec![
                        Expr::int(2),
                        Expr::power(Expr::var("x"), Expr::int(2)),
                    ]),
                    Expr::int(-1),
                ),
            ])
        }
        FamilyId::DerivativeRow { n } => {
            if *n < 2 {
                return None; // the single-coefficient row only rescales
            }
            let row = crate::derivatives::derivative_coeffs(*n);
            let numerator = Expr::sum(
                row.coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        let coeff = if i == 0 {
                            Rational::from(c.clone()) + rat_int(1)
                        } else {
                            Rational::from(c.clone())
                        };
                        Expr::product(vec![
                            Expr::number(coeff),
                            Expr::power(
                                Expr::var("x"),
                                Expr::product(vec![
                                    Expr::int(2 * i as i64 + 1),
                                    Expr::param("a"),
                                ]),
                            ),
                        ])
                    })
                    .collect(),
            );
            let inner = Expr::sum(vec![
                Expr::one(),
                Expr::power(
                    Expr::var("x"),
                    Expr::product(vec![Expr::int(2), Expr::param("a")]),
                ),
            ]);
            Expr::product(vec![
                Expr::power(Expr::ln(Expr::var("x")), Expr::int(*n as i64)),
                numerator,
                Expr::power(inner, Expr::int(-(*n as i64))),
                plain_weight("x"),
            ])
        }
        FamilyId::PeriodicLogRatio => {
            // shift only the denominator's z^2 term by +1
            let sq = |e: Expr| Expr::power(e, Expr::int(2));
            let rcos = Expr::product(vec![Expr::param("r"), Expr::cos(Expr::var("phi"))]);
            let plus = Expr::sum(vec![
                sq(Expr::param("z")),
                sq(Expr::sum(vec![Expr::param("a"), rcos.clone()])),
            ]);
            let minus = Expr::sum(vec![
                Expr::one(),
                sq(Expr::param("z")),
                sq(Expr::sum(vec![
                    Expr::param("a"),
                    Expr::product(vec![Expr::int(-1), rcos]),
                ])),
            ]);
            Expr::ln(Expr::div(plus, minus))
        }
        FamilyId::Gr41277 { n } => {
            // unbalance the shifted weight: 1 + b*x + x^2 -> 2 + b*x + x^2
            Expr::product(vec![
                Expr::power(Expr::ln(Expr::var("x")), Expr::int(2 * *n as i64 + 1)),
                Expr::power(
                    Expr::sum(vec![
                        Expr::int(2),
                        Expr::product(vec![Expr::param("b"), Expr::var("x")]),
                        Expr::power(Expr::var("x"), Expr::int(2)),
                    ]),
                    Expr::int(-1),
                ),
            ])
        }
        FamilyId::OddLogPalindromic { n, p, q } => {
            log_ratio_integrand(2 * n + 1, &perturb_first(p), q)
        }
        FamilyId::EvenLogCorrected { n, p, q } => {
            log_ratio_integrand(2 * n, &perturb_first(p), q)
        }
        FamilyId::Gr42972 => {
            let num = Expr::sum(vec![
                Expr::product(vec![Expr::param("a"), Expr::var("x")]),
                Expr::param("b"),
            ]);
            let den = Expr::sum(vec![
                Expr::product(vec![Expr::param("b"), Expr::var("x")]),
                Expr::param("a"),
            ]);
            Expr::product(vec![
                Expr::ln(Expr::div(num, den)),
                Expr::power(
                    Expr::sum(vec![Expr::int(2), Expr::var("x")]),
                    Expr::int(-2),
                ),
            ])
        }
        FamilyId::LogPalindromicRatio { p } => {
            // reverse a *different* polynomial in the denominator
            let ratio = Expr::div(
                p.to_expr("x"),
                perturb_first(p).reversed().to_expr("x"),
            );
            Expr::product(vec![Expr::ln(ratio), shifted_weight("x")])
        }
    };
    Some(CatalogEntry {
        family: entry.family.clone(),
        spec: IntegralSpec {
            integrand: mutated_integrand,
            ..spec.clone()
        },
        expected: Expected::NotInvariant,
    })
}

// ---------------------------------------------------------------------
// Built-in catalog and the verify-all runner
// ---------------------------------------------------------------------

/// Every family at representative structural parameters. All entries
/// expect a certified closed value except the as-printed even-log entry,
/// which documents its parameter dependence.
pub fn builtin_catalog() -> Vec<CatalogEntry> {
    let ids = vec![
        FamilyId::Gr45381 {
            func: TrigFunc::Atan,
            power: 2,
        },
        FamilyId::Gr45381 {
            func: TrigFunc::Atan,
            power: 3,
        },
        FamilyId::Gr45381 {
            func: TrigFunc::Acot,
            power: 2,
        },
        FamilyId::Gr45381 {
            func: TrigFunc::Acot,
            power: 3,
        },
        FamilyId::ArctanPower { lo: -5.0, hi: 5.0 },
        FamilyId::DerivativeRow { n: 1 },
        FamilyId::DerivativeRow { n: 2 },
        FamilyId::DerivativeRow { n: 3 },
        FamilyId::DerivativeRow { n: 4 },
        FamilyId::PeriodicLogRatio,
        FamilyId::Gr41277 { n: 0 },
        FamilyId::Gr41277 { n: 1 },
        FamilyId::Gr41277 { n: 2 },
        FamilyId::OddLogPalindromic {
            n: 0,
            p: PolyCoeffs::from_ints(&[1, 4, 1]),
            q: PolyCoeffs::from_ints(&[2, 7, 2]),
        },
        FamilyId::OddLogPalindromic {
            n: 1,
            p: PolyCoeffs::from_ints(&[3, -1, 3]),
            q: PolyCoeffs::from_ints(&[1, 1, 1]),
        },
        FamilyId::EvenLogAsPrinted {
            n: 1,
            p: PolyCoeffs::from_ints(&[1, -1]),
            q: PolyCoeffs::from_ints(&[1, -1]),
        },
        FamilyId::EvenLogCorrected {
            n: 1,
            p: PolyCoeffs::from_ints(&[1, -1]),
            q: PolyCoeffs::from_ints(&[1, 1]),
        },
        FamilyId::EvenLogCorrected {
            n: 1,
            p: PolyCoeffs::from_ints(&[2, 5, -5, -2]),
            q: PolyCoeffs::from_ints(&[1, 2, 2, 1]),
        },
        FamilyId::Gr42972,
        FamilyId::LogPalindromicRatio {
            p: PolyCoeffs::from_ints(&[1, 2, 3]),
        },
        FamilyId::LogPalindromicRatio {
            p: PolyCoeffs::from_ints(&[2, 1, 1, 2]),
        },
    ];
    ids.iter()
        .map(|id| instantiate_family(id).expect("built-in entries are well-formed"))
        .collect()
}

/// Outcome for one entry of a catalog run.
#[derive(Debug, Clone, PartialEq)]
pub struct EntryOutcome {
    pub family: String,
    pub passed: bool,
    pub detail: String,
    /// |numeric estimate - expected value| for invariant entries.
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogReport {
    pub outcomes: Vec<EntryOutcome>,
    pub passed: usize,
    pub failed: usize,
    pub worst_deviation: f64,
}

impl CatalogReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn summary(&self) -> String {
        let mut lines: Vec<String> = self
            .outcomes
            .iter()
            .map(|o| {
                format!(
                    "[{}] {}: {}",
                    if o.passed { "pass" } else { "FAIL" },
                    o.family,
                    o.detail
                )
            })
            .collect();
        lines.push(format!(
            "{} passed, {} failed, worst deviation {:.2e}",
            self.passed, self.failed, self.worst_deviation
        ));
        lines.join("\n")
    }
}

fn verify_entry(entry: &CatalogEntry, tol: f64) -> EntryOutcome {
    let report = detect(&entry.spec, 3, tol, 0);
    let family = entry.family.to_string();
    match &entry.expected {
        Expected::Value(v) => {
            let target = evaluate(v, &Bindings::new()).expect("expected value is closed");
            let estimate = report.value_estimate.unwrap_or(f64::NAN);
            let deviation = (estimate - target).abs();
            if report.numeric_verdict != ProbeVerdict::Invariant {
                return EntryOutcome {
                    family,
                    passed: false,
                    detail: format!(
                        "expected invariant value {v}, probe verdict {:?}",
                        report.numeric_verdict
                    ),
                    deviation,
                };
            }
            let Some(cert) = &report.certificate else {
                return EntryOutcome {
                    family,
                    passed: false,
                    detail: format!("probes agree near {estimate:.12} but no certificate"),
                    deviation,
                };
            };
            if cert.conclusion != Conclusion::Value(v.clone()) {
                return EntryOutcome {
                    family,
                    passed: false,
                    detail: format!("certified conclusion {:?} != expected {v}", cert.conclusion),
                    deviation,
                };
            }
            if let Err(e) = verify_certificate(cert, 1) {
                return EntryOutcome {
                    family,
                    passed: false,
                    detail: format!("certificate failed re-verification: {e}"),
                    deviation,
                };
            }
            let bound = tol.max(1e-9) * (1.0 + target.abs());
            EntryOutcome {
                family,
                passed: deviation <= bound,
                detail: format!("certified {v}; numeric estimate off by {deviation:.2e}"),
                deviation,
            }
        }
        Expected::NotInvariant => {
            let passed = report.numeric_verdict == ProbeVerdict::NotInvariant
                && report.certificate.is_none();
            EntryOutcome {
                family,
                passed,
                detail: if passed {
                    "probe values vary with the parameters, as expected".to_string()
                } else {
                    format!(
                        "expected NotInvariant, got {:?} (certificate: {})",
                        report.numeric_verdict,
                        report.certificate.is_some()
                    )
                },
                deviation: 0.0,
            }
        }
    }
}

/// Runs the detector over each entry and compares against expectations.
pub fn verify_catalog(entries: &[CatalogEntry], tol: f64) -> CatalogReport {
    use rayon::prelude::*;
    let outcomes: Vec<EntryOutcome> = entries
        .par_iter()
        .map(|e| verify_entry(e, tol))
        .collect();
    let passed = outcomes.iter().filter(|o| o.passed).count();
    let failed = outcomes.len() - passed;
    let worst_deviation = outcomes
        .iter()
        .map(|o| o.deviation)
        .filter(|d| d.is_finite())
        .fold(0.0f64, f64::max);
    CatalogReport {
        outcomes,
        passed,
        failed,
        worst_deviation,
    }
}
