//! High-accuracy numerical oracle, independent of the symbolic prover.
//!
//! The semi-infinite integrator never truncates the tail: it folds
//! `∫₀^∞ f` into `∫₀¹ [f(x) + f(1/x)/x²]` exactly, then applies
//! double-exponential (tanh-sinh) quadrature, which absorbs the `ln^n x`
//! endpoint singularities every family here exhibits. A deliberately
//! different second integrator (adaptive Simpson on log-transformed
//! pieces) cross-checks the fold itself.
//!
//! All integrand evaluation happens in signed-log arithmetic so that
//! nodes pushed deep into the corners (x near 1e-300) still contribute
//! their correct, usually underflowing-to-zero, weight.

use crate::expr::eval::{evaluate_signed, Bindings, EvalError, SignedLog};
use crate::expr::Expr;
use crate::prover::{Domain, IntegralSpec};
use crate::symmetry::fold_image_raw;

/// Outcome of one numerical integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    /// Estimated absolute error; when `converged` it is at most the
    /// effective requested tolerance.
    pub error_estimate: f64,
    pub evaluations: u64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadError {
    #[error("integrand evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error("integrand produced a non-finite value near x = {x}")]
    NonFinite { x: f64 },
    #[error("unsupported integration setup: {0}")]
    Unsupported(String),
}

/// Tolerances below this are clamped: double precision cannot certify
/// tighter results on these integrands.
pub const MIN_TOLERANCE: f64 = 1e-12;

fn effective_tol(tol: f64) -> f64 {
    tol.max(MIN_TOLERANCE)
}

/// Compensated (Neumaier) accumulator, so node sums do not lose digits.
#[derive(Default, Clone, Copy)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// |u| cap for the inner tanh-sinh variable: keeps `exp(-2u)` comfortably
/// inside the double range while pushing nodes to within 1e-299 of the
/// endpoints.
const U_CAP: f64 = 345.0;
const LEVEL_MIN: u32 = 6;
const LEVEL_MAX: u32 = 12;

/// One tanh-sinh abscissa: position in (0,1) and the log of its weight.
fn tanh_sinh_node(t: f64) -> (f64, f64) {
    let u = std::f64::consts::FRAC_PI_2 * t.sinh();
    let au = u.abs();
    // sigma(2u) computed from the small side for accuracy
    let x = if u >= 0.0 {
        1.0 / (1.0 + (-2.0 * u).exp())
    } else {
        let e = (2.0 * u).exp();
        e / (1.0 + e)
    };
    // weight = (1/2) sech^2(u) * (pi/2) cosh(t); logs keep it finite
    let ln_sech2 = 2.0 * (std::f64::consts::LN_2 - au - (-2.0 * au).exp().ln_1p());
    let ln_w = (std::f64::consts::FRAC_PI_2 / 2.0).ln() + t.cosh().ln() + ln_sech2;
    (x, ln_w)
}

/// Double-exponential quadrature of `g` over `(lo, hi)`, evaluating in
/// signed-log space. Levels double from 2^6+1 to 2^12+1 nodes; converged
/// once two successive levels agree within the effective tolerance.
fn tanh_sinh(
    g: &Expr,
    var: &str,
    params: &Bindings,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<QuadResult, QuadError> {
    let tol = effective_tol(tol);
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(QuadError::Unsupported(format!(
            "interval ({lo}, {hi}) is not finite and increasing"
        )));
    }
    let width = hi - lo;
    let ln_width = width.ln();
    let t_max = (2.0 * U_CAP / std::f64::consts::PI).asinh();

    let mut bindings = params.clone();
    let mut evaluations: u64 = 0;
    let mut previous = f64::NAN;
    let mut best = f64::NAN;
    let mut diff = f64::INFINITY;
    let mut abs_scale = 0.0f64;

    for level in LEVEL_MIN..=LEVEL_MAX {
        let n = 1u64 << level;
        let h = 2.0 * t_max / n as f64;
        let mut acc = Neumaier::default();
        let mut abs_acc = Neumaier::default();
        for k in 0..=n {
            let t = -t_max + h * k as f64;
            let (s, ln_w) = tanh_sinh_node(t);
            let x = lo + width * s;
            if x <= lo || x >= hi {
                // node rounded onto an endpoint; the combined weight of
                // all such nodes is below 1e-15 of the interval width
                continue;
            }
            bindings.set(var, x);
            let fx = evaluate_signed(g, &bindings)?;
            evaluations += 1;
            let node_weight = SignedLog {
                sign: 1,
                ln_abs: ln_w + ln_width + h.ln(),
            };
            let contribution = fx.mul(node_weight).to_f64();
            if !contribution.is_finite() {
                return Err(QuadError::NonFinite { x });
            }
            acc.add(contribution);
            abs_acc.add(contribution.abs());
        }
        let estimate = acc.total();
        if !estimate.is_finite() {
            return Err(QuadError::NonFinite { x: lo });
        }
        abs_scale = abs_acc.total();
        if level > LEVEL_MIN {
            diff = (estimate - previous).abs();
        }
        best = estimate;
        previous = estimate;
        let floor = f64::EPSILON * abs_scale;
        if level > LEVEL_MIN && diff <= tol && diff.max(floor) <= tol {
            return Ok(QuadResult {
                value: best,
                error_estimate: diff.max(floor),
                evaluations,
                converged: true,
            });
        }
    }
    Ok(QuadResult {
        value: best,
        error_estimate: diff.max(f64::EPSILON * abs_scale),
        evaluations,
        converged: false,
    })
}

fn integration_variable(f: &Expr) -> String {
    f.var_names().into_iter().next().unwrap_or_else(|| "x".into())
}

/// `∫₀^∞ f dx` via the exact fold onto (0,1):
/// integrates `f(x) + f(1/x)·x⁻²` with tanh-sinh quadrature.
pub fn integrate_folded_semi_infinite(
    f: &Expr,
    params: &Bindings,
    tol: f64,
) -> Result<QuadResult, QuadError> {
    let var = integration_variable(f);
    let folded = Expr::sum(vec![f.clone(), fold_image_raw(f, &var)]);
    tanh_sinh(&folded, &var, params, 0.0, 1.0, tol)
}

/// Integrates over a finite interval `(lo, hi)` with the same
/// double-exponential rule (endpoint singularities allowed).
pub fn integrate_interval(
    f: &Expr,
    params: &Bindings,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<QuadResult, QuadError> {
    let var = integration_variable(f);
    tanh_sinh(f, &var, params, lo, hi, tol)
}

/// Trapezoid rule over one full period `(0, 2π)`, which converges
/// spectrally for smooth periodic integrands. Starts at
/// `max(16, points)` nodes and doubles until two successive estimates
/// agree within the tolerance.
pub fn integrate_periodic(
    f: &Expr,
    params: &Bindings,
    points: u64,
    tol: f64,
) -> Result<QuadResult, QuadError> {
    let tol = effective_tol(tol);
    let var = integration_variable(f);
    let period = 2.0 * std::f64::consts::PI;
    let mut bindings = params.clone();
    let mut n = points.max(16).next_power_of_two();
    let mut evaluations: u64 = 0;
    let mut previous = f64::NAN;
    let mut best = f64::NAN;
    let mut diff = f64::INFINITY;
    let mut abs_scale = 0.0f64;
    let mut first = true;

    while n <= (1 << 20) {
        let h = period / n as f64;
        let mut acc = Neumaier::default();
        let mut abs_acc = Neumaier::default();
        for k in 0..n {
            let phi = h * k as f64;
            bindings.set(&var, phi);
            let v = evaluate_signed(f, &bindings)?.to_f64();
            evaluations += 1;
            if !v.is_finite() {
                return Err(QuadError::NonFinite { x: phi });
            }
            acc.add(v * h);
            abs_acc.add((v * h).abs());
        }
        let estimate = acc.total();
        abs_scale = abs_acc.total();
        if !first {
            diff = (estimate - previous).abs();
        }
        best = estimate;
        previous = estimate;
        first = false;
        let floor = f64::EPSILON * abs_scale;
        if diff.max(floor) <= tol {
            return Ok(QuadResult {
                value: best,
                error_estimate: diff.max(floor),
                evaluations,
                converged: true,
            });
        }
        n *= 2;
    }
    Ok(QuadResult {
        value: best,
        error_estimate: diff.max(f64::EPSILON * abs_scale),
        evaluations,
        converged: false,
    })
}

// ---------------------------------------------------------------------
// Independent cross-check integrator: adaptive Simpson on log-split
// pieces. Shares nothing with the tanh-sinh path except expression
// evaluation.
// ---------------------------------------------------------------------

struct Simpson<'a> {
    g: &'a dyn Fn(f64, &mut Bindings) -> Result<f64, QuadError>,
    bindings: Bindings,
    evaluations: u64,
}

impl<'a> Simpson<'a> {
    fn eval(&mut self, x: f64) -> Result<f64, QuadError> {
        self.evaluations += 1;
        (self.g)(x, &mut self.bindings)
    }

    fn run(&mut self, a: f64, b: f64, tol: f64) -> Result<f64, QuadError> {
        let fa = self.eval(a)?;
        let fb = self.eval(b)?;
        let m = 0.5 * (a + b);
        let fm = self.eval(m)?;
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        self.refine(a, b, fa, fm, fb, whole, tol, 48)
    }

    #[allow(clippy::too_many_arguments)]
    fn refine(
        &mut self,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64, QuadError> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = self.eval(lm)?;
        let frm = self.eval(rm)?;
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return Ok(left + right + delta / 15.0);
        }
        let half = tol / 2.0;
        Ok(self.refine(a, m, fa, flm, fm, left, half, depth - 1)?
            + self.refine(m, b, fm, frm, fb, right, half, depth - 1)?)
    }
}

/// Naive second opinion for `∫₀^∞ f dx`: splits at `e^{-3}` and `e^{3}`,
/// maps the outer pieces through `x = e^{∓u}` (truncated at `u = 700`,
/// beyond which every catalog integrand has underflowed), and applies
/// adaptive Simpson to each piece. Deliberately shares no machinery with
/// the folded tanh-sinh integrator.
pub fn integrate_semi_infinite_naive(
    f: &Expr,
    params: &Bindings,
    tol: f64,
) -> Result<QuadResult, QuadError> {
    let tol = effective_tol(tol);
    let var = integration_variable(f);
    const U_SPLIT: f64 = 3.0;
    const U_TRUNC: f64 = 700.0;

    // piece over (0, e^-3]: x = e^-u, dx = -e^-u du, u in [3, 700]
    let low = |u: f64, b: &mut Bindings| -> Result<f64, QuadError> {
        b.set(&var, (-u).exp());
        let fx = evaluate_signed(f, b)?;
        let v = fx
            .mul(SignedLog {
                sign: 1,
                ln_abs: -u,
            })
            .to_f64();
        if v.is_finite() {
            Ok(v)
        } else {
            Err(QuadError::NonFinite { x: (-u).exp() })
        }
    };
    // piece over [e^-3, e^3]: direct
    let mid = |x: f64, b: &mut Bindings| -> Result<f64, QuadError> {
        b.set(&var, x);
        let v = evaluate_signed(f, b)?.to_f64();
        if v.is_finite() {
            Ok(v)
        } else {
            Err(QuadError::NonFinite { x })
        }
    };
    // piece over [e^3, inf): x = e^u, dx = e^u du, u in [3, 700]
    let high = |u: f64, b: &mut Bindings| -> Result<f64, QuadError> {
        b.set(&var, u.exp());
        let fx = evaluate_signed(f, b)?;
        let v = fx
            .mul(SignedLog {
                sign: 1,
                ln_abs: u,
            })
            .to_f64();
        if v.is_finite() {
            Ok(v)
        } else {
            Err(QuadError::NonFinite { x: u.exp() })
        }
    };

    let piece_tol = tol / 4.0;
    let mut total = 0.0;
    let mut evaluations = 0;
    for (func, a, b) in [
        (&low as &dyn Fn(f64, &mut Bindings) -> Result<f64, QuadError>, U_SPLIT, U_TRUNC),
        (&mid, (-U_SPLIT).exp(), U_SPLIT.exp()),
        (&high, U_SPLIT, U_TRUNC),
    ] {
        let mut s = Simpson {
            g: func,
            bindings: params.clone(),
            evaluations: 0,
        };
        total += s.run(a, b, piece_tol)?;
        evaluations += s.evaluations;
    }
    Ok(QuadResult {
        value: total,
        error_estimate: tol,
        evaluations,
        converged: true,
    })
}

// ---------------------------------------------------------------------
// Invariance probe
// ---------------------------------------------------------------------

/// Verdict of a multi-sample invariance probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeVerdict {
    Invariant,
    NotInvariant,
    /// Quadrature failed or did not converge for some sample; no claim.
    Undecided,
}

/// All probe values are retained for audit; `None` marks a sample whose
/// integration failed.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub verdict: ProbeVerdict,
    pub values: Vec<Option<f64>>,
}

/// Numerically integrates the spec at each parameter sample and compares:
/// invariant iff the max pairwise spread is at most `tol·(1 + max|v|)`.
/// Any non-convergence or evaluation failure yields `Undecided` rather
/// than a false "not invariant".
pub fn probe_invariance(spec: &IntegralSpec, samples: &[Bindings], tol: f64) -> ProbeReport {
    use rayon::prelude::*;
    // parallel across samples; collect preserves order, keeping results
    // bit-identical to a serial run
    let values: Vec<Option<f64>> = samples
        .par_iter()
        .map(|sample| {
            let result = match &spec.domain {
                Domain::SemiInfinite => {
                    integrate_folded_semi_infinite(&spec.integrand, sample, tol / 10.0)
                }
                Domain::Periodic { period } => {
                    if !period_is_two_pi(period) {
                        return None;
                    }
                    integrate_periodic(&spec.integrand, sample, 64, tol / 10.0)
                }
                Domain::Interval { lo, hi } => {
                    let l = crate::expr::eval::evaluate(lo, sample).ok()?;
                    let h = crate::expr::eval::evaluate(hi, sample).ok()?;
                    integrate_interval(&spec.integrand, sample, l, h, tol / 10.0)
                }
            };
            match result {
                Ok(r) if r.converged => Some(r.value),
                _ => None,
            }
        })
        .collect();

    if samples.len() < 2 {
        return ProbeReport {
            verdict: ProbeVerdict::Undecided,
            values,
        };
    }
    if values.iter().any(Option::is_none) {
        return ProbeReport {
            verdict: ProbeVerdict::Undecided,
            values,
        };
    }
    let vs: Vec<f64> = values.iter().map(|v| v.unwrap()).collect();
    let max_abs = vs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut spread = 0.0f64;
    for i in 0..vs.len() {
        for j in (i + 1)..vs.len() {
            spread = spread.max((vs[i] - vs[j]).abs());
        }
    }
    let verdict = if spread <= tol * (1.0 + max_abs) {
        ProbeVerdict::Invariant
    } else {
        ProbeVerdict::NotInvariant
    };
    ProbeReport { verdict, values }
}

pub(crate) fn period_is_two_pi(period: &Expr) -> bool {
    *period == Expr::product(vec![Expr::int(2), Expr::Pi])
}
