//! Detection and certified proof of parameter-invariant definite integrals.
//!
//! Some definite integrals do not depend on a parameter that appears freely
//! in the integrand: the classic example is that the integral over (0, inf)
//! of `atan(x^a)/(1+x^2)` equals pi^2/8 for every real exponent `a`. This
//! crate detects that situation numerically and then proves it symbolically.
//!
//! The mechanism behind every supported family is a fold symmetry: splitting
//! the range at 1 and substituting `x -> 1/x` on the outer half (or shifting
//! by a half period on periodic ranges) maps the integrand onto itself in a
//! way that either cancels the parameter-dependent part entirely or leaves a
//! parameter-free residue. The prover replays that argument as an explicit
//! step-by-step certificate whose rewrites can all be re-checked numerically,
//! and an independent quadrature oracle confirms the claimed values.
//!
//! Module map:
//!
//! - [`expr`]: canonical symbolic expressions, parsing, rendering, numeric
//!   evaluation (plain and log-magnitude).
//! - [`rewrite`]: assumption-aware simplification rules with a recorded
//!   trace.
//! - [`symmetry`]: the fold transform `x -> 1/x`, residue computation, and
//!   self-dual/anti-dual classification.
//! - [`derivatives`]: the family obtained by repeated differentiation of the
//!   arctangent integral, with its integer coefficient triangle.
//! - [`quadrature`]: tanh-sinh quadrature with the reciprocal fold for
//!   semi-infinite ranges, plus an independent cross-check integrator.
//! - [`prover`]: integral descriptions, proof steps, machine-checkable
//!   certificates.
//! - [`detector`]: parameter-space sampling that flags candidate invariant
//!   integrals and hands them to the prover.
//! - [`catalog`]: the built-in integral families with their expected
//!   statuses, used as an end-to-end regression suite.

pub mod catalog;
pub mod derivatives;
pub mod detector;
pub mod expr;
pub mod prover;
pub mod quadrature;
pub mod rational;
pub mod rewrite;
pub mod sampling;
pub mod symmetry;

pub use expr::eval::{evaluate, evaluate_signed, Bindings, EvalError, SignedLog};
pub use expr::parser::{parse, ParseError};
pub use expr::render::render;
pub use expr::Expr;
pub use rational::Rational;
