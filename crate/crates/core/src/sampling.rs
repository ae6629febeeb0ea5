//! Deterministic low-discrepancy parameter sampling.
//!
//! Probes need "different sets of parameters" drawn from each parameter's
//! validity box. Halton sequences give well-spread, reproducible draws;
//! a seed offsets the sequence start so independent runs can decorrelate
//! while staying bit-reproducible.

use crate::expr::eval::Bindings;
use crate::prover::IntegralSpec;

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Element `index` of the van der Corput sequence in the given base,
/// in (0, 1).
pub fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

/// Fraction of the box clipped off each edge so samples avoid boundary
/// values (where validity constraints typically degenerate).
const EDGE_INSET: f64 = 0.05;

/// Draws `count` parameter bindings inside the spec's validity boxes,
/// rejecting draws that violate any spec constraint. Deterministic in
/// `seed`. Panics only if the constraints reject everything (a malformed
/// box), after a generous retry budget.
pub fn sample_params(spec: &IntegralSpec, count: usize, seed: u64) -> Vec<Bindings> {
    let start = 17 + (seed % 10_007);
    let mut out = Vec::with_capacity(count);
    let mut index = start;
    let mut attempts = 0u64;
    while out.len() < count {
        attempts += 1;
        assert!(
            attempts < 10_000,
            "parameter constraints rejected every sample; check the validity box"
        );
        let mut b = Bindings::new();
        for (dim, p) in spec.parameters.iter().enumerate() {
            let u = halton(index, PRIMES[dim % PRIMES.len()]);
            let inset = EDGE_INSET * (p.hi - p.lo);
            let lo = p.lo + inset;
            let hi = p.hi - inset;
            b.set(&p.name, lo + u * (hi - lo));
        }
        index += 1;
        if spec.constraints.iter().all(|c| c.satisfied(&b)) {
            out.push(b);
        }
    }
    out
}
