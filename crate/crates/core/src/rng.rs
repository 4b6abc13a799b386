//! Deterministic random generation of symbolic test data.
//!
//! Everything is driven by a seeded ChaCha stream so that every randomized
//! check reproduces byte-for-byte across runs and platforms. Coefficients
//! are drawn from a small fixed rational pool and monomials are bounded in
//! degree, keeping residual expressions desk-sized.

use std::sync::Arc;

use num::{BigInt, BigRational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chart::Chart;
use crate::expr::RatFunc;
use crate::tensor::{increasing_tuples, Alt, EndoField};

pub type TestRng = ChaCha8Rng;

/// Stable sub-seed derivation: FNV-1a over a label, mixed into the user seed.
pub fn subseed(seed: u64, label: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in label.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    seed ^ h
}

pub fn rng_for(seed: u64, label: &str) -> TestRng {
    ChaCha8Rng::seed_from_u64(subseed(seed, label))
}

fn pool() -> Vec<BigRational> {
    let q = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
    vec![
        q(1, 1),
        q(-1, 1),
        q(2, 1),
        q(-2, 1),
        q(3, 1),
        q(1, 2),
        q(-1, 2),
        q(1, 3),
    ]
}

/// Random polynomial of total degree <= `max_deg`, sparse with roughly half
/// of the candidate monomials present.
pub fn random_poly(chart: &Arc<Chart>, rng: &mut TestRng, max_deg: usize) -> RatFunc {
    let coeffs = pool();
    let n = chart.dim();
    let mut acc = RatFunc::zero(chart);
    for deg in 0..=max_deg {
        for tuple in monomials_of_degree(n, deg) {
            if rng.gen_range(0..2) == 0 {
                continue;
            }
            let c = coeffs[rng.gen_range(0..coeffs.len())].clone();
            let mut term = RatFunc::from_rational(chart, c);
            for (pos, &e) in tuple.iter().enumerate() {
                if e > 0 {
                    let x = RatFunc::coord(chart, pos + 1).expect("in range");
                    term = term.mul(&x.pow(e as i64).expect("positive power"));
                }
            }
            acc = acc.add(&term);
        }
    }
    acc
}

/// Random nonzero polynomial of total degree <= `max_deg`.
pub fn random_nonzero_poly(chart: &Arc<Chart>, rng: &mut TestRng, max_deg: usize) -> RatFunc {
    loop {
        let p = random_poly(chart, rng, max_deg);
        if !p.is_zero() {
            return p;
        }
    }
}

/// Random nonconstant polynomial of total degree <= `max_deg`.
pub fn random_nonconstant_poly(chart: &Arc<Chart>, rng: &mut TestRng, max_deg: usize) -> RatFunc {
    loop {
        let p = random_poly(chart, rng, max_deg);
        if !p.is_constant() {
            return p;
        }
    }
}

/// All exponent tuples of exact total degree `deg` over `n` variables.
fn monomials_of_degree(n: usize, deg: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, deg: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n - 1 {
            cur.push(deg);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for e in 0..=deg {
            cur.push(e);
            rec(n, deg - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, deg, &mut Vec::new(), &mut out);
    out
}

/// Random degree-k alternating tensor with polynomial components.
pub fn random_alt<V>(
    chart: &Arc<Chart>,
    rng: &mut TestRng,
    degree: usize,
    max_deg: usize,
) -> Alt<V> {
    let mut out = Alt::zero(chart, degree);
    for tuple in increasing_tuples(chart.dim(), degree) {
        out.insert(&tuple, random_poly(chart, rng, max_deg));
    }
    out
}

/// Random (1,1)-tensor field with polynomial entries.
pub fn random_endo(chart: &Arc<Chart>, rng: &mut TestRng, max_deg: usize) -> EndoField {
    let n = chart.dim();
    let mut out = EndoField::zero(chart);
    for i in 1..=n {
        for j in 1..=n {
            out.set(i, j, random_poly(chart, rng, max_deg));
        }
    }
    out
}
