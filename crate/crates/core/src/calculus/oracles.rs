//! Independent closed-form component oracles.
//!
//! Each function here recomputes a quantity that the main code paths obtain
//! by operator or bracket recursion, directly from an index formula. The
//! test suites compare the two routes; nothing in the library itself calls
//! these for its results.

use crate::expr::RatFunc;
use crate::tensor::{EndoField, Multivector};

/// `[P,P]` from the cyclic component formula. Under the Leibniz-extension
/// conventions of [`super::schouten`],
/// `[P,P]^{abc} = -2 sum_l (P^{la} d_l P^{bc} + P^{lb} d_l P^{ca} + P^{lc} d_l P^{ab})`;
/// the factor follows from the base cases and the two Leibniz rules.
pub fn schouten_pp_oracle(p: &Multivector) -> Multivector {
    debug_assert_eq!(p.degree(), 2);
    let chart = p.chart().clone();
    let n = chart.dim() as u8;
    let mut out = Multivector::zero(&chart, 3);
    for a in 1..=n {
        for b in (a + 1)..=n {
            for c in (b + 1)..=n {
                let mut acc = RatFunc::zero(&chart);
                for l in 1..=n {
                    for (i, j, k) in [(a, b, c), (b, c, a), (c, a, b)] {
                        let pli = p.get(&[l, i]);
                        if pli.is_zero() {
                            continue;
                        }
                        let d = p.get(&[j, k]).partial(l as usize).expect("in range");
                        if !d.is_zero() {
                            acc = acc.add(&pli.mul(&d));
                        }
                    }
                }
                out.insert(&[a, b, c], acc.scale_int(-2));
            }
        }
    }
    out
}

/// `(L_X N)^i_j = X^l d_l N^i_j - N^l_j d_l X^i + N^i_l d_j X^l`,
/// the index-formula route for the Lie derivative of a (1,1)-tensor.
pub fn lie_deriv_endo_oracle(x: &Multivector, n: &EndoField) -> EndoField {
    let chart = n.chart().clone();
    let dim = chart.dim();
    let xc = x.vector_components();
    let mut out = EndoField::zero(&chart);
    for i in 1..=dim {
        for j in 1..=dim {
            let mut acc = RatFunc::zero(&chart);
            for l in 1..=dim {
                if !xc[l - 1].is_zero() {
                    acc = acc.add(&xc[l - 1].mul(&n.get(i, j).partial(l).expect("in range")));
                }
                let nlj = n.get(l, j);
                if !nlj.is_zero() {
                    acc = acc.sub(&nlj.mul(&xc[i - 1].partial(l).expect("in range")));
                }
                let nil = n.get(i, l);
                if !nil.is_zero() {
                    acc = acc.add(&nil.mul(&xc[l - 1].partial(j).expect("in range")));
                }
            }
            out.set(i, j, acc);
        }
    }
    out
}
