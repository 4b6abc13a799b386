//! Graded operators on the algebra of forms and their commutator calculus.
//!
//! `d` and `d_N` are odd of degree +1, `i_N` is even of degree 0, interior
//! products by bivectors are even of degree -2. The graded commutator is
//! `[A, B] = A B - (-1)^{parity A . parity B} B A`.

use std::sync::Arc;

use crate::tensor::{DiffForm, EndoField, Multivector, TensorError};

use super::{ext_d, int_biv, int_endo};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn xor(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

type Action = Arc<dyn Fn(&DiffForm) -> DiffForm + Send + Sync>;

/// A degree-homogeneous operator on forms.
#[derive(Clone)]
pub struct GradedOperator {
    pub degree: i32,
    pub parity: Parity,
    action: Action,
}

impl GradedOperator {
    pub fn new(
        degree: i32,
        parity: Parity,
        action: impl Fn(&DiffForm) -> DiffForm + Send + Sync + 'static,
    ) -> Self {
        GradedOperator { degree, parity, action: Arc::new(action) }
    }

    pub fn apply(&self, w: &DiffForm) -> DiffForm {
        (self.action)(w)
    }

    /// `[A, B] = A B - (-1)^{pA pB} B A`.
    pub fn graded_commutator(a: &GradedOperator, b: &GradedOperator) -> GradedOperator {
        let sign = match (a.parity, b.parity) {
            (Parity::Odd, Parity::Odd) => -1i64,
            _ => 1,
        };
        let (fa, fb) = (a.action.clone(), b.action.clone());
        GradedOperator::new(a.degree + b.degree, a.parity.xor(b.parity), move |w| {
            let ab = fa(&fb(w));
            let ba = fb(&fa(w));
            if sign >= 0 {
                ab.sub(&ba)
            } else {
                ab.add(&ba)
            }
        })
    }

    /// Pointwise sum of two operators of equal degree and parity.
    pub fn sum(a: &GradedOperator, b: &GradedOperator) -> GradedOperator {
        assert_eq!(a.degree, b.degree);
        assert_eq!(a.parity, b.parity);
        let (fa, fb) = (a.action.clone(), b.action.clone());
        GradedOperator::new(a.degree, a.parity, move |w| fa(w).add(&fb(w)))
    }
}

/// The exterior derivative as a graded operator.
pub fn d_operator() -> GradedOperator {
    GradedOperator::new(1, Parity::Odd, ext_d)
}

/// `i_N` as a graded operator (even, degree 0).
pub fn i_n_operator(n: &EndoField) -> GradedOperator {
    let n = n.clone();
    GradedOperator::new(0, Parity::Even, move |w| int_endo(&n, w))
}

/// Interior product by a bivector (even, degree -2).
pub fn i_biv_operator(p: &Multivector) -> GradedOperator {
    let p = p.clone();
    GradedOperator::new(-2, Parity::Even, move |w| int_biv(&p, w))
}

/// `d_N = [i_N, d]`, odd of degree +1; on functions `d_N f = N* df`.
pub fn d_n_operator(n: &EndoField) -> GradedOperator {
    GradedOperator::graded_commutator(&i_n_operator(n), &d_operator())
}

/// Apply `d_N` directly: `d_N w = i_N(dw) - d(i_N w)`.
pub fn d_n_apply(n: &EndoField, w: &DiffForm) -> DiffForm {
    int_endo(n, &ext_d(w)).sub(&ext_d(&int_endo(n, w)))
}

/// The derived-bracket operator of the pair (N, P): odd, degree -1.
///
/// With the pairing-normalized interior products used in this crate, the
/// operator that contracts the concomitant trace identity and, on
/// compatible pairs, acts as the interior product of `1/2 P d Tr N`, is
///
/// ```text
/// [d_N, i_P] + [i_{NP}, d]
/// ```
///
/// whose action on a 1-form is `i_P d(N* a) - i_{NP}(da)`. The `NP`
/// interior product requires NP to be a bivector, so the pair must be
/// admissible.
pub fn derived_bracket_op(n: &EndoField, p: &Multivector) -> Result<GradedOperator, TensorError> {
    let np = n.compose_bivector(p).into_bivector()?;
    let c1 = GradedOperator::graded_commutator(&d_n_operator(n), &i_biv_operator(p));
    let c2 = GradedOperator::graded_commutator(&i_biv_operator(&np), &d_operator());
    Ok(GradedOperator::sum(&c1, &c2))
}
