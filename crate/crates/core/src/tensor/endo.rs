//! (1,1)-tensor fields and general contravariant 2-tensors.
//!
//! An `EndoField` stores the matrix N^i_j (upper index = row). The same
//! letter acts on vector fields, and through its transpose on 1-forms, so
//! that `<N* a, X> = <a, N X>` holds identically.

use std::fmt;
use std::sync::Arc;

use crate::chart::{same_chart, Chart};
use crate::expr::RatFunc;

use super::{DiffForm, Multivector, TensorError};

/// A (1,1)-tensor field as an n x n matrix of rational functions.
#[derive(Clone, PartialEq)]
pub struct EndoField {
    chart: Arc<Chart>,
    // m[i][j] = N^{i+1}_{j+1}
    m: Vec<Vec<RatFunc>>,
}

impl fmt::Debug for EndoField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "EndoField [")?;
        for row in &self.m {
            let cells: Vec<String> = row.iter().map(|c| c.to_expr_string()).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

impl EndoField {
    pub fn zero(chart: &Arc<Chart>) -> Self {
        let n = chart.dim();
        let m = vec![vec![RatFunc::zero(chart); n]; n];
        EndoField { chart: chart.clone(), m }
    }

    pub fn identity(chart: &Arc<Chart>) -> Self {
        let mut e = Self::zero(chart);
        for i in 1..=chart.dim() {
            e.set(i, i, RatFunc::one(chart));
        }
        e
    }

    /// f times the identity.
    pub fn scalar(chart: &Arc<Chart>, f: &RatFunc) -> Self {
        let mut e = Self::zero(chart);
        for i in 1..=chart.dim() {
            e.set(i, i, f.clone());
        }
        e
    }

    pub fn from_rows(chart: &Arc<Chart>, rows: Vec<Vec<RatFunc>>) -> Self {
        assert_eq!(rows.len(), chart.dim());
        for r in &rows {
            assert_eq!(r.len(), chart.dim());
        }
        EndoField { chart: chart.clone(), m: rows }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    /// N^i_j with 1-based indices.
    pub fn get(&self, i: usize, j: usize) -> &RatFunc {
        &self.m[i - 1][j - 1]
    }

    pub fn set(&mut self, i: usize, j: usize, v: RatFunc) {
        self.m[i - 1][j - 1] = v;
    }

    pub fn add(&self, other: &EndoField) -> EndoField {
        assert!(same_chart(&self.chart, &other.chart));
        let n = self.chart.dim();
        let mut out = Self::zero(&self.chart);
        for i in 1..=n {
            for j in 1..=n {
                out.set(i, j, self.get(i, j).add(other.get(i, j)));
            }
        }
        out
    }

    pub fn sub(&self, other: &EndoField) -> EndoField {
        assert!(same_chart(&self.chart, &other.chart));
        let n = self.chart.dim();
        let mut out = Self::zero(&self.chart);
        for i in 1..=n {
            for j in 1..=n {
                out.set(i, j, self.get(i, j).sub(other.get(i, j)));
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.m.iter().all(|row| row.iter().all(|c| c.is_zero()))
    }

    /// (N X)^i = N^i_j X^j.
    pub fn apply(&self, x: &Multivector) -> Multivector {
        assert!(same_chart(&self.chart, x.chart()), "chart mismatch");
        debug_assert_eq!(x.degree(), 1);
        let n = self.chart.dim();
        let xc = x.vector_components();
        let mut comps = Vec::with_capacity(n);
        for i in 1..=n {
            let mut acc = RatFunc::zero(&self.chart);
            for j in 1..=n {
                if !xc[j - 1].is_zero() {
                    acc = acc.add(&self.get(i, j).mul(&xc[j - 1]));
                }
            }
            comps.push(acc);
        }
        Multivector::from_vector(&self.chart, comps)
    }

    /// (N* a)_j = N^i_j a_i, the transpose action on 1-forms.
    pub fn transpose_apply(&self, alpha: &DiffForm) -> DiffForm {
        assert!(same_chart(&self.chart, alpha.chart()), "chart mismatch");
        debug_assert_eq!(alpha.degree(), 1);
        let n = self.chart.dim();
        let ac = alpha.vector_components();
        let mut comps = Vec::with_capacity(n);
        for j in 1..=n {
            let mut acc = RatFunc::zero(&self.chart);
            for i in 1..=n {
                if !ac[i - 1].is_zero() {
                    acc = acc.add(&self.get(i, j).mul(&ac[i - 1]));
                }
            }
            comps.push(acc);
        }
        DiffForm::from_vector(&self.chart, comps)
    }

    /// Matrix product (self . other), acting first with `other`.
    pub fn compose(&self, other: &EndoField) -> EndoField {
        assert!(same_chart(&self.chart, &other.chart));
        let n = self.chart.dim();
        let mut out = Self::zero(&self.chart);
        for i in 1..=n {
            for j in 1..=n {
                let mut acc = RatFunc::zero(&self.chart);
                for k in 1..=n {
                    let a = self.get(i, k);
                    if a.is_zero() {
                        continue;
                    }
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        acc = acc.add(&a.mul(b));
                    }
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    /// N^k, with N^0 = Id.
    pub fn power(&self, k: usize) -> EndoField {
        let mut out = Self::identity(&self.chart);
        for _ in 0..k {
            out = out.compose(self);
        }
        out
    }

    pub fn trace(&self) -> RatFunc {
        let mut acc = RatFunc::zero(&self.chart);
        for i in 1..=self.chart.dim() {
            acc = acc.add(self.get(i, i));
        }
        acc
    }

    /// (N P)^{ij} = sum_k N^i_k P^{kj}, as a full (not yet skew) matrix.
    pub fn compose_bivector(&self, p: &Multivector) -> ContraTensor2 {
        assert!(same_chart(&self.chart, p.chart()), "chart mismatch");
        debug_assert_eq!(p.degree(), 2);
        let n = self.chart.dim();
        let mut out = ContraTensor2::zero(&self.chart);
        for i in 1..=n {
            for j in 1..=n {
                let mut acc = RatFunc::zero(&self.chart);
                for k in 1..=n {
                    let a = self.get(i, k);
                    if a.is_zero() {
                        continue;
                    }
                    let b = p.get(&[k as u8, j as u8]);
                    if !b.is_zero() {
                        acc = acc.add(&a.mul(&b));
                    }
                }
                out.set(i, j, acc);
            }
        }
        out
    }
}

/// A full contravariant 2-tensor, not assumed antisymmetric; the
/// intermediate shape of N P before the skew-symmetry check.
#[derive(Clone, PartialEq)]
pub struct ContraTensor2 {
    chart: Arc<Chart>,
    m: Vec<Vec<RatFunc>>,
}

impl fmt::Debug for ContraTensor2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ContraTensor2 [")?;
        for row in &self.m {
            let cells: Vec<String> = row.iter().map(|c| c.to_expr_string()).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

impl ContraTensor2 {
    pub fn zero(chart: &Arc<Chart>) -> Self {
        let n = chart.dim();
        ContraTensor2 { chart: chart.clone(), m: vec![vec![RatFunc::zero(chart); n]; n] }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn get(&self, i: usize, j: usize) -> &RatFunc {
        &self.m[i - 1][j - 1]
    }

    pub fn set(&mut self, i: usize, j: usize, v: RatFunc) {
        self.m[i - 1][j - 1] = v;
    }

    /// True iff T^{ij} + T^{ji} = 0 identically.
    pub fn is_skew(&self) -> bool {
        let n = self.chart.dim();
        for i in 1..=n {
            for j in i..=n {
                if !self.get(i, j).add(self.get(j, i)).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// Cast to a bivector; fails at the first non-skew entry.
    pub fn into_bivector(self) -> Result<Multivector, TensorError> {
        let n = self.chart.dim();
        for i in 1..=n {
            for j in i..=n {
                if !self.get(i, j).add(self.get(j, i)).is_zero() {
                    return Err(TensorError::NotSkew(i, j));
                }
            }
        }
        let mut out = Multivector::zero(&self.chart, 2);
        for i in 1..=n {
            for j in (i + 1)..=n {
                out.insert(&[i as u8, j as u8], self.get(i, j).clone());
            }
        }
        Ok(out)
    }
}
