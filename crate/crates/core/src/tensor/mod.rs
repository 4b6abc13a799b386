//! Tensor field containers on a chart: antisymmetric multivectors and
//! differential forms of any degree, plus (1,1)-tensor fields.
//!
//! Components are stored sparsely, keyed by strictly increasing 1-based
//! index tuples; access through an arbitrary tuple resolves the permutation
//! sign. A degree-0 object is a single component at the empty tuple.

pub mod endo;

use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;
use std::sync::Arc;

use thiserror::Error;

use crate::chart::{same_chart, Chart};
use crate::expr::RatFunc;

pub use endo::{ContraTensor2, EndoField};

#[derive(Debug, Error, PartialEq)]
pub enum TensorError {
    #[error("values live on different charts")]
    ChartMismatch,
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("tensor is not skew-symmetric at ({0}, {1})")]
    NotSkew(usize, usize),
    #[error("index {0} out of range 1..={1}")]
    IndexOutOfRange(usize, usize),
}

/// Marker for contravariant components (multivector fields).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Contra {}
/// Marker for covariant components (differential forms).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cov {}

/// Strictly increasing 1-based index tuple.
pub type IdxTuple = Vec<u8>;

/// Sort an index tuple, returning the permutation sign, or `None` when an
/// index repeats.
pub fn sort_signed(idx: &[u8]) -> Option<(IdxTuple, i8)> {
    let mut v = idx.to_vec();
    let mut sign = 1i8;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    for w in v.windows(2) {
        if w[0] == w[1] {
            return None;
        }
    }
    Some((v, sign))
}

/// Merge two disjoint increasing tuples, returning the shuffle sign, or
/// `None` if they intersect.
fn merge_signed(a: &[u8], b: &[u8]) -> Option<(IdxTuple, i8)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    let mut sign = 1i8;
    while i < a.len() && j < b.len() {
        if a[i] == b[j] {
            return None;
        }
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            // b[j] jumps over the remaining a-entries
            if (a.len() - i) % 2 == 1 {
                sign = -sign;
            }
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some((out, sign))
}

/// Antisymmetric degree-k tensor field; the variance is a phantom marker so
/// multivectors and forms share one implementation.
pub struct Alt<V> {
    chart: Arc<Chart>,
    degree: usize,
    comps: BTreeMap<IdxTuple, RatFunc>,
    _variance: PhantomData<V>,
}

/// Antisymmetric contravariant tensor field (multivector field).
pub type Multivector = Alt<Contra>;
/// Antisymmetric covariant tensor field (differential form).
pub type DiffForm = Alt<Cov>;

impl<V> Clone for Alt<V> {
    fn clone(&self) -> Self {
        Alt {
            chart: self.chart.clone(),
            degree: self.degree,
            comps: self.comps.clone(),
            _variance: PhantomData,
        }
    }
}

impl<V> PartialEq for Alt<V> {
    fn eq(&self, other: &Self) -> bool {
        if !same_chart(&self.chart, &other.chart) {
            return false;
        }
        if self.comps.is_empty() && other.comps.is_empty() {
            // all zero tensors are the same zero
            return true;
        }
        self.degree == other.degree && self.comps == other.comps
    }
}

impl<V> fmt::Debug for Alt<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Alt(deg {}, {{", self.degree)?;
        for (idx, c) in &self.comps {
            write!(f, " {:?}: {},", idx, c)?;
        }
        write!(f, " }})")
    }
}

impl<V> Alt<V> {
    pub fn zero(chart: &Arc<Chart>, degree: usize) -> Self {
        Alt { chart: chart.clone(), degree, comps: BTreeMap::new(), _variance: PhantomData }
    }

    /// Degree-0 wrapper around a function.
    pub fn scalar(f: RatFunc) -> Self {
        let chart = f.chart().clone();
        let mut t = Self::zero(&chart, 0);
        if !f.is_zero() {
            t.comps.insert(Vec::new(), f);
        }
        t
    }

    /// Basis element for a strictly increasing tuple with unit coefficient.
    pub fn basis(chart: &Arc<Chart>, idx: &[u8]) -> Self {
        let mut t = Self::zero(chart, idx.len());
        t.insert(idx, RatFunc::one(chart));
        t
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    /// Stored (strictly increasing) components.
    pub fn components(&self) -> impl Iterator<Item = (&IdxTuple, &RatFunc)> {
        self.comps.iter()
    }

    /// First stored component, for deterministic failure witnesses.
    pub fn first_component(&self) -> Option<(&IdxTuple, &RatFunc)> {
        self.comps.iter().next()
    }

    /// Component at an arbitrary tuple, resolving permutation signs;
    /// zero for repeated indices.
    pub fn get(&self, idx: &[u8]) -> RatFunc {
        debug_assert_eq!(idx.len(), self.degree);
        match sort_signed(idx) {
            None => RatFunc::zero(&self.chart),
            Some((key, sign)) => match self.comps.get(&key) {
                None => RatFunc::zero(&self.chart),
                Some(c) => {
                    if sign >= 0 {
                        c.clone()
                    } else {
                        c.neg()
                    }
                }
            },
        }
    }

    /// The unique component of a degree-0 tensor.
    pub fn scalar_value(&self) -> RatFunc {
        debug_assert_eq!(self.degree, 0);
        self.get(&[])
    }

    /// Add `value` into the component at an arbitrary tuple (sign-resolved).
    pub fn insert(&mut self, idx: &[u8], value: RatFunc) {
        debug_assert_eq!(idx.len(), self.degree);
        if value.is_zero() {
            return;
        }
        if idx.iter().any(|&i| i as usize > self.chart.dim() || i == 0) {
            panic!("index tuple {:?} out of range for chart {}", idx, self.chart);
        }
        if let Some((key, sign)) = sort_signed(idx) {
            let add = if sign >= 0 { value } else { value.neg() };
            let entry = self.comps.entry(key);
            use std::collections::btree_map::Entry;
            match entry {
                Entry::Vacant(v) => {
                    v.insert(add);
                }
                Entry::Occupied(mut o) => {
                    let s = o.get().add(&add);
                    if s.is_zero() {
                        o.remove();
                    } else {
                        *o.get_mut() = s;
                    }
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert!(same_chart(&self.chart, &other.chart), "chart mismatch");
        // A zero tensor stands in for the zero of any degree: operators of
        // negative degree clamp at 0 on low-degree inputs.
        if self.degree != other.degree {
            if self.is_zero() {
                return other.clone();
            }
            if other.is_zero() {
                return self.clone();
            }
            panic!("degree mismatch: {} vs {}", self.degree, other.degree);
        }
        let mut out = self.clone();
        for (idx, c) in &other.comps {
            out.insert(idx, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero(&self.chart, self.degree);
        for (idx, c) in &self.comps {
            out.comps.insert(idx.clone(), c.neg());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, f: &RatFunc) -> Self {
        let mut out = Self::zero(&self.chart, self.degree);
        if f.is_zero() {
            return out;
        }
        for (idx, c) in &self.comps {
            let v = c.mul(f);
            if !v.is_zero() {
                out.comps.insert(idx.clone(), v);
            }
        }
        out
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&RatFunc::from_int(&self.chart, k))
    }

    /// Graded-commutative exterior product.
    pub fn wedge(&self, other: &Self) -> Self {
        assert!(same_chart(&self.chart, &other.chart), "chart mismatch");
        let deg = self.degree + other.degree;
        let mut out = Self::zero(&self.chart, deg);
        if deg > self.chart.dim() {
            return out;
        }
        for (ia, ca) in &self.comps {
            for (ib, cb) in &other.comps {
                if let Some((key, sign)) = merge_signed(ia, ib) {
                    let v = ca.mul(cb);
                    let v = if sign >= 0 { v } else { v.neg() };
                    out.insert(&key, v);
                }
            }
        }
        out
    }

    /// Components as a dense vector, for degree-1 tensors.
    pub fn vector_components(&self) -> Vec<RatFunc> {
        debug_assert_eq!(self.degree, 1);
        (1..=self.chart.dim() as u8).map(|i| self.get(&[i])).collect()
    }

    /// Build a degree-1 tensor from dense components.
    pub fn from_vector(chart: &Arc<Chart>, comps: Vec<RatFunc>) -> Self {
        debug_assert_eq!(comps.len(), chart.dim());
        let mut t = Self::zero(chart, 1);
        for (pos, c) in comps.into_iter().enumerate() {
            t.insert(&[pos as u8 + 1], c);
        }
        t
    }

    /// `(c_1, c_2, ..., c_n)` for degree 1; used in reports.
    pub fn tuple_string(&self) -> String {
        let comps = self.vector_components();
        let strs: Vec<String> = comps.iter().map(|c| c.to_expr_string()).collect();
        format!("({})", strs.join(", "))
    }
}

/// All strictly increasing tuples of length `k` from `1..=n`.
pub fn increasing_tuples(n: usize, k: usize) -> Vec<IdxTuple> {
    fn rec(start: u8, n: u8, k: usize, cur: &mut IdxTuple, out: &mut Vec<IdxTuple>) {
        if k == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..=n {
            cur.push(i);
            rec(i + 1, n, k - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(1, n as u8, k, &mut Vec::new(), &mut out);
    }
    out
}

/// Pairing of a form and a multivector of equal degree:
/// sum over increasing tuples of the componentwise product, so
/// `<dx^I, d/dx^I> = 1` for each basis tuple.
pub fn pairing(omega: &DiffForm, a: &Multivector) -> Result<RatFunc, TensorError> {
    if !same_chart(omega.chart(), a.chart()) {
        return Err(TensorError::ChartMismatch);
    }
    if omega.degree() != a.degree() {
        return Err(TensorError::DegreeMismatch(omega.degree(), a.degree()));
    }
    let mut acc = RatFunc::zero(omega.chart());
    for (idx, c) in omega.components() {
        let av = a.get(idx);
        if !av.is_zero() {
            acc = acc.add(&c.mul(&av));
        }
    }
    Ok(acc)
}

/// Contraction of a 1-form into a bivector: `(P a)^j = sum_i P^{ij} a_i`.
pub fn bivector_sharp(p: &Multivector, alpha: &DiffForm) -> Result<Multivector, TensorError> {
    if !same_chart(p.chart(), alpha.chart()) {
        return Err(TensorError::ChartMismatch);
    }
    debug_assert_eq!(p.degree(), 2);
    debug_assert_eq!(alpha.degree(), 1);
    let n = p.chart().dim() as u8;
    let mut out = Multivector::zero(p.chart(), 1);
    for j in 1..=n {
        let mut acc = RatFunc::zero(p.chart());
        for i in 1..=n {
            if i == j {
                continue;
            }
            let pij = p.get(&[i, j]);
            if pij.is_zero() {
                continue;
            }
            let ai = alpha.get(&[i]);
            if !ai.is_zero() {
                acc = acc.add(&pij.mul(&ai));
            }
        }
        out.insert(&[j], acc);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn chart2() -> Arc<Chart> {
        Chart::new(vec!["x", "y"]).unwrap()
    }

    fn rf(c: &Arc<Chart>, s: &str) -> RatFunc {
        parse_expr(s, c).unwrap()
    }

    #[test]
    fn accessor_resolves_signs() {
        let c = chart2();
        let mut p = Multivector::zero(&c, 2);
        p.insert(&[1, 2], RatFunc::one(&c));
        assert_eq!(p.get(&[2, 1]), RatFunc::one(&c).neg());
        assert!(p.get(&[1, 1]).is_zero());
    }

    #[test]
    fn wedge_basis() {
        let c = chart2();
        let d1 = Multivector::basis(&c, &[1]);
        let d2 = Multivector::basis(&c, &[2]);
        let w = d1.wedge(&d2);
        assert_eq!(w.get(&[1, 2]), RatFunc::one(&c));
        // nilpotency
        let dx = DiffForm::basis(&c, &[1]);
        assert!(dx.wedge(&dx).is_zero());
    }

    #[test]
    fn wedge_bilinear() {
        let c = chart2();
        let a = DiffForm::basis(&c, &[1]).scale(&rf(&c, "x"));
        let b = DiffForm::basis(&c, &[2]).scale(&rf(&c, "y"));
        let w = a.wedge(&b);
        assert_eq!(w.get(&[1, 2]), rf(&c, "x*y"));
    }

    #[test]
    fn wedge_graded_commutative() {
        let c = Chart::new(vec!["x", "y", "z"]).unwrap();
        let a = DiffForm::basis(&c, &[1]).scale(&parse_expr("x", &c).unwrap());
        let b = DiffForm::basis(&c, &[2, 3]);
        // deg 1 * deg 2: a^b = (+1)^{1*2} b^a
        assert_eq!(a.wedge(&b), b.wedge(&a));
        let a2 = DiffForm::basis(&c, &[2]);
        // deg 1 * deg 1: anticommute
        assert_eq!(a.wedge(&a2), a2.wedge(&a).neg());
    }

    #[test]
    fn pairing_normalization() {
        let c = chart2();
        let w = DiffForm::basis(&c, &[1, 2]);
        let a = Multivector::basis(&c, &[1, 2]);
        assert!(pairing(&w, &a).unwrap().is_one());
        // orthogonality
        let xdx = DiffForm::basis(&c, &[1]).scale(&rf(&c, "x"));
        let dy = Multivector::basis(&c, &[2]);
        assert!(pairing(&xdx, &dy).unwrap().is_zero());
    }

    #[test]
    fn top_pairing_with_density() {
        let c = chart2();
        let rho = rf(&c, "1 + x^2");
        let mu = DiffForm::basis(&c, &[1, 2]).scale(&rho);
        let lambda = Multivector::basis(&c, &[1, 2]).scale(&rho.inv().unwrap());
        assert!(pairing(&mu, &lambda).unwrap().is_one());
    }

    #[test]
    fn sharp_convention() {
        let c = chart2();
        let mut p = Multivector::zero(&c, 2);
        p.insert(&[1, 2], RatFunc::one(&c));
        // P dx = d/dy
        let dx = DiffForm::basis(&c, &[1]);
        let v = bivector_sharp(&p, &dx).unwrap();
        assert_eq!(v, Multivector::basis(&c, &[2]));
        // P dy = -d/dx
        let dy = DiffForm::basis(&c, &[2]);
        let w = bivector_sharp(&p, &dy).unwrap();
        assert_eq!(w, Multivector::basis(&c, &[1]).neg());
        // P 0 = 0
        let z = DiffForm::zero(&c, 1);
        assert!(bivector_sharp(&p, &z).unwrap().is_zero());
    }

    #[test]
    fn tuples() {
        assert_eq!(increasing_tuples(3, 2), vec![vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(increasing_tuples(2, 3), Vec::<IdxTuple>::new());
        assert_eq!(increasing_tuples(2, 0), vec![Vec::<u8>::new()]);
    }
}
