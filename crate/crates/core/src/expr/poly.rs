//! Sparse multivariate polynomials over arbitrary-precision rationals.
//!
//! Monomials are ordered graded-lexicographically by coordinate index
//! (total degree first, then exponents with the first coordinate most
//! significant). The leading term of a polynomial is its maximal monomial
//! under this order.
//!
//! The gcd is computed by the classical primitive polynomial remainder
//! sequence: a main variable is chosen, both inputs are split into content
//! and primitive part (the content being a recursive gcd of coefficient
//! polynomials in the remaining variables), and the primitive parts are
//! reduced by pseudo-division, taking primitive parts between steps to
//! control coefficient growth.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num::{BigInt, BigRational, One, Zero};

/// Exponent vector of a monomial; length equals the chart dimension.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u16>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, pos: usize) -> Self {
        let mut e = vec![0; nvars];
        e[pos] = 1;
        Monomial(e)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Exact quotient, if `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(Monomial(out))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial: monomial -> nonzero rational coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, BigRational::one())
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        Poly::constant(nvars, BigRational::from_integer(BigInt::from(c)))
    }

    /// The monomial x_pos (0-based position).
    pub fn var(nvars: usize, pos: usize) -> Self {
        let mut p = Poly::zero(nvars);
        p.terms.insert(Monomial::var(nvars, pos), BigRational::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.keys().next().unwrap().is_one())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && {
            let (m, c) = self.terms.iter().next().unwrap();
            m.is_one() && c.is_one()
        }
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        if self.is_zero() {
            Some(BigRational::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Leading (maximal) term under the graded-lex order.
    pub fn leading_term(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = Poly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one(self.nvars);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Partial derivative with respect to the 0-based variable position.
    pub fn derivative(&self, pos: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[pos];
            if e == 0 {
                continue;
            }
            let mut em = m.clone();
            em.0[pos] = e - 1;
            out.add_term(em, c * BigRational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Exact evaluation at a rational point (length `nvars`).
    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        debug_assert_eq!(point.len(), self.nvars);
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (pos, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    t *= &point[pos];
                }
            }
            acc += t;
        }
        acc
    }

    /// Exact division: returns `self / divisor` when the division is exact.
    ///
    /// Runs the multi-variate division algorithm against the single divisor;
    /// since leading terms under any monomial order are multiplicative, an
    /// exact quotient is found iff the remainder stays zero throughout.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        if self.is_zero() {
            return Some(Poly::zero(self.nvars));
        }
        if let Some(c) = divisor.constant_value() {
            return Some(self.scale(&(BigRational::one() / c)));
        }
        let (dm, dc) = divisor.leading_term().unwrap();
        let (dm, dc) = (dm.clone(), dc.clone());
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.nvars);
        while let Some((rm, rc)) = rem.leading_term() {
            let qm = rm.div(&dm)?;
            let qc = rc / &dc;
            let mut t = Poly::zero(self.nvars);
            t.terms.insert(qm, qc);
            quot = quot.add(&t);
            rem = rem.sub(&t.mul(divisor));
        }
        Some(quot)
    }

    /// Degree in the 0-based variable position.
    pub fn degree_in(&self, pos: usize) -> u16 {
        self.terms.keys().map(|m| m.0[pos]).max().unwrap_or(0)
    }

    /// 0-based positions of variables that actually occur.
    pub fn support_vars(&self) -> Vec<usize> {
        let mut seen = vec![false; self.nvars];
        for m in self.terms.keys() {
            for (pos, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    seen[pos] = true;
                }
            }
        }
        seen.iter().enumerate().filter(|(_, &s)| s).map(|(p, _)| p).collect()
    }

    /// View as univariate in variable `pos`: map v-degree -> coefficient
    /// polynomial (with `pos` zeroed out of the exponent vectors).
    fn univariate_in(&self, pos: usize) -> BTreeMap<u16, Poly> {
        let mut out: BTreeMap<u16, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let d = m.0[pos];
            let mut em = m.clone();
            em.0[pos] = 0;
            out.entry(d)
                .or_insert_with(|| Poly::zero(self.nvars))
                .add_term(em, c.clone());
        }
        out
    }

    fn from_univariate(nvars: usize, pos: usize, coeffs: &BTreeMap<u16, Poly>) -> Poly {
        let mut out = Poly::zero(nvars);
        for (&d, coef) in coeffs {
            for (m, c) in &coef.terms {
                let mut em = m.clone();
                em.0[pos] = d;
                out.add_term(em, c.clone());
            }
        }
        out
    }

    /// Normalize so the leading coefficient is 1. Zero stays zero.
    pub fn monic(&self) -> Poly {
        match self.leading_term() {
            None => self.clone(),
            Some((_, lc)) => {
                let inv = BigRational::one() / lc;
                self.scale(&inv)
            }
        }
    }
}

/// Pseudo-remainder of `a` by `b` viewed as univariate in `pos`
/// (deg_pos b >= 1, b nonzero): repeatedly eliminates the leading
/// v-coefficient of `a` after multiplying through by lc(b).
fn pseudo_rem(a: &Poly, b: &Poly, pos: usize) -> Poly {
    let bu = b.univariate_in(pos);
    let (&db, blc) = bu.iter().next_back().unwrap();
    let mut ru = a.univariate_in(pos);
    loop {
        let (&dr, _) = match ru.iter().next_back() {
            Some(t) => t,
            None => return Poly::zero(a.nvars),
        };
        if dr < db {
            return Poly::from_univariate(a.nvars, pos, &ru);
        }
        let rlc = ru.get(&dr).unwrap().clone();
        // r <- lc(b) * r - lc(r) * v^(dr-db) * b
        let mut next: BTreeMap<u16, Poly> = BTreeMap::new();
        for (&d, c) in &ru {
            if d == dr {
                continue;
            }
            let v = c.mul(blc);
            if !v.is_zero() {
                next.insert(d, v);
            }
        }
        for (&d, c) in &bu {
            if d == db {
                continue;
            }
            let shifted = d + (dr - db);
            let sub = rlc.mul(c);
            let entry = next.entry(shifted).or_insert_with(|| Poly::zero(a.nvars));
            *entry = entry.sub(&sub);
            if entry.is_zero() {
                next.remove(&shifted);
            }
        }
        ru = next;
    }
}

/// Content of `a` in variable `pos`: gcd of its univariate coefficients.
fn content_in(a: &Poly, pos: usize) -> Poly {
    let mut acc = Poly::zero(a.nvars);
    for (_, c) in a.univariate_in(pos) {
        acc = gcd(&acc, &c);
        if acc.is_one() {
            break;
        }
    }
    acc
}

/// Multivariate gcd over the rationals, normalized monic.
///
/// gcd(0, g) = monic(g); gcd of two nonzero constants is 1.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    debug_assert_eq!(a.nvars(), b.nvars());
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one(a.nvars);
    }
    // Main variable: the highest position occurring in either operand.
    let pos = {
        let sa = a.support_vars();
        let sb = b.support_vars();
        *sa.iter().chain(sb.iter()).max().unwrap()
    };
    if a.degree_in(pos) == 0 || b.degree_in(pos) == 0 {
        // The main variable occurs in only one operand; the gcd cannot
        // involve it, so it divides both contents.
        let ca = content_in(a, pos);
        let cb = content_in(b, pos);
        return gcd(&ca, &cb);
    }
    let cont_a = content_in(a, pos);
    let cont_b = content_in(b, pos);
    let cont_gcd = gcd(&cont_a, &cont_b);
    let mut f = a.div_exact(&cont_a).expect("content divides");
    let mut g = b.div_exact(&cont_b).expect("content divides");
    if f.degree_in(pos) < g.degree_in(pos) {
        std::mem::swap(&mut f, &mut g);
    }
    loop {
        let r = pseudo_rem(&f, &g, pos);
        if r.is_zero() {
            let cg = content_in(&g, pos);
            let prim = g.div_exact(&cg).expect("content divides");
            return cont_gcd.mul(&prim).monic();
        }
        if r.degree_in(pos) == 0 {
            // Nontrivial remainder free of the main variable: the primitive
            // parts are coprime.
            return cont_gcd.monic();
        }
        let cr = content_in(&r, pos);
        f = g;
        g = r.div_exact(&cr).expect("content divides");
    }
}
