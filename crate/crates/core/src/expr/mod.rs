//! Exact multivariate rational functions over a chart, in canonical form.
//!
//! Canonical form: numerator and denominator are coprime polynomials, the
//! denominator is monic under the graded-lex order, and zero is uniquely
//! `0/1`. Equality of canonical forms is structural, so the zero test used
//! by every identity check in the crate is a syntactic comparison.

pub mod parse;
pub mod poly;

use std::fmt;
use std::sync::Arc;

use num::{BigRational, One, Signed, Zero};
use thiserror::Error;

use crate::chart::{same_chart, Chart};
use poly::{gcd, Monomial, Poly};

pub use parse::parse_expr;

/// Scalar coefficients: arbitrary-precision rationals, always reduced with a
/// positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Error, PartialEq)]
pub enum ExprError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero cannot be raised to a negative power")]
    ZeroToNegativePower,
    #[error("coordinate index {0} out of range 1..={1}")]
    IndexOutOfRange(usize, usize),
    #[error("denominator vanishes at the evaluation point")]
    PoleAtPoint,
    #[error("point has {got} entries, chart has dimension {want}")]
    PointDimension { got: usize, want: usize },
    #[error("values live on different charts")]
    ChartMismatch,
}

/// A rational function on a chart, stored as a coprime fraction of sparse
/// polynomials with a monic denominator.
#[derive(Debug, Clone, PartialEq)]
pub struct RatFunc {
    chart: Arc<Chart>,
    num: Poly,
    den: Poly,
}

impl RatFunc {
    fn make(chart: Arc<Chart>, num: Poly, den: Poly) -> Result<RatFunc, ExprError> {
        if den.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RatFunc { chart, num, den: Poly::one(den.nvars()) });
        }
        if den.is_one() {
            return Ok(RatFunc { chart, num, den });
        }
        if let Some(c) = den.constant_value() {
            let one = Poly::one(num.nvars());
            let num = num.scale(&(BigRational::one() / c));
            return Ok(RatFunc { chart, num, den: one });
        }
        let g = gcd(&num, &den);
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        // Monic denominator.
        let lc = den.leading_term().unwrap().1.clone();
        if !lc.is_one() {
            let inv = BigRational::one() / lc;
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        Ok(RatFunc { chart, num, den })
    }

    pub fn zero(chart: &Arc<Chart>) -> RatFunc {
        let n = chart.dim();
        RatFunc { chart: chart.clone(), num: Poly::zero(n), den: Poly::one(n) }
    }

    pub fn one(chart: &Arc<Chart>) -> RatFunc {
        Self::from_int(chart, 1)
    }

    pub fn from_int(chart: &Arc<Chart>, c: i64) -> RatFunc {
        let n = chart.dim();
        RatFunc { chart: chart.clone(), num: Poly::from_int(n, c), den: Poly::one(n) }
    }

    pub fn from_rational(chart: &Arc<Chart>, c: Rational) -> RatFunc {
        let n = chart.dim();
        RatFunc { chart: chart.clone(), num: Poly::constant(n, c), den: Poly::one(n) }
    }

    /// The coordinate function with 1-based index `i`.
    pub fn coord(chart: &Arc<Chart>, i: usize) -> Result<RatFunc, ExprError> {
        if i < 1 || i > chart.dim() {
            return Err(ExprError::IndexOutOfRange(i, chart.dim()));
        }
        let n = chart.dim();
        Ok(RatFunc { chart: chart.clone(), num: Poly::var(n, i - 1), den: Poly::one(n) })
    }

    pub fn from_poly(chart: &Arc<Chart>, p: Poly) -> RatFunc {
        debug_assert_eq!(p.nvars(), chart.dim());
        RatFunc { chart: chart.clone(), num: p, den: Poly::one(chart.dim()) }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_one()
    }

    /// Value as a constant, if the function is one.
    pub fn constant_value(&self) -> Option<Rational> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    fn check_chart(&self, other: &RatFunc) -> Result<(), ExprError> {
        if same_chart(&self.chart, &other.chart) {
            Ok(())
        } else {
            Err(ExprError::ChartMismatch)
        }
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        self.try_add(other).expect("chart mismatch in add")
    }

    pub fn try_add(&self, other: &RatFunc) -> Result<RatFunc, ExprError> {
        self.check_chart(other)?;
        if self.den.is_one() && other.den.is_one() {
            return Ok(RatFunc {
                chart: self.chart.clone(),
                num: self.num.add(&other.num),
                den: Poly::one(self.num.nvars()),
            });
        }
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        RatFunc::make(self.chart.clone(), num, den)
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { chart: self.chart.clone(), num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        self.try_mul(other).expect("chart mismatch in mul")
    }

    pub fn try_mul(&self, other: &RatFunc) -> Result<RatFunc, ExprError> {
        self.check_chart(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(RatFunc::zero(&self.chart));
        }
        if self.den.is_one() && other.den.is_one() {
            return Ok(RatFunc {
                chart: self.chart.clone(),
                num: self.num.mul(&other.num),
                den: Poly::one(self.num.nvars()),
            });
        }
        RatFunc::make(self.chart.clone(), self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn div(&self, other: &RatFunc) -> Result<RatFunc, ExprError> {
        self.check_chart(other)?;
        if other.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        RatFunc::make(self.chart.clone(), self.num.mul(&other.den), self.den.mul(&other.num))
    }

    pub fn inv(&self) -> Result<RatFunc, ExprError> {
        RatFunc::one(&self.chart).div(self)
    }

    pub fn pow(&self, e: i64) -> Result<RatFunc, ExprError> {
        if e < 0 {
            if self.is_zero() {
                return Err(ExprError::ZeroToNegativePower);
            }
            return self.inv()?.pow(-e);
        }
        let mut out = RatFunc::one(&self.chart);
        for _ in 0..e {
            out = out.mul(self);
        }
        Ok(out)
    }

    pub fn scale_int(&self, c: i64) -> RatFunc {
        self.mul(&RatFunc::from_int(&self.chart, c))
    }

    pub fn scale(&self, c: &Rational) -> RatFunc {
        self.mul(&RatFunc::from_rational(&self.chart, c.clone()))
    }

    /// Exact partial derivative with respect to the 1-based coordinate `i`.
    pub fn partial(&self, i: usize) -> Result<RatFunc, ExprError> {
        let n = self.chart.dim();
        if i < 1 || i > n {
            return Err(ExprError::IndexOutOfRange(i, n));
        }
        let pos = i - 1;
        if self.den.is_one() {
            return Ok(RatFunc {
                chart: self.chart.clone(),
                num: self.num.derivative(pos),
                den: Poly::one(n),
            });
        }
        // Quotient rule: (n'd - nd') / d^2.
        let num = self
            .num
            .derivative(pos)
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative(pos)));
        let den = self.den.mul(&self.den);
        RatFunc::make(self.chart.clone(), num, den)
    }

    /// Exact value at a rational point.
    pub fn eval(&self, point: &[Rational]) -> Result<Rational, ExprError> {
        if point.len() != self.chart.dim() {
            return Err(ExprError::PointDimension { got: point.len(), want: self.chart.dim() });
        }
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(ExprError::PoleAtPoint);
        }
        Ok(self.num.eval(point) / d)
    }
}

fn fmt_coefficient(c: &BigRational) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn fmt_monomial(chart: &Chart, m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (pos, &e) in m.0.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(chart.name(pos + 1).to_string()),
            _ => parts.push(format!("{}^{}", chart.name(pos + 1), e)),
        }
    }
    parts.join("*")
}

/// Canonical string form of a polynomial: terms in descending graded-lex
/// order joined with explicit signs; parses back to the same polynomial.
fn fmt_poly(chart: &Chart, p: &Poly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    let terms: Vec<_> = p.terms().collect();
    for (k, (m, c)) in terms.iter().rev().enumerate() {
        let negative = c.is_negative();
        let abs = if negative { -*c } else { (*c).clone() };
        if k == 0 {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        let ms = fmt_monomial(chart, m);
        if ms.is_empty() {
            out.push_str(&fmt_coefficient(&abs));
        } else if abs.is_one() {
            out.push_str(&ms);
        } else {
            out.push_str(&fmt_coefficient(&abs));
            out.push('*');
            out.push_str(&ms);
        }
    }
    out
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_expr_string())
    }
}

impl RatFunc {
    /// Canonical printable form; `parse_expr` of the output reproduces the
    /// value exactly.
    pub fn to_expr_string(&self) -> String {
        if self.den.is_one() {
            fmt_poly(&self.chart, &self.num)
        } else {
            format!("({})/({})", fmt_poly(&self.chart, &self.num), fmt_poly(&self.chart, &self.den))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Chart;
    use num::BigInt;

    fn chart2() -> Arc<Chart> {
        Chart::new(vec!["x", "y"]).unwrap()
    }

    fn x(c: &Arc<Chart>) -> RatFunc {
        RatFunc::coord(c, 1).unwrap()
    }
    fn y(c: &Arc<Chart>) -> RatFunc {
        RatFunc::coord(c, 2).unwrap()
    }

    #[test]
    fn add_inverse_is_zero() {
        let c = chart2();
        assert!(x(&c).add(&x(&c).neg()).is_zero());
    }

    #[test]
    fn mul_cancellation() {
        let c = chart2();
        let inv_x = x(&c).inv().unwrap();
        assert!(inv_x.mul(&x(&c)).is_one());
    }

    #[test]
    fn pow_expands() {
        let c = chart2();
        let lhs = x(&c).add(&y(&c)).pow(2).unwrap();
        // oracle: repeated multiplication
        let s = x(&c).add(&y(&c));
        let rhs = s.mul(&s);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn canonical_cancellation() {
        let c = chart2();
        // (x^2 - 1)/(x - 1) == x + 1
        let num = x(&c).mul(&x(&c)).sub(&RatFunc::one(&c));
        let den = x(&c).sub(&RatFunc::one(&c));
        let q = num.div(&den).unwrap();
        assert_eq!(q, x(&c).add(&RatFunc::one(&c)));
        assert!(q.sub(&x(&c).add(&RatFunc::one(&c))).is_zero());
    }

    #[test]
    fn binomial_identity_is_zero() {
        let c = chart2();
        // (x+y)^2 - x^2 - 2xy - y^2 == 0
        let s = x(&c).add(&y(&c)).pow(2).unwrap();
        let t = x(&c)
            .pow(2)
            .unwrap()
            .add(&x(&c).mul(&y(&c)).scale_int(2))
            .add(&y(&c).pow(2).unwrap());
        assert!(s.sub(&t).is_zero());
        assert!(!x(&c).sub(&y(&c)).is_zero());
    }

    #[test]
    fn quotient_rule() {
        let c = chart2();
        // d/dx (1/x) = -1/x^2
        let f = x(&c).inv().unwrap();
        let d = f.partial(1).unwrap();
        let expect = x(&c).pow(2).unwrap().inv().unwrap().neg();
        assert_eq!(d, expect);
        // d/dy (x) = 0
        assert!(x(&c).partial(2).unwrap().is_zero());
        assert_eq!(x(&c).partial(3).unwrap_err(), ExprError::IndexOutOfRange(3, 2));
    }

    #[test]
    fn eval_and_poles() {
        let c = chart2();
        let f = x(&c).add(&y(&c));
        let half = Rational::new(BigInt::from(1), BigInt::from(2));
        let third = Rational::new(BigInt::from(1), BigInt::from(3));
        let v = f.eval(&[half, third]).unwrap();
        assert_eq!(v, Rational::new(BigInt::from(5), BigInt::from(6)));
        let g = x(&c).inv().unwrap();
        assert_eq!(
            g.eval(&[Rational::zero(), Rational::one()]).unwrap_err(),
            ExprError::PoleAtPoint
        );
        let sq = x(&c).pow(2).unwrap();
        assert_eq!(sq.eval(&[Rational::from_integer(BigInt::from(3)), Rational::zero()]).unwrap(), Rational::from_integer(BigInt::from(9)));
    }

    #[test]
    fn negative_pow_of_zero_errors() {
        let c = chart2();
        assert_eq!(RatFunc::zero(&c).pow(-1).unwrap_err(), ExprError::ZeroToNegativePower);
    }

    #[test]
    fn display_canonical() {
        let c = chart2();
        let f = x(&c).scale_int(2);
        assert_eq!(f.to_expr_string(), "2*x");
        let g = x(&c).pow(2).unwrap().sub(&y(&c)).add(&RatFunc::from_int(&c, 5));
        assert_eq!(g.to_expr_string(), "x^2 - y + 5");
        let h = x(&c).div(&y(&c).add(&RatFunc::one(&c))).unwrap();
        assert_eq!(h.to_expr_string(), "(x)/(y + 1)");
        assert_eq!(RatFunc::zero(&c).to_expr_string(), "0");
        assert_eq!(x(&c).neg().to_expr_string(), "-x");
    }
}
