//! Recursive-descent parser for component expressions.
//!
//! Grammar (whitespace insignificant, no implicit multiplication):
//!
//! ```text
//! expr     := term { ("+" | "-") term }
//! term     := factor { ("*" | "/") factor }
//! factor   := ["-"] base [ "^" integer ]
//! base     := rational | identifier | "(" expr ")"
//! rational := integer [ "/" positive-integer ]
//! ```
//!
//! The fraction inside `rational` binds tighter than `^`, so `3/4^2`
//! means `(3/4)^2`; the `/` is consumed as part of the literal only when
//! directly followed by an integer.

use std::fmt;
use std::sync::Arc;

use num::{BigInt, BigRational, Num, Zero};
use thiserror::Error;

use super::{ExprError, RatFunc, Rational};
use crate::chart::Chart;

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("syntax error at column {pos}: expected {expected}, found {found}")]
    Syntax { pos: usize, expected: String, found: String },
    #[error("unknown identifier `{name}` at column {pos}")]
    UnknownIdentifier { name: String, pos: usize },
    #[error("division by zero at column {pos}")]
    DivisionByZeroConstant { pos: usize },
    #[error("zero raised to a negative power at column {pos}")]
    ZeroToNegativePower { pos: usize },
    #[error("exponent at column {pos} does not fit in a machine integer")]
    ExponentOverflow { pos: usize },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(s) => write!(f, "`{s}`"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::Star => write!(f, "`*`"),
            Tok::Slash => write!(f, "`/`"),
            Tok::Caret => write!(f, "`^`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
        }
    }
}

/// Token with its 1-based starting column.
type Spanned = (Tok, usize);

fn tokenize(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut toks = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let col = i + 1;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                toks.push((Tok::Plus, col));
                i += 1;
            }
            '-' => {
                toks.push((Tok::Minus, col));
                i += 1;
            }
            '*' => {
                toks.push((Tok::Star, col));
                i += 1;
            }
            '/' => {
                toks.push((Tok::Slash, col));
                i += 1;
            }
            '^' => {
                toks.push((Tok::Caret, col));
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, col));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, col));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                toks.push((Tok::Int(text[start..i].to_string()), col));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                toks.push((Tok::Ident(text[start..i].to_string()), col));
            }
            other => {
                return Err(ParseError::Syntax {
                    pos: col,
                    expected: "a token".into(),
                    found: format!("`{other}`"),
                })
            }
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    chart: &'a Arc<Chart>,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn peek2(&self) -> Option<&Spanned> {
        self.toks.get(self.pos + 1)
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> usize {
        self.peek().map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn found(&self) -> String {
        self.peek().map(|(t, _)| t.to_string()).unwrap_or_else(|| "end of input".into())
    }

    fn syntax(&self, expected: &str) -> ParseError {
        ParseError::Syntax { pos: self.here(), expected: expected.into(), found: self.found() }
    }

    fn expr(&mut self) -> Result<RatFunc, ParseError> {
        let mut acc = self.term()?;
        while let Some((tok, _)) = self.peek() {
            match tok {
                Tok::Plus => {
                    self.next();
                    acc = acc.add(&self.term()?);
                }
                Tok::Minus => {
                    self.next();
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RatFunc, ParseError> {
        let mut acc = self.factor()?;
        while let Some((tok, pos)) = self.peek().cloned() {
            match tok {
                Tok::Star => {
                    self.next();
                    acc = acc.mul(&self.factor()?);
                }
                Tok::Slash => {
                    self.next();
                    let rhs = self.factor()?;
                    acc = acc.div(&rhs).map_err(|e| match e {
                        ExprError::DivisionByZero => ParseError::DivisionByZeroConstant { pos },
                        _ => ParseError::Syntax {
                            pos,
                            expected: "a valid division".into(),
                            found: e.to_string(),
                        },
                    })?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<RatFunc, ParseError> {
        let negate = matches!(self.peek(), Some((Tok::Minus, _))) && {
            self.next();
            true
        };
        let base = self.base()?;
        let value = if matches!(self.peek(), Some((Tok::Caret, _))) {
            let (_, caret_pos) = self.next().unwrap();
            let exp = self.signed_integer()?;
            base.pow(exp).map_err(|e| match e {
                ExprError::ZeroToNegativePower => ParseError::ZeroToNegativePower { pos: caret_pos },
                _ => ParseError::Syntax {
                    pos: caret_pos,
                    expected: "a valid power".into(),
                    found: e.to_string(),
                },
            })?
        } else {
            base
        };
        Ok(if negate { value.neg() } else { value })
    }

    fn signed_integer(&mut self) -> Result<i64, ParseError> {
        let negative = matches!(self.peek(), Some((Tok::Minus, _))) && {
            self.next();
            true
        };
        match self.next() {
            Some((Tok::Int(s), pos)) => {
                let v: i64 = s.parse().map_err(|_| ParseError::ExponentOverflow { pos })?;
                Ok(if negative { -v } else { v })
            }
            _ => {
                self.pos = self.pos.saturating_sub(0);
                Err(self.syntax("an integer exponent"))
            }
        }
    }

    fn base(&mut self) -> Result<RatFunc, ParseError> {
        match self.next() {
            Some((Tok::Int(s), _)) => {
                let numer = BigInt::from_str_radix(&s, 10).expect("digits");
                // rational literal: integer "/" positive-integer, consumed
                // only when an integer follows the slash
                if matches!(self.peek(), Some((Tok::Slash, _)))
                    && matches!(self.peek2(), Some((Tok::Int(_), _)))
                {
                    let (_, slash_pos) = self.next().unwrap();
                    let (dtok, _) = self.next().unwrap();
                    let denom = match dtok {
                        Tok::Int(d) => BigInt::from_str_radix(&d, 10).expect("digits"),
                        _ => unreachable!(),
                    };
                    if denom.is_zero() {
                        return Err(ParseError::DivisionByZeroConstant { pos: slash_pos });
                    }
                    return Ok(RatFunc::from_rational(
                        self.chart,
                        Rational::new(numer, denom),
                    ));
                }
                Ok(RatFunc::from_rational(self.chart, BigRational::from_integer(numer)))
            }
            Some((Tok::Ident(name), pos)) => match self.chart.index_of(&name) {
                Some(i) => Ok(RatFunc::coord(self.chart, i).expect("index in range")),
                None => Err(ParseError::UnknownIdentifier { name, pos }),
            },
            Some((Tok::LParen, _)) => {
                let inner = self.expr()?;
                match self.next() {
                    Some((Tok::RParen, _)) => Ok(inner),
                    Some((t, pos)) => Err(ParseError::Syntax {
                        pos,
                        expected: "`)`".into(),
                        found: t.to_string(),
                    }),
                    None => Err(ParseError::Syntax {
                        pos: self.end,
                        expected: "`)`".into(),
                        found: "end of input".into(),
                    }),
                }
            }
            Some((t, pos)) => Err(ParseError::Syntax {
                pos,
                expected: "a number, identifier or `(`".into(),
                found: t.to_string(),
            }),
            None => Err(ParseError::Syntax {
                pos: self.end,
                expected: "a number, identifier or `(`".into(),
                found: "end of input".into(),
            }),
        }
    }
}

/// Parse `text` into a canonical rational function on `chart`.
pub fn parse_expr(text: &str, chart: &Arc<Chart>) -> Result<RatFunc, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0, chart, end: text.len() + 1 };
    let value = p.expr()?;
    if p.peek().is_some() {
        return Err(p.syntax("an operator or end of input"));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart2() -> Arc<Chart> {
        Chart::new(vec!["x", "y"]).unwrap()
    }

    #[test]
    fn zero_literal() {
        let c = chart2();
        assert!(parse_expr("0", &c).unwrap().is_zero());
    }

    #[test]
    fn cancels_to_sum() {
        let c = chart2();
        let f = parse_expr("(x^2 - y^2)/(x - y)", &c).unwrap();
        // oracle: multiplying back by (x - y) recovers x^2 - y^2
        let xy = parse_expr("x - y", &c).unwrap();
        let back = f.mul(&xy);
        assert_eq!(back, parse_expr("x^2 - y^2", &c).unwrap());
        assert_eq!(f, parse_expr("x + y", &c).unwrap());
    }

    #[test]
    fn unknown_identifier() {
        let c = chart2();
        match parse_expr("x + w", &c).unwrap_err() {
            ParseError::UnknownIdentifier { name, pos } => {
                assert_eq!(name, "w");
                assert_eq!(pos, 5);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn literal_fraction_binds_before_power() {
        let c = chart2();
        // (3/4)^2, not 3/(4^2)
        let v = parse_expr("3/4^2", &c).unwrap().constant_value().unwrap();
        assert_eq!(v, Rational::new(BigInt::from(9), BigInt::from(16)));
        // but with a non-integer after the slash it is plain division
        let w = parse_expr("3/x", &c).unwrap();
        assert_eq!(w.to_expr_string(), "(3)/(x)");
    }

    #[test]
    fn no_implicit_multiplication() {
        let c = chart2();
        match parse_expr("2 x", &c).unwrap_err() {
            ParseError::Syntax { pos, .. } => assert_eq!(pos, 3),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn zero_denominators_rejected() {
        let c = chart2();
        assert!(matches!(
            parse_expr("1/0", &c).unwrap_err(),
            ParseError::DivisionByZeroConstant { .. }
        ));
        assert!(matches!(
            parse_expr("1/(x - x)", &c).unwrap_err(),
            ParseError::DivisionByZeroConstant { .. }
        ));
        assert!(matches!(
            parse_expr("(x - x)^-1", &c).unwrap_err(),
            ParseError::ZeroToNegativePower { .. }
        ));
    }

    #[test]
    fn negative_exponent() {
        let c = chart2();
        let f = parse_expr("x^-2", &c).unwrap();
        assert_eq!(f, parse_expr("1/(x^2)", &c).unwrap());
    }

    #[test]
    fn unary_minus_binds_outside_power() {
        let c = chart2();
        // -x^2 = -(x^2)
        let f = parse_expr("-x^2", &c).unwrap();
        assert_eq!(f, parse_expr("0 - x^2", &c).unwrap());
    }

    #[test]
    fn roundtrip_examples() {
        let c = chart2();
        for s in [
            "x^2*y - 2*x + 5/3",
            "(2*x)/(x^2 + 1)",
            "-x",
            "0",
            "1/2",
            "(x + y)/(x - y)",
            "x^2 - y + 5",
        ] {
            let f = parse_expr(s, &c).unwrap();
            let g = parse_expr(&f.to_expr_string(), &c).unwrap();
            assert_eq!(f, g, "roundtrip failed for {s}");
        }
    }
}
