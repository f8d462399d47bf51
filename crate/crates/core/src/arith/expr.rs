//! Expression trees and the plain-text grammar.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' exponent)?
//! exponent := INT | '-' INT | '(' expr ')'     -- must be a rational constant
//! atom   := NUMBER | IDENT | '(' expr ')'
//! ```
//!
//! Juxtaposition is not multiplication here: `X11X22` is one identifier.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::fraction::LaurentFraction;
use super::poly::{fmt_rat, LaurentPoly, Registry};
use super::radical::Tower;
use crate::error::{parse_err, Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(BigRational),
    Var(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, BigRational),
}

impl Expr {
    pub fn int(k: i64) -> Expr {
        Expr::Num(BigRational::from_integer(k.into()))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Neg(a) | Expr::Pow(a, _) => a.collect_vars(out),
        }
    }

    /// Value when the expression has no variables and only integral powers.
    pub fn const_value(&self) -> Option<BigRational> {
        Some(match self {
            Expr::Num(r) => r.clone(),
            Expr::Var(_) => return None,
            Expr::Add(a, b) => a.const_value()? + b.const_value()?,
            Expr::Sub(a, b) => a.const_value()? - b.const_value()?,
            Expr::Mul(a, b) => a.const_value()? * b.const_value()?,
            Expr::Div(a, b) => {
                let d = b.const_value()?;
                if d.is_zero() {
                    return None;
                }
                a.const_value()? / d
            }
            Expr::Neg(a) => -a.const_value()?,
            Expr::Pow(a, e) => {
                if !e.is_integer() {
                    return None;
                }
                let base = a.const_value()?;
                let k = e.to_integer().to_i32()?;
                if k < 0 && base.is_zero() {
                    return None;
                }
                num_traits::pow::Pow::pow(&base, k)
            }
        })
    }

    /// Polynomial over `reg`; division only by nonzero constants or monomials.
    pub fn to_poly(&self, reg: &Arc<Registry>) -> Result<LaurentPoly> {
        Ok(match self {
            Expr::Num(r) => LaurentPoly::constant(reg, r.clone()),
            Expr::Var(v) => LaurentPoly::var_named(reg, v)?,
            Expr::Add(a, b) => a.to_poly(reg)?.add(&b.to_poly(reg)?),
            Expr::Sub(a, b) => a.to_poly(reg)?.sub(&b.to_poly(reg)?),
            Expr::Mul(a, b) => a.to_poly(reg)?.mul(&b.to_poly(reg)?),
            Expr::Neg(a) => a.to_poly(reg)?.neg(),
            Expr::Div(a, b) => {
                let d = b.to_poly(reg)?;
                if d.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                let inv = d.monomial_inverse().ok_or_else(|| Error::NotInvertible(d.to_string()))?;
                a.to_poly(reg)?.mul(&inv)
            }
            Expr::Pow(a, e) => {
                let k = integral_exponent(e)?;
                let base = a.to_poly(reg)?;
                if k >= 0 {
                    base.pow(k as u32)
                } else {
                    base.monomial_inverse()
                        .ok_or_else(|| Error::NotInvertible(base.to_string()))?
                        .pow(k.unsigned_abs())
                }
            }
        })
    }

    /// Rational function; `env` may bind names to precomputed values.
    pub fn to_fraction(
        &self,
        reg: &Arc<Registry>,
        tower: Option<&Arc<Tower>>,
        env: &dyn Fn(&str) -> Option<LaurentFraction>,
    ) -> Result<LaurentFraction> {
        let t = tower.cloned();
        Ok(match self {
            Expr::Num(r) => LaurentFraction::constant(reg, r.clone(), t),
            Expr::Var(v) => match env(v) {
                Some(f) => f,
                None => LaurentFraction::from_poly(LaurentPoly::var_named(reg, v)?, t),
            },
            Expr::Add(a, b) => a.to_fraction(reg, tower, env)?.add(&b.to_fraction(reg, tower, env)?),
            Expr::Sub(a, b) => a.to_fraction(reg, tower, env)?.sub(&b.to_fraction(reg, tower, env)?),
            Expr::Mul(a, b) => a.to_fraction(reg, tower, env)?.mul(&b.to_fraction(reg, tower, env)?),
            Expr::Div(a, b) => a.to_fraction(reg, tower, env)?.div(&b.to_fraction(reg, tower, env)?)?,
            Expr::Neg(a) => a.to_fraction(reg, tower, env)?.neg(),
            Expr::Pow(a, e) => a.to_fraction(reg, tower, env)?.pow(integral_exponent(e)?)?,
        })
    }
}

fn integral_exponent(e: &BigRational) -> Result<i32> {
    if !e.is_integer() {
        return Err(Error::Domain(format!("fractional exponent {} needs a radical", fmt_rat(e))));
    }
    e.to_integer().to_i32().filter(|k| k.abs() <= 10_000).ok_or_else(|| Error::Domain("exponent too large".into()))
}

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Neg(_) => 3,
        Expr::Pow(..) => 4,
        Expr::Num(r) if r.is_negative() || !r.is_integer() => 2,
        _ => 5,
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |e: &Expr, min: u8| -> String {
            if prec(e) < min {
                format!("({e})")
            } else {
                e.to_string()
            }
        };
        match self {
            Expr::Num(r) => write!(f, "{}", fmt_rat(r)),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Add(a, b) => write!(f, "{} + {}", wrap(a, 1), wrap(b, 2)),
            Expr::Sub(a, b) => write!(f, "{} - {}", wrap(a, 1), wrap(b, 2)),
            Expr::Mul(a, b) => write!(f, "{}*{}", wrap(a, 2), wrap(b, 3)),
            Expr::Div(a, b) => write!(f, "{}/{}", wrap(a, 2), wrap(b, 3)),
            Expr::Neg(a) => write!(f, "-{}", wrap(a, 3)),
            Expr::Pow(a, e) => {
                if e.is_integer() && !e.is_negative() {
                    write!(f, "{}^{}", wrap(a, 5), e.numer())
                } else {
                    write!(f, "{}^({})", wrap(a, 5), fmt_rat(e))
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push((start, Tok::Num(s[start..i].parse().unwrap())));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(s[start..i].to_string())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return parse_err(i, format!("unexpected character `{c}`"));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
            } else if self.eat('-') {
                acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = Expr::Mul(Box::new(acc), Box::new(self.unary()?));
            } else if self.eat('/') {
                acc = Expr::Div(Box::new(acc), Box::new(self.unary()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let at = self.offset();
        let exp = if self.eat('-') {
            match self.peek().cloned() {
                Some(Tok::Num(k)) => {
                    self.pos += 1;
                    -BigRational::from_integer(k)
                }
                _ => return parse_err(self.offset(), "expected an integer exponent"),
            }
        } else {
            match self.peek().cloned() {
                Some(Tok::Num(k)) => {
                    self.pos += 1;
                    BigRational::from_integer(k)
                }
                Some(Tok::Op('(')) => {
                    self.pos += 1;
                    let e = self.expr()?;
                    if !self.eat(')') {
                        return parse_err(self.offset(), "expected `)`");
                    }
                    match e.const_value() {
                        Some(v) => v,
                        None => return parse_err(at, "exponent must be a rational constant"),
                    }
                }
                _ => return parse_err(at, "expected an exponent"),
            }
        };
        Ok(Expr::Pow(Box::new(base), exp))
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Tok::Num(k)) => {
                self.pos += 1;
                Ok(Expr::Num(BigRational::from_integer(k)))
            }
            Some(Tok::Ident(v)) => {
                self.pos += 1;
                Ok(Expr::Var(v))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return parse_err(self.offset(), "expected `)`");
                }
                Ok(e)
            }
            Some(t) => parse_err(self.offset(), format!("unexpected token {t:?}")),
            None => parse_err(self.end, "unexpected end of input"),
        }
    }
}

pub fn parse_expr(s: &str) -> Result<Expr> {
    let toks = lex(s)?;
    let mut p = Parser { toks, pos: 0, end: s.len() };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return parse_err(p.offset(), "trailing input");
    }
    Ok(e)
}

/// Parse a polynomial in the variables of `reg`.
pub fn parse_poly(s: &str, reg: &Arc<Registry>) -> Result<LaurentPoly> {
    parse_expr(s)?.to_poly(reg)
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let e = parse_expr("-x^2 + 3*y/z - (a - b)").unwrap();
        assert_eq!(e.to_string(), "-x^2 + 3*y/z - (a - b)");
        let e = parse_expr("x^(-1/3)*y^-2").unwrap();
        assert_eq!(e.to_string(), "x^(-1/3)*y^(-2)");
    }

    #[test]
    fn errors_carry_offsets() {
        match parse_expr("X11 + * X22") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 6),
            other => panic!("{other:?}"),
        }
        assert!(parse_expr("x^(y)").is_err());
        assert!(parse_expr("x $ y").is_err());
    }

    #[test]
    fn polys() {
        let reg = Registry::new(["X11", "X22", "X12"]).unwrap();
        let p = parse_poly("X22*X12 - X11*X12 + 2", &reg).unwrap();
        assert_eq!(p.to_string(), "-X11*X12 + X22*X12 + 2");
        assert!(parse_poly("X33", &reg).is_err());
        assert!(parse_poly("X11^(1/2)", &reg).is_err());
    }
}
