//! Reader for printed defining sets such as
//! `$Z(X_{1} ,X_{2}X_{13} -X_{12}X_{23}) \cap V(X_{2})$`.
//!
//! `X_{d}` is the diagonal coordinate `Xdd` and `X_{ij}` is `Xij`; a bare
//! `X` is the only coordinate of rank 1. Whitespace and `\thinspace` are
//! ignored, and a comma that slipped inside a subscript separates items.

use std::sync::Arc;

use num_rational::BigRational;

use crate::arith::{LaurentPoly, Registry};
use crate::error::{parse_err, Error, Result};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LatexSet {
    pub zero: Vec<LaurentPoly>,
    pub nonzero: Vec<LaurentPoly>,
}

pub fn parse_latex_set(text: &str, n: usize, reg: &Arc<Registry>) -> Result<LatexSet> {
    let cleaned = text.replace("\\thinspace", " ").replace('$', " ");
    let s: Vec<char> = cleaned.chars().collect();
    let mut p = SetParser { s, pos: 0, n, reg, split: false };
    let mut out = LatexSet::default();
    p.ws();
    if p.eat_word("Z") {
        out.zero = p.list()?;
        p.ws();
        if p.eat_word("\\cap") {
            p.ws();
            if !p.eat_word("V") {
                return parse_err(p.pos, "expected V( after \\cap");
            }
            out.nonzero = p.list()?;
        }
    } else if p.eat_word("V") {
        out.nonzero = p.list()?;
    } else {
        return parse_err(p.pos, "expected Z( or V(");
    }
    p.ws();
    if p.pos != p.s.len() {
        return parse_err(p.pos, "trailing text");
    }
    Ok(out)
}

struct SetParser<'a> {
    s: Vec<char>,
    pos: usize,
    n: usize,
    reg: &'a Arc<Registry>,
    split: bool,
}

impl SetParser<'_> {
    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        self.ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        let chars: Vec<char> = w.chars().collect();
        if self.s[self.pos..].starts_with(&chars) {
            self.pos += chars.len();
            true
        } else {
            false
        }
    }

    fn list(&mut self) -> Result<Vec<LaurentPoly>> {
        if !self.eat('(') {
            return parse_err(self.pos, "expected (");
        }
        let mut v = vec![self.poly()?];
        loop {
            if std::mem::take(&mut self.split) || self.eat(',') {
                v.push(self.poly()?);
            } else if self.eat(')') {
                return Ok(v);
            } else {
                return parse_err(self.pos, "expected , or )");
            }
        }
    }

    fn poly(&mut self) -> Result<LaurentPoly> {
        let mut acc = LaurentPoly::zero(self.reg);
        let mut sign = 1i64;
        self.ws();
        if self.eat('-') {
            sign = -1;
        } else {
            self.eat('+');
        }
        loop {
            let t = self.term()?;
            acc = if sign > 0 { acc.add(&t) } else { acc.sub(&t) };
            if self.split {
                return Ok(acc);
            }
            if self.eat('+') {
                sign = 1;
            } else if self.eat('-') {
                sign = -1;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<LaurentPoly> {
        let mut acc = LaurentPoly::one(self.reg);
        let mut any = false;
        loop {
            self.ws();
            match self.peek() {
                Some('X') => {
                    self.pos += 1;
                    let mut f = self.coordinate()?;
                    self.ws();
                    if self.peek() == Some('^') {
                        self.pos += 1;
                        f = f.pow(self.exponent()?);
                    }
                    acc = acc.mul(&f);
                    if self.split {
                        any = true;
                        break;
                    }
                }
                Some(c) if c.is_ascii_digit() => {
                    let k = self.number();
                    acc = acc.scale(&BigRational::from_integer(k.into()));
                }
                _ => break,
            }
            any = true;
        }
        if !any {
            return parse_err(self.pos, "expected a term");
        }
        Ok(acc)
    }

    fn number(&mut self) -> i64 {
        let mut k = 0i64;
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            k = k * 10 + c.to_digit(10).unwrap() as i64;
            self.pos += 1;
        }
        k
    }

    fn exponent(&mut self) -> Result<u32> {
        self.ws();
        let braced = self.eat('{');
        self.ws();
        if !self.peek().is_some_and(|c| c.is_ascii_digit()) {
            return parse_err(self.pos, "expected exponent");
        }
        let k = self.number() as u32;
        if braced && !self.eat('}') {
            return parse_err(self.pos, "expected }");
        }
        Ok(k)
    }

    fn coordinate(&mut self) -> Result<LaurentPoly> {
        let start = self.pos;
        let digits = if self.peek() == Some('_') {
            self.pos += 1;
            if self.peek() == Some('{') {
                self.pos += 1;
                let mut d = String::new();
                loop {
                    match self.peek() {
                        Some('}') => {
                            self.pos += 1;
                            break;
                        }
                        Some(c) if c.is_ascii_digit() => d.push(c),
                        Some(',') => self.split = true,
                        Some(c) if c.is_whitespace() => {}
                        _ => return parse_err(self.pos, "bad subscript"),
                    }
                    self.pos += 1;
                }
                d
            } else {
                match self.peek().filter(char::is_ascii_digit) {
                    Some(c) => {
                        self.pos += 1;
                        c.to_string()
                    }
                    None => return parse_err(self.pos, "bad subscript"),
                }
            }
        } else if self.n == 1 {
            "1".to_string()
        } else {
            return parse_err(start, "coordinate without subscript");
        };
        let name = match digits.len() {
            1 => format!("X{digits}{digits}"),
            2 => format!("X{digits}"),
            _ => return Err(Error::Parse { pos: start, msg: format!("X_{{{digits}}} is not a coordinate") }),
        };
        LaurentPoly::var_named(self.reg, &name)
            .map_err(|_| Error::Parse { pos: start, msg: format!("X_{{{digits}}} is not a coordinate of rank {}", self.n) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::parse_poly;
    use crate::catalog::coordinate_registry;

    #[test]
    fn reads_printed_sets() {
        let reg = coordinate_registry(3).unwrap();
        let s = parse_latex_set("$Z(X_{1} ,X_{3} ,X_{2}X_{13} -X_{12}X_{23}) \\cap V(X_{2})$", 3, &reg).unwrap();
        assert_eq!(s.zero.len(), 3);
        assert_eq!(s.zero[2], parse_poly("X22*X13 - X12*X23", &reg).unwrap());
        assert_eq!(s.nonzero, vec![parse_poly("X22", &reg).unwrap()]);
    }

    #[test]
    fn tolerates_commas_in_subscripts() {
        let reg = coordinate_registry(2).unwrap();
        let s = parse_latex_set("$Z(X_{1} ,X_{2 ,}X_{12})$", 2, &reg).unwrap();
        let want: Vec<_> = ["X11", "X22", "X12"].iter().map(|v| parse_poly(v, &reg).unwrap()).collect();
        assert_eq!(s.zero, want);
    }

    #[test]
    fn rank_one_and_bad_tokens() {
        let reg1 = coordinate_registry(1).unwrap();
        assert_eq!(parse_latex_set("$V(X)$", 1, &reg1).unwrap().nonzero.len(), 1);
        let reg4 = coordinate_registry(4).unwrap();
        let e = parse_latex_set("$V(X_{12}X_{23} -X_{123}X_{2})$", 4, &reg4).unwrap_err();
        assert!(e.to_string().contains("X_{123}"));
    }
}
