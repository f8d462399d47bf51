//! Reader for witness words typeset in LaTeX, e.g.
//! `$b =T(x ,1 ,\frac{y}{x} ,1)U_{1}\genfrac{(}{)}{}{}{z}{xy}$`.
//!
//! Juxtaposition multiplies, single letters are coordinates, `\sqrt` is a
//! square root and `\genfrac{(}{)}{}{}{a}{b}` is a parenthesized fraction.
//! Table layout commands (`\hline`, `\cdot`, tabular wrappers) are skipped.
//! Errors carry the byte offset in the printed text.

use std::collections::BTreeMap;

use num_rational::BigRational;

use super::Word;
use crate::arith::Expr;
use crate::error::{Error, Result};
use crate::lie::PosRoot;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Cmd(String),
    Letter(char),
    Num(u64),
    Sym(char),
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>> {
    const SKIP: [&str; 6] = ["thinspace", "cdot", "hline", "par", "quad", "displaystyle"];
    let b = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i] as char;
        if c.is_ascii_whitespace() || c == '$' || c == '&' {
            i += 1;
        } else if c == '\\' {
            let start = i;
            i += 1;
            if i < b.len() && !b[i].is_ascii_alphabetic() {
                // `\\`, `\ `, `\,` and friends are spacing or line breaks.
                i += 1;
                continue;
            }
            while i < b.len() && b[i].is_ascii_alphabetic() {
                i += 1;
            }
            let name = &s[start + 1..i];
            match name {
                n if SKIP.contains(&n) => {}
                "begin" => {
                    // `\begin{tabular}[c]{..}`: drop the environment name and its arguments.
                    i = skip_group(s, i, '{', '}')?;
                    let j = skip_ws(b, i);
                    if j < b.len() && b[j] == b'[' {
                        i = skip_group(s, j, '[', ']')?;
                    }
                    let j = skip_ws(b, i);
                    if j < b.len() && b[j] == b'{' {
                        i = skip_group(s, j, '{', '}')?;
                    }
                }
                "end" => i = skip_group(s, i, '{', '}')?,
                _ => out.push((start, Tok::Cmd(name.to_string()))),
            }
        } else if c.is_ascii_digit() {
            let start = i;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            let v = s[start..i].parse().map_err(|_| Error::Parse { pos: start, msg: "number too long".into() })?;
            out.push((start, Tok::Num(v)));
        } else if c.is_ascii_alphabetic() {
            out.push((i, Tok::Letter(c)));
            i += 1;
        } else if "{}()[]^_+-=,.|/".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(Error::Parse { pos: i, msg: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

fn skip_ws(b: &[u8], mut i: usize) -> usize {
    while i < b.len() && b[i].is_ascii_whitespace() {
        i += 1;
    }
    i
}

fn skip_group(s: &str, i: usize, open: char, close: char) -> Result<usize> {
    let b = s.as_bytes();
    let i = skip_ws(b, i);
    if i >= b.len() || b[i] as char != open {
        return Err(Error::Parse { pos: i, msg: format!("expected `{open}`") });
    }
    let mut depth = 0;
    for (k, &c) in b.iter().enumerate().skip(i) {
        if c as char == open {
            depth += 1;
        } else if c as char == close {
            depth -= 1;
            if depth == 0 {
                return Ok(k + 1);
            }
        }
    }
    Err(Error::Parse { pos: i, msg: format!("unclosed `{open}`") })
}

/// Parse a printed witness word for rank `n`.
pub fn parse_printed_word(text: &str, n: usize) -> Result<Word> {
    if text.trim_start().starts_with("any") && text.contains("\\in B") {
        return Ok(Word { torus: None, factors: Vec::new() });
    }
    let mut toks = normalize_delimiters(lex(text)?)?;
    strip_outer_braces(&mut toks);
    let mut p = P { toks, pos: 0, end: text.len() };
    let w = p.word(n)?;
    if p.pos < p.toks.len() {
        return p.fail("unexpected token after the word");
    }
    Ok(w)
}

/// Table cells wrap the whole word in one brace group.
fn strip_outer_braces(toks: &mut Vec<(usize, Tok)>) {
    if toks.len() < 2 || toks[0].1 != Tok::Sym('{') || toks[toks.len() - 1].1 != Tok::Sym('}') {
        return;
    }
    let mut depth = 0i32;
    for (k, (_, t)) in toks.iter().enumerate() {
        match t {
            Tok::Sym('{') => depth += 1,
            Tok::Sym('}') => depth -= 1,
            _ => {}
        }
        if depth == 0 && k + 1 < toks.len() {
            return;
        }
    }
    toks.pop();
    toks.remove(0);
}

/// `\left(` and `\right)` become plain parentheses; `\left.` and
/// `\right.` disappear, as does a bare `.` used as a product dot.
fn normalize_delimiters(toks: Vec<(usize, Tok)>) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::with_capacity(toks.len());
    let mut it = toks.into_iter().peekable();
    while let Some((pos, t)) = it.next() {
        match &t {
            Tok::Cmd(c) if c == "left" || c == "right" => match it.next() {
                Some((_, Tok::Sym('.'))) => {}
                Some((q, Tok::Sym(d))) if "()[]".contains(d) => out.push((q, Tok::Sym(d))),
                _ => return Err(Error::Parse { pos, msg: format!("`\\{c}` without a delimiter") }),
            },
            Tok::Sym('.') => {}
            _ => out.push((pos, t)),
        }
    }
    Ok(out)
}

struct P {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl P {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn fail<T>(&self, msg: &str) -> Result<T> {
        let at = match self.peek() {
            Some(Tok::Cmd(c)) => format!(" at `\\{c}`"),
            Some(Tok::Letter(c)) => format!(" at `{c}`"),
            Some(Tok::Num(k)) => format!(" at `{k}`"),
            Some(Tok::Sym(c)) => format!(" at `{c}`"),
            None => " at end of text".into(),
        };
        Err(Error::Parse { pos: self.offset(), msg: format!("{msg}{at}") })
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            self.fail(&format!("expected `{c}`"))
        }
    }

    fn eat_letter(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Letter(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn word(&mut self, n: usize) -> Result<Word> {
        if self.peek() == Some(&Tok::Letter('b')) {
            self.pos += 1;
            self.expect_sym('=')?;
        }
        let mut torus = None;
        if self.eat_letter('T') {
            self.expect_sym('(')?;
            let mut args = vec![self.expr()?];
            while self.eat_sym(',') {
                args.push(self.expr()?);
            }
            self.expect_sym(')')?;
            if args.len() != n {
                return Err(Error::Parse { pos: self.offset(), msg: format!("T has {} entries, expected {n}", args.len()) });
            }
            torus = Some(args);
        }
        let mut factors = Vec::new();
        while self.pos < self.toks.len() {
            if !self.eat_letter('U') {
                return self.fail("expected U_");
            }
            self.expect_sym('_')?;
            let root = self.subscript(n)?;
            let param = match self.peek() {
                Some(Tok::Sym('(')) => {
                    self.pos += 1;
                    let e = self.expr()?;
                    self.expect_sym(')')?;
                    e
                }
                Some(Tok::Cmd(c)) if c == "genfrac" => self.primary()?,
                _ => return self.fail("expected a parameter"),
            };
            factors.push((root, param));
        }
        if torus.is_none() && factors.is_empty() {
            return self.fail("empty word");
        }
        Ok(Word { torus, factors })
    }

    fn subscript(&mut self, n: usize) -> Result<PosRoot> {
        let at = self.offset();
        let digits = match self.peek().cloned() {
            Some(Tok::Num(k)) => {
                self.pos += 1;
                k.to_string()
            }
            Some(Tok::Sym('{')) => {
                self.pos += 1;
                let d = match self.peek().cloned() {
                    Some(Tok::Num(k)) => k.to_string(),
                    _ => return self.fail("expected a root subscript"),
                };
                self.pos += 1;
                self.expect_sym('}')?;
                d
            }
            _ => return self.fail("expected a root subscript"),
        };
        let token = match digits.len() {
            1 => format!("x{digits}{digits}"),
            2 => format!("x{digits}"),
            _ => return Err(Error::Parse { pos: at, msg: format!("U_{{{digits}}} is not a root") }),
        };
        PosRoot::parse(&token, n).map_err(|_| Error::Parse { pos: at, msg: format!("U_{{{digits}}} is not a root of A{n}") })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = if self.eat_sym('-') {
            Expr::Neg(Box::new(self.term()?))
        } else {
            self.eat_sym('+');
            self.term()?
        };
        loop {
            if self.eat_sym('+') {
                acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
            } else if self.eat_sym('-') {
                acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn starts_factor(&self) -> bool {
        match self.peek() {
            Some(Tok::Letter(c)) => c.is_ascii_lowercase(),
            Some(Tok::Num(_)) => true,
            Some(Tok::Sym(c)) => *c == '(' || *c == '{',
            Some(Tok::Cmd(c)) => matches!(c.as_str(), "frac" | "genfrac" | "sqrt" | "dfrac" | "tfrac"),
            None => false,
        }
    }

    fn term(&mut self) -> Result<Expr> {
        if !self.starts_factor() {
            return self.fail("expected a factor");
        }
        let mut acc = self.power()?;
        while self.starts_factor() {
            acc = Expr::mul(acc, self.power()?);
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.eat_sym('^') {
            let e = self.exponent()?;
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<BigRational> {
        let at = self.offset();
        let e = match self.peek().cloned() {
            Some(Tok::Num(k)) if k < 10 => {
                self.pos += 1;
                return Ok(BigRational::from_integer(k.into()));
            }
            Some(Tok::Sym('{')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect_sym('}')?;
                e
            }
            _ => return self.fail("expected an exponent"),
        };
        e.const_value().ok_or_else(|| Error::Parse { pos: at, msg: "exponent is not a rational constant".into() })
    }

    fn group(&mut self) -> Result<Expr> {
        self.expect_sym('{')?;
        let e = self.expr()?;
        self.expect_sym('}')?;
        Ok(e)
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Tok::Letter(c)) if c.is_ascii_lowercase() => {
                self.pos += 1;
                Ok(Expr::Var(c.to_string()))
            }
            Some(Tok::Num(k)) => {
                self.pos += 1;
                Ok(Expr::Num(BigRational::from_integer(k.into())))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            Some(Tok::Sym('{')) => self.group(),
            Some(Tok::Cmd(c)) => {
                self.pos += 1;
                match c.as_str() {
                    "frac" | "dfrac" | "tfrac" => {
                        let a = self.group()?;
                        let b = self.group()?;
                        Ok(Expr::Div(Box::new(a), Box::new(b)))
                    }
                    "genfrac" => {
                        // \genfrac{(}{)}{}{}{num}{den}
                        for d in ['(', ')'] {
                            self.expect_sym('{')?;
                            self.expect_sym(d)?;
                            self.expect_sym('}')?;
                        }
                        for _ in 0..2 {
                            self.expect_sym('{')?;
                            self.expect_sym('}')?;
                        }
                        let a = self.group()?;
                        let b = self.group()?;
                        Ok(Expr::Div(Box::new(a), Box::new(b)))
                    }
                    "sqrt" => {
                        let mut order = 2u64;
                        if self.eat_sym('[') {
                            order = match self.peek().cloned() {
                                Some(Tok::Num(k)) if (2..=12).contains(&k) => k,
                                _ => return self.fail("expected a root order"),
                            };
                            self.pos += 1;
                            self.expect_sym(']')?;
                        }
                        let a = self.group()?;
                        Ok(Expr::Pow(Box::new(a), BigRational::new(1.into(), order.into())))
                    }
                    _ => {
                        self.pos -= 1;
                        self.fail("unsupported command")
                    }
                }
            }
            _ => self.fail("expected a factor"),
        }
    }
}

/// Rename variables of a word, e.g. `{w: v}` where a printed word uses `w`
/// for the coordinate `v`.
pub fn rename_word(w: &Word, map: &BTreeMap<String, String>) -> Word {
    Word {
        torus: w.torus.as_ref().map(|t| t.iter().map(|e| rename(e, map)).collect()),
        factors: w.factors.iter().map(|(r, e)| (*r, rename(e, map))).collect(),
    }
}

fn rename(e: &Expr, map: &BTreeMap<String, String>) -> Expr {
    let bx = |x: &Expr| Box::new(rename(x, map));
    match e {
        Expr::Num(_) => e.clone(),
        Expr::Var(v) => Expr::Var(map.get(v).cloned().unwrap_or_else(|| v.clone())),
        Expr::Add(a, b) => Expr::Add(bx(a), bx(b)),
        Expr::Sub(a, b) => Expr::Sub(bx(a), bx(b)),
        Expr::Mul(a, b) => Expr::Mul(bx(a), bx(b)),
        Expr::Div(a, b) => Expr::Div(bx(a), bx(b)),
        Expr::Neg(a) => Expr::Neg(bx(a)),
        Expr::Pow(a, k) => Expr::Pow(bx(a), k.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn show(w: &Word) -> String {
        let mut s = String::new();
        if let Some(t) = &w.torus {
            let v: Vec<String> = t.iter().map(|e| e.to_string()).collect();
            s += &format!("T({})", v.join(", "));
        }
        for (r, e) in &w.factors {
            s += &format!(" U_{}({e})", r.token());
        }
        s
    }

    #[test]
    fn reads_table_words() {
        let w = parse_printed_word("$b =T(x ,1 ,\\frac{y}{x} ,1)U_{1}\\genfrac{(}{)}{}{}{z}{xy}$", 4).unwrap();
        assert_eq!(show(&w), "T(x, 1, y/x, 1) U_x11(z/(x*y))");
        let w = parse_printed_word("$T(x ,1)U_{2}( -zx^{ -2})$", 2).unwrap();
        assert_eq!(show(&w), "T(x, 1) U_x22(-(z*x^(-2)))");
        let w = parse_printed_word("$T(\\sqrt{z})$", 1).unwrap();
        assert_eq!(show(&w), "T(z^(1/2))");
        let w = parse_printed_word("$U_{1}\\left .(x\\right )U_{3}\\left ( -v\\right )$", 4).unwrap();
        assert_eq!(show(&w), " U_x11(x) U_x33(-v)");
        assert_eq!(parse_printed_word("any $b \\in B$", 3).unwrap().factors.len(), 0);
    }

    #[test]
    fn reads_tabular_layout() {
        let t = "{\\begin{tabular}[c]{|c|}\\hline $T(uv ,v ,1) \\cdot $ \\\\ \\hline $U_{3}( -yu^{ -1}v^{ -3})$ \\\\ \\hline \\end{tabular}}";
        let w = parse_printed_word(t, 3).unwrap();
        assert_eq!(show(&w), "T(u*v, v, 1) U_x33(-(y*u^(-1)*v^(-3)))");
    }

    #[test]
    fn corrupt_words_report_offsets() {
        let s = "$T(rt ,1 ,\\frac{1}{r} ,1)U_{3}\\left ( -v\\right )U_{23}genfrac{(}{)}{}{}{y}{t}$";
        match parse_printed_word(s, 4) {
            Err(Error::Parse { pos, msg }) => {
                assert_eq!(&s[pos..pos + 7], "genfrac");
                assert!(msg.contains("parameter"), "{msg}");
            }
            other => panic!("{other:?}"),
        }
        assert!(parse_printed_word("$T(1 ,1)U_{123}(x)$", 2).is_err());
        assert!(parse_printed_word("$T(x)$", 2).is_err());
    }
}
