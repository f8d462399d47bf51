//! Positive roots of `A_n`, the nilradical `n` of the Borel subalgebra of
//! `sl(n+1)`, and the conjugation action of the Borel group on it.
//!
//! The root `a_ij` (`1 <= i <= j <= n`) has root vector `e_{i,j+1}`. Roots are
//! listed simple roots first, then by increasing height, ties broken by `i`.
//! The action is `b.x = b x b^{-1}` with the torus factor on the left.

pub mod laws;
mod matrix;

use std::fmt;

pub use matrix::Matrix;

use crate::arith::Ring;
use crate::error::{Error, Result};

pub const MAX_RANK: usize = 4;

pub fn check_rank(n: usize) -> Result<()> {
    if (1..=MAX_RANK).contains(&n) {
        Ok(())
    } else {
        Err(Error::Rank(n))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PosRoot {
    pub i: u8,
    pub j: u8,
}

impl PosRoot {
    pub fn new(i: u8, j: u8) -> PosRoot {
        assert!(1 <= i && i <= j, "a_{i}{j} is not a positive root");
        PosRoot { i, j }
    }

    pub fn height(self) -> usize {
        (self.j - self.i + 1) as usize
    }

    /// Matrix row of the root vector (0-based).
    pub fn row(self) -> usize {
        self.i as usize - 1
    }

    /// Matrix column of the root vector (0-based).
    pub fn col(self) -> usize {
        self.j as usize
    }

    pub fn token(self) -> String {
        format!("x{}{}", self.i, self.j)
    }

    pub fn coord_name(self) -> String {
        format!("X{}{}", self.i, self.j)
    }

    /// Accepts `x12`, `X12`, `a12` or bare `12`.
    pub fn parse(s: &str, n: usize) -> Result<PosRoot> {
        let digits = s.trim_start_matches(['x', 'X', 'a']);
        let b = digits.as_bytes();
        if b.len() != 2 || !b.iter().all(u8::is_ascii_digit) {
            return Err(Error::Root(s.to_string()));
        }
        let (i, j) = (b[0] - b'0', b[1] - b'0');
        if i < 1 || i > j || j as usize > n {
            return Err(Error::Root(format!("{s} is not a positive root of A{n}")));
        }
        Ok(PosRoot { i, j })
    }

    /// Sum of two roots when it is again a root.
    pub fn plus(self, other: PosRoot) -> Option<PosRoot> {
        if self.j + 1 == other.i {
            Some(PosRoot { i: self.i, j: other.j })
        } else if other.j + 1 == self.i {
            Some(PosRoot { i: other.i, j: self.j })
        } else {
            None
        }
    }

    /// `self - other` when it is a positive root.
    pub fn minus(self, other: PosRoot) -> Option<PosRoot> {
        if self.i == other.i && other.j < self.j {
            Some(PosRoot { i: other.j + 1, j: self.j })
        } else if self.j == other.j && other.i > self.i {
            Some(PosRoot { i: self.i, j: other.i - 1 })
        } else {
            None
        }
    }
}

impl fmt::Debug for PosRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}{}", self.i, self.j)
    }
}

impl fmt::Display for PosRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}{}", self.i, self.j)
    }
}

pub fn pos_roots(n: usize) -> Result<Vec<PosRoot>> {
    check_rank(n)?;
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for h in 1..=n as u8 {
        for i in 1..=(n as u8 + 1 - h) {
            out.push(PosRoot { i, j: i + h - 1 });
        }
    }
    Ok(out)
}

pub fn root_index(n: usize, r: PosRoot) -> usize {
    let h = r.height();
    // Roots of height < h come first: sum_{k<h} (n + 1 - k).
    let before: usize = (1..h).map(|k| n + 1 - k).sum();
    before + r.i as usize - 1
}

/// Element of `n`, coordinates in canonical root order.
#[derive(Clone, Debug, PartialEq)]
pub struct NilElement<R> {
    pub n: usize,
    pub coords: Vec<R>,
}

impl<R: Ring> NilElement<R> {
    pub fn new(n: usize, coords: Vec<R>) -> Result<Self> {
        check_rank(n)?;
        if coords.len() != n * (n + 1) / 2 {
            return Err(Error::Point(format!("A{n} needs {} coordinates, got {}", n * (n + 1) / 2, coords.len())));
        }
        Ok(NilElement { n, coords })
    }

    pub fn zero(n: usize, proto: &R) -> Result<Self> {
        Self::new(n, vec![proto.zero_like(); n * (n + 1) / 2])
    }

    pub fn get(&self, r: PosRoot) -> &R {
        &self.coords[root_index(self.n, r)]
    }

    pub fn set(&mut self, r: PosRoot, v: R) {
        let k = root_index(self.n, r);
        self.coords[k] = v;
    }

    pub fn to_matrix(&self) -> Matrix<R> {
        let proto = &self.coords[0];
        let mut m = Matrix::zero(self.n + 1, proto);
        for (r, c) in pos_roots(self.n).unwrap().into_iter().zip(&self.coords) {
            m.set(r.row(), r.col(), c.clone());
        }
        m
    }

    /// Read back a strictly upper triangular matrix.
    pub fn from_matrix(n: usize, m: &Matrix<R>) -> Result<Self> {
        for a in 0..=n {
            for b in 0..=a {
                if !m.get(a, b).is_zero_elem() {
                    return Err(Error::Domain(format!("entry ({a},{b}) of a nilradical matrix is nonzero")));
                }
            }
        }
        let coords = pos_roots(n)?.into_iter().map(|r| m.get(r.row(), r.col()).clone()).collect();
        Self::new(n, coords)
    }

    pub fn support(&self) -> Vec<PosRoot> {
        pos_roots(self.n).unwrap().into_iter().zip(&self.coords).filter(|(_, c)| !c.is_zero_elem()).map(|(r, _)| r).collect()
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> NilElement<S> {
        NilElement { n: self.n, coords: self.coords.iter().map(f).collect() }
    }
}

/// Torus element given by its first `n` diagonal entries; the last one is
/// the inverse of their product.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusElement<R> {
    pub diag: Vec<R>,
}

impl<R: Ring> TorusElement<R> {
    pub fn full_diagonal(&self) -> Result<Vec<R>> {
        let mut prod = self.diag[0].one_like();
        for t in &self.diag {
            prod = prod.times(t);
        }
        let mut out = self.diag.clone();
        out.push(prod.inverse()?);
        Ok(out)
    }

    pub fn to_matrix(&self) -> Result<Matrix<R>> {
        let d = self.full_diagonal()?;
        let mut m = Matrix::zero(d.len(), &d[0]);
        for (k, v) in d.into_iter().enumerate() {
            m.set(k, k, v);
        }
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RootGroupFactor<R> {
    pub root: PosRoot,
    pub param: R,
}

impl<R: Ring> RootGroupFactor<R> {
    pub fn to_matrix(&self, n: usize) -> Matrix<R> {
        let mut m = Matrix::identity(n + 1, &self.param);
        m.set(self.root.row(), self.root.col(), self.param.clone());
        m
    }
}

/// `T * U_1 * ... * U_k`; a missing torus means the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct BorelWord<R> {
    pub n: usize,
    pub torus: Option<TorusElement<R>>,
    pub factors: Vec<RootGroupFactor<R>>,
}

impl<R: Ring> BorelWord<R> {
    pub fn identity(n: usize) -> Self {
        BorelWord { n, torus: None, factors: Vec::new() }
    }

    pub fn to_matrix(&self, proto: &R) -> Result<Matrix<R>> {
        let mut m = match &self.torus {
            Some(t) => t.to_matrix()?,
            None => Matrix::identity(self.n + 1, proto),
        };
        for f in &self.factors {
            m = m.mul(&f.to_matrix(self.n));
        }
        Ok(m)
    }
}

/// `w_g(T) = t_i / t_{j+1}`.
pub fn torus_weight<R: Ring>(t: &TorusElement<R>, g: PosRoot) -> Result<R> {
    let n = t.diag.len();
    if g.j as usize > n {
        return Err(Error::Root(format!("{g:?} is not a root of A{n}")));
    }
    let ti = &t.diag[g.i as usize - 1];
    if (g.j as usize) == n {
        // t_{n+1}^{-1} is the product of the listed entries.
        let mut acc = ti.clone();
        for s in &t.diag {
            acc = acc.times(s);
        }
        Ok(acc)
    } else {
        Ok(ti.times(&t.diag[g.j as usize].inverse()?))
    }
}

/// `U_d(c).x = x + c (E x - x E)` with `E = e_d`; the quadratic term
/// `E x E` vanishes on strictly upper triangular `x`.
pub fn root_group_act<R: Ring>(d: PosRoot, c: &R, x: &NilElement<R>) -> NilElement<R> {
    if c.is_zero_elem() {
        return x.clone();
    }
    let n = x.n;
    let roots = pos_roots(n).unwrap();
    let mut out = x.clone();
    for (k, g) in roots.iter().enumerate() {
        // (E x)_{ab} = [a = row(d)] x_{col(d), b}
        // (x E)_{ab} = [b = col(d)] x_{a, row(d)}
        let mut delta: Option<R> = None;
        if g.row() == d.row() && g.col() > d.col() {
            let src = PosRoot { i: d.j + 1, j: g.j };
            delta = Some(x.get(src).clone());
        }
        if g.col() == d.col() && g.row() < d.row() {
            let src = PosRoot { i: g.i, j: d.i - 1 };
            let v = x.get(src).negate();
            delta = Some(match delta {
                Some(a) => a.plus(&v),
                None => v,
            });
        }
        if let Some(dv) = delta {
            if !dv.is_zero_elem() {
                out.coords[k] = out.coords[k].plus(&c.times(&dv));
            }
        }
    }
    out
}

pub fn torus_act<R: Ring>(t: &TorusElement<R>, x: &NilElement<R>) -> Result<NilElement<R>> {
    let roots = pos_roots(x.n)?;
    let mut out = x.clone();
    for (k, g) in roots.into_iter().enumerate() {
        if !x.coords[k].is_zero_elem() {
            out.coords[k] = x.coords[k].times(&torus_weight(t, g)?);
        }
    }
    Ok(out)
}

/// `b.x = b x b^{-1}`.
pub fn adjoint<R: Ring>(b: &BorelWord<R>, x: &NilElement<R>) -> Result<NilElement<R>> {
    if b.n != x.n {
        return Err(Error::Domain(format!("word of rank {} acting on A{}", b.n, x.n)));
    }
    let mut cur = x.clone();
    for f in b.factors.iter().rev() {
        cur = root_group_act(f.root, &f.param, &cur);
    }
    if let Some(t) = &b.torus {
        cur = torus_act(t, &cur)?;
    }
    Ok(cur)
}

/// Literal conjugation `g x g^{-1}` for an invertible upper triangular `g`.
pub fn conjugate<R: Ring>(g: &Matrix<R>, x: &NilElement<R>) -> Result<NilElement<R>> {
    let gi = g.upper_triangular_inverse()?;
    let m = g.mul(&x.to_matrix()).mul(&gi);
    NilElement::from_matrix(x.n, &m)
}

/// Upper unitriangular matrix `I + sum_g c_g e_g`.
pub fn unipotent_matrix<R: Ring>(n: usize, coords: &[R]) -> Result<Matrix<R>> {
    let roots = pos_roots(n)?;
    if coords.len() != roots.len() {
        return Err(Error::Point(format!("A{n} needs {} parameters", roots.len())));
    }
    let mut m = Matrix::identity(n + 1, &coords[0]);
    for (r, c) in roots.into_iter().zip(coords) {
        m.set(r.row(), r.col(), c.clone());
    }
    Ok(m)
}

/// Roots `g` with `U_g(t).x = x` for all `t`, i.e. `[e_g, x] = 0`.
pub fn fixing_root_groups<R: Ring>(x: &NilElement<R>) -> Vec<PosRoot> {
    let proto = x.coords[0].one_like();
    pos_roots(x.n)
        .unwrap()
        .into_iter()
        .filter(|&g| {
            let moved = root_group_act(g, &proto, x);
            moved.coords.iter().zip(&x.coords).all(|(a, b)| a.minus(b).is_zero_elem())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{parse_expr, BigRational, Fp, LaurentFraction, LaurentPoly, Registry};

    #[test]
    fn root_orders() {
        let a3: Vec<String> = pos_roots(3).unwrap().iter().map(|r| r.token()).collect();
        assert_eq!(a3, ["x11", "x22", "x33", "x12", "x23", "x13"]);
        assert_eq!(pos_roots(4).unwrap().len(), 10);
        assert!(pos_roots(0).is_err() && pos_roots(5).is_err());
        for n in 1..=4 {
            for (k, r) in pos_roots(n).unwrap().into_iter().enumerate() {
                assert_eq!(root_index(n, r), k);
                assert_eq!(PosRoot::parse(&r.token(), n).unwrap(), r);
            }
        }
        assert!(PosRoot::parse("x21", 3).is_err());
        assert!(PosRoot::parse("x14", 3).is_err());
    }

    #[test]
    fn root_arithmetic() {
        let r = |s| PosRoot::parse(s, 4).unwrap();
        assert_eq!(r("x11").plus(r("x23")), Some(r("x13")));
        assert_eq!(r("x11").plus(r("x33")), None);
        assert_eq!(r("x14").minus(r("x12")), Some(r("x34")));
        assert_eq!(r("x14").minus(r("x34")), Some(r("x12")));
        assert_eq!(r("x14").minus(r("x23")), None);
    }

    fn fp_elem(n: usize, vals: &[i64], p: u64) -> NilElement<Fp> {
        NilElement::new(n, vals.iter().map(|&v| Fp::new(v, p)).collect()).unwrap()
    }

    #[test]
    fn a2_root_group_moves_x11_along_x12() {
        // U_{a22}(t).x_{a11} = x_{a11} - t x_{a12}
        let p = 101;
        let x = fp_elem(2, &[1, 0, 0], p);
        let y = root_group_act(PosRoot::new(2, 2), &Fp::new(5, p), &x);
        assert_eq!(y, fp_elem(2, &[1, 0, -5], p));
        let z = root_group_act(PosRoot::new(1, 1), &Fp::new(5, p), &fp_elem(2, &[0, 1, 0], p));
        assert_eq!(z, fp_elem(2, &[0, 1, 5], p));
    }

    #[test]
    fn formula_matches_literal_conjugation() {
        let p = 101;
        for n in 1..=4 {
            let d = n * (n + 1) / 2;
            let x = fp_elem(n, &(0..d as i64).map(|k| 3 * k + 1).collect::<Vec<_>>(), p);
            let t = TorusElement { diag: (0..n as i64).map(|k| Fp::new(k + 2, p)).collect() };
            let word = BorelWord {
                n,
                torus: Some(t),
                factors: pos_roots(n)
                    .unwrap()
                    .into_iter()
                    .enumerate()
                    .map(|(k, r)| RootGroupFactor { root: r, param: Fp::new(7 * k as i64 + 3, p) })
                    .collect(),
            };
            let fast = adjoint(&word, &x).unwrap();
            let slow = conjugate(&word.to_matrix(&Fp::one(p)).unwrap(), &x).unwrap();
            assert_eq!(fast, slow, "rank {n}");
        }
    }

    #[test]
    fn a3_torus_and_root_group_example() {
        // T(1,v,1) U_{a11}(x) U_{a33}(-y v^-2) applied to x22 yields
        // (0, v, 0, x, y, x y v^-1) in canonical order.
        let reg = Registry::new(["v", "x", "y"]).unwrap();
        let f = |s: &str| LaurentFraction::from_poly(parse_expr(s).unwrap().to_poly(&reg).unwrap(), None);
        let word = BorelWord {
            n: 3,
            torus: Some(TorusElement { diag: vec![f("1"), f("v"), f("1")] }),
            factors: vec![
                RootGroupFactor { root: PosRoot::new(1, 1), param: f("x") },
                RootGroupFactor { root: PosRoot::new(3, 3), param: f("-y*v^-2") },
            ],
        };
        let mut rep = NilElement::zero(3, &f("0")).unwrap();
        rep.set(PosRoot::new(2, 2), f("1"));
        let out = adjoint(&word, &rep).unwrap();
        let expect = ["0", "v", "0", "x", "y", "x*y*v^-1"];
        for (c, e) in out.coords.iter().zip(expect) {
            assert!(c.value_eq(&f(e)), "{c} vs {e}");
        }
    }

    #[test]
    fn fixing_groups_of_x22() {
        let mut x = NilElement::zero(3, &BigRational::from_integer(0.into())).unwrap();
        x.set(PosRoot::new(2, 2), BigRational::from_integer(1.into()));
        let fix: Vec<String> = fixing_root_groups(&x).iter().map(|r| r.token()).collect();
        assert_eq!(fix, ["x22", "x12", "x23", "x13"]);
        let reg = Registry::new(["t"]).unwrap();
        let poly = x.map(|c| LaurentPoly::constant(&reg, c.clone()));
        assert_eq!(fixing_root_groups(&poly).len(), 4);
    }
}
