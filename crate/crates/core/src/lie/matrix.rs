use crate::arith::Ring;
use crate::error::{Error, Result};

/// Dense square matrix over a [`Ring`].
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<R> {
    dim: usize,
    data: Vec<R>,
}

impl<R: Ring> Matrix<R> {
    pub fn zero(dim: usize, proto: &R) -> Self {
        Matrix { dim, data: vec![proto.zero_like(); dim * dim] }
    }

    pub fn identity(dim: usize, proto: &R) -> Self {
        let mut m = Self::zero(dim, proto);
        for k in 0..dim {
            m.set(k, k, proto.one_like());
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, a: usize, b: usize) -> &R {
        &self.data[a * self.dim + b]
    }

    pub fn set(&mut self, a: usize, b: usize, v: R) {
        self.data[a * self.dim + b] = v;
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.dim, o.dim);
        let d = self.dim;
        let mut out = Self::zero(d, &self.data[0]);
        for a in 0..d {
            for k in 0..d {
                let x = self.get(a, k);
                if x.is_zero_elem() {
                    continue;
                }
                for b in 0..d {
                    let y = o.get(k, b);
                    if y.is_zero_elem() {
                        continue;
                    }
                    let cur = out.get(a, b).plus(&x.times(y));
                    out.set(a, b, cur);
                }
            }
        }
        out
    }

    /// Inverse by back substitution; needs a unit diagonal entry in each row.
    pub fn upper_triangular_inverse(&self) -> Result<Self> {
        let d = self.dim;
        for a in 0..d {
            for b in 0..a {
                if !self.get(a, b).is_zero_elem() {
                    return Err(Error::Domain("matrix is not upper triangular".into()));
                }
            }
        }
        let mut inv = Self::zero(d, &self.data[0]);
        let diag_inv: Vec<R> = (0..d).map(|k| self.get(k, k).inverse()).collect::<Result<_>>()?;
        for b in 0..d {
            inv.set(b, b, diag_inv[b].clone());
            for a in (0..b).rev() {
                // (A inv)_{ab} = 0 for a < b: A_aa inv_ab + sum_{a<k<=b} A_ak inv_kb = 0
                let mut s = self.get(a, a).zero_like();
                for k in a + 1..=b {
                    let t = self.get(a, k);
                    if !t.is_zero_elem() {
                        s = s.plus(&t.times(inv.get(k, b)));
                    }
                }
                inv.set(a, b, s.times(&diag_inv[a]).negate());
            }
        }
        Ok(inv)
    }
}
