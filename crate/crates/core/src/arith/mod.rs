//! Exact arithmetic: prime fields, Laurent polynomials over Q, radical
//! towers and rational functions.

pub mod expr;
pub mod fp;
pub mod fraction;
pub mod poly;
pub mod radical;
pub mod ring;

pub use expr::{parse_expr, parse_poly, Expr};
pub use fp::{is_prime, Fp};
pub use fraction::LaurentFraction;
pub use num_rational::BigRational;
pub use poly::{Exponents, LaurentPoly, Registry};
pub use radical::{RadicalRelation, Tower};
pub use ring::Ring;

/// A coefficient: either an exact rational or an element of a prime field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scalar {
    Rational(BigRational),
    Prime(Fp),
}
