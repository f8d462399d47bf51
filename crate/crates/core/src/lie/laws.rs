//! Randomized checks of the group action laws over a prime field.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{adjoint, conjugate, pos_roots, BorelWord, NilElement, RootGroupFactor, TorusElement};
use crate::arith::Fp;
use crate::error::Result;

fn unit(rng: &mut ChaCha8Rng, p: u64) -> Fp {
    Fp::from_u64(rng.gen_range(1..p), p)
}

pub fn random_nil(n: usize, p: u64, rng: &mut ChaCha8Rng) -> Result<NilElement<Fp>> {
    let d = pos_roots(n)?.len();
    NilElement::new(n, (0..d).map(|_| Fp::from_u64(rng.gen_range(0..p), p)).collect())
}

/// A torus element followed by one to six random root group factors.
pub fn random_borel_word(n: usize, p: u64, rng: &mut ChaCha8Rng) -> Result<BorelWord<Fp>> {
    let roots = pos_roots(n)?;
    let torus = TorusElement { diag: (0..n).map(|_| unit(rng, p)).collect() };
    let k = rng.gen_range(1..=6);
    let factors = (0..k)
        .map(|_| RootGroupFactor { root: roots[rng.gen_range(0..roots.len())], param: Fp::from_u64(rng.gen_range(0..p), p) })
        .collect();
    Ok(BorelWord { n, torus: Some(torus), factors })
}

/// Checks, on `pairs` random `(b, x)`, that the factorwise action agrees
/// with conjugation, that `(b1 b2).x = b1.(b2.x)` and that
/// `b^{-1}.(b.x) = x`. Returns the first failure.
pub fn action_law_failure(n: usize, p: u64, pairs: usize, seed: u64) -> Result<Option<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let one = Fp::one(p);
    for k in 0..pairs {
        let b1 = random_borel_word(n, p, &mut rng)?;
        let b2 = random_borel_word(n, p, &mut rng)?;
        let x = random_nil(n, p, &mut rng)?;
        let (g1, g2) = (b1.to_matrix(&one)?, b2.to_matrix(&one)?);
        let bx = adjoint(&b1, &x)?;
        if bx != conjugate(&g1, &x)? {
            return Ok(Some(format!("pair {k}: factorwise action differs from conjugation at x = {x:?}")));
        }
        if conjugate(&g1.mul(&g2), &x)? != adjoint(&b1, &adjoint(&b2, &x)?)? {
            return Ok(Some(format!("pair {k}: composition law fails at x = {x:?}")));
        }
        if conjugate(&g1.upper_triangular_inverse()?, &bx)? != x {
            return Ok(Some(format!("pair {k}: inverse law fails at x = {x:?}")));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laws_hold_in_every_rank() {
        for n in 1..=4 {
            assert_eq!(action_law_failure(n, 101, 200, n as u64).unwrap(), None);
        }
    }
}
