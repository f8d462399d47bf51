use std::sync::OnceLock;

use num_bigint::BigInt;
use orbit_atlas_core::arith::{BigRational, Fp, LaurentPoly, Registry};
use orbit_atlas_core::catalog::{load_catalog, Catalog};
use orbit_atlas_core::classify::classify;
use orbit_atlas_core::lie::{adjoint, conjugate, pos_roots, BorelWord, NilElement, RootGroupFactor, TorusElement};
use proptest::prelude::*;

const P: u64 = 101;

fn catalog(n: usize) -> &'static Catalog {
    static CATS: OnceLock<Vec<Catalog>> = OnceLock::new();
    &CATS.get_or_init(|| (1..=4).map(|n| load_catalog(n).unwrap()).collect())[n - 1]
}

fn fp(v: u64) -> Fp {
    Fp::from_u64(v, P)
}

fn nil(n: usize) -> impl Strategy<Value = NilElement<Fp>> {
    prop::collection::vec(0..P, n * (n + 1) / 2).prop_map(move |c| NilElement::new(n, c.into_iter().map(fp).collect()).unwrap())
}

fn word(n: usize) -> impl Strategy<Value = BorelWord<Fp>> {
    let roots = pos_roots(n).unwrap();
    let k = roots.len();
    (prop::collection::vec(1..P, n), prop::collection::vec((0..k, 0..P), 0..6)).prop_map(move |(diag, fs)| BorelWord {
        n,
        torus: Some(TorusElement { diag: diag.into_iter().map(fp).collect() }),
        factors: fs.into_iter().map(|(r, c)| RootGroupFactor { root: roots[r], param: fp(c) }).collect(),
    })
}

fn reg() -> std::sync::Arc<Registry> {
    Registry::new(["a", "b", "c"]).unwrap()
}

fn poly() -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((prop::collection::vec(-2i32..3, 3), -5i64..6, 1i64..4), 0..5).prop_map(|terms| {
        LaurentPoly::from_terms(
            &reg(),
            terms.into_iter().map(|(e, a, b)| (e, BigRational::new(BigInt::from(a), BigInt::from(b)))),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn laurent_ring_axioms(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn reduction_mod_p_commutes_with_evaluation(a in poly(), pt in prop::collection::vec(1i64..50, 3)) {
        let q: Vec<BigRational> = pt.iter().map(|&v| BigRational::from_integer(v.into())).collect();
        let exact = a.eval_rational(&q).unwrap();
        let modp = a.eval_mod_p(&pt.iter().map(|&v| Fp::new(v, P)).collect::<Vec<_>>(), P).unwrap();
        prop_assert_eq!(Fp::from_rational(&exact, P).unwrap(), modp);
    }

    #[test]
    fn action_composes_and_inverts((b1, b2, x) in (1usize..=4).prop_flat_map(|n| (word(n), word(n), nil(n)))) {
        let one = fp(1);
        let (g1, g2) = (b1.to_matrix(&one).unwrap(), b2.to_matrix(&one).unwrap());
        let bx = adjoint(&b1, &x).unwrap();
        prop_assert_eq!(&bx, &conjugate(&g1, &x).unwrap());
        prop_assert_eq!(conjugate(&g1.mul(&g2), &x).unwrap(), adjoint(&b1, &adjoint(&b2, &x).unwrap()).unwrap());
        prop_assert_eq!(conjugate(&g1.upper_triangular_inverse().unwrap(), &bx).unwrap(), x);
    }

    #[test]
    fn strata_are_borel_stable_in_rank_three(b in word(3), m in nil(3)) {
        let cat = catalog(3);
        let before = classify(cat, &m).unwrap().orbit_id;
        let after = classify(cat, &adjoint(&b, &m).unwrap()).unwrap().orbit_id;
        prop_assert_eq!(before, after);
    }

    #[test]
    fn strata_are_borel_stable_in_rank_four(b in word(4), m in nil(4)) {
        let cat = catalog(4);
        let before = classify(cat, &m).unwrap().orbit_id;
        let after = classify(cat, &adjoint(&b, &m).unwrap()).unwrap().orbit_id;
        prop_assert_eq!(before, after);
    }

    #[test]
    fn classification_is_scale_invariant(n in 1usize..=4, lambda in 1..P, seed in prop::collection::vec(0..P, 10)) {
        let m = NilElement::new(n, seed[..n * (n + 1) / 2].iter().map(|&v| fp(v)).collect()).unwrap();
        let cat = catalog(n);
        prop_assert_eq!(
            classify(cat, &m).unwrap().orbit_id,
            classify(cat, &m.map(|c| *c * fp(lambda))).unwrap().orbit_id
        );
    }
}
