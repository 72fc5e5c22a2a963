use bsv_core::poly::{rat, Poly, Rat, WeightSystem};
use bsv_core::weyl::WeylOp;
use proptest::prelude::*;

const N: usize = 3;

fn coeff() -> impl Strategy<Value = Rat> {
    (-5i64..=5, 1i64..=3).prop_map(|(n, d)| rat(n, d))
}

/// Operators of order at most 3.
fn op() -> impl Strategy<Value = WeylOp> {
    let term = (prop::collection::vec(0u32..=2, N), prop::collection::vec(0usize..N, 0..=3), coeff());
    prop::collection::vec(term, 0..4).prop_map(|terms| {
        terms.into_iter().fold(WeylOp::zero(N), |acc, (x, ds, c)| {
            let mut d = vec![0u32; N];
            for i in ds {
                d[i] += 1;
            }
            acc.add(&WeylOp::monomial(N, x, d, c))
        })
    })
}

fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec((prop::collection::vec(0u32..=4, N), coeff()), 0..5)
        .prop_map(|terms| Poly::from_terms(N, terms))
}

proptest! {
    #[test]
    fn adjoint_is_an_involution(p in op()) {
        prop_assert_eq!(p.adjoint().adjoint(), p);
    }

    #[test]
    fn adjoint_reverses_products(p in op(), q in op()) {
        prop_assert_eq!(p.compose(&q).adjoint(), q.adjoint().compose(&p.adjoint()));
    }

    #[test]
    fn action_respects_composition(p in op(), q in op(), h in poly()) {
        prop_assert_eq!(p.compose(&q).apply(&h), p.apply(&q.apply(&h)));
    }

    #[test]
    fn compose_is_associative(p in op(), q in op(), r in op()) {
        prop_assert_eq!(p.compose(&q).compose(&r), p.compose(&q.compose(&r)));
    }

    #[test]
    fn order_is_subadditive(p in op(), q in op()) {
        let pq = p.compose(&q);
        if !pq.is_zero() {
            prop_assert!(pq.order() <= p.order() + q.order());
        }
    }

    #[test]
    fn euler_scales_homogeneous_polynomials(e in prop::collection::vec(0u32..=4, N), c in coeff()) {
        let w = WeightSystem::new(vec!["x", "y", "z"], vec![2, 3, 1]).unwrap();
        let h = Poly::monomial(N, e.clone(), c);
        let deg = w.degree_of(&e) as i64;
        prop_assert_eq!(WeylOp::euler(&w).apply(&h), h.scale(&rat(deg, 1)));
    }
}

#[test]
fn canonical_commutator() {
    for i in 0..N {
        let x = WeylOp::var(N, i);
        let d = WeylOp::d(N, i);
        assert_eq!(d.compose(&x).sub(&x.compose(&d)), WeylOp::identity(N));
    }
}
