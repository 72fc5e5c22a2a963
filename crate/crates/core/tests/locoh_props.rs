use std::collections::BTreeMap;
use std::sync::Arc;

use bsv_core::linsolve::solve_columns;
use bsv_core::locoh::{HyperData, LocCohElem};
use bsv_core::poly::{rat, Poly, Rat, WeightSystem};
use bsv_core::weyl::WeylOp;
use proptest::prelude::*;

fn quadric() -> Arc<HyperData> {
    let w = WeightSystem::standard(vec!["x", "y", "z"]);
    let g = Poly::from_terms(3, [(vec![2, 0, 0], rat(1, 1)), (vec![0, 2, 0], rat(1, 1)), (vec![0, 0, 2], rat(1, 1))]);
    HyperData::new(g, w).unwrap()
}

fn cusp() -> Arc<HyperData> {
    let w = WeightSystem::new(vec!["x", "y"], vec![2, 3]).unwrap();
    let g = Poly::from_terms(2, [(vec![3, 0], rat(1, 1)), (vec![0, 2], rat(1, 1))]);
    HyperData::new(g, w).unwrap()
}

fn context() -> impl Strategy<Value = Arc<HyperData>> {
    prop_oneof![Just(quadric()), Just(cusp())]
}

fn coeff() -> impl Strategy<Value = Rat> {
    (-5i64..=5, 1i64..=3).prop_map(|(n, d)| rat(n, d)).prop_filter("nonzero", |c| *c != rat(0, 1))
}

/// A homogeneous numerator of the given weighted degree.
fn numerator(h: &Arc<HyperData>, degree: u64) -> BoxedStrategy<Poly> {
    let monos = h.weights().monomials_of_degree(degree);
    let n = h.nvars();
    if monos.is_empty() {
        return Just(Poly::zero(n)).boxed();
    }
    let len = monos.len();
    prop::collection::vec((0..len, coeff()), 1..4)
        .prop_map(move |picks| Poly::from_terms(n, picks.into_iter().map(|(i, c)| (monos[i].clone(), c))))
        .boxed()
}

/// `(context, h, k)` with `h` homogeneous.
fn fraction() -> impl Strategy<Value = (Arc<HyperData>, Poly, u32, u64)> {
    (context(), 0u64..=7, 1u32..=3)
        .prop_flat_map(|(h, deg, k)| (Just(h.clone()), numerator(&h, deg), Just(k), Just(deg)))
}

fn general_poly(n: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec((prop::collection::vec(0u32..=3, n), coeff()), 0..4).prop_map(move |t| Poly::from_terms(n, t))
}

fn element() -> impl Strategy<Value = LocCohElem> {
    context().prop_flat_map(|h| {
        let n = h.nvars();
        prop::collection::vec((general_poly(n), 1u32..=3), 1..3)
            .prop_map(move |parts| parts.into_iter().fold(h.zero(), |acc, (p, k)| acc.add(&h.fraction(p, k))))
    })
}

proptest! {
    #[test]
    fn multiplying_by_g_lowers_the_pole((h, p, k, _) in fraction()) {
        let m = h.fraction(p.clone(), k);
        let lowered = m.mul_poly(h.g());
        if k == 1 {
            prop_assert!(lowered.is_zero());
        } else {
            prop_assert_eq!(lowered, h.fraction(p, k - 1));
        }
    }

    #[test]
    fn euler_law((h, p, k, deg) in fraction()) {
        let m = h.fraction(p, k);
        prop_assume!(!m.is_zero());
        let expected = rat(deg as i64 - h.degree() as i64 * k as i64, 1);
        prop_assert_eq!(m.euler_eigenvalue().unwrap(), expected.clone());
        prop_assert_eq!(m.act(&WeylOp::euler(h.weights())), m.scale(&expected));
    }

    #[test]
    fn reduce_is_idempotent(m in element()) {
        let h = m.context().clone();
        let raw: BTreeMap<i64, Poly> = m.numerators().iter().map(|(k, p)| (*k as i64, p.clone())).collect();
        prop_assert_eq!(h.reduce(&raw), m.clone());
        let expanded: BTreeMap<i64, Poly> = m.numerators().iter().map(|(k, p)| (*k as i64 + 1, p.mul(h.g()))).collect();
        prop_assert_eq!(h.reduce(&expanded), m);
    }

    #[test]
    fn derivatives_follow_the_quotient_rule((h, p, k, _) in fraction(), j in 0usize..2) {
        let m = h.fraction(p.clone(), k);
        let kr = rat(k as i64, 1);
        let expected = h
            .fraction(p.derivative(j), k)
            .sub(&h.fraction(p.mul(&h.g().derivative(j)).scale(&kr), k + 1));
        prop_assert_eq!(m.derivative(j), expected);
    }

    #[test]
    fn weight_basis_spans_uniquely((h, lambda, cap) in (context(), -6i64..=3, 1u32..=2), seed in prop::collection::vec(coeff(), 1..6)) {
        let basis = h.weight_basis(lambda, cap);
        let cols: Vec<BTreeMap<(u32, Vec<u32>), Rat>> = basis.iter().map(coords).collect();
        for i in 0..cols.len() {
            let mut others = cols.clone();
            let target = others.remove(i);
            prop_assert!(solve_columns(&others, &target).is_none(), "basis element {} is dependent", i);
        }
        // a random weight-lambda element of pole order at most cap
        let mut m = h.zero();
        for (i, c) in seed.iter().enumerate() {
            let k = 1 + (i as u32 % cap);
            let deg = lambda + h.degree() as i64 * k as i64;
            if deg < 0 {
                continue;
            }
            let monos = h.weights().monomials_of_degree(deg as u64);
            if monos.is_empty() {
                continue;
            }
            let e = monos[i % monos.len()].clone();
            m = m.add(&h.fraction(Poly::monomial(h.nvars(), e, c.clone()), k));
        }
        let sol = solve_columns(&cols, &coords(&m));
        prop_assert!(sol.is_some());
        let sol = sol.unwrap();
        let rebuilt = basis.iter().zip(&sol).fold(h.zero(), |acc, (b, c)| acc.add(&b.scale(c)));
        prop_assert_eq!(rebuilt, m);
    }
}

fn coords(m: &LocCohElem) -> BTreeMap<(u32, Vec<u32>), Rat> {
    m.coords().map(|((k, e), c)| ((k, e.clone()), c.clone())).collect()
}

#[test]
fn worked_eigenvalues() {
    let c = cusp();
    let x = Poly::var(2, 0);
    assert_eq!(c.fraction(x, 1).euler_eigenvalue().unwrap(), rat(-4, 1));
    let q = quadric();
    assert_eq!(q.fraction(Poly::one(3), 1).euler_eigenvalue().unwrap(), rat(-2, 1));
    let mixed = q.fraction(Poly::one(3), 1).add(&q.fraction(Poly::var(3, 0), 1));
    assert!(mixed.euler_eigenvalue().is_err());
}
