use std::sync::Arc;

use bsv_core::graph::{graph_euler_eigenvalue, DeltaModule, GraphCtx, GraphElem, GraphSymbol};
use bsv_core::locoh::HyperData;
use bsv_core::poly::{rat, Poly, Rat, WeightSystem};
use bsv_core::weyl::WeylOp;
use proptest::prelude::*;

fn cusp_graph(f: Poly) -> Arc<GraphCtx> {
    let w = WeightSystem::new(vec!["x", "y"], vec![2, 3]).unwrap();
    let g = Poly::from_terms(2, [(vec![3, 0], rat(1, 1)), (vec![0, 2], rat(1, 1))]);
    GraphCtx::new(HyperData::new(g, w).unwrap(), f).unwrap()
}

fn contexts() -> impl Strategy<Value = Arc<GraphCtx>> {
    prop_oneof![
        Just(cusp_graph(Poly::var(2, 0))),
        Just(cusp_graph(Poly::var(2, 1))),
        Just(cusp_graph(Poly::from_terms(2, [(vec![3, 0], rat(1, 1)), (vec![0, 2], rat(-1, 1))]))),
    ]
}

fn coeff() -> impl Strategy<Value = Rat> {
    (-5i64..=5, 1i64..=3).prop_map(|(n, d)| rat(n, d))
}

fn element() -> impl Strategy<Value = GraphElem> {
    contexts().prop_flat_map(|ctx| {
        let part = (prop::collection::vec((prop::collection::vec(0u32..=3, 2), coeff()), 1..3), 1u32..=2, 0u32..=2);
        prop::collection::vec(part, 1..3).prop_map(move |parts| {
            parts.into_iter().fold(ctx.zero(), |acc, (terms, pole, layer)| {
                let m = ctx.hyper().fraction(Poly::from_terms(2, terms), pole);
                acc.add(&ctx.layer(m, layer))
            })
        })
    })
}

fn op(nvars: usize) -> impl Strategy<Value = WeylOp> {
    let term = (prop::collection::vec(0u32..=2, nvars), prop::collection::vec(0u32..=1, nvars), coeff());
    prop::collection::vec(term, 1..3).prop_map(move |terms| {
        terms.into_iter().fold(WeylOp::zero(nvars), |acc, (x, d, c)| acc.add(&WeylOp::monomial(nvars, x, d, c)))
    })
}

proptest! {
    #[test]
    fn dt_t_commutator_is_identity(e in element()) {
        let dt_t = e.act_symbol(GraphSymbol::T).act_symbol(GraphSymbol::Dt);
        let t_dt = e.act_symbol(GraphSymbol::Dt).act_symbol(GraphSymbol::T);
        prop_assert_eq!(dt_t.sub(&t_dt), e);
    }

    #[test]
    fn s_is_minus_theta_t_minus_one(e in element()) {
        let s = e.act_symbol(GraphSymbol::S);
        let theta = e.act_symbol(GraphSymbol::ThetaT);
        prop_assert_eq!(s, theta.scale(&rat(-1, 1)).sub(&e));
    }

    #[test]
    fn dx_commutes_with_t(e in element(), i in 0usize..2) {
        let a = e.act_symbol(GraphSymbol::T).act_symbol(GraphSymbol::Dx(i));
        let b = e.act_symbol(GraphSymbol::Dx(i)).act_symbol(GraphSymbol::T);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn action_respects_composition(e in element(), p in op(3), q in op(3)) {
        prop_assert_eq!(e.act(&p.compose(&q)), e.act(&q).act(&p));
    }

    #[test]
    fn graph_euler_formula(ctx in contexts(), deg in 0u64..=6, pole in 1u32..=2, layer in 0u32..=2, ls in -4i64..=4) {
        let monos = ctx.hyper().weights().monomials_of_degree(deg);
        prop_assume!(!monos.is_empty());
        let m = ctx.hyper().fraction(Poly::monomial(2, monos[0].clone(), rat(1, 1)), pole);
        prop_assume!(!m.is_zero());
        let e = ctx.layer(m, layer);
        let lambda_s = rat(ls, 2);
        let df = ctx.f_degree() as i64;
        let expected = rat(deg as i64 - 6 * pole as i64, 1) + rat(df, 1) * (&lambda_s - rat(layer as i64, 1));
        prop_assert_eq!(graph_euler_eigenvalue(&e, &lambda_s).unwrap(), expected);
    }

    #[test]
    fn delta_filtration_counts(base in 1usize..=3, codim in 1usize..=3, n in 0u32..=5) {
        let m = DeltaModule::new(base, codim).unwrap();
        let count = |c: usize, n: u32| -> usize { binomial(n as usize + c, c) };
        let lambda = rat(-(n as i64), 1);
        prop_assert_eq!(m.v_piece(&lambda).dim, base * count(codim, n));
        let gr: usize = (0..=n).map(|k| m.gr_dim(&rat(-(k as i64), 1))).sum();
        prop_assert_eq!(gr, base * count(codim, n));
        let up = m.push_forward();
        prop_assert_eq!(up.v_piece(&lambda).dim, base * count(codim + 1, n));
        prop_assert_eq!(up.bfunction(), m.bfunction());
        prop_assert_eq!(m.gr_dim(&rat(-1, 2)), 0);
    }
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn delta_bfunction_is_s() {
    for c in 1..=3 {
        assert_eq!(DeltaModule::new(2, c).unwrap().bfunction().to_string(), "s");
    }
}
