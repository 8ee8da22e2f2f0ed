mod common;

use std::collections::BTreeSet;

use contlogic::connective::{
    classify, eval_connective, parse_connective, Connective, ConnectiveExpr,
};
use contlogic::doctrine::{
    bottom, eq_predicate, exists_along, forall_along, join, meet, pullback, top,
};
use contlogic::gen::{Gen, VALUE_POOL};
use contlogic::metric::{
    check_metric_axioms, g_morphism, g_object, is_uniformly_continuous, truncate_diameter,
};
use contlogic::order::leq;
use contlogic::per::{self, check_functional, compose, morphism_eq};
use contlogic::{Carrier, MapArrow, Predicate, Rational, Value};
use proptest::prelude::*;

fn pool_value(i: usize) -> Value {
    let (n, d) = VALUE_POOL[i % VALUE_POOL.len()];
    Value::new(n, d).unwrap()
}

fn predicate_on(c: &Carrier, idx: &[usize]) -> Predicate {
    Predicate::from_fn(c, |e| pool_value(idx[e]))
}

prop_compose! {
    fn pred_pair(max: usize)(n in 0..=max)(
        a in prop::collection::vec(0..VALUE_POOL.len(), n),
        b in prop::collection::vec(0..VALUE_POOL.len(), n),
        c in prop::collection::vec(0..VALUE_POOL.len(), n),
    ) -> (Predicate, Predicate, Predicate) {
        let x = Carrier::numbered("e", a.len());
        (predicate_on(&x, &a), predicate_on(&x, &b), predicate_on(&x, &c))
    }
}

prop_compose! {
    fn map_with_pred(max: usize)(n in 0..=max, m in 1..=max)(
        table in prop::collection::vec(0..m, n),
        alpha in prop::collection::vec(0..VALUE_POOL.len(), n),
        beta in prop::collection::vec(0..VALUE_POOL.len(), m),
        m in Just(m),
    ) -> (MapArrow, Predicate, Predicate) {
        let (dom, cod) = (Carrier::numbered("y", table.len()), Carrier::numbered("x", m));
        let f = MapArrow::new(dom.clone(), cod.clone(), table).unwrap();
        (f, predicate_on(&dom, &alpha), predicate_on(&cod, &beta))
    }
}

fn zeros(p: &Predicate) -> BTreeSet<usize> {
    (0..p.carrier().size())
        .filter(|&x| p.at(x).is_zero())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn fiber_reflects_to_the_powerset_lattice((a, b, _) in pred_pair(4)) {
        let x = a.carrier().clone();
        let all: BTreeSet<usize> = (0..x.size()).collect();
        prop_assert_eq!(zeros(&meet(&a, &b).unwrap()), zeros(&a).intersection(&zeros(&b)).copied().collect());
        prop_assert_eq!(zeros(&join(&a, &b).unwrap()), zeros(&a).union(&zeros(&b)).copied().collect());
        prop_assert_eq!(zeros(&top(&x)), all);
        prop_assert!(zeros(&bottom(&x)).is_empty());
        prop_assert!(leq(&bottom(&x), &a).unwrap().holds);
        prop_assert_eq!(leq(&a, &b).unwrap().holds, zeros(&a).is_subset(&zeros(&b)));
    }

    #[test]
    fn distributivity_is_pointwise((a, b, c) in pred_pair(5)) {
        let lhs = meet(&a, &join(&b, &c).unwrap()).unwrap();
        let rhs = join(&meet(&a, &b).unwrap(), &meet(&a, &c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn quantifier_zero_sets((f, alpha, _) in map_with_pred(4)) {
        let image: BTreeSet<usize> = zeros(&alpha).iter().map(|&y| f.apply(y)).collect();
        prop_assert_eq!(zeros(&exists_along(&f, &alpha).unwrap()), image);
        let za = zeros(&alpha);
        let expected: BTreeSet<usize> =
            (0..f.codomain().size()).filter(|&x| f.fiber(x).all(|y| za.contains(&y))).collect();
        prop_assert_eq!(zeros(&forall_along(&f, &alpha).unwrap()), expected);
    }

    #[test]
    fn reindexing_and_quantifiers_are_monotone((f, a1, b1) in map_with_pred(4), seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let a2 = a1.map(|v| if v.is_zero() || g.coin(0.5) { *v } else { Value::ZERO });
        let b2 = b1.map(|v| if v.is_zero() || g.coin(0.5) { *v } else { Value::ZERO });
        // a1 ⊑ a2 and b1 ⊑ b2 by construction: a2 only gains zeros
        prop_assert!(leq(&a1, &a2).unwrap().holds && leq(&b1, &b2).unwrap().holds);
        prop_assert!(leq(&pullback(&f, &b1).unwrap(), &pullback(&f, &b2).unwrap()).unwrap().holds);
        prop_assert!(leq(&exists_along(&f, &a1).unwrap(), &exists_along(&f, &a2).unwrap()).unwrap().holds);
        prop_assert!(leq(&forall_along(&f, &a1).unwrap(), &forall_along(&f, &a2).unwrap()).unwrap().holds);
    }

    #[test]
    fn finite_fibers_have_a_heyting_implication((a, b, c) in pred_pair(4)) {
        // (a ⇒ b) is zero exactly where a is nonzero or b is zero
        let imp = a.zip_with(&b, |x, y| if !x.is_zero() || y.is_zero() { Value::ZERO } else { Value::ONE }).unwrap();
        let lhs = leq(&meet(&c, &a).unwrap(), &b).unwrap().holds;
        prop_assert_eq!(lhs, leq(&c, &imp).unwrap().holds);
    }

    #[test]
    fn equality_is_reflexive_and_discrete(n in 0usize..5) {
        let x = Carrier::numbered("e", n);
        let eq = eq_predicate(&x);
        let xx = Carrier::product(&x, &x);
        for e in xx.elements() {
            let (p, q) = xx.split(e);
            prop_assert_eq!(eq.at(e).is_zero(), p == q);
        }
    }

    #[test]
    fn morphism_equality_is_symmetric_on_functional_relations(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let (cx, cy) = (g.carrier(3), g.carrier(3));
        let (x, y) = (g.per(&cx), g.per(&cy));
        let f = g.functional(&x, &y);
        let h = g.functional(&x, &y);
        prop_assert_eq!(morphism_eq(&f, &h).unwrap(), morphism_eq(&h, &f).unwrap());
    }

    #[test]
    fn strictness_is_automatic_between_equivalence_relations(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let (cx, cy) = (g.carrier(3), g.carrier(3));
        let (x, y) = (g.equiv_rel(&cx), g.equiv_rel(&cy));
        let rel = g.predicate(&Carrier::product(&cx, &cy));
        prop_assert!(check_functional(x.as_per(), y.as_per(), &rel).unwrap().strict);
    }

    #[test]
    fn subobject_correspondence_is_monotone(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let c = g.carrier(3);
        let x = g.per(&c);
        let (phi, psi) = (g.strict_predicate(&x), g.strict_predicate(&x));
        let (_, m1) = per::sub_from_strict(&phi).unwrap();
        let (_, m2) = per::sub_from_strict(&psi).unwrap();
        prop_assert_eq!(phi.leq(&psi).unwrap(), per::factors_through(&m1, &m2).unwrap());
    }

    #[test]
    fn composites_of_graphs_are_graphs_of_composites(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let (a, b, c) = (g.carrier(3), g.carrier(3), g.carrier(3));
        let (f, h) = (g.map(&a, &b), g.map(&b, &c));
        let (pa, pb, pc) = (per::Per::discrete(&a), per::Per::discrete(&b), per::Per::discrete(&c));
        let lhs = compose(&per::graph(&f, &pa, &pb), &per::graph(&h, &pb, &pc)).unwrap();
        let rhs = per::graph(&h.after(&f).unwrap(), &pa, &pc);
        prop_assert!(morphism_eq(&lhs, &rhs).unwrap());
    }

    #[test]
    fn g_images_are_equivalence_relations_and_functional(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let (cm, cn) = (g.carrier(4), g.carrier(4));
        let sep = g.coin(0.5);
        let (m, n) = (g.metric(&cm, sep), g.metric(&cn, true));
        prop_assert!(per::is_equiv_rel(&cm, m.d()).unwrap());
        let f = g.uc_map(&m, &n);
        prop_assert!(is_uniformly_continuous(&f, &m, &n).unwrap().holds);
        prop_assert!(g_morphism(&f, &m, &n).unwrap().check().unwrap().all());
        prop_assert!(g_object(&m).is_reflexive());
    }

    #[test]
    fn truncation_preserves_the_axioms(n in 1usize..5, w in prop::collection::vec(1i64..12, 16)) {
        let c = Carrier::numbered("p", n);
        // shortest-path closure of weights in quarters, possibly above 1
        let mut d = vec![vec![Rational::from_integer(0); n]; n];
        for i in 0..n {
            for j in i + 1..n {
                d[i][j] = Rational::new(w[(i * n + j) % w.len()], 4);
                d[j][i] = d[i][j];
            }
        }
        for k in 0..n { for i in 0..n { for j in 0..n {
            if d[i][k] + d[k][j] < d[i][j] { d[i][j] = d[i][k] + d[k][j]; }
        }}}
        let raw: Vec<Rational> = d.into_iter().flatten().collect();
        let m = truncate_diameter(&c, &raw).unwrap();
        let check = check_metric_axioms(&c, m.d()).unwrap();
        prop_assert!(check.pseudometric && check.metric);
    }

    #[test]
    fn monotone_connectives_without_products_preserve(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let expr = random_monotone(&mut g, 3);
        let n = arity(&expr);
        let u = Connective::with_arity(n.max(1), expr).unwrap();
        let zero = vec![Value::ZERO; u.arity()];
        prop_assume!(eval_connective(&u, &zero).unwrap().is_zero());
        prop_assert!(classify(&u, 3).unwrap().preserves(), "{}", u);
    }

    #[test]
    fn connective_display_round_trips(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let expr = random_monotone(&mut g, 3);
        let u = Connective::with_arity(arity(&expr).max(1), expr).unwrap();
        let again = parse_connective(&u.to_string()).unwrap();
        prop_assert_eq!(again.to_string(), u.to_string());
    }
}

fn arity(e: &ConnectiveExpr) -> usize {
    e.min_arity()
}

fn random_monotone(g: &mut Gen, depth: usize) -> ConnectiveExpr {
    if depth == 0 || g.coin(0.3) {
        return ConnectiveExpr::var(g.size(0, 2));
    }
    let a = random_monotone(g, depth - 1);
    let b = random_monotone(g, depth - 1);
    match g.size(0, 3) {
        0 => ConnectiveExpr::min(a, b),
        1 => ConnectiveExpr::max(a, b),
        2 => ConnectiveExpr::tadd(a, b),
        _ => ConnectiveExpr::scale(Value::new(1, g.size(1, 4) as i64).unwrap(), a),
    }
}
