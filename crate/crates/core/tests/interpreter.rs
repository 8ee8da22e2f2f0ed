mod common;

use contlogic::dsl::{
    check_sequent, check_theory, interpret_formula, load_model, parse_theory, Formula,
    Interpretation, SequentAst, Signature, UBackend,
};
use contlogic::gen::Gen;
use contlogic::metric::{
    discrete, forgetful, into_strict, transfer_interpretation, CmtBackend, Embedding, Transported,
};
use contlogic::per::StrictU;
use contlogic::{Predicate, Value};

#[test]
fn open_formulas_agree_with_pointwise_evaluation() {
    let mut g = Gen::new(77);
    for _ in 0..300 {
        let sig = g.signature(true);
        let model = g.u_model(&sig, 3);
        let seq = g.sequent(&sig, 3);
        for phi in [&seq.lhs, &seq.rhs] {
            let p = interpret_formula(&UBackend, &model, &seq.context, phi).unwrap();
            for (idx, env) in common::environments(&model, &seq.context) {
                assert_eq!(
                    p.at(idx),
                    common::eval(&model, &env, phi),
                    "{phi} at {env:?}"
                );
            }
        }
    }
}

#[test]
fn meet_of_interpretations_is_the_interpretation_of_the_conjunction() {
    let mut g = Gen::new(78);
    for _ in 0..100 {
        let sig = g.signature(false);
        let model = g.u_model(&sig, 3);
        let seq = g.sequent(&sig, 2);
        let conj = Formula::And(Box::new(seq.lhs.clone()), Box::new(seq.rhs.clone()));
        let both = interpret_formula(&UBackend, &model, &seq.context, &conj).unwrap();
        let l = interpret_formula(&UBackend, &model, &seq.context, &seq.lhs).unwrap();
        let r = interpret_formula(&UBackend, &model, &seq.context, &seq.rhs).unwrap();
        assert_eq!(both, contlogic::doctrine::meet(&l, &r).unwrap());
    }
}

fn perturb(g: &mut Gen, p: &Predicate) -> Predicate {
    p.map(|v| {
        if v.is_zero() {
            Value::ZERO
        } else {
            g.nonzero_value()
        }
    })
}

#[test]
fn validity_is_stable_under_equivalent_relations() {
    let mut g = Gen::new(79);
    for _ in 0..100 {
        let sig = g.signature(false);
        let model = g.u_model(&sig, 3);
        let mut other = model.clone();
        for r in other.relations.values_mut() {
            *r = perturb(&mut g, r);
        }
        for _ in 0..10 {
            let seq = g.sequent(&sig, 3);
            let a = check_sequent(&UBackend, &model, &seq).unwrap().valid;
            let b = check_sequent(&UBackend, &other, &seq).unwrap().valid;
            assert_eq!(a, b, "{seq}");
        }
    }
}

fn verdicts(g: &mut Gen, sig: &Signature, n: usize) -> Vec<SequentAst> {
    (0..n).map(|_| g.sequent(sig, 3)).collect()
}

#[test]
fn embeddings_preserve_and_reflect_validity() {
    let mut g = Gen::new(80);
    let (mut valid, mut invalid) = (0, 0);
    for _ in 0..40 {
        let sig = g.signature(false);
        let cmt = g.cmt_model(&sig, 3);
        let strict = into_strict(&cmt, &sig).unwrap();
        let u = g.u_model(&sig, 3);
        let disc = discrete(&u);
        for seq in verdicts(&mut g, &sig, 20) {
            let a = check_sequent(&CmtBackend, &cmt, &seq).unwrap().valid;
            let b = check_sequent(&StrictU, &strict, &seq).unwrap().valid;
            assert_eq!(a, b, "CMT vs Strict(U): {seq}");
            if a {
                valid += 1;
            } else {
                invalid += 1;
            }
            let c = check_sequent(&UBackend, &u, &seq).unwrap().valid;
            let d = check_sequent(&CmtBackend, &disc, &seq).unwrap().valid;
            assert_eq!(c, d, "U vs discrete CMT: {seq}");
        }
    }
    assert!(
        valid > 50 && invalid > 50,
        "degenerate sample: {valid} valid, {invalid} invalid"
    );
}

#[test]
fn forgetful_transport_keeps_tables() {
    let mut g = Gen::new(81);
    let sig = g.signature(false);
    let cmt = g.cmt_model(&sig, 3);
    let Transported::U(u) = transfer_interpretation(&cmt, &sig, Embedding::Forgetful).unwrap()
    else {
        panic!("forgetful transport lands in U");
    };
    for (s, m) in &cmt.sorts {
        assert_eq!(&u.sorts[s], m.carrier());
    }
    for (f, a) in &cmt.functions {
        assert_eq!(u.functions[f], a.map);
    }
    assert_eq!(u.relations, cmt.relations);
    let Transported::Strict(s) = transfer_interpretation(&cmt, &sig, Embedding::Strict).unwrap()
    else {
        panic!("G transport lands in Strict(U)");
    };
    for (name, m) in &cmt.sorts {
        assert_eq!(s.sorts[name].rel(), m.d());
    }
    let _: Interpretation<UBackend> = forgetful(&cmt);
}

#[test]
fn theory_file_against_model_file() {
    let theory = parse_theory(
        "sort S\n\
         rel R : S\n\
         func f : S -> S\n\
         top |- E x:S. R(x)\n\
         top |- A x:S. R(x)\n\
         [x:S, y:S] x = y |- y = x\n\
         [x:S] R(f(x)) |- R(x)\n",
    )
    .unwrap();
    let model = load_model(
        r#"{
            "sorts": {"S": ["a", "b"]},
            "functions": {"f": {"args": ["S"], "result": "S", "table": {"a": "a", "b": "a"}}},
            "relations": {"R": {"args": ["S"], "values": {"a": "0", "b": "1/3"}}}
        }"#,
        &theory.signature,
    )
    .unwrap();
    let v = check_theory(&UBackend, &model.interp, &theory).unwrap();
    let valid: Vec<bool> = v.iter().map(|s| s.valid).collect();
    assert_eq!(valid, [true, false, true, false]);
    assert_eq!(v[1].witness.as_deref(), Some("*"));
    assert_eq!(v[3].witness.as_deref(), Some("b"));
    assert!(v[0].forward.modulus.is_some());
}
