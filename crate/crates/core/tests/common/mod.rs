//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use contlogic::dsl::{Formula, Interpretation, Term, UBackend};
use contlogic::{Carrier, Elem, Predicate, Value};

/// `α ⊑ β` as inclusion of zero sets, computed directly.
pub fn zero_inclusion(alpha: &Predicate, beta: &Predicate) -> bool {
    (0..alpha.carrier().size()).all(|x| !alpha.at(x).is_zero() || beta.at(x).is_zero())
}

pub fn same_zeros(alpha: &Predicate, beta: &Predicate) -> bool {
    zero_inclusion(alpha, beta) && zero_inclusion(beta, alpha)
}

/// Index of a tuple in the left-nested product of its factors.
pub fn tuple_index(factors: &[Carrier], elems: &[Elem]) -> Elem {
    match factors.len() {
        0 => 0,
        _ => {
            let (mut c, mut e) = (factors[0].clone(), elems[0]);
            for (f, &x) in factors[1..].iter().zip(&elems[1..]) {
                let p = Carrier::product(&c, f);
                e = p.pair(e, x);
                c = p;
            }
            e
        }
    }
}

pub type Env = BTreeMap<String, Elem>;

fn term(m: &Interpretation<UBackend>, env: &Env, t: &Term) -> Elem {
    match t {
        Term::Var { name, .. } => env[name],
        Term::App { func, args, .. } => {
            let f = &m.functions[func];
            let elems: Vec<Elem> = args.iter().map(|a| term(m, env, a)).collect();
            let factors: Vec<Carrier> = args.iter().map(|a| m.sorts[a.sort()].clone()).collect();
            f.apply(tuple_index(&factors, &elems))
        }
    }
}

/// Pointwise evaluation by structural recursion over an environment.
pub fn eval(m: &Interpretation<UBackend>, env: &Env, phi: &Formula) -> Value {
    match phi {
        Formula::Top => Value::ZERO,
        Formula::Bot => Value::ONE,
        Formula::Rel { name, args, .. } => {
            let elems: Vec<Elem> = args.iter().map(|a| term(m, env, a)).collect();
            let factors: Vec<Carrier> = args.iter().map(|a| m.sorts[a.sort()].clone()).collect();
            m.relations[name].at(tuple_index(&factors, &elems))
        }
        Formula::Eq(s, t) => {
            if term(m, env, s) == term(m, env, t) {
                Value::ZERO
            } else {
                Value::ONE
            }
        }
        Formula::And(a, b) => eval(m, env, a).max(eval(m, env, b)),
        Formula::Or(a, b) => eval(m, env, a).min(eval(m, env, b)),
        Formula::Exists {
            var, sort, body, ..
        } => {
            let mut best = Value::ONE;
            for x in 0..m.sorts[sort].size() {
                let mut inner = env.clone();
                inner.insert(var.clone(), x);
                best = best.min(eval(m, &inner, body));
            }
            best
        }
        Formula::Forall {
            var, sort, body, ..
        } => {
            let mut worst = Value::ZERO;
            for x in 0..m.sorts[sort].size() {
                let mut inner = env.clone();
                inner.insert(var.clone(), x);
                worst = worst.max(eval(m, &inner, body));
            }
            worst
        }
        Formula::Conn {
            connective, args, ..
        } => {
            let vals: Vec<Value> = args.iter().map(|a| eval(m, env, a)).collect();
            connective.eval(&vals).expect("connective evaluates")
        }
    }
}

/// All environments for a context, in the order of its left-nested product.
pub fn environments(m: &Interpretation<UBackend>, ctx: &[(String, String)]) -> Vec<(Elem, Env)> {
    let factors: Vec<Carrier> = ctx.iter().map(|(_, s)| m.sorts[s].clone()).collect();
    let mut out = vec![(Vec::new(), Env::new())];
    for ((v, _), c) in ctx.iter().zip(&factors) {
        out = out
            .into_iter()
            .flat_map(|(elems, env)| {
                (0..c.size()).map(move |x| {
                    let mut e2 = elems.clone();
                    e2.push(x);
                    let mut env2 = env.clone();
                    env2.insert(v.clone(), x);
                    (e2, env2)
                })
            })
            .collect();
    }
    out.into_iter()
        .map(|(elems, env)| (tuple_index(&factors, &elems), env))
        .collect()
}
