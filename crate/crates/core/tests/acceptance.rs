//! The acceptance criteria, run at full size with wall-clock limits. Prints
//! one PASS/FAIL line per criterion and exits nonzero if any fails.

mod common;

use std::time::{Duration, Instant};

use contlogic::connective::{classify, demonstrate, parse_connective, ClassifierVerdict};
use contlogic::doctrine::Ops;
use contlogic::dsl::{interpret_formula, UBackend};
use contlogic::gen::Gen;
use contlogic::laws::{
    mutation_kills, run_laws, validity_transfer, LawReport, METRIC_LAWS, PER_LAWS, U_LAWS,
};
use contlogic::order::leq;
use contlogic::{Carrier, Predicate, Value};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 2024;

struct Outcome {
    ok: bool,
    detail: String,
}

fn failing(reports: &[LawReport]) -> Vec<String> {
    reports
        .iter()
        .filter(|r| !r.passed())
        .map(|r| format!("{} ({} failures)", r.law, r.failures.len()))
        .collect()
}

fn laws_outcome(reports: &[LawReport]) -> Outcome {
    let bad = failing(reports);
    let instances: usize = reports.iter().map(|r| r.instances).sum();
    Outcome {
        ok: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("{instances} instances, 0 failures")
        } else {
            bad.join(", ")
        },
    }
}

fn random_value(rng: &mut ChaCha8Rng) -> Value {
    if rng.gen_bool(0.35) {
        return Value::ZERO;
    }
    let d = rng.gen_range(1..=12);
    Value::new(rng.gen_range(1..=d), d).unwrap()
}

fn preorder_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut mismatches, mut bad_moduli) = (0, 0);
    for _ in 0..1000 {
        let c = Carrier::numbered("e", rng.gen_range(1..=6));
        let a = Predicate::from_fn(&c, |_| random_value(&mut rng));
        let b = Predicate::from_fn(&c, |_| random_value(&mut rng));
        let v = leq(&a, &b).unwrap();
        if v.holds != common::zero_inclusion(&a, &b) {
            mismatches += 1;
        }
        if let Some(m) = &v.modulus {
            // every grid point, and every value of β above the first one
            let mut eps: Vec<Value> = m.grid().to_vec();
            eps.extend(b.values().iter().copied().filter(|&e| e >= m.grid()[0]));
            let sound = eps.iter().all(|&e| {
                let delta = m.eval(e);
                !delta.is_zero() && c.elements().all(|x| a.at(x) > delta || b.at(x) <= e)
            });
            if !sound {
                bad_moduli += 1;
            }
        } else if v.holds {
            bad_moduli += 1;
        }
    }
    Outcome {
        ok: mismatches == 0 && bad_moduli == 0,
        detail: format!("1000 pairs, {mismatches} mismatches, {bad_moduli} unsound moduli"),
    }
}

fn hyperdoctrine_laws() -> Outcome {
    let reports = run_laws(&U_LAWS, Ops::default(), SEED, 200);
    let mut out = laws_outcome(&reports);
    let survivors: Vec<String> = mutation_kills(SEED, 200)
        .into_iter()
        .filter(|k| !k.killed)
        .map(|k| k.law)
        .collect();
    if !survivors.is_empty() {
        out.ok = false;
        out.detail = format!(
            "{}; mutations survived in {}",
            out.detail,
            survivors.join(", ")
        );
    } else {
        out.detail = format!(
            "{}; all {} designated mutations killed",
            out.detail,
            U_LAWS.len()
        );
    }
    out
}

fn interpreter_oracle() -> Outcome {
    let mut g = Gen::new(SEED);
    let mut disagreements = 0;
    for _ in 0..300 {
        let sig = g.signature(true);
        let model = g.u_model(&sig, 3);
        let phi = g.formula(&sig, &[], 4);
        assert!(phi.depth() <= 4);
        let compositional = interpret_formula(&UBackend, &model, &[], &phi).unwrap();
        let naive = common::eval(&model, &common::Env::new(), &phi);
        if compositional.at(0) != naive {
            disagreements += 1;
        }
    }
    Outcome {
        ok: disagreements == 0,
        detail: format!("300 closed formulas, {disagreements} disagreements"),
    }
}

fn per_laws() -> Outcome {
    let chains = [
        "per-associativity",
        "per-identity",
        "per-composite-functional",
    ];
    let subobjects = ["per-subobject-from-strict", "per-subobject-from-mono"];
    let pick = |names: &[&str]| {
        PER_LAWS
            .iter()
            .filter(|l| names.contains(&l.name))
            .copied()
            .collect::<Vec<_>>()
    };
    let mut reports = run_laws(&pick(&chains), Ops::default(), SEED, 200);
    reports.extend(run_laws(&pick(&subobjects), Ops::default(), SEED, 100));
    laws_outcome(&reports)
}

fn functor_g() -> Outcome {
    let names = ["g-functoriality", "g-products", "g-faithful", "g-full"];
    let laws: Vec<_> = METRIC_LAWS
        .iter()
        .filter(|l| names.contains(&l.name))
        .copied()
        .collect();
    laws_outcome(&run_laws(&laws, Ops::default(), SEED, 100))
}

fn finite_equivalence() -> Outcome {
    let names = ["er-metric-from-per", "er-uniformity"];
    let laws: Vec<_> = METRIC_LAWS
        .iter()
        .filter(|l| names.contains(&l.name))
        .copied()
        .collect();
    laws_outcome(&run_laws(&laws, Ops::default(), SEED, 100))
}

fn connective_table() -> Outcome {
    let preserving = [
        "min(x, y)",
        "max(x, y)",
        "tadd(x, y)",
        "scale(1/2, x)",
        "scale(3/4, x)",
        "max(x, tadd(y, z))",
        "min(tadd(x, y), scale(1/3, z))",
        "x +. max(y, z)",
    ];
    let violating = ["1-x", "negate(x)", "tsub(x, y)", "x -. y"];
    let x = Carrier::numbered("e", 2);
    let mut problems = Vec::new();
    for src in preserving {
        let u = parse_connective(src).unwrap();
        if !classify(&u, 4).unwrap().preserves() {
            problems.push(format!("{src} not classified preserves"));
        }
    }
    for src in violating {
        let u = parse_connective(src).unwrap();
        let verdict = classify(&u, 4).unwrap();
        let ClassifierVerdict::Violates { p, q, .. } = &verdict else {
            problems.push(format!("{src} not classified violates"));
            continue;
        };
        if u.arity() == 1 && (p[0] != Value::ONE || q[0] != Value::new(1, 2).unwrap()) {
            problems.push(format!("{src} witnesses ({:?}, {:?})", p, q));
        }
        match demonstrate(&u, &verdict, &x) {
            Ok(d) => {
                let inputs = d
                    .phis
                    .iter()
                    .zip(&d.phis_prime)
                    .all(|(a, b)| common::same_zeros(a, b));
                let outputs = common::same_zeros(&d.output, &d.output_prime);
                if !(inputs && !outputs && d.inputs_equivalent && !d.outputs_equivalent) {
                    problems.push(format!("{src} demonstration invalid"));
                }
            }
            Err(e) => problems.push(format!("{src} demonstration failed: {e}")),
        }
    }
    Outcome {
        ok: problems.is_empty(),
        detail: if problems.is_empty() {
            format!(
                "{} preserving, {} violating with valid demonstrations",
                preserving.len(),
                violating.len()
            )
        } else {
            problems.join("; ")
        },
    }
}

fn transfer() -> Outcome {
    laws_outcome(&[validity_transfer(SEED, 50, 50)])
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Outcome); 8] = [
        ("preorder oracle", Duration::from_secs(5), preorder_oracle),
        (
            "hyperdoctrine laws",
            Duration::from_secs(30),
            hyperdoctrine_laws,
        ),
        (
            "interpreter oracle",
            Duration::from_secs(10),
            interpreter_oracle,
        ),
        ("PER category laws", Duration::from_secs(20), per_laws),
        ("functor G", Duration::from_secs(10), functor_g),
        (
            "finite-scale equivalence",
            Duration::from_secs(10),
            finite_equivalence,
        ),
        ("connective table", Duration::from_secs(5), connective_table),
        ("validity transfer", Duration::from_secs(20), transfer),
    ];
    let mut all = true;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let ok = out.ok && took < *limit;
        all &= ok;
        println!(
            "criterion {} [{}] {}: {} in {:.2?} (limit {:?})",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            name,
            out.detail,
            took,
            limit
        );
    }
    if !all {
        std::process::exit(1);
    }
}
