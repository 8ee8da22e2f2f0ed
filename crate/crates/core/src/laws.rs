//! Randomized law suites for `U`, PER(U) and the metric bridge.
//!
//! Each law draws its instances from its own seeded streams and runs them in
//! parallel; reports list failures in instance order.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value as Json};

use crate::doctrine::{Mutation, Ops, PullbackSquare};
use crate::dsl::check_sequent;
use crate::error::Result;
use crate::gen::Gen;
use crate::metric::{
    check_uniformity, extract_function, g_morphism, g_object, into_strict, metric_from_per,
    metric_product, CmtBackend,
};
use crate::order::holds;
use crate::per::{self, compose, is_equiv_rel, is_mono, morphism_eq, StrictU};
use crate::predicate::MapArrow;

/// Outcome of one law over a batch of random instances.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LawReport {
    pub law: String,
    pub instances: usize,
    pub failures: Vec<Json>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

type Check = fn(Ops, &mut Gen) -> Result<Option<Json>>;

/// A named law, the mutation its suite must detect, and its instance check.
#[derive(Clone, Copy)]
pub struct Law {
    pub name: &'static str,
    pub mutation: Option<Mutation>,
    check: Check,
}

fn verdict(ok: bool, counterexample: impl FnOnce() -> Json) -> Result<Option<Json>> {
    Ok(if ok { None } else { Some(counterexample()) })
}

fn fnv(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x100_0000_01b3)
    })
}

/// Runs `trials` instances of `law`. Instance `i` uses stream `i` of a seed
/// derived from `seed` and the law's name.
pub fn run_law(law: &Law, ops: Ops, seed: u64, trials: usize) -> LawReport {
    let base = seed ^ fnv(law.name);
    let failures = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut g = Gen::stream(base, i as u64);
            match (law.check)(ops, &mut g) {
                Ok(None) => None,
                Ok(Some(ce)) => Some(json!({ "instance": i, "counterexample": ce })),
                Err(e) => Some(json!({ "instance": i, "error": e.to_string() })),
            }
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    LawReport {
        law: law.name.to_string(),
        instances: trials,
        failures,
    }
}

// ------------------------------------------------------------------- U

fn adjunction_exists(ops: Ops, g: &mut Gen) -> Result<Option<Json>> {
    let (y, x) = (g.carrier(4), g.carrier(4));
    let (f, alpha, beta) = (g.map(&y, &x), g.predicate(&y), g.predicate(&x));
    verdict(
        ops.check_exists_adjunction(&f, &alpha, &beta)?,
        || json!({ "f": f, "alpha": alpha, "beta": beta }),
    )
}

fn adjunction_forall(ops: Ops, g: &mut Gen) -> Result<Option<Json>> {
    let (y, x) = (g.carrier(4), g.carrier(4));
    let (f, alpha, beta) = (g.map(&y, &x), g.predicate(&y), g.predicate(&x));
    verdict(
        ops.check_forall_adjunction(&f, &alpha, &beta)?,
        || json!({ "f": f, "alpha": alpha, "beta": beta }),
    )
}

fn frobenius(ops: Ops, g: &mut Gen) -> Result<Option<Json>> {
    let f = if g.coin(0.5) {
        let (x, y) = (g.carrier(4), g.carrier(4));
        MapArrow::proj_left(&x, &y)
    } else {
        let (d, x) = (g.carrier(4), g.carrier(4));
        g.map(&d, &x)
    };
    let (alpha, beta) = (g.predicate(f.codomain()), g.predicate(f.domain()));
    verdict(
        ops.check_frobenius(&f, &alpha, &beta)?,
        || json!({ "f": f, "alpha": alpha, "beta": beta }),
    )
}

fn random_square(g: &mut Gen) -> Result<PullbackSquare> {
    if g.coin(0.5) {
        let (a, b, c) = (g.carrier(4), g.carrier(4), g.carrier(4));
        let (k, h) = (g.map(&b, &a), g.map(&c, &a));
        PullbackSquare::canonical(&k, &h)
    } else {
        let (b, b2, y) = (g.carrier(4), g.carrier(4), g.carrier(4));
        let m = g.map(&b2, &b);
        PullbackSquare::projection(&m, &y)
    }
}

fn square_json(sq: &PullbackSquare) -> Json {
    json!({ "f": sq.f(), "g": sq.g(), "k": sq.k(), "h": sq.h() })
}

fn beck_chevalley_exists(ops: Ops, g: &mut Gen) -> Result<Option<Json>> {
    let sq = random_square(g)?;
    let beta = g.predicate(sq.k().domain());
    verdict(
        ops.check_beck_chevalley_exists(&sq, &beta)?,
        || json!({ "square": square_json(&sq), "beta": beta }),
    )
}

fn beck_chevalley_forall(ops: Ops, g: &mut Gen) -> Result<Option<Json>> {
    let sq = random_square(g)?;
    let beta = g.predicate(sq.k().domain());
    verdict(
        ops.check_beck_chevalley_forall(&sq, &beta)?,
        || json!({ "square": square_json(&sq), "beta": beta }),
    )
}

fn functoriality(ops: Ops, g: &mut Gen) -> Result<Option<Json>> {
    let (x, y, z) = (g.carrier(4), g.carrier(4), g.carrier(4));
    let (f, h, alpha) = (g.map(&x, &y), g.map(&y, &z), g.predicate(&z));
    verdict(
        ops.check_functoriality(&f, &h, &alpha)?,
        || json!({ "f": f, "g": h, "alpha": alpha }),
    )
}

fn equality_diagonal(ops: Ops, g: &mut Gen) -> Result<Option<Json>> {
    let x = g.carrier(4);
    let xx = crate::carrier::Carrier::product(&x, &x);
    let mut a = g.predicate(&xx);
    if g.coin(0.5) {
        a = crate::predicate::Predicate::from_fn(&xx, |e| {
            let (p, q) = xx.split(e);
            if p == q {
                crate::value::Value::ZERO
            } else {
                a.at(e)
            }
        });
    }
    verdict(
        ops.check_equality_diagonal(&x, &a)?,
        || json!({ "carrier": x, "a": a }),
    )
}

fn equality_product(ops: Ops, g: &mut Gen) -> Result<Option<Json>> {
    let (a, b) = (g.carrier(4), g.carrier(4));
    verdict(
        ops.check_equality_product(&a, &b)?,
        || json!({ "a": a, "b": b }),
    )
}

/// The laws of `U`, each with the mutation it is designated to kill.
pub const U_LAWS: [Law; 8] = [
    Law {
        name: "adjunction-exists",
        mutation: Some(Mutation::ExistsAsSup),
        check: adjunction_exists,
    },
    Law {
        name: "adjunction-forall",
        mutation: Some(Mutation::ForallAsInf),
        check: adjunction_forall,
    },
    Law {
        name: "frobenius",
        mutation: Some(Mutation::PullbackShifted),
        check: frobenius,
    },
    Law {
        name: "beck-chevalley-exists",
        mutation: Some(Mutation::PullbackShifted),
        check: beck_chevalley_exists,
    },
    Law {
        name: "beck-chevalley-forall",
        mutation: Some(Mutation::PullbackShifted),
        check: beck_chevalley_forall,
    },
    Law {
        name: "functoriality",
        mutation: Some(Mutation::PullbackShifted),
        check: functoriality,
    },
    Law {
        name: "equality-diagonal",
        mutation: Some(Mutation::EqualityTop),
        check: equality_diagonal,
    },
    Law {
        name: "equality-product",
        mutation: Some(Mutation::PullbackShifted),
        check: equality_product,
    },
];

// ----------------------------------------------------------------- PER

fn per_associativity(_: Ops, g: &mut Gen) -> Result<Option<Json>> {
    let pers: Vec<per::Per> = (0..4)
        .map(|_| {
            let c = g.carrier(3);
            g.per(&c)
        })
        .collect();
    let f = g.functional(&pers[0], &pers[1]);
    let h = g.functional(&pers[1], &pers[2]);
    let k = g.functional(&pers[2], &pers[3]);
    let lhs = compose(&compose(&f, &h)?, &k)?;
    let rhs = compose(&f, &compose(&h, &k)?)?;
    let ok = morphism_eq(&lhs, &rhs)? && morphism_eq(&rhs, &lhs)?;
    verdict(ok, || json!({ "f": f, "g": h, "h": k }))
}

fn per_identity(_: Ops, g: &mut Gen) -> Result<Option<Json>> {
    let (cx, cy) = (g.carrier(3), g.carrier(3));
    let (x, y) = (g.per(&cx), g.per(&cy));
    let f = g.functional(&x, &y);
    let left = compose(&x.identity(), &f)?;
    let right = compose(&f, &y.identity())?;
    let ok = morphism_eq(&left, &f)?
        && morphism_eq(&f, &left)?
        && morphism_eq(&right, &f)?
        && morphism_eq(&f, &right)?;
    verdict(ok, || json!({ "f": f }))
}

fn per_composite_functional(_: Ops, g: &mut Gen) -> Result<Option<Json>> {
    let (cx, cy, cz) = (g.carrier(3), g.carrier(3), g.carrier(3));
    let (x, y, z) = (g.per(&cx), g.per(&cy), g.per(&cz));
    let (f, h) = (g.functional(&x, &y), g.functional(&y, &z));
    let report = compose(&f, &h)?.check()?;
    verdict(report.all(), || json!({ "f": f, "g": h, "report": report }))
}

fn per_subobject_strict(_: Ops, g: &mut Gen) -> Result<Option<Json>> {
    let c = g.carrier(3);
    let x = g.per(&c);
    let phi = g.strict_predicate(&x);
    let (_, inclusion) = per::sub_from_strict(&phi)?;
    let ok = is_mono(&inclusion)? && per::strict_from_mono(&inclusion)?.equivalent(&phi)?;
    verdict(ok, || json!({ "phi": phi }))
}

fn per_subobject_mono(_: Ops, g: &mut Gen) -> Result<Option<Json>> {
    let c = g.carrier(3);
    let x = g.per(&c);
    let m = g.mono(&x, 3);
    let psi = per::strict_from_mono(&m)?;
    let (_, inclusion) = per::sub_from_strict(&psi)?;
    let ok = per::factors_through(&m, &inclusion)? && per::factors_through(&inclusion, &m)?;
    verdict(ok, || json!({ "mono": m }))
}

fn strict_frobenius(_: Ops, g: &mut Gen) -> Result<Option<Json>> {
    let (cx, cy) = (g.carrier(3), g.carrier(3));
    let (x, y) = (g.per(&cx), g.per(&cy));
    let f = g.functional(&x, &y);
    let (psi, phi) = (g.strict_predicate(&x), g.strict_predicate(&y));
    verdict(
        per::strict_frobenius(&f, &psi, &phi)?,
        || json!({ "f": f, "psi": psi, "phi": phi }),
    )
}

fn strict_beck_chevalley(_: Ops, g: &mut Gen) -> Result<Option<Json>> {
    let (cx, cy, cz) = (g.carrier(3), g.carrier(3), g.carrier(3));
    let (x, y, z) = (g.per(&cx), g.per(&cy), g.per(&cz));
    let (f, h) = (g.functional(&x, &z), g.functional(&y, &z));
    let phi = g.strict_predicate(&y);
    verdict(
        per::strict_beck_chevalley(&f, &h, &phi)?,
        || json!({ "f": f, "g": h, "phi": phi }),
    )
}

fn strict_forall_adjunction(_: Ops, g: &mut Gen) -> Result<Option<Json>> {
    let (cy, cz) = (g.carrier(3), g.carrier(3));
    let (y, z) = (g.per(&cy), g.equiv_rel(&cz));
    let yz = y.product(z.as_per());
    let (phi, psi) = (g.strict_predicate(&yz), g.strict_predicate(&y));
    let pulled = per::strict_pullback(&per::proj_left(&y, z.as_per()), &psi)?;
    let left = pulled.leq(&phi)?;
    let right = psi.leq(&per::strict_forall_proj(&y, &z, &phi)?)?;
    verdict(
        left == right,
        || json!({ "y": y, "z": z, "phi": phi, "psi": psi }),
    )
}

pub const PER_LAWS: [Law; 8] = [
    Law {
        name: "per-associativity",
        mutation: None,
        check: per_associativity,
    },
    Law {
        name: "per-identity",
        mutation: None,
        check: per_identity,
    },
    Law {
        name: "per-composite-functional",
        mutation: None,
        check: per_composite_functional,
    },
    Law {
        name: "per-subobject-from-strict",
        mutation: None,
        check: per_subobject_strict,
    },
    Law {
        name: "per-subobject-from-mono",
        mutation: None,
        check: per_subobject_mono,
    },
    Law {
        name: "strict-frobenius",
        mutation: None,
        check: strict_frobenius,
    },
    Law {
        name: "strict-beck-chevalley",
        mutation: None,
        check: strict_beck_chevalley,
    },
    Law {
        name: "strict-forall-adjunction",
        mutation: None,
        check: strict_forall_adjunction,
    },
];

// -------------------------------------------------------------- metric

fn g_functoriality(_: Ops, g: &mut Gen) -> Result<Option<Json>> {
    let (cm, cn, ck) = (g.carrier(4), g.carrier(4), g.carrier(4));
    let (m, n, k) = (
        g.metric(&cm, true),
        g.metric(&cn, true),
        g.metric(&ck, true),
    );
    let (f, h) = (g.uc_map(&m, &n), g.uc_map(&n, &k));
    let (gf, gh) = (g_morphism(&f, &m, &n)?, g_morphism(&h, &n, &k)?);
    let gid = g_morphism(&MapArrow::identity(&cm), &m, &m)?;
    let id = g_object(&m).identity();
    let composite = g_morphism(&h.after(&f)?, &m, &k)?;
    let both = compose(&gf, &gh)?;
    let ok = morphism_eq(&gid, &id)?
        && morphism_eq(&id, &gid)?
        && morphism_eq(&composite, &both)?
        && morphism_eq(&both, &composite)?
        && gf.check()?.all()
        && is_equiv_rel(&cm, m.d())?;
    verdict(ok, || json!({ "m": m, "n": n, "k": k, "f": f, "g": h }))
}

fn g_products(_: Ops, g: &mut Gen) -> Result<Option<Json>> {
    let (cm, cn, ck) = (g.carrier(4), g.carrier(4), g.carrier(4));
    let (m, n, k) = (
        g.metric(&cm, true),
        g.metric(&cn, true),
        g.metric(&ck, true),
    );
    let mn = metric_product(&m, &n);
    let (gm, gn) = (g_object(&m), g_object(&n));
    let prod = gm.product(&gn);
    let same = |a: &per::FunctionalRelation, b: &per::FunctionalRelation| -> Result<bool> {
        Ok(morphism_eq(a, b)? && morphism_eq(b, a)?)
    };
    let objects = g_object(&mn).rel() == prod.rel();
    let left = same(
        &g_morphism(&MapArrow::proj_left(&cm, &cn), &mn, &m)?,
        &per::proj_left(&gm, &gn),
    )?;
    let right = same(
        &g_morphism(&MapArrow::proj_right(&cm, &cn), &mn, &n)?,
        &per::proj_right(&gm, &gn),
    )?;
    let (f, h) = (g.uc_map(&k, &m), g.uc_map(&k, &n));
    let paired = g_morphism(&MapArrow::pair(&f, &h)?, &k, &mn)?;
    let pairing = same(
        &paired,
        &per::pair(&g_morphism(&f, &k, &m)?, &g_morphism(&h, &k, &n)?)?,
    )?;
    verdict(
        objects && left && right && pairing,
        || json!({ "m": m, "n": n, "k": k, "f": f, "g": h }),
    )
}

fn g_faithful(_: Ops, g: &mut Gen) -> Result<Option<Json>> {
    let (cm, cn) = (g.carrier(4), g.carrier(4));
    let (m, n) = (g.metric(&cm, true), g.metric(&cn, true));
    let f = g.uc_map(&m, &n);
    let back = extract_function(&g_morphism(&f, &m, &n)?)?;
    verdict(
        back == f,
        || json!({ "m": m, "n": n, "f": f, "extracted": back }),
    )
}

fn g_full(_: Ops, g: &mut Gen) -> Result<Option<Json>> {
    let (cm, cn) = (g.carrier(4), g.carrier(4));
    let (m, n) = (g.metric(&cm, true), g.metric(&cn, true));
    let rel = g.functional(&g_object(&m), &g_object(&n));
    let f = extract_function(&rel)?;
    let again = g_morphism(&f, &m, &n)?;
    let ok = morphism_eq(&again, &rel)? && morphism_eq(&rel, &again)?;
    verdict(ok, || json!({ "m": m, "n": n, "relation": rel }))
}

fn er_metric_from_per(_: Ops, g: &mut Gen) -> Result<Option<Json>> {
    let c = g.carrier(5);
    let e = g.equiv_rel(&c);
    let (metric, cert) = metric_from_per(&e)?;
    let ok = cert.verified() && holds(metric.d(), e.rel())? && holds(e.rel(), metric.d())?;
    verdict(ok, || json!({ "e": e, "metric": metric }))
}

fn er_uniformity(_: Ops, g: &mut Gen) -> Result<Option<Json>> {
    let c = g.carrier(5);
    let e = g.equiv_rel(&c);
    let report = check_uniformity(&e);
    verdict(report.all(), || json!({ "e": e, "report": report }))
}

pub const METRIC_LAWS: [Law; 6] = [
    Law {
        name: "g-functoriality",
        mutation: None,
        check: g_functoriality,
    },
    Law {
        name: "g-products",
        mutation: None,
        check: g_products,
    },
    Law {
        name: "g-faithful",
        mutation: None,
        check: g_faithful,
    },
    Law {
        name: "g-full",
        mutation: None,
        check: g_full,
    },
    Law {
        name: "er-metric-from-per",
        mutation: None,
        check: er_metric_from_per,
    },
    Law {
        name: "er-uniformity",
        mutation: None,
        check: er_uniformity,
    },
];

pub fn run_laws(laws: &[Law], ops: Ops, seed: u64, trials: usize) -> Vec<LawReport> {
    laws.iter().map(|l| run_law(l, ops, seed, trials)).collect()
}

/// Every law of `U`, PER(U) and the bridge, then validity transfer with
/// one sequent per random model.
pub fn run_all(ops: Ops, seed: u64, trials: usize) -> Vec<LawReport> {
    let mut out = run_laws(&U_LAWS, ops, seed, trials);
    out.extend(run_laws(&PER_LAWS, ops, seed, trials));
    out.extend(run_laws(&METRIC_LAWS, ops, seed, trials));
    out.push(validity_transfer(seed, trials, 1));
    out
}

/// Runs each `U` law under its designated mutation and reports whether
/// the suite detected it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MutationKill {
    pub law: String,
    pub mutation: Mutation,
    pub killed: bool,
    pub failures: usize,
}

pub fn mutation_kills(seed: u64, trials: usize) -> Vec<MutationKill> {
    U_LAWS
        .iter()
        .filter_map(|l| {
            let m = l.mutation?;
            let r = run_law(l, Ops::mutated(m), seed, trials);
            Some(MutationKill {
                law: l.name.to_string(),
                mutation: m,
                killed: !r.passed(),
                failures: r.failures.len(),
            })
        })
        .collect()
}

/// Random CMT models with random sequents: validity in CMT and after
/// transport into Strict(U) must coincide.
pub fn validity_transfer(seed: u64, models: usize, per_model: usize) -> LawReport {
    let base = seed ^ fnv("validity-transfer");
    let failures = (0..models)
        .into_par_iter()
        .map(|i| -> Vec<Json> {
            let mut g = Gen::stream(base, i as u64);
            let sig = g.signature(false);
            let cmt = g.cmt_model(&sig, 3);
            let strict = match into_strict(&cmt, &sig) {
                Ok(s) => s,
                Err(e) => return vec![json!({ "model": i, "error": e.to_string() })],
            };
            (0..per_model)
                .filter_map(|_| {
                    let seq = g.sequent(&sig, 3);
                    let a = check_sequent(&CmtBackend, &cmt, &seq).map(|v| v.valid);
                    let b = check_sequent(&StrictU, &strict, &seq).map(|v| v.valid);
                    match (a, b) {
                        (Ok(a), Ok(b)) if a == b => None,
                        (Ok(a), Ok(b)) => Some(json!({ "model": i, "sequent": seq.to_string(), "cmt": a, "strict": b })),
                        (Err(e), _) | (_, Err(e)) => {
                            Some(json!({ "model": i, "sequent": seq.to_string(), "error": e.to_string() }))
                        }
                    }
                })
                .collect()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    LawReport {
        law: "validity-transfer".into(),
        instances: models * per_model,
        failures,
    }
}
