//! Finite (pseudo)metric spaces of diameter at most 1, the hyperdoctrine of
//! uniformly continuous predicates on them, and the functor `G` into the
//! equivalence relations of PER(U).

use std::collections::BTreeSet;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::carrier::{Carrier, Elem};
use crate::connective::{apply_connective, Connective};
use crate::doctrine;
use crate::dsl::{Hyperdoctrine, Interpretation, Model, SequentVerdict, Signature, UBackend};
use crate::error::{Error, Result};
use crate::order::{leq, LeqVerdict};
use crate::per::{
    self, compose, morphism_eq, EquivRel, FunctionalRelation, Per, StrictPredicate, StrictU,
};
use crate::predicate::{MapArrow, Predicate};
use crate::value::{Rational, Value};

fn square(c: &Carrier) -> Carrier {
    Carrier::product(c, c)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomViolation {
    pub axiom: &'static str,
    pub at: Vec<String>,
}

/// Outcome of checking the metric axioms on a table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MetricCheck {
    pub pseudometric: bool,
    pub metric: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<AxiomViolation>,
}

fn check_table(c: &Carrier, d: impl Fn(Elem, Elem) -> Rational) -> MetricCheck {
    let fail = |axiom, at: &[Elem]| MetricCheck {
        pseudometric: false,
        metric: false,
        violation: Some(AxiomViolation {
            axiom,
            at: at.iter().map(|&e| c.name(e)).collect(),
        }),
    };
    let zero = Rational::from_integer(0);
    for x in c.elements() {
        if d(x, x) != zero {
            return fail("zero self-distance", &[x]);
        }
    }
    for x in c.elements() {
        for y in c.elements() {
            if d(x, y) < zero {
                return fail("nonnegativity", &[x, y]);
            }
            if d(x, y) != d(y, x) {
                return fail("symmetry", &[x, y]);
            }
        }
    }
    for x in c.elements() {
        for y in c.elements() {
            for z in c.elements() {
                if d(x, z) > d(x, y) + d(y, z) {
                    return fail("triangle inequality", &[x, y, z]);
                }
            }
        }
    }
    for x in c.elements() {
        for y in c.elements() {
            if x != y && d(x, y) == zero {
                return MetricCheck {
                    pseudometric: true,
                    metric: false,
                    violation: Some(AxiomViolation {
                        axiom: "separation",
                        at: vec![c.name(x), c.name(y)],
                    }),
                };
            }
        }
    }
    MetricCheck {
        pseudometric: true,
        metric: true,
        violation: None,
    }
}

/// Exhaustive check of the axioms; `d` is a predicate on `X × X`.
pub fn check_metric_axioms(c: &Carrier, d: &Predicate) -> Result<MetricCheck> {
    square(c).ensure_eq(d.carrier())?;
    let sq = square(c);
    Ok(check_table(c, |x, y| d.at(sq.pair(x, y)).ratio()))
}

/// A pseudometric of diameter at most 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinPseudoMetric {
    carrier: Carrier,
    d: Predicate,
}

impl FinPseudoMetric {
    pub fn new(carrier: Carrier, d: Predicate) -> Result<Self> {
        let check = check_metric_axioms(&carrier, &d)?;
        if !check.pseudometric {
            let v = check.violation.expect("failing check names an axiom");
            return Err(Error::Metric(format!(
                "{} fails at {}",
                v.axiom,
                v.at.join(", ")
            )));
        }
        Ok(FinPseudoMetric { carrier, d })
    }

    /// Distance 1 between distinct points.
    pub fn discrete(c: &Carrier) -> Self {
        FinPseudoMetric {
            carrier: c.clone(),
            d: doctrine::eq_predicate(c),
        }
    }

    pub fn point() -> Self {
        FinPseudoMetric::discrete(&Carrier::unit())
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    /// The distance table on `X × X`.
    pub fn d(&self) -> &Predicate {
        &self.d
    }

    pub fn dist(&self, x: Elem, y: Elem) -> Value {
        self.d.at(square(&self.carrier).pair(x, y))
    }

    pub fn is_separated(&self) -> bool {
        self.carrier.elements().all(|x| {
            self.carrier
                .elements()
                .all(|y| x == y || !self.dist(x, y).is_zero())
        })
    }
}

/// A separated [`FinPseudoMetric`]. Finite metric spaces are complete.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinMetric(FinPseudoMetric);

impl FinMetric {
    pub fn new(carrier: Carrier, d: Predicate) -> Result<Self> {
        FinMetric::from_pseudo(FinPseudoMetric::new(carrier, d)?)
    }

    pub fn from_pseudo(m: FinPseudoMetric) -> Result<Self> {
        if !m.is_separated() {
            return Err(Error::Metric("separation fails".into()));
        }
        Ok(FinMetric(m))
    }

    pub fn as_pseudo(&self) -> &FinPseudoMetric {
        &self.0
    }
}

impl std::ops::Deref for FinMetric {
    type Target = FinPseudoMetric;

    fn deref(&self) -> &FinPseudoMetric {
        &self.0
    }
}

/// `min(d, 1)` applied to a nonnegative distance table indexed like
/// `X × X`.
pub fn truncate_diameter(c: &Carrier, raw: &[Rational]) -> Result<FinPseudoMetric> {
    if raw.len() != c.size() * c.size() {
        return Err(Error::MissingEntry(format!(
            "{} distances for {} points",
            raw.len(),
            c.size()
        )));
    }
    let n = c.size();
    let check = check_table(c, |x, y| raw[x * n + y]);
    if !check.pseudometric {
        let v = check.violation.expect("failing check names an axiom");
        return Err(Error::Metric(format!(
            "{} fails at {}",
            v.axiom,
            v.at.join(", ")
        )));
    }
    let one = Rational::from_integer(1);
    let values = raw
        .iter()
        .map(|r| Value::from_ratio((*r).min(one)))
        .collect::<Result<Vec<_>>>()?;
    Ok(FinPseudoMetric {
        carrier: c.clone(),
        d: Predicate::new(square(c), values)?,
    })
}

/// The max metric on `X × Y`.
pub fn metric_product(m: &FinPseudoMetric, n: &FinPseudoMetric) -> FinPseudoMetric {
    let c = Carrier::product(&m.carrier, &n.carrier);
    let d = Predicate::from_fn(&square(&c), |e| {
        let (p, q) = (e / c.size(), e % c.size());
        let ((x, y), (x2, y2)) = (c.split(p), c.split(q));
        m.dist(x, x2).max(n.dist(y, y2))
    });
    FinPseudoMetric { carrier: c, d }
}

/// `d_X ⊑ d_Y ∘ (f × f)`, with its modulus.
pub fn is_uniformly_continuous(
    f: &MapArrow,
    m: &FinPseudoMetric,
    n: &FinPseudoMetric,
) -> Result<LeqVerdict> {
    m.carrier.ensure_eq(f.domain())?;
    n.carrier.ensure_eq(f.codomain())?;
    let ff = MapArrow::product(f, f);
    leq(&m.d, &doctrine::pullback(&ff, &n.d)?)
}

/// Membership of `φ` in the CMT fiber over `M`: the strict-relation
/// sequents over `(X, d)`. The relational verdict carries the modulus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberVerdict {
    pub holds: bool,
    pub strict: SequentVerdict,
    pub relational: SequentVerdict,
}

pub fn cmt_fiber_check(phi: &Predicate, m: &FinPseudoMetric) -> Result<FiberVerdict> {
    let (strict, relational) = per::strict_verdicts(&g_object(m), phi)?;
    Ok(FiberVerdict {
        holds: strict.valid && relational.valid,
        strict,
        relational,
    })
}

/// `(X, d)` as an equivalence relation.
pub fn g_object(m: &FinPseudoMetric) -> Per {
    EquivRel::new_unchecked(m.carrier.clone(), m.d.clone()).into_per()
}

/// `(x, y) ↦ d(f(x), y)`.
pub fn g_morphism(
    f: &MapArrow,
    m: &FinPseudoMetric,
    n: &FinPseudoMetric,
) -> Result<FunctionalRelation> {
    if !is_uniformly_continuous(f, m, n)?.holds {
        return Err(Error::NotUniformlyContinuous);
    }
    let c = Carrier::product(&m.carrier, &n.carrier);
    let rel = Predicate::from_fn(&c, |e| {
        let (x, y) = c.split(e);
        n.dist(f.apply(x), y)
    });
    Ok(FunctionalRelation::new_unchecked(
        g_object(m),
        g_object(n),
        rel,
    ))
}

/// Recovers the map represented by a functional relation between the
/// images of finite metrics: `f(x)` is the first `y` with `F(x, y) = 0`.
pub fn extract_function(f: &FunctionalRelation) -> Result<MapArrow> {
    let target = f.target();
    let separated = target.carrier().elements().all(|y| {
        target
            .carrier()
            .elements()
            .all(|y2| y == y2 || !target.sim(y, y2).is_zero())
    });
    if !separated || !target.is_reflexive() {
        return Err(Error::Metric("extraction needs a separated target".into()));
    }
    let (xs, ys) = (f.source().carrier(), target.carrier());
    let table = xs
        .elements()
        .map(|x| {
            ys.elements()
                .find(|&y| f.at(x, y).is_zero())
                .ok_or_else(|| Error::NoZero(xs.name(x)))
        })
        .collect::<Result<Vec<_>>>()?;
    MapArrow::new(xs.clone(), ys.clone(), table)
}

/// Two morphisms that compose to identities on both sides.
pub fn is_iso(f: &FunctionalRelation, g: &FunctionalRelation) -> Result<bool> {
    Ok(morphism_eq(&compose(f, g)?, &f.source().identity())?
        && morphism_eq(&compose(g, f)?, &g.source().identity())?)
}

/// Isomorphism `G(d) ≅ E` witnessing that `E` comes from a metric.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IsoCertificate {
    pub forward: FunctionalRelation,
    pub backward: FunctionalRelation,
    pub forward_mono: bool,
    pub backward_mono: bool,
    pub round_trips: bool,
}

impl IsoCertificate {
    pub fn verified(&self) -> bool {
        self.forward_mono && self.backward_mono && self.round_trips
    }
}

/// The `{0,1}` quotient metric of an equivalence relation, with the
/// isomorphism `G(d) → E` represented by `d` itself.
pub fn metric_from_per(e: &EquivRel) -> Result<(FinPseudoMetric, IsoCertificate)> {
    let c = e.carrier();
    let d = e
        .rel()
        .map(|v| if v.is_zero() { Value::ZERO } else { Value::ONE });
    let metric = FinPseudoMetric::new(c.clone(), d.clone())?;
    let gd = g_object(&metric);
    let forward = FunctionalRelation::new(gd.clone(), e.as_per().clone(), d.clone())?;
    let backward = FunctionalRelation::new(e.as_per().clone(), gd, d)?;
    let cert = IsoCertificate {
        forward_mono: per::is_mono(&forward)?,
        backward_mono: per::is_mono(&backward)?,
        round_trips: is_iso(&forward, &backward)?,
        forward,
        backward,
    };
    Ok((metric, cert))
}

/// At finite scale the completion map is the identity and `G` of it is an
/// isomorphism.
pub fn completion_is_identity(m: &FinMetric) -> bool {
    let id = g_object(m).identity();
    is_iso(&id, &id).unwrap_or(false)
}

/// The five axioms of a uniformity for the family generated by
/// `U_a = {(x,y) : R(x,y) ≤ a}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UniformityReport {
    pub thresholds: Vec<Value>,
    pub diagonal: bool,
    pub inverse: bool,
    pub composition: bool,
    pub intersection: bool,
    pub superset: bool,
}

impl UniformityReport {
    pub fn all(&self) -> bool {
        self.diagonal && self.inverse && self.composition && self.intersection && self.superset
    }
}

/// Thresholds are the positive values of `R`, half the least of them (so
/// that the zero set of `R` is a basic entourage), and 1.
pub fn uniformity_thresholds(e: &EquivRel) -> Vec<Value> {
    let mut t: BTreeSet<Value> = e
        .rel()
        .values()
        .iter()
        .copied()
        .filter(|v| !v.is_zero())
        .collect();
    if let Some(&least) = t.iter().next() {
        t.insert(least.half());
    }
    t.insert(Value::ONE);
    t.into_iter().collect()
}

pub fn check_uniformity(e: &EquivRel) -> UniformityReport {
    type Rel = BTreeSet<(Elem, Elem)>;
    let c = e.carrier();
    let thresholds = uniformity_thresholds(e);
    let entourage = |a: Value| -> Rel {
        c.elements()
            .flat_map(|x| c.elements().map(move |y| (x, y)))
            .filter(|&(x, y)| e.sim(x, y) <= a)
            .collect()
    };
    let base: Vec<Rel> = thresholds.iter().map(|&a| entourage(a)).collect();
    let member = |v: &Rel| base.iter().any(|u| u.is_subset(v));
    let diagonal = base
        .iter()
        .all(|u| c.elements().all(|x| u.contains(&(x, x))));
    let inverse = base
        .iter()
        .all(|u| member(&u.iter().map(|&(x, y)| (y, x)).collect()));
    let composition = base.iter().all(|u| {
        base.iter().any(|v| {
            v.iter().all(|&(x, y)| {
                v.iter()
                    .filter(|&&(y2, _)| y2 == y)
                    .all(|&(_, z)| u.contains(&(x, z)))
            })
        })
    });
    let intersection = base.iter().all(|u| {
        base.iter()
            .all(|v| member(&u.intersection(v).copied().collect()))
    });
    let all_pairs: Rel = c
        .elements()
        .flat_map(|x| c.elements().map(move |y| (x, y)))
        .collect();
    let superset = base.iter().all(|u| {
        all_pairs.difference(u).all(|&p| {
            let mut bigger = u.clone();
            bigger.insert(p);
            member(&bigger)
        })
    });
    UniformityReport {
        thresholds,
        diagonal,
        inverse,
        composition,
        intersection,
        superset,
    }
}

// -------------------------------------------------------------- CMT fibers

/// A map between finite pseudometric spaces.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CmtArrow {
    pub map: MapArrow,
    pub source: FinPseudoMetric,
    pub target: FinPseudoMetric,
}

/// Finite pseudometric spaces with uniformly continuous maps; predicates
/// are uniformly continuous functions to `[0,1]` and equality is `d`.
#[derive(Clone, Copy, Debug, Default)]
pub struct CmtBackend;

impl Hyperdoctrine for CmtBackend {
    type Object = FinPseudoMetric;
    type Arrow = CmtArrow;
    type Pred = Predicate;

    fn terminal(&self) -> FinPseudoMetric {
        FinPseudoMetric::point()
    }
    fn product(&self, a: &FinPseudoMetric, b: &FinPseudoMetric) -> FinPseudoMetric {
        metric_product(a, b)
    }
    fn identity(&self, a: &FinPseudoMetric) -> CmtArrow {
        CmtArrow {
            map: MapArrow::identity(&a.carrier),
            source: a.clone(),
            target: a.clone(),
        }
    }
    fn proj_left(&self, a: &FinPseudoMetric, b: &FinPseudoMetric) -> CmtArrow {
        CmtArrow {
            map: MapArrow::proj_left(&a.carrier, &b.carrier),
            source: metric_product(a, b),
            target: a.clone(),
        }
    }
    fn proj_right(&self, a: &FinPseudoMetric, b: &FinPseudoMetric) -> CmtArrow {
        CmtArrow {
            map: MapArrow::proj_right(&a.carrier, &b.carrier),
            source: metric_product(a, b),
            target: b.clone(),
        }
    }
    fn to_terminal(&self, a: &FinPseudoMetric) -> CmtArrow {
        CmtArrow {
            map: MapArrow::to_unit(&a.carrier),
            source: a.clone(),
            target: FinPseudoMetric::point(),
        }
    }
    fn pair(&self, f: &CmtArrow, g: &CmtArrow) -> Result<CmtArrow> {
        Ok(CmtArrow {
            map: MapArrow::pair(&f.map, &g.map)?,
            source: f.source.clone(),
            target: metric_product(&f.target, &g.target),
        })
    }
    fn compose(&self, second: &CmtArrow, first: &CmtArrow) -> Result<CmtArrow> {
        Ok(CmtArrow {
            map: second.map.after(&first.map)?,
            source: first.source.clone(),
            target: second.target.clone(),
        })
    }
    fn arrow_domain(&self, f: &CmtArrow) -> FinPseudoMetric {
        f.source.clone()
    }
    fn arrow_codomain(&self, f: &CmtArrow) -> FinPseudoMetric {
        f.target.clone()
    }
    fn pred_on(&self, p: &Predicate, a: &FinPseudoMetric) -> bool {
        p.carrier() == &a.carrier && cmt_fiber_check(p, a).is_ok_and(|v| v.holds)
    }
    fn top(&self, a: &FinPseudoMetric) -> Predicate {
        doctrine::top(&a.carrier)
    }
    fn bottom(&self, a: &FinPseudoMetric) -> Predicate {
        doctrine::bottom(&a.carrier)
    }
    fn meet(&self, p: &Predicate, q: &Predicate) -> Result<Predicate> {
        doctrine::meet(p, q)
    }
    fn join(&self, p: &Predicate, q: &Predicate) -> Result<Predicate> {
        doctrine::join(p, q)
    }
    fn pullback(&self, f: &CmtArrow, p: &Predicate) -> Result<Predicate> {
        doctrine::pullback(&f.map, p)
    }
    fn exists_proj(
        &self,
        a: &FinPseudoMetric,
        b: &FinPseudoMetric,
        p: &Predicate,
    ) -> Result<Predicate> {
        doctrine::exists_along(&MapArrow::proj_left(&a.carrier, &b.carrier), p)
    }
    fn forall_proj(
        &self,
        a: &FinPseudoMetric,
        b: &FinPseudoMetric,
        p: &Predicate,
    ) -> Result<Predicate> {
        doctrine::forall_along(&MapArrow::proj_left(&a.carrier, &b.carrier), p)
    }
    fn exists_terminal(&self, a: &FinPseudoMetric, p: &Predicate) -> Result<Predicate> {
        doctrine::exists_along(&MapArrow::to_unit(&a.carrier), p)
    }
    fn forall_terminal(&self, a: &FinPseudoMetric, p: &Predicate) -> Result<Predicate> {
        doctrine::forall_along(&MapArrow::to_unit(&a.carrier), p)
    }
    fn equality(&self, a: &FinPseudoMetric) -> Predicate {
        a.d.clone()
    }
    fn apply_connective(
        &self,
        u: &Connective,
        obj: &FinPseudoMetric,
        args: &[Predicate],
    ) -> Result<Predicate> {
        let out = apply_connective(u, args)?;
        obj.carrier.ensure_eq(out.carrier())?;
        Ok(out)
    }
    fn underlying<'a>(&self, p: &'a Predicate) -> &'a Predicate {
        p
    }
}

/// Builds a CMT interpretation from a model with a metric for every sort.
/// Functions must be uniformly continuous and relations must lie in the
/// CMT fibers.
pub fn cmt_interpretation(model: &Model, sig: &Signature) -> Result<Interpretation<CmtBackend>> {
    let mut out = Interpretation::<CmtBackend>::default();
    for (s, c) in &model.interp.sorts {
        let d = model
            .metrics
            .get(s)
            .ok_or_else(|| Error::Model(format!("no metric for sort {s:?}")))?;
        out.sorts
            .insert(s.clone(), FinPseudoMetric::new(c.clone(), d.clone())?);
    }
    for (name, decl) in &sig.functions {
        let f = model
            .interp
            .functions
            .get(name)
            .ok_or_else(|| Error::Model(format!("missing function {name:?}")))?;
        let m = out.product_of(&CmtBackend, &decl.args)?;
        let n = out.sort(&decl.result)?.clone();
        if !is_uniformly_continuous(f, &m, &n)?.holds {
            return Err(Error::NotUniformlyContinuous);
        }
        out.functions.insert(
            name.clone(),
            CmtArrow {
                map: f.clone(),
                source: m,
                target: n,
            },
        );
    }
    for (name, args) in &sig.relations {
        let r = model
            .interp
            .relations
            .get(name)
            .ok_or_else(|| Error::Model(format!("missing relation {name:?}")))?;
        if !cmt_fiber_check(r, &out.product_of(&CmtBackend, args)?)?.holds {
            return Err(Error::Model(format!(
                "relation {name:?} is not uniformly continuous"
            )));
        }
        out.relations.insert(name.clone(), r.clone());
    }
    Ok(out)
}

/// The CMT model forgets its metrics.
pub fn forgetful(interp: &Interpretation<CmtBackend>) -> Interpretation<UBackend> {
    Interpretation {
        sorts: interp
            .sorts
            .iter()
            .map(|(s, m)| (s.clone(), m.carrier.clone()))
            .collect(),
        functions: interp
            .functions
            .iter()
            .map(|(s, f)| (s.clone(), f.map.clone()))
            .collect(),
        relations: interp.relations.clone(),
    }
}

/// Every carrier gets the discrete metric. On products the max of
/// discrete metrics is again discrete.
pub fn discrete(interp: &Interpretation<UBackend>) -> Interpretation<CmtBackend> {
    let disc = FinPseudoMetric::discrete;
    Interpretation {
        sorts: interp
            .sorts
            .iter()
            .map(|(s, c)| (s.clone(), disc(c)))
            .collect(),
        functions: interp
            .functions
            .iter()
            .map(|(s, f)| {
                (
                    s.clone(),
                    CmtArrow {
                        map: f.clone(),
                        source: disc(f.domain()),
                        target: disc(f.codomain()),
                    },
                )
            })
            .collect(),
        relations: interp.relations.clone(),
    }
}

/// Transport along `G` into Strict(U): sorts become `(X, d)`, functions
/// their relations `d(f(x), y)`, and predicates stay as they are.
pub fn into_strict(
    interp: &Interpretation<CmtBackend>,
    sig: &Signature,
) -> Result<Interpretation<StrictU>> {
    let mut out = Interpretation::<StrictU> {
        sorts: interp
            .sorts
            .iter()
            .map(|(s, m)| (s.clone(), g_object(m)))
            .collect(),
        ..Default::default()
    };
    for (name, f) in &interp.functions {
        out.functions
            .insert(name.clone(), g_morphism(&f.map, &f.source, &f.target)?);
    }
    for (name, args) in &sig.relations {
        let r = interp
            .relations
            .get(name)
            .ok_or_else(|| Error::Model(format!("missing relation {name:?}")))?;
        let m = interp.product_of(&CmtBackend, args)?;
        out.relations.insert(
            name.clone(),
            StrictPredicate::new_unchecked(g_object(&m), r.clone()),
        );
    }
    Ok(out)
}

/// The three embeddings along which interpretations are transported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Embedding {
    /// CMT → U, forgetting metrics.
    Forgetful,
    /// U → CMT, with discrete metrics.
    Discrete,
    /// CMT → Strict(U), the functor `G`.
    Strict,
}

/// A CMT-model and its images, for checking sequents in any backend.
#[derive(Clone, Debug)]
pub enum Transported {
    U(Interpretation<UBackend>),
    Cmt(Interpretation<CmtBackend>),
    Strict(Interpretation<StrictU>),
}

/// Transports along an embedding. `Discrete` takes the U part of the CMT
/// model; the others start from the CMT model itself.
pub fn transfer_interpretation(
    interp: &Interpretation<CmtBackend>,
    sig: &Signature,
    along: Embedding,
) -> Result<Transported> {
    Ok(match along {
        Embedding::Forgetful => Transported::U(forgetful(interp)),
        Embedding::Discrete => Transported::Cmt(discrete(&forgetful(interp))),
        Embedding::Strict => Transported::Strict(into_strict(interp, sig)?),
    })
}

// ------------------------------------------------------------------- JSON

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MetricFileJson {
    carrier: Carrier,
    d: std::collections::BTreeMap<String, Value>,
}

impl Serialize for FinPseudoMetric {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MetricFileJson {
            carrier: self.carrier.clone(),
            d: self.d.to_named(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FinPseudoMetric {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MetricFileJson::deserialize(d)?;
        let entries: Vec<(String, Value)> = j.d.into_iter().collect();
        let table = Predicate::from_named(&square(&j.carrier), &entries)
            .map_err(serde::de::Error::custom)?;
        FinPseudoMetric::new(j.carrier, table).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: i64, d: i64) -> Value {
        Value::new(n, d).unwrap()
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn atoms(names: &[&str]) -> Carrier {
        Carrier::atoms(names).unwrap()
    }

    fn table(c: &Carrier, vals: &[Value]) -> Predicate {
        Predicate::new(square(c), vals.to_vec()).unwrap()
    }

    const Z: Value = Value::ZERO;
    const O: Value = Value::ONE;

    #[test]
    fn axioms() {
        let ab = atoms(&["a", "b"]);
        let disc = check_metric_axioms(&ab, &doctrine::eq_predicate(&ab)).unwrap();
        assert!(disc.metric);
        let glued = check_metric_axioms(&ab, &table(&ab, &[Z, Z, Z, Z])).unwrap();
        assert!(glued.pseudometric && !glued.metric);
        let abc = atoms(&["a", "b", "c"]);
        let (h, q) = (v(1, 2), v(1, 4));
        let bad = check_metric_axioms(&abc, &table(&abc, &[Z, h, O, h, Z, q, O, q, Z])).unwrap();
        assert!(!bad.pseudometric);
        let viol = bad.violation.unwrap();
        assert_eq!(viol.axiom, "triangle inequality");
        assert_eq!(viol.at, vec!["a", "b", "c"]);
    }

    #[test]
    fn truncation() {
        let ab = atoms(&["a", "b"]);
        let m = truncate_diameter(&ab, &[r(0, 1), r(3, 2), r(3, 2), r(0, 1)]).unwrap();
        assert_eq!(m.dist(0, 1), O);
        let small = truncate_diameter(&ab, &[r(0, 1), r(1, 3), r(1, 3), r(0, 1)]).unwrap();
        assert_eq!(small.dist(0, 1), v(1, 3));
        assert!(truncate_diameter(&ab, &[r(0, 1), r(1, 3), r(1, 2), r(0, 1)]).is_err());
    }

    #[test]
    fn products() {
        let pt = FinPseudoMetric::point();
        assert_eq!(metric_product(&pt, &pt).carrier().size(), 1);
        let m = FinPseudoMetric::discrete(&atoms(&["a", "b"]));
        let n = FinPseudoMetric::discrete(&atoms(&["u", "v"]));
        let mn = metric_product(&m, &n);
        assert_eq!(mn.carrier().size(), 4);
        let (ab, bv) = (
            mn.carrier().index_of("a,u").unwrap(),
            mn.carrier().index_of("b,v").unwrap(),
        );
        assert_eq!(mn.dist(ab, bv), O);
    }

    #[test]
    fn uniform_continuity() {
        let abc = atoms(&["a", "b", "c"]);
        let m = FinPseudoMetric::new(
            abc.clone(),
            table(
                &abc,
                &[
                    Z,
                    v(1, 2),
                    v(1, 4),
                    v(1, 2),
                    Z,
                    v(1, 4),
                    v(1, 4),
                    v(1, 4),
                    Z,
                ],
            ),
        )
        .unwrap();
        let id = MapArrow::identity(&abc);
        assert!(is_uniformly_continuous(&id, &m, &m).unwrap().holds);
        let ab = atoms(&["a", "b"]);
        let glued = FinPseudoMetric::new(ab.clone(), table(&ab, &[Z, Z, Z, Z])).unwrap();
        let disc = FinPseudoMetric::discrete(&ab);
        assert!(
            !is_uniformly_continuous(&MapArrow::identity(&ab), &glued, &disc)
                .unwrap()
                .holds
        );
        assert!(
            is_uniformly_continuous(&MapArrow::identity(&ab), &disc, &glued)
                .unwrap()
                .holds
        );
    }

    #[test]
    fn fiber_membership() {
        let abc = atoms(&["a", "b", "c"]);
        let m = FinPseudoMetric::new(
            abc.clone(),
            table(
                &abc,
                &[
                    Z,
                    v(1, 2),
                    v(1, 4),
                    v(1, 2),
                    Z,
                    v(1, 4),
                    v(1, 4),
                    v(1, 4),
                    Z,
                ],
            ),
        )
        .unwrap();
        assert!(
            cmt_fiber_check(&Predicate::constant(&abc, v(1, 3)), &m)
                .unwrap()
                .holds
        );
        let dist_to_a = Predicate::from_fn(&abc, |x| m.dist(x, 0));
        let verdict = cmt_fiber_check(&dist_to_a, &m).unwrap();
        assert!(verdict.holds);
        assert!(verdict.relational.forward.modulus.is_some());
        let ab = atoms(&["a", "b"]);
        let glued = FinPseudoMetric::new(ab.clone(), table(&ab, &[Z, Z, Z, Z])).unwrap();
        let split = Predicate::new(ab, vec![Z, O]).unwrap();
        let bad = cmt_fiber_check(&split, &glued).unwrap();
        assert!(!bad.holds);
        assert!(bad.relational.witness.is_some());
    }

    #[test]
    fn functor_g() {
        let ab = atoms(&["a", "b"]);
        let m = FinPseudoMetric::discrete(&ab);
        let id = MapArrow::identity(&ab);
        let gid = g_morphism(&id, &m, &m).unwrap();
        assert!(gid.check().unwrap().all());
        assert!(morphism_eq(&gid, &g_object(&m).identity()).unwrap());
        assert_eq!(extract_function(&gid).unwrap(), id);
        let swap = MapArrow::new(ab.clone(), ab.clone(), vec![1, 0]).unwrap();
        let gs = g_morphism(&swap, &m, &m).unwrap();
        assert_eq!(extract_function(&gs).unwrap(), swap);
        let glued = FinPseudoMetric::new(ab.clone(), table(&ab, &[Z, Z, Z, Z])).unwrap();
        assert_eq!(
            g_morphism(&id, &glued, &m),
            Err(Error::NotUniformlyContinuous)
        );
    }

    #[test]
    fn quotient_metric() {
        let abc = atoms(&["a", "b", "c"]);
        let nine = v(9, 10);
        let e = EquivRel::new(
            abc.clone(),
            table(&abc, &[Z, Z, nine, Z, Z, nine, nine, nine, Z]),
        )
        .unwrap();
        let (d, cert) = metric_from_per(&e).unwrap();
        assert_eq!((d.dist(0, 1), d.dist(0, 2), d.dist(1, 2)), (Z, O, O));
        assert!(cert.verified());
        let disc = EquivRel::new(abc.clone(), doctrine::eq_predicate(&abc)).unwrap();
        let (d, cert) = metric_from_per(&disc).unwrap();
        assert_eq!(d, FinPseudoMetric::discrete(&abc));
        assert!(cert.verified());
        assert!(check_uniformity(&e).all());
        assert_eq!(uniformity_thresholds(&e), vec![v(9, 20), nine, O]);
    }

    #[test]
    fn completion() {
        assert!(completion_is_identity(
            &FinMetric::from_pseudo(FinPseudoMetric::point()).unwrap()
        ));
        let ab = atoms(&["a", "b"]);
        assert!(completion_is_identity(
            &FinMetric::from_pseudo(FinPseudoMetric::discrete(&ab)).unwrap()
        ));
    }
}
