//! Partial equivalence relations over U, functional relations between them,
//! and the hyperdoctrine of strict predicates.
//!
//! A morphism is stored as one representative relation; two representatives
//! are the same morphism when their zero sets agree (see [`morphism_eq`]).
//! The defining sequents are checked through the logic front end.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::carrier::{Carrier, Elem};
use crate::connective::{apply_connective, Connective};
use crate::doctrine::eq_predicate;
use crate::dsl::{
    check_sequent, parse_theory, Hyperdoctrine, Interpretation, SequentVerdict, Theory, UBackend,
};
use crate::error::{Error, Result};
use crate::order::{equivalent, holds};
use crate::predicate::{MapArrow, Predicate};
use crate::value::Value;

fn theory(cell: &'static OnceLock<Theory>, src: &str) -> &'static Theory {
    cell.get_or_init(|| parse_theory(src).expect("built-in theory parses"))
}

fn per_theory() -> &'static Theory {
    static CELL: OnceLock<Theory> = OnceLock::new();
    theory(
        &CELL,
        "sort X\nrel R : X, X\n\
         [x:X, y:X] R(x, y) |- R(y, x)\n\
         [x:X, y:X, z:X] R(x, y) /\\ R(y, z) |- R(x, z)\n\
         [x:X] top |- R(x, x)\n",
    )
}

fn functional_theory() -> &'static Theory {
    static CELL: OnceLock<Theory> = OnceLock::new();
    theory(
        &CELL,
        "sort X, Y\nrel SX : X, X\nrel SY : Y, Y\nrel F : X, Y\n\
         [x:X, y:Y] F(x, y) |- SX(x, x) /\\ SY(y, y)\n\
         [x:X, x2:X, y:Y, y2:Y] F(x, y) /\\ SX(x, x2) /\\ SY(y, y2) |- F(x2, y2)\n\
         [x:X, y:Y, y2:Y] F(x, y) /\\ F(x, y2) |- SY(y, y2)\n\
         [x:X] SX(x, x) |- E y:Y. F(x, y)\n\
         [y:X, y2:X, x:Y] F(y, x) /\\ F(y2, x) |- SX(y, y2)\n",
    )
}

fn strict_theory() -> &'static Theory {
    static CELL: OnceLock<Theory> = OnceLock::new();
    theory(
        &CELL,
        "sort X\nrel S : X, X\nrel P : X\n\
         [x:X] P(x) |- S(x, x)\n\
         [x:X, x2:X] P(x) /\\ S(x, x2) |- P(x2)\n",
    )
}

/// Validity of each listed sequent of `t` in the given U-model.
fn run(t: &Theory, interp: &Interpretation<UBackend>, which: &[usize]) -> Result<Vec<bool>> {
    which
        .iter()
        .map(|&i| Ok(check_sequent(&UBackend, interp, &t.sequents[i])?.valid))
        .collect()
}

fn square(c: &Carrier) -> Carrier {
    Carrier::product(c, c)
}

fn per_interp(x: &Carrier, r: &Predicate) -> Result<Interpretation<UBackend>> {
    square(x).ensure_eq(r.carrier())?;
    let mut i = Interpretation::default();
    i.sorts.insert("X".into(), x.clone());
    i.relations.insert("R".into(), r.clone());
    Ok(i)
}

/// Symmetry and transitivity of `r` on `x`.
pub fn is_per(x: &Carrier, r: &Predicate) -> Result<bool> {
    Ok(run(per_theory(), &per_interp(x, r)?, &[0, 1])?
        .into_iter()
        .all(|b| b))
}

/// Symmetry, transitivity and reflexivity of `r` on `x`.
pub fn is_equiv_rel(x: &Carrier, r: &Predicate) -> Result<bool> {
    Ok(run(per_theory(), &per_interp(x, r)?, &[0, 1, 2])?
        .into_iter()
        .all(|b| b))
}

/// A carrier with a symmetric, transitive relation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Per {
    carrier: Carrier,
    rel: Predicate,
}

impl Per {
    pub fn new(carrier: Carrier, rel: Predicate) -> Result<Self> {
        if !is_per(&carrier, &rel)? {
            return Err(Error::NotPer("symmetry or transitivity fails".into()));
        }
        Ok(Per { carrier, rel })
    }

    /// The carrier with its `{0,1}` equality.
    pub fn discrete(c: &Carrier) -> Self {
        Per {
            carrier: c.clone(),
            rel: eq_predicate(c),
        }
    }

    /// One point, related to itself.
    pub fn terminal() -> Self {
        Per::discrete(&Carrier::unit())
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn rel(&self) -> &Predicate {
        &self.rel
    }

    pub fn sim(&self, x: Elem, y: Elem) -> Value {
        self.rel.at(square(&self.carrier).pair(x, y))
    }

    pub fn is_reflexive(&self) -> bool {
        self.carrier.elements().all(|x| self.sim(x, x).is_zero())
    }

    /// `((x,y),(x',y')) ↦ max(x∼x', y∼y')`.
    pub fn product(&self, other: &Per) -> Per {
        let c = Carrier::product(&self.carrier, &other.carrier);
        let rel = Predicate::from_fn(&square(&c), |e| {
            let (p, q) = (e / c.size(), e % c.size());
            let ((x, y), (x2, y2)) = (c.split(p), c.split(q));
            self.sim(x, x2).max(other.sim(y, y2))
        });
        Per { carrier: c, rel }
    }

    /// The largest strict predicate, `x ↦ x∼x`.
    pub fn strict_top(&self) -> StrictPredicate {
        let pred = Predicate::from_fn(&self.carrier, |x| self.sim(x, x));
        StrictPredicate {
            object: self.clone(),
            pred,
        }
    }

    pub fn strict_bottom(&self) -> StrictPredicate {
        StrictPredicate {
            object: self.clone(),
            pred: Predicate::constant(&self.carrier, Value::ONE),
        }
    }

    /// The identity morphism, represented by `∼` itself.
    pub fn identity(&self) -> FunctionalRelation {
        FunctionalRelation {
            source: self.clone(),
            target: self.clone(),
            rel: self.rel.clone(),
        }
    }
}

/// A reflexive [`Per`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EquivRel(Per);

impl EquivRel {
    pub fn new(carrier: Carrier, rel: Predicate) -> Result<Self> {
        if !is_equiv_rel(&carrier, &rel)? {
            return Err(Error::NotEquivRel(
                "symmetry, transitivity or reflexivity fails".into(),
            ));
        }
        Ok(EquivRel(Per { carrier, rel }))
    }

    pub fn from_per(p: Per) -> Result<Self> {
        if !p.is_reflexive() {
            return Err(Error::NotEquivRel(
                "some point is not related to itself".into(),
            ));
        }
        Ok(EquivRel(p))
    }

    pub(crate) fn new_unchecked(carrier: Carrier, rel: Predicate) -> Self {
        EquivRel(Per { carrier, rel })
    }

    pub fn as_per(&self) -> &Per {
        &self.0
    }

    pub fn into_per(self) -> Per {
        self.0
    }
}

impl std::ops::Deref for EquivRel {
    type Target = Per;

    fn deref(&self) -> &Per {
        &self.0
    }
}

/// Which of the four defining sequents hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FunctionalReport {
    pub strict: bool,
    pub relational: bool,
    pub single_valued: bool,
    pub total: bool,
}

impl FunctionalReport {
    pub fn all(&self) -> bool {
        self.strict && self.relational && self.single_valued && self.total
    }
}

fn functional_interp(
    source: &Per,
    target: &Per,
    rel: &Predicate,
) -> Result<Interpretation<UBackend>> {
    Carrier::product(&source.carrier, &target.carrier).ensure_eq(rel.carrier())?;
    let mut i = Interpretation::default();
    i.sorts.insert("X".into(), source.carrier.clone());
    i.sorts.insert("Y".into(), target.carrier.clone());
    i.relations.insert("SX".into(), source.rel.clone());
    i.relations.insert("SY".into(), target.rel.clone());
    i.relations.insert("F".into(), rel.clone());
    Ok(i)
}

pub fn check_functional(source: &Per, target: &Per, rel: &Predicate) -> Result<FunctionalReport> {
    let r = run(
        functional_theory(),
        &functional_interp(source, target, rel)?,
        &[0, 1, 2, 3],
    )?;
    Ok(FunctionalReport {
        strict: r[0],
        relational: r[1],
        single_valued: r[2],
        total: r[3],
    })
}

/// A morphism of PERs, represented by a relation on `source × target`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FunctionalRelation {
    source: Per,
    target: Per,
    rel: Predicate,
}

impl FunctionalRelation {
    pub fn new(source: Per, target: Per, rel: Predicate) -> Result<Self> {
        let report = check_functional(&source, &target, &rel)?;
        let failing = [
            (report.strict, "strictness"),
            (report.relational, "relationality"),
            (report.single_valued, "single-valuedness"),
            (report.total, "totality"),
        ];
        if let Some((_, which)) = failing.iter().find(|(ok, _)| !ok) {
            return Err(Error::NotFunctional(which));
        }
        Ok(FunctionalRelation {
            source,
            target,
            rel,
        })
    }

    pub(crate) fn new_unchecked(source: Per, target: Per, rel: Predicate) -> Self {
        FunctionalRelation {
            source,
            target,
            rel,
        }
    }

    pub fn source(&self) -> &Per {
        &self.source
    }

    pub fn target(&self) -> &Per {
        &self.target
    }

    pub fn rel(&self) -> &Predicate {
        &self.rel
    }

    pub fn at(&self, x: Elem, y: Elem) -> Value {
        self.rel.at(self.rel.carrier().pair(x, y))
    }

    pub fn check(&self) -> Result<FunctionalReport> {
        check_functional(&self.source, &self.target, &self.rel)
    }
}

/// `(x,z) ↦ min_y max(F(x,y), G(y,z))`.
pub fn compose(f: &FunctionalRelation, g: &FunctionalRelation) -> Result<FunctionalRelation> {
    f.target.carrier.ensure_eq(&g.source.carrier)?;
    let (x, y, z) = (&f.source.carrier, &f.target.carrier, &g.target.carrier);
    let xz = Carrier::product(x, z);
    let rel = Predicate::from_fn(&xz, |e| {
        let (a, c) = xz.split(e);
        y.elements()
            .map(|b| f.at(a, b).max(g.at(b, c)))
            .min()
            .unwrap_or(Value::ONE)
    });
    Ok(FunctionalRelation {
        source: f.source.clone(),
        target: g.target.clone(),
        rel,
    })
}

fn same_ends(f: &FunctionalRelation, g: &FunctionalRelation) -> Result<()> {
    f.source.carrier.ensure_eq(&g.source.carrier)?;
    f.target.carrier.ensure_eq(&g.target.carrier)
}

/// `F ⊑ G`; for functional relations this already forces `F ≃ G`.
pub fn morphism_eq(f: &FunctionalRelation, g: &FunctionalRelation) -> Result<bool> {
    same_ends(f, g)?;
    holds(&f.rel, &g.rel)
}

/// `F(y,x) ∧ F(y',x) ⊢ y ∼ y'`.
pub fn is_mono(f: &FunctionalRelation) -> Result<bool> {
    let i = functional_interp(&f.source, &f.target, &f.rel)?;
    Ok(run(functional_theory(), &i, &[4])?[0])
}

/// A predicate respecting a PER: `φ(x) ⊢ x∼x` and `φ(x) ∧ x∼x' ⊢ φ(x')`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StrictPredicate {
    object: Per,
    pred: Predicate,
}

/// The strictness and relationality sequents of `pred` over `object`,
/// with their moduli.
pub fn strict_verdicts(object: &Per, pred: &Predicate) -> Result<(SequentVerdict, SequentVerdict)> {
    object.carrier.ensure_eq(pred.carrier())?;
    let mut i = Interpretation::default();
    i.sorts.insert("X".into(), object.carrier.clone());
    i.relations.insert("S".into(), object.rel.clone());
    i.relations.insert("P".into(), pred.clone());
    let t = strict_theory();
    Ok((
        check_sequent(&UBackend, &i, &t.sequents[0])?,
        check_sequent(&UBackend, &i, &t.sequents[1])?,
    ))
}

/// Strictness and relationality of `pred` over `object`.
pub fn check_strict(object: &Per, pred: &Predicate) -> Result<(bool, bool)> {
    let (s, r) = strict_verdicts(object, pred)?;
    Ok((s.valid, r.valid))
}

impl StrictPredicate {
    pub fn new(object: Per, pred: Predicate) -> Result<Self> {
        match check_strict(&object, &pred)? {
            (false, _) => Err(Error::NotStrict("strictness")),
            (_, false) => Err(Error::NotStrict("relationality")),
            _ => Ok(StrictPredicate { object, pred }),
        }
    }

    pub(crate) fn new_unchecked(object: Per, pred: Predicate) -> Self {
        StrictPredicate { object, pred }
    }

    pub fn object(&self) -> &Per {
        &self.object
    }

    pub fn pred(&self) -> &Predicate {
        &self.pred
    }

    pub fn equivalent(&self, other: &StrictPredicate) -> Result<bool> {
        equivalent(&self.pred, &other.pred)
    }

    pub fn leq(&self, other: &StrictPredicate) -> Result<bool> {
        holds(&self.pred, &other.pred)
    }
}

/// The subobject `(X, ∼_φ)` with `x ∼_φ x' = max(φ(x), x∼x')`, and its
/// inclusion into `(X, ∼)`.
pub fn sub_from_strict(phi: &StrictPredicate) -> Result<(Per, FunctionalRelation)> {
    let (strict, relational) = check_strict(&phi.object, &phi.pred)?;
    if !strict {
        return Err(Error::NotStrict("strictness"));
    }
    if !relational {
        return Err(Error::NotStrict("relationality"));
    }
    let x = &phi.object.carrier;
    let sq = square(x);
    let rel = Predicate::from_fn(&sq, |e| {
        let (a, _) = sq.split(e);
        phi.pred.at(a).max(phi.object.rel.at(e))
    });
    let sub = Per {
        carrier: x.clone(),
        rel: rel.clone(),
    };
    let inclusion = FunctionalRelation {
        source: sub.clone(),
        target: phi.object.clone(),
        rel,
    };
    Ok((sub, inclusion))
}

/// `ψ(x) = min_y F(y,x)` for a mono `F : Y → X`.
pub fn strict_from_mono(f: &FunctionalRelation) -> Result<StrictPredicate> {
    if !is_mono(f)? {
        return Err(Error::NotMono);
    }
    let ys = &f.source.carrier;
    let pred = Predicate::from_fn(&f.target.carrier, |x| {
        ys.elements()
            .map(|y| f.at(y, x))
            .min()
            .unwrap_or(Value::ONE)
    });
    Ok(StrictPredicate {
        object: f.target.clone(),
        pred,
    })
}

/// `y ↦ min_x max(F(x,y), ψ(x))`, the image of `ψ` along `F`.
pub fn strict_exists(f: &FunctionalRelation, psi: &StrictPredicate) -> Result<StrictPredicate> {
    f.source.carrier.ensure_eq(&psi.object.carrier)?;
    let xs = &f.source.carrier;
    let pred = Predicate::from_fn(&f.target.carrier, |y| {
        xs.elements()
            .map(|x| f.at(x, y).max(psi.pred.at(x)))
            .min()
            .unwrap_or(Value::ONE)
    });
    Ok(StrictPredicate {
        object: f.target.clone(),
        pred,
    })
}

/// `x ↦ min_y max(F(x,y), φ(y))`, the pullback of `φ` along `F`.
pub fn strict_pullback(f: &FunctionalRelation, phi: &StrictPredicate) -> Result<StrictPredicate> {
    f.target.carrier.ensure_eq(&phi.object.carrier)?;
    let ys = &f.target.carrier;
    let pred = Predicate::from_fn(&f.source.carrier, |x| {
        ys.elements()
            .map(|y| f.at(x, y).max(phi.pred.at(y)))
            .min()
            .unwrap_or(Value::ONE)
    });
    Ok(StrictPredicate {
        object: f.source.clone(),
        pred,
    })
}

/// `y ↦ max(y∼y, max_z φ(y,z))`, right adjoint to pulling back along the
/// projection `Y × Z → Y`.
pub fn strict_forall_proj(y: &Per, z: &EquivRel, phi: &StrictPredicate) -> Result<StrictPredicate> {
    let yz = Carrier::product(&y.carrier, &z.carrier);
    yz.ensure_eq(&phi.object.carrier)?;
    let pred = Predicate::from_fn(&y.carrier, |a| {
        z.carrier
            .elements()
            .map(|c| phi.pred.at(yz.pair(a, c)))
            .fold(y.sim(a, a), Value::max)
    });
    Ok(StrictPredicate {
        object: y.clone(),
        pred,
    })
}

/// `Π_X((x,y),x') = max(x∼x', y∼y)`.
pub fn proj_left(x: &Per, y: &Per) -> FunctionalRelation {
    let prod = x.product(y);
    let c = Carrier::product(&prod.carrier, &x.carrier);
    let rel = Predicate::from_fn(&c, |e| {
        let (p, a2) = c.split(e);
        let (a, b) = prod.carrier.split(p);
        x.sim(a, a2).max(y.sim(b, b))
    });
    FunctionalRelation {
        source: prod,
        target: x.clone(),
        rel,
    }
}

/// `Π_Y((x,y),y') = max(y∼y', x∼x)`.
pub fn proj_right(x: &Per, y: &Per) -> FunctionalRelation {
    let prod = x.product(y);
    let c = Carrier::product(&prod.carrier, &y.carrier);
    let rel = Predicate::from_fn(&c, |e| {
        let (p, b2) = c.split(e);
        let (a, b) = prod.carrier.split(p);
        y.sim(b, b2).max(x.sim(a, a))
    });
    FunctionalRelation {
        source: prod,
        target: y.clone(),
        rel,
    }
}

/// `⟨F,G⟩(z,(x,y)) = max(F(z,x), G(z,y))`.
pub fn pair(f: &FunctionalRelation, g: &FunctionalRelation) -> Result<FunctionalRelation> {
    f.source.carrier.ensure_eq(&g.source.carrier)?;
    let target = f.target.product(&g.target);
    let c = Carrier::product(&f.source.carrier, &target.carrier);
    let rel = Predicate::from_fn(&c, |e| {
        let (z, p) = c.split(e);
        let (a, b) = target.carrier.split(p);
        f.at(z, a).max(g.at(z, b))
    });
    Ok(FunctionalRelation {
        source: f.source.clone(),
        target,
        rel,
    })
}

/// The unique morphism to the terminal PER: `(x,*) ↦ x∼x`.
pub fn to_terminal(x: &Per) -> FunctionalRelation {
    let t = Per::terminal();
    let c = Carrier::product(&x.carrier, &t.carrier);
    let rel = Predicate::from_fn(&c, |e| {
        let (a, _) = c.split(e);
        x.sim(a, a)
    });
    FunctionalRelation {
        source: x.clone(),
        target: t,
        rel,
    }
}

/// `F × G` as `⟨F ∘ Π₁, G ∘ Π₂⟩`.
pub fn product_map(f: &FunctionalRelation, g: &FunctionalRelation) -> Result<FunctionalRelation> {
    let left = compose(&proj_left(&f.source, &g.source), f)?;
    let right = compose(&proj_right(&f.source, &g.source), g)?;
    pair(&left, &right)
}

/// Does the subobject `m1` factor through `m2`? Both must share a target.
/// The candidate mediating relation is `h(a,b) = ∃x. m1(a,x) ∧ m2(b,x)`.
pub fn factors_through(m1: &FunctionalRelation, m2: &FunctionalRelation) -> Result<bool> {
    m1.target.carrier.ensure_eq(&m2.target.carrier)?;
    let (a, b, x) = (&m1.source.carrier, &m2.source.carrier, &m1.target.carrier);
    let ab = Carrier::product(a, b);
    let h = Predicate::from_fn(&ab, |e| {
        let (p, q) = ab.split(e);
        x.elements()
            .map(|t| m1.at(p, t).max(m2.at(q, t)))
            .min()
            .unwrap_or(Value::ONE)
    });
    if !check_functional(&m1.source, &m2.source, &h)?.all() {
        return Ok(false);
    }
    let h = FunctionalRelation {
        source: m1.source.clone(),
        target: m2.source.clone(),
        rel: h,
    };
    morphism_eq(&compose(&h, m2)?, m1)
}

/// Beck–Chevalley on the canonical pullback of `F : X → Z` and `G : Y → Z`,
/// with `(x,y) ∼_P (x',y') = max(x∼x', y∼y', min_z max(F(x,z), G(y,z)))`:
/// compares `∃_P Q*φ` with `F* ∃_G φ` for `φ` strict on `Y`.
pub fn strict_beck_chevalley(
    f: &FunctionalRelation,
    g: &FunctionalRelation,
    phi: &StrictPredicate,
) -> Result<bool> {
    f.target.carrier.ensure_eq(&g.target.carrier)?;
    g.source.carrier.ensure_eq(&phi.object.carrier)?;
    let (x, y, z) = (&f.source, &g.source, &f.target);
    let xy = Carrier::product(&x.carrier, &y.carrier);
    let meet_z = |a: Elem, b: Elem| {
        z.carrier
            .elements()
            .map(|c| f.at(a, c).max(g.at(b, c)))
            .min()
            .unwrap_or(Value::ONE)
    };
    let rel_p = Predicate::from_fn(&square(&xy), |e| {
        let (p, q) = (e / xy.size(), e % xy.size());
        let ((a, b), (a2, b2)) = (xy.split(p), xy.split(q));
        x.sim(a, a2).max(y.sim(b, b2)).max(meet_z(a, b))
    });
    let obj_p = Per {
        carrier: xy.clone(),
        rel: rel_p,
    };
    let live = |p: Elem| obj_p.sim(p, p);
    let pc = Carrier::product(&xy, &x.carrier);
    let p_rel = Predicate::from_fn(&pc, |e| {
        let (p, a2) = pc.split(e);
        x.sim(xy.split(p).0, a2).max(live(p))
    });
    let qc = Carrier::product(&xy, &y.carrier);
    let q_rel = Predicate::from_fn(&qc, |e| {
        let (p, b2) = qc.split(e);
        y.sim(xy.split(p).1, b2).max(live(p))
    });
    let p_map = FunctionalRelation {
        source: obj_p.clone(),
        target: x.clone(),
        rel: p_rel,
    };
    let q_map = FunctionalRelation {
        source: obj_p,
        target: y.clone(),
        rel: q_rel,
    };
    let lhs = strict_exists(&p_map, &strict_pullback(&q_map, phi)?)?;
    let rhs = strict_pullback(f, &strict_exists(g, phi)?)?;
    lhs.equivalent(&rhs)
}

/// Frobenius for strict fibers: `∃_F(ψ ∧ F*φ) ≃ ∃_F ψ ∧ φ`.
pub fn strict_frobenius(
    f: &FunctionalRelation,
    psi: &StrictPredicate,
    phi: &StrictPredicate,
) -> Result<bool> {
    let pulled = strict_pullback(f, phi)?;
    let lhs = strict_exists(
        f,
        &StrictPredicate::new_unchecked(
            psi.object.clone(),
            psi.pred.zip_with(&pulled.pred, Value::max)?,
        ),
    )?;
    let ex = strict_exists(f, psi)?;
    let rhs = ex.pred.zip_with(&phi.pred, Value::max)?;
    equivalent(&lhs.pred, &rhs)
}

/// The hyperdoctrine of strict predicates over PER(U).
#[derive(Clone, Copy, Debug, Default)]
pub struct StrictU;

impl Hyperdoctrine for StrictU {
    type Object = Per;
    type Arrow = FunctionalRelation;
    type Pred = StrictPredicate;

    fn terminal(&self) -> Per {
        Per::terminal()
    }
    fn product(&self, a: &Per, b: &Per) -> Per {
        a.product(b)
    }
    fn identity(&self, a: &Per) -> FunctionalRelation {
        a.identity()
    }
    fn proj_left(&self, a: &Per, b: &Per) -> FunctionalRelation {
        proj_left(a, b)
    }
    fn proj_right(&self, a: &Per, b: &Per) -> FunctionalRelation {
        proj_right(a, b)
    }
    fn to_terminal(&self, a: &Per) -> FunctionalRelation {
        to_terminal(a)
    }
    fn pair(&self, f: &FunctionalRelation, g: &FunctionalRelation) -> Result<FunctionalRelation> {
        pair(f, g)
    }
    fn compose(
        &self,
        second: &FunctionalRelation,
        first: &FunctionalRelation,
    ) -> Result<FunctionalRelation> {
        compose(first, second)
    }
    fn arrow_domain(&self, f: &FunctionalRelation) -> Per {
        f.source.clone()
    }
    fn arrow_codomain(&self, f: &FunctionalRelation) -> Per {
        f.target.clone()
    }
    fn pred_on(&self, p: &StrictPredicate, a: &Per) -> bool {
        &p.object == a
    }
    fn top(&self, a: &Per) -> StrictPredicate {
        a.strict_top()
    }
    fn bottom(&self, a: &Per) -> StrictPredicate {
        a.strict_bottom()
    }
    fn meet(&self, p: &StrictPredicate, q: &StrictPredicate) -> Result<StrictPredicate> {
        Ok(StrictPredicate {
            object: p.object.clone(),
            pred: p.pred.zip_with(&q.pred, Value::max)?,
        })
    }
    fn join(&self, p: &StrictPredicate, q: &StrictPredicate) -> Result<StrictPredicate> {
        Ok(StrictPredicate {
            object: p.object.clone(),
            pred: p.pred.zip_with(&q.pred, Value::min)?,
        })
    }
    fn pullback(&self, f: &FunctionalRelation, p: &StrictPredicate) -> Result<StrictPredicate> {
        strict_pullback(f, p)
    }
    fn exists_proj(&self, a: &Per, b: &Per, p: &StrictPredicate) -> Result<StrictPredicate> {
        strict_exists(&proj_left(a, b), p)
    }
    fn forall_proj(&self, a: &Per, b: &Per, p: &StrictPredicate) -> Result<StrictPredicate> {
        strict_forall_proj(a, &EquivRel::from_per(b.clone())?, p)
    }
    fn exists_terminal(&self, a: &Per, p: &StrictPredicate) -> Result<StrictPredicate> {
        strict_exists(&to_terminal(a), p)
    }
    fn forall_terminal(&self, a: &Per, p: &StrictPredicate) -> Result<StrictPredicate> {
        let z = EquivRel::from_per(a.clone())?;
        let t = Per::terminal();
        let lifted = StrictPredicate {
            object: t.product(a),
            pred: p
                .pred
                .with_carrier(&Carrier::product(&t.carrier, &a.carrier))?,
        };
        strict_forall_proj(&t, &z, &lifted)
    }
    fn equality(&self, a: &Per) -> StrictPredicate {
        StrictPredicate {
            object: a.product(a),
            pred: a.rel.with_carrier(&square(&a.carrier)).expect("same size"),
        }
    }
    fn apply_connective(
        &self,
        u: &Connective,
        obj: &Per,
        args: &[StrictPredicate],
    ) -> Result<StrictPredicate> {
        let raw: Vec<Predicate> = args.iter().map(|a| a.pred.clone()).collect();
        let out = apply_connective(u, &raw)?;
        obj.carrier.ensure_eq(out.carrier())?;
        let pred = Predicate::from_fn(&obj.carrier, |x| out.at(x).max(obj.sim(x, x)));
        Ok(StrictPredicate {
            object: obj.clone(),
            pred,
        })
    }
    fn underlying<'a>(&self, p: &'a StrictPredicate) -> &'a Predicate {
        &p.pred
    }
}

/// Pushes a discrete U-interpretation into Strict(U): every sort becomes a
/// discrete PER and every function its graph.
pub fn discrete_strict(interp: &Interpretation<UBackend>) -> Interpretation<StrictU> {
    let mut out = Interpretation::<StrictU>::default();
    for (s, c) in &interp.sorts {
        out.sorts.insert(s.clone(), Per::discrete(c));
    }
    let per_of = |c: &Carrier| Per::discrete(c);
    for (name, f) in &interp.functions {
        out.functions.insert(
            name.clone(),
            graph(f, &per_of(f.domain()), &per_of(f.codomain())),
        );
    }
    for (name, r) in &interp.relations {
        out.relations.insert(
            name.clone(),
            StrictPredicate {
                object: per_of(r.carrier()),
                pred: r.clone(),
            },
        );
    }
    out
}

/// `(x,y) ↦ y ∼ f(x)`, the relation represented by a map.
pub fn graph(f: &MapArrow, source: &Per, target: &Per) -> FunctionalRelation {
    let c = Carrier::product(f.domain(), f.codomain());
    let rel = Predicate::from_fn(&c, |e| {
        let (x, y) = c.split(e);
        target.sim(f.apply(x), y).max(source.sim(x, x))
    });
    FunctionalRelation {
        source: source.clone(),
        target: target.clone(),
        rel,
    }
}

// ------------------------------------------------------------------- JSON

fn rel_to_named(p: &Predicate) -> BTreeMap<String, Value> {
    p.to_named()
}

fn rel_from_named(c: &Carrier, m: BTreeMap<String, Value>) -> Result<Predicate> {
    let entries: Vec<(String, Value)> = m.into_iter().collect();
    Predicate::from_named(c, &entries)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PerJson {
    carrier: Carrier,
    rel: BTreeMap<String, Value>,
}

impl PerJson {
    fn of(p: &Per) -> Self {
        PerJson {
            carrier: p.carrier.clone(),
            rel: rel_to_named(&p.rel),
        }
    }

    fn build(self) -> Result<Per> {
        let rel = rel_from_named(&square(&self.carrier), self.rel)?;
        Per::new(self.carrier, rel)
    }
}

impl Serialize for Per {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PerJson::of(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Per {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        PerJson::deserialize(d)?
            .build()
            .map_err(serde::de::Error::custom)
    }
}

impl Serialize for EquivRel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for EquivRel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        EquivRel::from_per(Per::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionalJson {
    source: Per,
    target: Per,
    rel: BTreeMap<String, Value>,
}

impl Serialize for FunctionalRelation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FunctionalJson {
            source: self.source.clone(),
            target: self.target.clone(),
            rel: rel_to_named(&self.rel),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FunctionalRelation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = FunctionalJson::deserialize(d)?;
        let c = Carrier::product(&j.source.carrier, &j.target.carrier);
        let rel = rel_from_named(&c, j.rel).map_err(serde::de::Error::custom)?;
        FunctionalRelation::new(j.source, j.target, rel).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StrictJson {
    object: Per,
    pred: BTreeMap<String, Value>,
}

impl Serialize for StrictPredicate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StrictJson {
            object: self.object.clone(),
            pred: self.pred.to_named(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StrictPredicate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = StrictJson::deserialize(d)?;
        let pred = rel_from_named(&j.object.carrier, j.pred).map_err(serde::de::Error::custom)?;
        StrictPredicate::new(j.object, pred).map_err(serde::de::Error::custom)
    }
}

impl PerJson {
    fn raw(self) -> Result<Per> {
        let rel = rel_from_named(&square(&self.carrier), self.rel)?;
        Ok(Per {
            carrier: self.carrier,
            rel,
        })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFunctionalJson {
    source: PerJson,
    target: PerJson,
    rel: BTreeMap<String, Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStrictJson {
    object: PerJson,
    pred: BTreeMap<String, Value>,
}

/// Verdicts on a PER, functional relation or strict predicate file, read
/// without enforcing the invariants being checked.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Verification {
    Per {
        per: bool,
        equivalence_relation: bool,
    },
    Functional {
        source_per: bool,
        target_per: bool,
        sequents: FunctionalReport,
        mono: bool,
    },
    Strict {
        object_per: bool,
        strict: bool,
        relational: bool,
    },
}

impl Verification {
    pub fn valid(&self) -> bool {
        match self {
            Verification::Per { per, .. } => *per,
            Verification::Functional {
                source_per,
                target_per,
                sequents,
                ..
            } => *source_per && *target_per && sequents.all(),
            Verification::Strict {
                object_per,
                strict,
                relational,
            } => *object_per && *strict && *relational,
        }
    }
}

/// Classifies the JSON by its fields: `{carrier, rel}`, `{source, target,
/// rel}` or `{object, pred}`.
pub fn verify_json(text: &str) -> Result<Verification> {
    let v: serde_json::Value = serde_json::from_str(text)?;
    let has = |k: &str| v.get(k).is_some();
    if has("source") {
        let j: RawFunctionalJson = serde_json::from_value(v)?;
        let (source, target) = (j.source.raw()?, j.target.raw()?);
        let rel = rel_from_named(&Carrier::product(&source.carrier, &target.carrier), j.rel)?;
        let sequents = check_functional(&source, &target, &rel)?;
        let mono = run(
            functional_theory(),
            &functional_interp(&source, &target, &rel)?,
            &[4],
        )?[0];
        Ok(Verification::Functional {
            source_per: is_per(&source.carrier, &source.rel)?,
            target_per: is_per(&target.carrier, &target.rel)?,
            sequents,
            mono,
        })
    } else if has("object") {
        let j: RawStrictJson = serde_json::from_value(v)?;
        let object = j.object.raw()?;
        let pred = rel_from_named(&object.carrier, j.pred)?;
        let (strict, relational) = check_strict(&object, &pred)?;
        Ok(Verification::Strict {
            object_per: is_per(&object.carrier, &object.rel)?,
            strict,
            relational,
        })
    } else {
        let p = serde_json::from_value::<PerJson>(v)?.raw()?;
        Ok(Verification::Per {
            per: is_per(&p.carrier, &p.rel)?,
            equivalence_relation: is_equiv_rel(&p.carrier, &p.rel)?,
        })
    }
}
