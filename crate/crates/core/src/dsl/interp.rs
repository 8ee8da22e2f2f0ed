use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use super::ast::{Formula, SequentAst, Signature, Term, Theory};
use crate::carrier::Carrier;
use crate::connective::{apply_connective, Connective};
use crate::doctrine;
use crate::error::{Error, Result};
use crate::order::{leq, LeqVerdict};
use crate::predicate::{MapArrow, Predicate};

/// A first-order hyperdoctrine over a category with finite products, as
/// needed to interpret coherent formulas. Quantifiers are only required
/// along product projections and maps to the terminal object.
pub trait Hyperdoctrine {
    type Object: Clone + PartialEq + fmt::Debug;
    type Arrow: Clone + fmt::Debug;
    type Pred: Clone + fmt::Debug;

    fn terminal(&self) -> Self::Object;
    fn product(&self, a: &Self::Object, b: &Self::Object) -> Self::Object;
    fn identity(&self, a: &Self::Object) -> Self::Arrow;
    fn proj_left(&self, a: &Self::Object, b: &Self::Object) -> Self::Arrow;
    fn proj_right(&self, a: &Self::Object, b: &Self::Object) -> Self::Arrow;
    fn to_terminal(&self, a: &Self::Object) -> Self::Arrow;
    fn pair(&self, f: &Self::Arrow, g: &Self::Arrow) -> Result<Self::Arrow>;
    /// `second ∘ first`
    fn compose(&self, second: &Self::Arrow, first: &Self::Arrow) -> Result<Self::Arrow>;
    fn arrow_domain(&self, f: &Self::Arrow) -> Self::Object;
    fn arrow_codomain(&self, f: &Self::Arrow) -> Self::Object;

    /// Does `p` live over `a`?
    fn pred_on(&self, p: &Self::Pred, a: &Self::Object) -> bool;
    fn top(&self, a: &Self::Object) -> Self::Pred;
    fn bottom(&self, a: &Self::Object) -> Self::Pred;
    fn meet(&self, p: &Self::Pred, q: &Self::Pred) -> Result<Self::Pred>;
    fn join(&self, p: &Self::Pred, q: &Self::Pred) -> Result<Self::Pred>;
    fn pullback(&self, f: &Self::Arrow, p: &Self::Pred) -> Result<Self::Pred>;
    /// Along the projection `a × b → a`.
    fn exists_proj(&self, a: &Self::Object, b: &Self::Object, p: &Self::Pred)
        -> Result<Self::Pred>;
    fn forall_proj(&self, a: &Self::Object, b: &Self::Object, p: &Self::Pred)
        -> Result<Self::Pred>;
    /// Along `a → 1`.
    fn exists_terminal(&self, a: &Self::Object, p: &Self::Pred) -> Result<Self::Pred>;
    fn forall_terminal(&self, a: &Self::Object, p: &Self::Pred) -> Result<Self::Pred>;
    /// The equality predicate on `a × a`.
    fn equality(&self, a: &Self::Object) -> Self::Pred;
    fn apply_connective(
        &self,
        u: &Connective,
        obj: &Self::Object,
        args: &[Self::Pred],
    ) -> Result<Self::Pred>;

    /// The `[0,1]`-valued predicate carrying the truth values; the fiber
    /// order is `⊑` on these.
    fn underlying<'a>(&self, p: &'a Self::Pred) -> &'a Predicate;
}

/// The hyperdoctrine of all `[0,1]`-valued predicates on finite sets.
#[derive(Clone, Copy, Debug, Default)]
pub struct UBackend;

impl Hyperdoctrine for UBackend {
    type Object = Carrier;
    type Arrow = MapArrow;
    type Pred = Predicate;

    fn terminal(&self) -> Carrier {
        Carrier::unit()
    }
    fn product(&self, a: &Carrier, b: &Carrier) -> Carrier {
        Carrier::product(a, b)
    }
    fn identity(&self, a: &Carrier) -> MapArrow {
        MapArrow::identity(a)
    }
    fn proj_left(&self, a: &Carrier, b: &Carrier) -> MapArrow {
        MapArrow::proj_left(a, b)
    }
    fn proj_right(&self, a: &Carrier, b: &Carrier) -> MapArrow {
        MapArrow::proj_right(a, b)
    }
    fn to_terminal(&self, a: &Carrier) -> MapArrow {
        MapArrow::to_unit(a)
    }
    fn pair(&self, f: &MapArrow, g: &MapArrow) -> Result<MapArrow> {
        MapArrow::pair(f, g)
    }
    fn compose(&self, second: &MapArrow, first: &MapArrow) -> Result<MapArrow> {
        second.after(first)
    }
    fn arrow_domain(&self, f: &MapArrow) -> Carrier {
        f.domain().clone()
    }
    fn arrow_codomain(&self, f: &MapArrow) -> Carrier {
        f.codomain().clone()
    }
    fn pred_on(&self, p: &Predicate, a: &Carrier) -> bool {
        p.carrier() == a
    }
    fn top(&self, a: &Carrier) -> Predicate {
        doctrine::top(a)
    }
    fn bottom(&self, a: &Carrier) -> Predicate {
        doctrine::bottom(a)
    }
    fn meet(&self, p: &Predicate, q: &Predicate) -> Result<Predicate> {
        doctrine::meet(p, q)
    }
    fn join(&self, p: &Predicate, q: &Predicate) -> Result<Predicate> {
        doctrine::join(p, q)
    }
    fn pullback(&self, f: &MapArrow, p: &Predicate) -> Result<Predicate> {
        doctrine::pullback(f, p)
    }
    fn exists_proj(&self, a: &Carrier, b: &Carrier, p: &Predicate) -> Result<Predicate> {
        doctrine::exists_along(&MapArrow::proj_left(a, b), p)
    }
    fn forall_proj(&self, a: &Carrier, b: &Carrier, p: &Predicate) -> Result<Predicate> {
        doctrine::forall_along(&MapArrow::proj_left(a, b), p)
    }
    fn exists_terminal(&self, a: &Carrier, p: &Predicate) -> Result<Predicate> {
        doctrine::exists_along(&MapArrow::to_unit(a), p)
    }
    fn forall_terminal(&self, a: &Carrier, p: &Predicate) -> Result<Predicate> {
        doctrine::forall_along(&MapArrow::to_unit(a), p)
    }
    fn equality(&self, a: &Carrier) -> Predicate {
        doctrine::eq_predicate(a)
    }
    fn apply_connective(
        &self,
        u: &Connective,
        obj: &Carrier,
        args: &[Predicate],
    ) -> Result<Predicate> {
        let out = apply_connective(u, args)?;
        obj.ensure_eq(out.carrier())?;
        Ok(out)
    }
    fn underlying<'a>(&self, p: &'a Predicate) -> &'a Predicate {
        p
    }
}

/// Objects, arrows and predicates assigned to the symbols of a signature.
#[derive(Clone, Debug)]
pub struct Interpretation<H: Hyperdoctrine> {
    pub sorts: BTreeMap<String, H::Object>,
    pub functions: BTreeMap<String, H::Arrow>,
    pub relations: BTreeMap<String, H::Pred>,
}

impl<H: Hyperdoctrine> Default for Interpretation<H> {
    fn default() -> Self {
        Interpretation {
            sorts: BTreeMap::new(),
            functions: BTreeMap::new(),
            relations: BTreeMap::new(),
        }
    }
}

impl<H: Hyperdoctrine> Interpretation<H> {
    pub fn sort(&self, name: &str) -> Result<&H::Object> {
        self.sorts
            .get(name)
            .ok_or_else(|| Error::Sort(format!("sort {name:?} is not interpreted")))
    }

    fn function(&self, name: &str) -> Result<&H::Arrow> {
        self.functions
            .get(name)
            .ok_or_else(|| Error::Sort(format!("function {name:?} is not interpreted")))
    }

    fn relation(&self, name: &str) -> Result<&H::Pred> {
        self.relations
            .get(name)
            .ok_or_else(|| Error::Sort(format!("relation {name:?} is not interpreted")))
    }

    /// The object interpreting a list of sorts: `1`, `S`, or `(S₁×S₂)×…`.
    pub fn product_of(&self, h: &H, sorts: &[String]) -> Result<H::Object> {
        let mut objs = sorts.iter().map(|s| self.sort(s).cloned());
        match objs.next() {
            None => Ok(h.terminal()),
            Some(first) => objs.try_fold(first?, |acc, o| Ok(h.product(&acc, &o?))),
        }
    }

    /// Checks that every symbol of the signature is interpreted with the
    /// right domain and codomain.
    pub fn validate(&self, h: &H, sig: &Signature) -> Result<()> {
        for s in &sig.sorts {
            self.sort(s)?;
        }
        for (name, decl) in &sig.functions {
            let f = self.function(name)?;
            let dom = self.product_of(h, &decl.args)?;
            if h.arrow_domain(f) != dom || h.arrow_codomain(f) != *self.sort(&decl.result)? {
                return Err(Error::Sort(format!(
                    "function {name:?} has the wrong domain or codomain"
                )));
            }
        }
        for (name, args) in &sig.relations {
            let r = self.relation(name)?;
            if !h.pred_on(r, &self.product_of(h, args)?) {
                return Err(Error::Sort(format!(
                    "relation {name:?} lives on the wrong object"
                )));
            }
        }
        Ok(())
    }
}

fn context_sorts(ctx: &[(String, String)]) -> Vec<String> {
    ctx.iter().map(|(_, s)| s.clone()).collect()
}

/// Projection from the context object onto its `i`-th factor.
fn projection<H: Hyperdoctrine>(h: &H, objs: &[H::Object], i: usize) -> Result<H::Arrow> {
    let n = objs.len();
    if n == 1 {
        return Ok(h.identity(&objs[0]));
    }
    let init = &objs[..n - 1];
    let left = product_list(h, init);
    if i == n - 1 {
        return Ok(h.proj_right(&left, &objs[n - 1]));
    }
    let inner = projection(h, init, i)?;
    h.compose(&inner, &h.proj_left(&left, &objs[n - 1]))
}

fn product_list<H: Hyperdoctrine>(h: &H, objs: &[H::Object]) -> H::Object {
    match objs {
        [] => h.terminal(),
        [first, rest @ ..] => rest.iter().fold(first.clone(), |acc, o| h.product(&acc, o)),
    }
}

/// Left-nested pairing `⟨⟨t₁,t₂⟩,t₃⟩` of term arrows out of `ctx_obj`.
fn tuple<H: Hyperdoctrine>(h: &H, ctx_obj: &H::Object, arrows: &[H::Arrow]) -> Result<H::Arrow> {
    match arrows {
        [] => Ok(h.to_terminal(ctx_obj)),
        [first, rest @ ..] => rest
            .iter()
            .try_fold(first.clone(), |acc, g| h.pair(&acc, g)),
    }
}

struct Ctx<'a, H: Hyperdoctrine> {
    h: &'a H,
    interp: &'a Interpretation<H>,
}

impl<H: Hyperdoctrine> Ctx<'_, H> {
    fn objects(&self, ctx: &[(String, String)]) -> Result<Vec<H::Object>> {
        ctx.iter()
            .map(|(_, s)| self.interp.sort(s).cloned())
            .collect()
    }

    fn term(&self, ctx: &[(String, String)], objs: &[H::Object], t: &Term) -> Result<H::Arrow> {
        match t {
            Term::Var { name, .. } => {
                let i = ctx
                    .iter()
                    .rposition(|(v, _)| v == name)
                    .ok_or_else(|| Error::Sort(format!("variable {name:?} not in context")))?;
                projection(self.h, objs, i)
            }
            Term::App { func, args, .. } => {
                let ctx_obj = product_list(self.h, objs);
                let arrows = args
                    .iter()
                    .map(|a| self.term(ctx, objs, a))
                    .collect::<Result<Vec<_>>>()?;
                let tup = tuple(self.h, &ctx_obj, &arrows)?;
                self.h.compose(self.interp.function(func)?, &tup)
            }
        }
    }

    fn formula(
        &self,
        ctx: &[(String, String)],
        objs: &[H::Object],
        phi: &Formula,
    ) -> Result<H::Pred> {
        let h = self.h;
        let ctx_obj = product_list(h, objs);
        match phi {
            Formula::Top => Ok(h.top(&ctx_obj)),
            Formula::Bot => Ok(h.bottom(&ctx_obj)),
            Formula::Rel { name, args, .. } => {
                let arrows = args
                    .iter()
                    .map(|a| self.term(ctx, objs, a))
                    .collect::<Result<Vec<_>>>()?;
                let tup = tuple(h, &ctx_obj, &arrows)?;
                h.pullback(&tup, self.interp.relation(name)?)
            }
            Formula::Eq(s, t) => {
                let pair = h.pair(&self.term(ctx, objs, s)?, &self.term(ctx, objs, t)?)?;
                h.pullback(&pair, &h.equality(self.interp.sort(s.sort())?))
            }
            Formula::And(a, b) => {
                h.meet(&self.formula(ctx, objs, a)?, &self.formula(ctx, objs, b)?)
            }
            Formula::Or(a, b) => h.join(&self.formula(ctx, objs, a)?, &self.formula(ctx, objs, b)?),
            Formula::Exists {
                var, sort, body, ..
            }
            | Formula::Forall {
                var, sort, body, ..
            } => {
                let obj = self.interp.sort(sort)?.clone();
                let mut inner_ctx = ctx.to_vec();
                inner_ctx.push((var.clone(), sort.clone()));
                let mut inner_objs = objs.to_vec();
                inner_objs.push(obj.clone());
                let p = self.formula(&inner_ctx, &inner_objs, body)?;
                let exists = matches!(phi, Formula::Exists { .. });
                match (objs.is_empty(), exists) {
                    (true, true) => h.exists_terminal(&obj, &p),
                    (true, false) => h.forall_terminal(&obj, &p),
                    (false, true) => h.exists_proj(&ctx_obj, &obj, &p),
                    (false, false) => h.forall_proj(&ctx_obj, &obj, &p),
                }
            }
            Formula::Conn {
                connective, args, ..
            } => {
                let ps = args
                    .iter()
                    .map(|a| self.formula(ctx, objs, a))
                    .collect::<Result<Vec<_>>>()?;
                h.apply_connective(connective, &ctx_obj, &ps)
            }
        }
    }
}

/// `⟦t⟧ : ⟦x̄⟧ → ⟦sort(t)⟧`, built from projections and pairing.
pub fn interpret_term<H: Hyperdoctrine>(
    h: &H,
    interp: &Interpretation<H>,
    ctx: &[(String, String)],
    t: &Term,
) -> Result<H::Arrow> {
    let c = Ctx { h, interp };
    c.term(ctx, &c.objects(ctx)?, t)
}

/// `⟦φ⟧_x̄`, a predicate on the context object.
pub fn interpret_formula<H: Hyperdoctrine>(
    h: &H,
    interp: &Interpretation<H>,
    ctx: &[(String, String)],
    phi: &Formula,
) -> Result<H::Pred> {
    let c = Ctx { h, interp };
    c.formula(ctx, &c.objects(ctx)?, phi)
}

/// Carrier of the context object of `ctx` in the U backend.
pub fn context_carrier(
    interp: &Interpretation<UBackend>,
    ctx: &[(String, String)],
) -> Result<Carrier> {
    interp.product_of(&UBackend, &context_sorts(ctx))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SequentVerdict {
    pub line: usize,
    pub sequent: String,
    pub valid: bool,
    pub forward: LeqVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub backward: Option<LeqVerdict>,
    /// Name of a context element where the inclusion of zero sets fails.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

/// Decides `⟦φ⟧ ⊑ ⟦ψ⟧` (and the converse for `-||-`).
pub fn check_sequent<H: Hyperdoctrine>(
    h: &H,
    interp: &Interpretation<H>,
    seq: &SequentAst,
) -> Result<SequentVerdict> {
    let lhs = interpret_formula(h, interp, &seq.context, &seq.lhs)?;
    let rhs = interpret_formula(h, interp, &seq.context, &seq.rhs)?;
    let (l, r) = (h.underlying(&lhs), h.underlying(&rhs));
    let forward = leq(l, r)?;
    let backward = if seq.bidirectional {
        Some(leq(r, l)?)
    } else {
        None
    };
    let failing = if !forward.holds {
        forward.witness
    } else {
        backward
            .as_ref()
            .and_then(|b| if b.holds { None } else { b.witness })
    };
    let valid = forward.holds && backward.as_ref().is_none_or(|b| b.holds);
    Ok(SequentVerdict {
        line: seq.line,
        sequent: seq.to_string(),
        valid,
        forward,
        backward,
        witness: failing.map(|e| l.carrier().name(e)),
    })
}

/// Checks every sequent of a theory in parallel; results are in source order.
pub fn check_theory<H>(
    h: &H,
    interp: &Interpretation<H>,
    theory: &Theory,
) -> Result<Vec<SequentVerdict>>
where
    H: Hyperdoctrine + Sync,
    H::Object: Send + Sync,
    H::Arrow: Send + Sync,
    H::Pred: Send + Sync,
{
    interp.validate(h, &theory.signature)?;
    theory
        .sequents
        .par_iter()
        .map(|s| check_sequent(h, interp, s))
        .collect()
}
