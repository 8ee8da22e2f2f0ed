//! The hyperdoctrine `U` on finite carriers: fiberwise lattice operations,
//! reindexing, quantifiers along arbitrary maps and the equality predicate,
//! together with checkers for the laws relating them.
//!
//! Conventions (truth is `0`): top is constant `0`, bottom constant `1`,
//! meet is pointwise `max`, join pointwise `min`. `∃_f` takes the fiberwise
//! minimum (`1` on an empty fiber) and `∀_f` the fiberwise maximum (`0` on an
//! empty fiber).

use serde::{Deserialize, Serialize};

use crate::carrier::Carrier;
use crate::error::{Error, Result};
use crate::order::{equivalent, holds};
use crate::predicate::{MapArrow, Predicate};
use crate::value::Value;

/// Deliberate faults that the law suites must detect.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    #[default]
    None,
    /// `∃` computes the fiberwise supremum.
    ExistsAsSup,
    /// `∀` computes the fiberwise infimum.
    ForallAsInf,
    /// Reindexing reads the value at the next element of the codomain.
    PullbackShifted,
    /// The equality predicate is constantly true.
    EqualityTop,
}

/// The operations of `U`, optionally perturbed by a [`Mutation`].
#[derive(Clone, Copy, Debug, Default)]
pub struct Ops {
    pub mutation: Mutation,
}

impl Ops {
    pub fn mutated(mutation: Mutation) -> Self {
        Ops { mutation }
    }

    pub fn pullback(&self, f: &MapArrow, alpha: &Predicate) -> Result<Predicate> {
        f.codomain().ensure_eq(alpha.carrier())?;
        let n = f.codomain().size();
        let shift = usize::from(self.mutation == Mutation::PullbackShifted);
        Ok(Predicate::from_fn(f.domain(), |x| {
            alpha.at((f.apply(x) + shift) % n.max(1))
        }))
    }

    pub fn exists_along(&self, f: &MapArrow, alpha: &Predicate) -> Result<Predicate> {
        f.domain().ensure_eq(alpha.carrier())?;
        Ok(if self.mutation == Mutation::ExistsAsSup {
            fiber_fold(f, alpha, Value::ZERO, Value::max)
        } else {
            fiber_fold(f, alpha, Value::ONE, Value::min)
        })
    }

    pub fn forall_along(&self, f: &MapArrow, alpha: &Predicate) -> Result<Predicate> {
        f.domain().ensure_eq(alpha.carrier())?;
        Ok(if self.mutation == Mutation::ForallAsInf {
            fiber_fold(f, alpha, Value::ONE, Value::min)
        } else {
            fiber_fold(f, alpha, Value::ZERO, Value::max)
        })
    }

    pub fn eq_predicate(&self, x: &Carrier) -> Predicate {
        if self.mutation == Mutation::EqualityTop {
            return top(&Carrier::product(x, x));
        }
        eq_predicate(x)
    }

    /// `α ⊑ f*β ⟺ ∃_f α ⊑ β` and `f*β ⊑ α ⟺ β ⊑ ∀_f α`, for
    /// `f : Y → X`, `α ∈ U(Y)`, `β ∈ U(X)`.
    pub fn check_adjunctions(
        &self,
        f: &MapArrow,
        alpha: &Predicate,
        beta: &Predicate,
    ) -> Result<bool> {
        Ok(self.check_exists_adjunction(f, alpha, beta)?
            && self.check_forall_adjunction(f, alpha, beta)?)
    }

    pub fn check_exists_adjunction(
        &self,
        f: &MapArrow,
        alpha: &Predicate,
        beta: &Predicate,
    ) -> Result<bool> {
        let pulled = self.pullback(f, beta)?;
        let left = holds(alpha, &pulled)?;
        let right = holds(&self.exists_along(f, alpha)?, beta)?;
        Ok(left == right)
    }

    pub fn check_forall_adjunction(
        &self,
        f: &MapArrow,
        alpha: &Predicate,
        beta: &Predicate,
    ) -> Result<bool> {
        let pulled = self.pullback(f, beta)?;
        let left = holds(&pulled, alpha)?;
        let right = holds(beta, &self.forall_along(f, alpha)?)?;
        Ok(left == right)
    }

    /// `∃_f(f*α ∧ β) ≃ α ∧ ∃_f β` with `α` on the codomain of `f` and `β`
    /// on its domain.
    pub fn check_frobenius(
        &self,
        f: &MapArrow,
        alpha: &Predicate,
        beta: &Predicate,
    ) -> Result<bool> {
        let lhs = self.exists_along(f, &meet(&self.pullback(f, alpha)?, beta)?)?;
        let rhs = meet(alpha, &self.exists_along(f, beta)?)?;
        equivalent(&lhs, &rhs)
    }

    /// `∃_g ∘ f* ≃ h* ∘ ∃_k` and `∀_g ∘ f* ≃ h* ∘ ∀_k` on `β ∈ U(B)`.
    pub fn check_beck_chevalley(&self, square: &PullbackSquare, beta: &Predicate) -> Result<bool> {
        Ok(self.check_beck_chevalley_exists(square, beta)?
            && self.check_beck_chevalley_forall(square, beta)?)
    }

    pub fn check_beck_chevalley_exists(
        &self,
        sq: &PullbackSquare,
        beta: &Predicate,
    ) -> Result<bool> {
        let lhs = self.exists_along(&sq.g, &self.pullback(&sq.f, beta)?)?;
        let rhs = self.pullback(&sq.h, &self.exists_along(&sq.k, beta)?)?;
        equivalent(&lhs, &rhs)
    }

    pub fn check_beck_chevalley_forall(
        &self,
        sq: &PullbackSquare,
        beta: &Predicate,
    ) -> Result<bool> {
        let lhs = self.forall_along(&sq.g, &self.pullback(&sq.f, beta)?)?;
        let rhs = self.pullback(&sq.h, &self.forall_along(&sq.k, beta)?)?;
        equivalent(&lhs, &rhs)
    }

    /// Clause (i) of equality: `⊤ ⊑ δ*A ⟺ Eq ⊑ A` for `A ∈ U(X × X)`.
    pub fn check_equality_diagonal(&self, x: &Carrier, a: &Predicate) -> Result<bool> {
        let diag = MapArrow::diagonal(x);
        let left = holds(&top(x), &self.pullback(&diag, a)?)?;
        let right = holds(&self.eq_predicate(x), a)?;
        Ok(left == right)
    }

    /// Clause (ii): `π₁₃*Eq_A ∧ π₂₄*Eq_B ≃ Eq_{A×B}`.
    pub fn check_equality_product(&self, a: &Carrier, b: &Carrier) -> Result<bool> {
        let ab = Carrier::product(a, b);
        let abab = Carrier::product(&ab, &ab);
        let aa = Carrier::product(a, a);
        let bb = Carrier::product(b, b);
        let p13 = MapArrow::from_fn(&abab, &aa, |e| {
            let (l, r) = abab.split(e);
            aa.pair(ab.split(l).0, ab.split(r).0)
        })?;
        let p24 = MapArrow::from_fn(&abab, &bb, |e| {
            let (l, r) = abab.split(e);
            bb.pair(ab.split(l).1, ab.split(r).1)
        })?;
        let lhs = meet(
            &self.pullback(&p13, &self.eq_predicate(a))?,
            &self.pullback(&p24, &self.eq_predicate(b))?,
        )?;
        equivalent(&lhs, &self.eq_predicate(&ab))
    }

    /// `(g ∘ f)* α = f*(g* α)` and `id* α = α`, pointwise.
    pub fn check_functoriality(
        &self,
        f: &MapArrow,
        g: &MapArrow,
        alpha: &Predicate,
    ) -> Result<bool> {
        let gf = g.after(f)?;
        let lhs = self.pullback(&gf, alpha)?;
        let rhs = self.pullback(f, &self.pullback(g, alpha)?)?;
        let unit = self.pullback(&MapArrow::identity(alpha.carrier()), alpha)?;
        Ok(lhs == rhs && &unit == alpha)
    }
}

fn fiber_fold(
    f: &MapArrow,
    alpha: &Predicate,
    empty: Value,
    op: fn(Value, Value) -> Value,
) -> Predicate {
    let mut out = vec![empty; f.codomain().size()];
    let mut seen = vec![false; f.codomain().size()];
    for x in f.domain().elements() {
        let y = f.apply(x);
        out[y] = if seen[y] {
            op(out[y], alpha.at(x))
        } else {
            alpha.at(x)
        };
        seen[y] = true;
    }
    Predicate::new(f.codomain().clone(), out).expect("sized to the codomain")
}

pub fn top(x: &Carrier) -> Predicate {
    Predicate::constant(x, Value::ZERO)
}

pub fn bottom(x: &Carrier) -> Predicate {
    Predicate::constant(x, Value::ONE)
}

pub fn meet(alpha: &Predicate, beta: &Predicate) -> Result<Predicate> {
    alpha.zip_with(beta, Value::max)
}

pub fn join(alpha: &Predicate, beta: &Predicate) -> Result<Predicate> {
    alpha.zip_with(beta, Value::min)
}

pub fn pullback(f: &MapArrow, alpha: &Predicate) -> Result<Predicate> {
    Ops::default().pullback(f, alpha)
}

pub fn exists_along(f: &MapArrow, alpha: &Predicate) -> Result<Predicate> {
    Ops::default().exists_along(f, alpha)
}

pub fn forall_along(f: &MapArrow, alpha: &Predicate) -> Result<Predicate> {
    Ops::default().forall_along(f, alpha)
}

/// The `{0,1}`-valued diagonal on `X × X`.
pub fn eq_predicate(x: &Carrier) -> Predicate {
    let xx = Carrier::product(x, x);
    Predicate::from_fn(&xx, |e| {
        let (a, b) = xx.split(e);
        if a == b {
            Value::ZERO
        } else {
            Value::ONE
        }
    })
}

pub fn check_adjunctions(f: &MapArrow, alpha: &Predicate, beta: &Predicate) -> Result<bool> {
    Ops::default().check_adjunctions(f, alpha, beta)
}

pub fn check_frobenius(f: &MapArrow, alpha: &Predicate, beta: &Predicate) -> Result<bool> {
    Ops::default().check_frobenius(f, alpha, beta)
}

pub fn check_beck_chevalley(square: &PullbackSquare, beta: &Predicate) -> Result<bool> {
    Ops::default().check_beck_chevalley(square, beta)
}

/// One fiber `U(X)` viewed as a distributive prelattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fiber {
    carrier: Carrier,
}

impl Fiber {
    pub fn new(carrier: &Carrier) -> Self {
        Fiber {
            carrier: carrier.clone(),
        }
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn top(&self) -> Predicate {
        top(&self.carrier)
    }

    pub fn bottom(&self) -> Predicate {
        bottom(&self.carrier)
    }

    pub fn meet(&self, a: &Predicate, b: &Predicate) -> Result<Predicate> {
        self.carrier.ensure_eq(a.carrier())?;
        meet(a, b)
    }

    pub fn join(&self, a: &Predicate, b: &Predicate) -> Result<Predicate> {
        self.carrier.ensure_eq(a.carrier())?;
        join(a, b)
    }

    pub fn leq(&self, a: &Predicate, b: &Predicate) -> Result<bool> {
        self.carrier.ensure_eq(a.carrier())?;
        holds(a, b)
    }
}

/// A commuting square
///
/// ```text
///   D --g--> C
///   |        |
///   f        h
///   v        v
///   B --k--> A
/// ```
///
/// whose comparison map `D → B ×_A C` is a bijection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PullbackSquare {
    f: MapArrow,
    g: MapArrow,
    k: MapArrow,
    h: MapArrow,
}

impl PullbackSquare {
    pub fn new(f: MapArrow, g: MapArrow, k: MapArrow, h: MapArrow) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidSquare(m.to_string()));
        if f.domain() != g.domain()
            || f.codomain() != k.domain()
            || g.codomain() != h.domain()
            || k.codomain() != h.codomain()
        {
            return bad("corners do not line up");
        }
        if k.after(&f)? != h.after(&g)? {
            return bad("square does not commute");
        }
        let (b, c) = (k.domain(), h.domain());
        let mut hit = vec![false; b.size() * c.size()];
        for d in f.domain().elements() {
            let slot = f.apply(d) * c.size() + g.apply(d);
            if std::mem::replace(&mut hit[slot], true) {
                return bad("comparison map is not injective");
            }
        }
        for bi in b.elements() {
            for ci in c.elements() {
                if k.apply(bi) == h.apply(ci) && !hit[bi * c.size() + ci] {
                    return bad("comparison map is not surjective");
                }
            }
        }
        Ok(PullbackSquare { f, g, k, h })
    }

    /// The pullback of `k : B → A` and `h : C → A` computed as the set of
    /// matching pairs, enumerated in `B × C` order.
    pub fn canonical(k: &MapArrow, h: &MapArrow) -> Result<Self> {
        k.codomain().ensure_eq(h.codomain())?;
        let pairs: Vec<(usize, usize)> = k
            .domain()
            .elements()
            .flat_map(|b| h.domain().elements().map(move |c| (b, c)))
            .filter(|&(b, c)| k.apply(b) == h.apply(c))
            .collect();
        let d = Carrier::numbered("d", pairs.len());
        let f = MapArrow::new(
            d.clone(),
            k.domain().clone(),
            pairs.iter().map(|p| p.0).collect(),
        )?;
        let g = MapArrow::new(d, h.domain().clone(), pairs.iter().map(|p| p.1).collect())?;
        PullbackSquare::new(f, g, k.clone(), h.clone())
    }

    /// The reindexing square of a product projection along `m : B' → B`:
    /// `π : B × Y → B` pulled back to `π' : B' × Y → B'`.
    pub fn projection(m: &MapArrow, y: &Carrier) -> Result<Self> {
        let f = MapArrow::product(m, &MapArrow::identity(y));
        let g = MapArrow::proj_left(m.domain(), y);
        let k = MapArrow::proj_left(m.codomain(), y);
        PullbackSquare::new(f, g, k, m.clone())
    }

    pub fn f(&self) -> &MapArrow {
        &self.f
    }
    pub fn g(&self) -> &MapArrow {
        &self.g
    }
    pub fn k(&self) -> &MapArrow {
        &self.k
    }
    pub fn h(&self) -> &MapArrow {
        &self.h
    }
}
