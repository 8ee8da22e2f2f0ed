//! The uniform-continuity preorder `α ⊑ β` and its certificates.
//!
//! `α ⊑ β` holds when for every `ε > 0` some `δ > 0` makes
//! `α(x) ≤ δ ⇒ β(x) ≤ ε` for all `x`. On a finite carrier this is exactly
//! `zeros(α) ⊆ zeros(β)`, which is what [`leq`] decides. A holding verdict
//! carries a step [`Modulus`]; [`derive_residual`] produces the equivalent
//! continuous bound `β ≤ F ∘ α`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::carrier::Elem;
use crate::error::{Error, Result};
use crate::predicate::Predicate;
use crate::value::{Rational, Value};

/// Number of halvings in the default grid `{1/2^k : k = 0..=10}`.
pub const DEFAULT_GRID_LEVELS: u32 = 10;

/// Increasing list of `ε` breakpoints in `(0,1]`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ModulusGrid(Vec<Value>);

impl ModulusGrid {
    pub fn dyadic(levels: u32) -> Self {
        ModulusGrid((0..=levels).rev().map(Value::dyadic).collect())
    }

    pub fn new(mut points: Vec<Value>) -> Result<Self> {
        points.sort();
        points.dedup();
        if points.is_empty() || points[0].is_zero() {
            return Err(Error::Precondition(
                "grid points must be positive and nonempty".into(),
            ));
        }
        Ok(ModulusGrid(points))
    }

    pub fn points(&self) -> &[Value] {
        &self.0
    }
}

impl Default for ModulusGrid {
    fn default() -> Self {
        ModulusGrid::dyadic(DEFAULT_GRID_LEVELS)
    }
}

/// Step function `ε ↦ δ` on a grid: `Δ(ε) = δᵢ` for the largest `εᵢ ≤ ε`,
/// and `δ₁` below the first breakpoint.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Modulus {
    grid: Vec<Value>,
    deltas: Vec<Value>,
}

impl Modulus {
    pub fn new(grid: Vec<Value>, deltas: Vec<Value>) -> Result<Self> {
        if grid.len() != deltas.len() || grid.is_empty() {
            return Err(Error::Precondition(
                "grid and deltas must be nonempty and aligned".into(),
            ));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) || grid[0].is_zero() {
            return Err(Error::Precondition(
                "grid must be strictly increasing in (0,1]".into(),
            ));
        }
        if deltas.iter().any(|d| d.is_zero()) || deltas.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Precondition(
                "deltas must be positive and increasing".into(),
            ));
        }
        Ok(Modulus { grid, deltas })
    }

    pub fn grid(&self) -> &[Value] {
        &self.grid
    }

    pub fn deltas(&self) -> &[Value] {
        &self.deltas
    }

    pub fn eval(&self, eps: Value) -> Value {
        match self.grid.iter().rposition(|&g| g <= eps) {
            Some(i) => self.deltas[i],
            None => self.deltas[0],
        }
    }

    /// Exhaustive check: for every grid `ε` and every `x`,
    /// `α(x) ≤ Δ(ε)` implies `β(x) ≤ ε`.
    pub fn certifies(&self, alpha: &Predicate, beta: &Predicate) -> bool {
        if alpha.carrier() != beta.carrier() {
            return false;
        }
        self.grid.iter().zip(&self.deltas).all(|(&eps, &delta)| {
            alpha
                .values()
                .iter()
                .zip(beta.values())
                .all(|(&a, &b)| a > delta || b <= eps)
        })
    }
}

/// Outcome of deciding `α ⊑ β`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct LeqVerdict {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Modulus>,
    /// An element with `α(x) = 0 < β(x)` when the judgment fails.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Elem>,
}

/// Decides `α ⊑ β` on the default dyadic grid.
pub fn leq(alpha: &Predicate, beta: &Predicate) -> Result<LeqVerdict> {
    leq_on_grid(alpha, beta, &ModulusGrid::default())
}

pub fn leq_on_grid(alpha: &Predicate, beta: &Predicate, grid: &ModulusGrid) -> Result<LeqVerdict> {
    alpha.same_carrier(beta)?;
    let witness = alpha
        .values()
        .iter()
        .zip(beta.values())
        .position(|(a, b)| a.is_zero() && !b.is_zero());
    if witness.is_some() {
        return Ok(LeqVerdict {
            holds: false,
            modulus: None,
            witness,
        });
    }
    let mut attained: Vec<Value> = alpha.values().to_vec();
    attained.sort();
    attained.dedup();
    let deltas = grid
        .points()
        .iter()
        .map(|&eps| best_delta(alpha, beta, eps, &attained))
        .collect();
    let modulus = Modulus::new(grid.points().to_vec(), deltas)?;
    Ok(LeqVerdict {
        holds: true,
        modulus: Some(modulus),
        witness: None,
    })
}

/// Largest attained α-value below the first α-value of a point with
/// `β > ε`; falls back to half that value when only `0` lies below it.
fn best_delta(alpha: &Predicate, beta: &Predicate, eps: Value, attained: &[Value]) -> Value {
    let bound = alpha
        .values()
        .iter()
        .zip(beta.values())
        .filter(|(_, &b)| b > eps)
        .map(|(&a, _)| a)
        .min();
    match bound {
        None => Value::ONE,
        Some(m) => match attained.iter().rev().find(|&&a| a < m && !a.is_zero()) {
            Some(&a) => a,
            None => m.half(),
        },
    }
}

/// `α ≃ β`: mutual `⊑`, i.e. equal zero sets.
pub fn equivalent(alpha: &Predicate, beta: &Predicate) -> Result<bool> {
    alpha.same_carrier(beta)?;
    Ok(alpha.zero_mask() == beta.zero_mask())
}

/// Fast `⊑` without a certificate.
pub fn holds(alpha: &Predicate, beta: &Predicate) -> Result<bool> {
    alpha.same_carrier(beta)?;
    Ok(alpha
        .values()
        .iter()
        .zip(beta.values())
        .all(|(a, b)| !a.is_zero() || b.is_zero()))
}

/// Increasing, continuous, piecewise-linear `F` with `F(0) = 0`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ResidualBound {
    breakpoints: Vec<(Value, Value)>,
}

impl ResidualBound {
    pub fn new(breakpoints: Vec<(Value, Value)>) -> Result<Self> {
        let ok = breakpoints.len() >= 2
            && breakpoints[0] == (Value::ZERO, Value::ZERO)
            && breakpoints.last().map(|p| p.0) == Some(Value::ONE)
            && breakpoints
                .windows(2)
                .all(|w| w[0].0 < w[1].0 && w[0].1 <= w[1].1);
        if !ok {
            return Err(Error::Precondition(
                "breakpoints must describe an increasing F on [0,1] with F(0)=0".into(),
            ));
        }
        Ok(ResidualBound { breakpoints })
    }

    pub fn breakpoints(&self) -> &[(Value, Value)] {
        &self.breakpoints
    }

    pub fn eval(&self, t: Value) -> Value {
        let i = self.breakpoints.iter().rposition(|p| p.0 <= t).unwrap_or(0);
        let (t0, f0) = self.breakpoints[i];
        match self.breakpoints.get(i + 1) {
            None => f0,
            Some(&(t1, f1)) => {
                let s: Rational = (t.ratio() - t0.ratio()) / (t1.ratio() - t0.ratio());
                Value::lerp(f0, f1, s).expect("interpolation stays within [f0, f1]")
            }
        }
    }

    /// `β(x) ≤ F(α(x))` for every `x`.
    pub fn certifies(&self, alpha: &Predicate, beta: &Predicate) -> bool {
        alpha.carrier() == beta.carrier()
            && alpha
                .values()
                .iter()
                .zip(beta.values())
                .all(|(&a, &b)| b <= self.eval(a))
    }
}

/// Monotone completion of `t ↦ max{β(x) : α(x) ≤ t}` through the attained
/// α-values, interpolated linearly and held constant up to `1`.
pub fn derive_residual(alpha: &Predicate, beta: &Predicate) -> Result<ResidualBound> {
    if !holds(alpha, beta)? {
        return Err(Error::Precondition(
            "derive_residual requires alpha ⊑ beta".into(),
        ));
    }
    let mut pairs: Vec<(Value, Value)> = alpha
        .values()
        .iter()
        .copied()
        .zip(beta.values().iter().copied())
        .collect();
    pairs.sort();
    let mut points = vec![(Value::ZERO, Value::ZERO)];
    let mut running = Value::ZERO;
    for (a, b) in pairs {
        running = running.max(b);
        if a.is_zero() {
            continue;
        }
        match points.last_mut() {
            Some(last) if last.0 == a => last.1 = running,
            _ => points.push((a, running)),
        }
    }
    let top = points.last().map(|p| p.1).unwrap_or(Value::ZERO);
    if points.last().map(|p| p.0) != Some(Value::ONE) {
        points.push((Value::ONE, top));
    }
    ResidualBound::new(points)
}

/// The periodic tail of an eventually periodic sequence; the finite prefix
/// never affects the limit. `γ(xₙ) → 0` iff `γ` vanishes on the cycle.
#[derive(Clone, Debug)]
struct Sequence {
    cycle: Vec<Elem>,
}

impl Sequence {
    fn tends_to_zero(&self, p: &Predicate) -> bool {
        self.cycle.iter().all(|&x| p.at(x).is_zero())
    }
}

/// Samples sequences whose tail enters `zeros(α)` and checks that `β`
/// tends to zero along each. Returns `true` iff no counterexample turns up.
/// The constant sequence at every element is always included, so on a
/// finite carrier the answer coincides with [`leq`].
pub fn check_sequence_characterization(
    alpha: &Predicate,
    beta: &Predicate,
    trials: usize,
    seed: u64,
) -> bool {
    if alpha.carrier() != beta.carrier() {
        return false;
    }
    let n = alpha.carrier().size();
    if n == 0 {
        return true;
    }
    let zeros: Vec<Elem> = alpha.zero_set().into_iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sequences: Vec<Sequence> = (0..n).map(|x| Sequence { cycle: vec![x] }).collect();
    for _ in 0..trials {
        let cycle = if !zeros.is_empty() && rng.gen_bool(0.75) {
            let len = rng.gen_range(1..=zeros.len());
            zeros.choose_multiple(&mut rng, len).copied().collect()
        } else {
            (0..rng.gen_range(1..=n))
                .map(|_| rng.gen_range(0..n))
                .collect()
        };
        sequences.push(Sequence { cycle });
    }
    sequences
        .iter()
        .all(|s| !s.tends_to_zero(alpha) || s.tends_to_zero(beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carrier::Carrier;

    fn v(n: i64, d: i64) -> Value {
        Value::new(n, d).unwrap()
    }

    fn abc() -> Carrier {
        Carrier::atoms(&["a", "b", "c"]).unwrap()
    }

    #[test]
    fn worked_modulus_example() {
        let alpha = Predicate::new(abc(), vec![v(0, 1), v(1, 2), v(1, 1)]).unwrap();
        let beta = Predicate::new(abc(), vec![v(0, 1), v(0, 1), v(1, 5)]).unwrap();
        let verdict = leq(&alpha, &beta).unwrap();
        assert!(verdict.holds);
        let m = verdict.modulus.unwrap();
        // brute-force oracle: max over attained δ of the inclusion {α≤δ} ⊆ {β≤ε}
        for (&eps, &delta) in m.grid().iter().zip(m.deltas()) {
            let expected = if eps < v(1, 5) { v(1, 2) } else { Value::ONE };
            assert_eq!(delta, expected, "eps = {eps}");
        }
        assert_eq!(m.eval(v(1, 10)), v(1, 2));
        assert_eq!(m.eval(v(1, 2)), Value::ONE);
        assert!(m.certifies(&alpha, &beta));

        let back = leq(&beta, &alpha).unwrap();
        assert!(!back.holds);
        assert_eq!(back.witness, Some(1));
    }

    #[test]
    fn everything_is_below_top() {
        let alpha = Predicate::new(abc(), vec![v(1, 3), v(1, 2), v(1, 1)]).unwrap();
        let top = Predicate::constant(&abc(), Value::ZERO);
        let verdict = leq(&alpha, &top).unwrap();
        assert!(verdict.holds);
        assert!(verdict.modulus.unwrap().deltas().iter().all(|d| d.is_one()));
    }

    #[test]
    fn fallback_delta_is_half_the_bound() {
        let x = Carrier::atoms(&["a", "b"]).unwrap();
        let alpha = Predicate::new(x.clone(), vec![v(0, 1), v(1, 2)]).unwrap();
        let beta = Predicate::new(x, vec![v(0, 1), v(1, 1)]).unwrap();
        let m = leq(&alpha, &beta).unwrap().modulus.unwrap();
        assert_eq!(m.eval(v(1, 2)), v(1, 4));
        assert_eq!(m.eval(Value::ONE), Value::ONE);
        assert!(m.certifies(&alpha, &beta));
    }

    #[test]
    fn empty_carrier_is_vacuous() {
        let e = Carrier::atoms::<&str>(&[]).unwrap();
        let p = Predicate::new(e.clone(), vec![]).unwrap();
        assert!(leq(&p, &p).unwrap().holds);
        assert!(check_sequence_characterization(&p, &p, 10, 1));
    }

    #[test]
    fn carrier_mismatch_is_an_error() {
        let p = Predicate::constant(&abc(), Value::ZERO);
        let q = Predicate::constant(&Carrier::atoms(&["a"]).unwrap(), Value::ZERO);
        assert!(leq(&p, &q).is_err());
    }

    #[test]
    fn residual_examples() {
        let x = Carrier::atoms(&["a", "b"]).unwrap();
        let alpha = Predicate::new(x.clone(), vec![v(0, 1), v(1, 2)]).unwrap();
        let beta = Predicate::new(x.clone(), vec![v(0, 1), v(1, 4)]).unwrap();
        let f = derive_residual(&alpha, &beta).unwrap();
        assert_eq!(f.eval(Value::ZERO), Value::ZERO);
        assert!(f.eval(v(1, 2)) >= v(1, 4));
        assert!(f.certifies(&alpha, &beta));

        let id = derive_residual(&alpha, &alpha).unwrap();
        assert!(id.eval(v(1, 2)) >= v(1, 2));

        let single = Carrier::atoms(&["a"]).unwrap();
        let z = Predicate::constant(&single, Value::ZERO);
        assert_eq!(
            derive_residual(&z, &z).unwrap().eval(Value::ZERO),
            Value::ZERO
        );

        assert!(matches!(
            derive_residual(&beta.map(|_| Value::ZERO), &alpha.map(|_| Value::ONE)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn sequence_examples() {
        let x = Carrier::atoms(&["a", "b"]).unwrap();
        let alpha = Predicate::new(x.clone(), vec![v(0, 1), v(1, 1)]).unwrap();
        let beta = Predicate::new(x.clone(), vec![v(1, 2), v(1, 1)]).unwrap();
        assert!(!check_sequence_characterization(&alpha, &beta, 20, 7));
        assert!(check_sequence_characterization(&alpha, &alpha, 20, 7));
        let bottom = Predicate::constant(&x, Value::ONE);
        assert!(check_sequence_characterization(&bottom, &beta, 20, 7));
    }
}
