//! Finite carriers: named atoms closed under binary product and a unit.
//!
//! Elements are plain indices into a fixed enumeration. For a product
//! `A × B` the element `(a, b)` has index `a * |B| + b`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Index of an element in its carrier's enumeration.
pub type Elem = usize;

#[derive(Clone, PartialEq, Eq, Hash)]
enum Kind {
    Atoms(Vec<String>),
    Unit,
    Product(Carrier, Carrier),
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Node {
    kind: Kind,
    size: usize,
}

/// A finite set with a deterministic enumeration order. Cheap to clone.
#[derive(Clone)]
pub struct Carrier(Arc<Node>);

impl std::hash::Hash for Carrier {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.hash(state);
    }
}

impl PartialEq for Carrier {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Carrier {}

fn valid_atom(name: &str) -> bool {
    !name.is_empty()
        && name != "*"
        && !name
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, '(' | ')' | ',' | '"'))
}

impl Carrier {
    pub fn atoms<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        for (i, n) in names.iter().enumerate() {
            if !valid_atom(n) {
                return Err(Error::InvalidCarrier(format!("bad atom name {n:?}")));
            }
            if names[..i].contains(n) {
                return Err(Error::InvalidCarrier(format!("duplicate atom {n:?}")));
            }
        }
        let size = names.len();
        Ok(Carrier(Arc::new(Node {
            kind: Kind::Atoms(names),
            size,
        })))
    }

    /// Atoms `prefix0, prefix1, ...`.
    pub fn numbered(prefix: &str, n: usize) -> Self {
        let names: Vec<String> = (0..n).map(|i| format!("{prefix}{i}")).collect();
        Carrier::atoms(&names).expect("generated names are valid")
    }

    pub fn unit() -> Self {
        Carrier(Arc::new(Node {
            kind: Kind::Unit,
            size: 1,
        }))
    }

    pub fn product(left: &Carrier, right: &Carrier) -> Self {
        let size = left.size() * right.size();
        Carrier(Arc::new(Node {
            kind: Kind::Product(left.clone(), right.clone()),
            size,
        }))
    }

    /// Left-nested product; `[]` is the unit and `[A]` is `A` itself.
    pub fn product_of(factors: &[Carrier]) -> Self {
        match factors {
            [] => Carrier::unit(),
            [first, rest @ ..] => rest
                .iter()
                .fold(first.clone(), |acc, c| Carrier::product(&acc, c)),
        }
    }

    pub fn size(&self) -> usize {
        self.0.size
    }

    pub fn is_empty(&self) -> bool {
        self.0.size == 0
    }

    pub fn is_unit(&self) -> bool {
        matches!(self.0.kind, Kind::Unit)
    }

    pub fn factors(&self) -> Option<(&Carrier, &Carrier)> {
        match &self.0.kind {
            Kind::Product(l, r) => Some((l, r)),
            _ => None,
        }
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.size()
    }

    pub fn pair(&self, left: Elem, right: Elem) -> Elem {
        let (_, r) = self.factors().expect("pair on a non-product carrier");
        left * r.size() + right
    }

    pub fn split(&self, e: Elem) -> (Elem, Elem) {
        let (_, r) = self.factors().expect("split on a non-product carrier");
        (e / r.size(), e % r.size())
    }

    pub fn name(&self, e: Elem) -> String {
        match &self.0.kind {
            Kind::Atoms(names) => names[e].clone(),
            Kind::Unit => "*".to_string(),
            Kind::Product(l, r) => {
                let (a, b) = (e / r.size(), e % r.size());
                format!("({},{})", l.name(a), r.name(b))
            }
        }
    }

    pub fn names(&self) -> Vec<String> {
        self.elements().map(|e| self.name(e)).collect()
    }

    /// Looks up an element by name. Whitespace is ignored and the outer
    /// parentheses of a product element may be omitted (`a,b` for `(a,b)`).
    pub fn index_of(&self, name: &str) -> Result<Elem> {
        let compact: String = name.chars().filter(|c| !c.is_whitespace()).collect();
        self.lookup(&compact)
            .or_else(|| self.lookup(&format!("({compact})")))
            .or_else(|| self.lookup_flat(&compact))
            .ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    fn lookup(&self, s: &str) -> Option<Elem> {
        match &self.0.kind {
            Kind::Atoms(names) => names.iter().position(|n| n == s),
            Kind::Unit => (s == "*" || s == "()").then_some(0),
            Kind::Product(l, r) => {
                let inner = s.strip_prefix('(')?.strip_suffix(')')?;
                let cut = top_level_comma(inner)?;
                let a = l.lookup(&inner[..cut])?;
                let b = r.lookup(&inner[cut + 1..])?;
                Some(a * r.size() + b)
            }
        }
    }

    /// Flat tuple syntax `a,b,c` for a left-nested product `(A×B)×C`.
    fn lookup_flat(&self, s: &str) -> Option<Elem> {
        let parts: Vec<&str> = s
            .trim_start_matches('(')
            .trim_end_matches(')')
            .split(',')
            .collect();
        let leaves = self.left_spine();
        if parts.len() != leaves.len() || leaves.len() < 2 {
            return None;
        }
        let mut idx: Vec<Elem> = Vec::with_capacity(parts.len());
        for (p, c) in parts.iter().zip(&leaves) {
            idx.push(c.lookup(p)?);
        }
        Some(self.from_spine(&idx))
    }

    /// Factors of a left-nested product, outermost right factor last.
    pub fn left_spine(&self) -> Vec<Carrier> {
        match &self.0.kind {
            Kind::Product(l, r) => {
                let mut v = l.left_spine();
                v.push(r.clone());
                v
            }
            _ => vec![self.clone()],
        }
    }

    fn from_spine(&self, idx: &[Elem]) -> Elem {
        match &self.0.kind {
            Kind::Product(l, r) if idx.len() >= 2 => {
                let (last, init) = idx.split_last().expect("nonempty");
                l.from_spine(init) * r.size() + last
            }
            _ => idx[0],
        }
    }

    fn describe(&self) -> String {
        match &self.0.kind {
            Kind::Atoms(names) => format!("{{{}}}", names.join(",")),
            Kind::Unit => "1".to_string(),
            Kind::Product(l, r) => format!("({} x {})", l.describe(), r.describe()),
        }
    }

    pub(crate) fn ensure_eq(&self, other: &Carrier) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::CarrierMismatch {
                expected: self.describe(),
                found: other.describe(),
            })
        }
    }
}

fn top_level_comma(s: &str) -> Option<usize> {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => return Some(i),
            _ => {}
        }
    }
    None
}

impl fmt::Debug for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

impl fmt::Display for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// JSON shape: a list of atom names, the string `"unit"`, or
/// `{"product": [left, right]}`.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CarrierJson {
    Atoms(Vec<String>),
    Unit(String),
    Product {
        product: Box<(CarrierJson, CarrierJson)>,
    },
}

impl CarrierJson {
    fn from_carrier(c: &Carrier) -> Self {
        match &c.0.kind {
            Kind::Atoms(n) => CarrierJson::Atoms(n.clone()),
            Kind::Unit => CarrierJson::Unit("unit".into()),
            Kind::Product(l, r) => CarrierJson::Product {
                product: Box::new((CarrierJson::from_carrier(l), CarrierJson::from_carrier(r))),
            },
        }
    }

    fn into_carrier(self) -> Result<Carrier> {
        match self {
            CarrierJson::Atoms(n) => Carrier::atoms(&n),
            CarrierJson::Unit(s) if s == "unit" => Ok(Carrier::unit()),
            CarrierJson::Unit(s) => Err(Error::InvalidCarrier(format!("unexpected string {s:?}"))),
            CarrierJson::Product { product } => {
                let (l, r) = *product;
                Ok(Carrier::product(&l.into_carrier()?, &r.into_carrier()?))
            }
        }
    }
}

impl Serialize for Carrier {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CarrierJson::from_carrier(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Carrier {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        CarrierJson::deserialize(d)?
            .into_carrier()
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_multiply() {
        let a = Carrier::atoms(&["a", "b"]).unwrap();
        let b = Carrier::atoms(&["u", "v", "w"]).unwrap();
        assert_eq!(Carrier::product(&a, &b).size(), 6);
        assert_eq!(Carrier::unit().size(), 1);
        assert_eq!(Carrier::atoms::<&str>(&[]).unwrap().size(), 0);
        assert_eq!(
            Carrier::product(&a, &Carrier::atoms::<&str>(&[]).unwrap()).size(),
            0
        );
    }

    #[test]
    fn atoms_must_be_distinct_and_plain() {
        assert!(Carrier::atoms(&["a", "a"]).is_err());
        assert!(Carrier::atoms(&["a,b"]).is_err());
        assert!(Carrier::atoms(&["*"]).is_err());
    }

    #[test]
    fn names_round_trip() {
        let a = Carrier::atoms(&["a", "b"]).unwrap();
        let b = Carrier::atoms(&["u", "v"]).unwrap();
        let c = Carrier::product_of(&[a.clone(), b.clone(), a.clone()]);
        for e in c.elements() {
            assert_eq!(c.index_of(&c.name(e)).unwrap(), e);
        }
        assert_eq!(c.name(c.index_of("b, v, a").unwrap()), "((b,v),a)");
        let ab = Carrier::product(&a, &b);
        assert_eq!(ab.index_of("a,v").unwrap(), ab.pair(0, 1));
        assert!(ab.index_of("(a,z)").is_err());
    }

    #[test]
    fn json_shape() {
        let a = Carrier::atoms(&["a", "b"]).unwrap();
        let p = Carrier::product(&a, &Carrier::unit());
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"product":[["a","b"],"unit"]}"#);
        let back: Carrier = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
