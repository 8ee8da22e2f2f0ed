//! Predicates `X → [0,1]` and functions between finite carriers.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::carrier::{Carrier, Elem};
use crate::error::{Error, Result};
use crate::value::Value;

/// A total map from a carrier to `[0,1]`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Predicate {
    carrier: Carrier,
    values: Vec<Value>,
}

impl Predicate {
    pub fn new(carrier: Carrier, values: Vec<Value>) -> Result<Self> {
        if values.len() != carrier.size() {
            return Err(Error::MissingEntry(format!(
                "{} values for a carrier of size {}",
                values.len(),
                carrier.size()
            )));
        }
        Ok(Predicate { carrier, values })
    }

    pub fn constant(carrier: &Carrier, v: Value) -> Self {
        Predicate {
            carrier: carrier.clone(),
            values: vec![v; carrier.size()],
        }
    }

    pub fn from_fn(carrier: &Carrier, f: impl FnMut(Elem) -> Value) -> Self {
        Predicate {
            carrier: carrier.clone(),
            values: carrier.elements().map(f).collect(),
        }
    }

    pub fn try_from_fn(carrier: &Carrier, f: impl FnMut(Elem) -> Result<Value>) -> Result<Self> {
        let values = carrier.elements().map(f).collect::<Result<Vec<_>>>()?;
        Ok(Predicate {
            carrier: carrier.clone(),
            values,
        })
    }

    /// Builds a predicate from `(element name, value)` pairs; every element
    /// must be named exactly once.
    pub fn from_named<K: AsRef<str>>(carrier: &Carrier, entries: &[(K, Value)]) -> Result<Self> {
        let mut values: Vec<Option<Value>> = vec![None; carrier.size()];
        for (k, v) in entries {
            let e = carrier.index_of(k.as_ref())?;
            if values[e].replace(*v).is_some() {
                return Err(Error::Model(format!(
                    "duplicate entry for {:?}",
                    k.as_ref()
                )));
            }
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(e, v)| v.ok_or_else(|| Error::MissingEntry(carrier.name(e))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Predicate {
            carrier: carrier.clone(),
            values,
        })
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn values(&self) -> &[Value] {
        &self.values
    }

    pub fn at(&self, e: Elem) -> Value {
        self.values[e]
    }

    /// Value at a named element.
    pub fn get(&self, name: &str) -> Result<Value> {
        Ok(self.values[self.carrier.index_of(name)?])
    }

    pub fn zero_set(&self) -> BTreeSet<Elem> {
        self.carrier
            .elements()
            .filter(|&e| self.values[e].is_zero())
            .collect()
    }

    pub fn zero_mask(&self) -> Vec<bool> {
        self.values.iter().map(|v| v.is_zero()).collect()
    }

    pub(crate) fn same_carrier(&self, other: &Predicate) -> Result<()> {
        self.carrier.ensure_eq(&other.carrier)
    }

    /// Pointwise combination of two predicates on the same carrier.
    pub fn zip_with(
        &self,
        other: &Predicate,
        mut f: impl FnMut(Value, Value) -> Value,
    ) -> Result<Self> {
        self.same_carrier(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Predicate {
            carrier: self.carrier.clone(),
            values,
        })
    }

    pub fn map(&self, f: impl FnMut(&Value) -> Value) -> Self {
        Predicate {
            carrier: self.carrier.clone(),
            values: self.values.iter().map(f).collect(),
        }
    }

    /// Re-labels the carrier; sizes must agree.
    pub fn with_carrier(&self, carrier: &Carrier) -> Result<Self> {
        Predicate::new(carrier.clone(), self.values.clone())
    }

    pub fn to_named(&self) -> BTreeMap<String, Value> {
        self.carrier
            .elements()
            .map(|e| (self.carrier.name(e), self.values[e]))
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct PredicateJson {
    carrier: Carrier,
    values: BTreeMap<String, Value>,
}

impl Serialize for Predicate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PredicateJson {
            carrier: self.carrier.clone(),
            values: self.to_named(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Predicate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PredicateJson::deserialize(d)?;
        let entries: Vec<(String, Value)> = j.values.into_iter().collect();
        Predicate::from_named(&j.carrier, &entries).map_err(serde::de::Error::custom)
    }
}

/// A total function between carriers, stored as a table.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MapArrow {
    domain: Carrier,
    codomain: Carrier,
    table: Vec<Elem>,
}

impl MapArrow {
    pub fn new(domain: Carrier, codomain: Carrier, table: Vec<Elem>) -> Result<Self> {
        if table.len() != domain.size() {
            return Err(Error::InvalidMap(format!(
                "table has {} entries, domain has {}",
                table.len(),
                domain.size()
            )));
        }
        if let Some(&bad) = table.iter().find(|&&y| y >= codomain.size()) {
            return Err(Error::InvalidMap(format!(
                "image index {bad} outside codomain"
            )));
        }
        Ok(MapArrow {
            domain,
            codomain,
            table,
        })
    }

    pub fn from_fn(
        domain: &Carrier,
        codomain: &Carrier,
        f: impl FnMut(Elem) -> Elem,
    ) -> Result<Self> {
        MapArrow::new(
            domain.clone(),
            codomain.clone(),
            domain.elements().map(f).collect(),
        )
    }

    pub fn from_named<K: AsRef<str>, V: AsRef<str>>(
        domain: &Carrier,
        codomain: &Carrier,
        entries: &[(K, V)],
    ) -> Result<Self> {
        let mut table: Vec<Option<Elem>> = vec![None; domain.size()];
        for (k, v) in entries {
            let x = domain.index_of(k.as_ref())?;
            let y = codomain.index_of(v.as_ref())?;
            if table[x].replace(y).is_some() {
                return Err(Error::Model(format!(
                    "duplicate entry for {:?}",
                    k.as_ref()
                )));
            }
        }
        let table = table
            .into_iter()
            .enumerate()
            .map(|(x, y)| y.ok_or_else(|| Error::MissingEntry(domain.name(x))))
            .collect::<Result<Vec<_>>>()?;
        MapArrow::new(domain.clone(), codomain.clone(), table)
    }

    pub fn identity(c: &Carrier) -> Self {
        MapArrow {
            domain: c.clone(),
            codomain: c.clone(),
            table: c.elements().collect(),
        }
    }

    /// `A × B → A`.
    pub fn proj_left(a: &Carrier, b: &Carrier) -> Self {
        let ab = Carrier::product(a, b);
        let table = ab.elements().map(|e| ab.split(e).0).collect();
        MapArrow {
            domain: ab,
            codomain: a.clone(),
            table,
        }
    }

    /// `A × B → B`.
    pub fn proj_right(a: &Carrier, b: &Carrier) -> Self {
        let ab = Carrier::product(a, b);
        let table = ab.elements().map(|e| ab.split(e).1).collect();
        MapArrow {
            domain: ab,
            codomain: b.clone(),
            table,
        }
    }

    /// `⟨f, g⟩ : X → A × B`.
    pub fn pair(f: &MapArrow, g: &MapArrow) -> Result<Self> {
        f.domain.ensure_eq(&g.domain)?;
        let ab = Carrier::product(&f.codomain, &g.codomain);
        let table = f
            .table
            .iter()
            .zip(&g.table)
            .map(|(&a, &b)| ab.pair(a, b))
            .collect();
        Ok(MapArrow {
            domain: f.domain.clone(),
            codomain: ab,
            table,
        })
    }

    /// `f × g : A × B → C × D`.
    pub fn product(f: &MapArrow, g: &MapArrow) -> Self {
        let dom = Carrier::product(&f.domain, &g.domain);
        let cod = Carrier::product(&f.codomain, &g.codomain);
        let table = dom
            .elements()
            .map(|e| {
                let (a, b) = dom.split(e);
                cod.pair(f.table[a], g.table[b])
            })
            .collect();
        MapArrow {
            domain: dom,
            codomain: cod,
            table,
        }
    }

    pub fn diagonal(c: &Carrier) -> Self {
        let cc = Carrier::product(c, c);
        let table = c.elements().map(|x| cc.pair(x, x)).collect();
        MapArrow {
            domain: c.clone(),
            codomain: cc,
            table,
        }
    }

    pub fn to_unit(c: &Carrier) -> Self {
        MapArrow {
            domain: c.clone(),
            codomain: Carrier::unit(),
            table: vec![0; c.size()],
        }
    }

    pub fn domain(&self) -> &Carrier {
        &self.domain
    }

    pub fn codomain(&self) -> &Carrier {
        &self.codomain
    }

    pub fn table(&self) -> &[Elem] {
        &self.table
    }

    pub fn apply(&self, x: Elem) -> Elem {
        self.table[x]
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &MapArrow) -> Result<Self> {
        self.domain.ensure_eq(&first.codomain)?;
        let table = first.table.iter().map(|&y| self.table[y]).collect();
        Ok(MapArrow {
            domain: first.domain.clone(),
            codomain: self.codomain.clone(),
            table,
        })
    }

    /// Elements of the domain mapped to `y`.
    pub fn fiber(&self, y: Elem) -> impl Iterator<Item = Elem> + '_ {
        self.domain.elements().filter(move |&x| self.table[x] == y)
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.codomain.size()];
        self.table
            .iter()
            .all(|&y| !std::mem::replace(&mut seen[y], true))
    }

    pub fn to_named(&self) -> BTreeMap<String, String> {
        self.domain
            .elements()
            .map(|x| (self.domain.name(x), self.codomain.name(self.table[x])))
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct MapJson {
    domain: Carrier,
    codomain: Carrier,
    table: BTreeMap<String, String>,
}

impl Serialize for MapArrow {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MapJson {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            table: self.to_named(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MapArrow {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MapJson::deserialize(d)?;
        let entries: Vec<(String, String)> = j.table.into_iter().collect();
        MapArrow::from_named(&j.domain, &j.codomain, &entries).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: i64, d: i64) -> Value {
        Value::new(n, d).unwrap()
    }

    #[test]
    fn zero_set_scans_the_table() {
        let x = Carrier::atoms(&["a", "b", "c"]).unwrap();
        let alpha = Predicate::new(x.clone(), vec![v(0, 1), v(1, 2), v(1, 1)]).unwrap();
        assert_eq!(alpha.zero_set().into_iter().collect::<Vec<_>>(), vec![0]);
        let ab = Carrier::atoms(&["a", "b"]).unwrap();
        assert_eq!(Predicate::constant(&ab, Value::ZERO).zero_set().len(), 2);
        assert!(Predicate::constant(&ab, Value::ONE).zero_set().is_empty());
    }

    #[test]
    fn predicate_json_round_trip_is_bit_exact() {
        let x = Carrier::atoms(&["a", "b"]).unwrap();
        let p = Predicate::new(x, vec![v(1, 3), v(0, 1)]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"carrier":["a","b"],"values":{"a":"1/3","b":"0/1"}}"#);
        let back: Predicate = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }

    #[test]
    fn incomplete_predicate_json_is_rejected() {
        let r: std::result::Result<Predicate, _> =
            serde_json::from_str(r#"{"carrier":["a","b"],"values":{"a":"1/3"}}"#);
        assert!(r.is_err());
    }

    #[test]
    fn map_composition_and_pairing() {
        let x = Carrier::atoms(&["a", "b"]).unwrap();
        let u = Carrier::atoms(&["u"]).unwrap();
        let f = MapArrow::new(x.clone(), u.clone(), vec![0, 0]).unwrap();
        let id = MapArrow::identity(&x);
        assert_eq!(f.after(&id).unwrap(), f);
        let p = MapArrow::pair(&id, &f).unwrap();
        assert_eq!(MapArrow::proj_left(&x, &u).after(&p).unwrap(), id);
        assert_eq!(MapArrow::proj_right(&x, &u).after(&p).unwrap(), f);
        assert!(id.after(&f).is_err());
        assert!(id.is_injective());
        assert!(!f.is_injective());
    }
}
