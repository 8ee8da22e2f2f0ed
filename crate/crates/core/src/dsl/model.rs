use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ast::Signature;
use super::interp::{Interpretation, UBackend};
use crate::carrier::Carrier;
use crate::error::{Error, Result};
use crate::predicate::{MapArrow, Predicate};
use crate::value::Value;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionJson {
    #[serde(default)]
    pub args: Vec<String>,
    pub result: String,
    pub table: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationJson {
    #[serde(default)]
    pub args: Vec<String>,
    pub values: BTreeMap<String, Value>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricJson {
    pub values: BTreeMap<String, Value>,
}

/// The on-disk model format.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelJson {
    pub sorts: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub functions: BTreeMap<String, FunctionJson>,
    #[serde(default)]
    pub relations: BTreeMap<String, RelationJson>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metrics: BTreeMap<String, MetricJson>,
}

/// A finite model: a U-interpretation plus optional distance tables on
/// `S × S` for each sort.
#[derive(Clone, Debug)]
pub struct Model {
    pub interp: Interpretation<UBackend>,
    pub metrics: BTreeMap<String, Predicate>,
}

fn sorts_carrier(sorts: &BTreeMap<String, Carrier>, names: &[String]) -> Result<Carrier> {
    let cs = names
        .iter()
        .map(|s| {
            sorts
                .get(s)
                .cloned()
                .ok_or_else(|| Error::Model(format!("unknown sort {s:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Carrier::product_of(&cs))
}

impl ModelJson {
    pub fn from_model(m: &Model, sig: &Signature) -> Result<Self> {
        let mut out = ModelJson::default();
        for (s, c) in &m.interp.sorts {
            out.sorts.insert(s.clone(), c.names());
        }
        for (name, f) in &m.interp.functions {
            let decl = sig
                .functions
                .get(name)
                .ok_or_else(|| Error::Model(format!("undeclared function {name:?}")))?;
            out.functions.insert(
                name.clone(),
                FunctionJson {
                    args: decl.args.clone(),
                    result: decl.result.clone(),
                    table: f.to_named(),
                },
            );
        }
        for (name, r) in &m.interp.relations {
            let args = sig
                .relations
                .get(name)
                .ok_or_else(|| Error::Model(format!("undeclared relation {name:?}")))?;
            out.relations.insert(
                name.clone(),
                RelationJson {
                    args: args.clone(),
                    values: r.to_named(),
                },
            );
        }
        for (s, d) in &m.metrics {
            out.metrics.insert(
                s.clone(),
                MetricJson {
                    values: d.to_named(),
                },
            );
        }
        Ok(out)
    }

    /// Builds the model, checking it against the signature: every sort,
    /// function and relation must be present with the declared arguments.
    pub fn into_model(self, sig: &Signature) -> Result<Model> {
        let mut sorts = BTreeMap::new();
        for (s, elems) in &self.sorts {
            sorts.insert(s.clone(), Carrier::atoms(elems)?);
        }
        for s in &sig.sorts {
            if !sorts.contains_key(s) {
                return Err(Error::Model(format!("missing sort {s:?}")));
            }
        }
        let mut interp = Interpretation::<UBackend>::default();
        for (name, decl) in &sig.functions {
            let f = self
                .functions
                .get(name)
                .ok_or_else(|| Error::Model(format!("missing function {name:?}")))?;
            if f.args != decl.args || f.result != decl.result {
                return Err(Error::Model(format!(
                    "function {name:?} does not match its declaration"
                )));
            }
            let dom = sorts_carrier(&sorts, &f.args)?;
            let cod = sorts_carrier(&sorts, std::slice::from_ref(&f.result))?;
            let entries: Vec<(&String, &String)> = f.table.iter().collect();
            interp
                .functions
                .insert(name.clone(), MapArrow::from_named(&dom, &cod, &entries)?);
        }
        for (name, args) in &sig.relations {
            let r = self
                .relations
                .get(name)
                .ok_or_else(|| Error::Model(format!("missing relation {name:?}")))?;
            if &r.args != args {
                return Err(Error::Model(format!(
                    "relation {name:?} does not match its declaration"
                )));
            }
            let c = sorts_carrier(&sorts, args)?;
            let entries: Vec<(&String, Value)> = r.values.iter().map(|(k, v)| (k, *v)).collect();
            interp
                .relations
                .insert(name.clone(), Predicate::from_named(&c, &entries)?);
        }
        let mut metrics = BTreeMap::new();
        for (s, m) in &self.metrics {
            let c = sorts
                .get(s)
                .ok_or_else(|| Error::Model(format!("metric for unknown sort {s:?}")))?;
            let sq = Carrier::product(c, c);
            let entries: Vec<(&String, Value)> = m.values.iter().map(|(k, v)| (k, *v)).collect();
            metrics.insert(s.clone(), Predicate::from_named(&sq, &entries)?);
        }
        interp.sorts = sorts;
        Ok(Model { interp, metrics })
    }
}

pub fn load_model(json: &str, sig: &Signature) -> Result<Model> {
    let m: ModelJson = serde_json::from_str(json)?;
    m.into_model(sig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parser::parse_theory;

    const MODEL: &str = r#"{
        "sorts": {"S": ["a", "b"]},
        "functions": {"f": {"args": ["S"], "result": "S", "table": {"a": "b", "b": "a"}},
                      "c": {"args": [], "result": "S", "table": {"*": "a"}}},
        "relations": {"R": {"args": ["S"], "values": {"a": "0/1", "b": "1/3"}},
                      "Q": {"args": ["S", "S"], "values": {"a,a": "0", "(a,b)": "1", "b,a": "1/2", "b,b": "0"}}},
        "metrics": {"S": {"values": {"a,a": "0", "a,b": "1", "b,a": "1", "b,b": "0"}}}
    }"#;

    fn sig() -> Signature {
        parse_theory("sort S\nfunc f : S -> S\nfunc c : -> S\nrel R : S\nrel Q : S, S")
            .unwrap()
            .signature
    }

    #[test]
    fn loads_and_round_trips() {
        let m = load_model(MODEL, &sig()).unwrap();
        assert_eq!(m.interp.functions["f"].table(), &[1, 0]);
        assert_eq!(m.interp.functions["c"].table(), &[0]);
        assert_eq!(
            m.interp.relations["Q"].values()[2],
            Value::new(1, 2).unwrap()
        );
        assert_eq!(m.metrics["S"].values()[1], Value::ONE);
        let back = ModelJson::from_model(&m, &sig()).unwrap();
        let again = back.clone().into_model(&sig()).unwrap();
        assert_eq!(ModelJson::from_model(&again, &sig()).unwrap(), back);
    }

    #[test]
    fn input_errors() {
        let sig2 = parse_theory("sort S, T").unwrap().signature;
        assert!(matches!(
            load_model(r#"{"sorts": {"S": ["a"]}}"#, &sig2),
            Err(Error::Model(_))
        ));
        assert!(matches!(load_model("{", &sig()), Err(Error::Json(_))));
        let missing = MODEL.replace(r#""b": "1/3""#, r#""c": "1/3""#);
        assert!(load_model(&missing, &sig()).is_err());
        let out_of_range = MODEL.replace(r#""b": "1/3""#, r#""b": "4/3""#);
        assert!(load_model(&out_of_range, &sig()).is_err());
    }
}
