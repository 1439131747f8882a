//! Reports: one JSON object per run, keys sorted, schema versioned.

use std::collections::BTreeMap;

use quantclass_core::{Budget, ElemSet, Permutation, Relation};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL: &str = "quantclass";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    /// Input name to the hex SHA-256 of its bytes.
    pub inputs: BTreeMap<String, String>,
    pub budget: Budget,
    pub flags: Map<String, Value>,
    pub results: Map<String, Value>,
    pub warnings: Vec<String>,
    pub error: Option<(String, String)>,
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Report {
    pub fn new(command: &str, budget: Budget) -> Self {
        Report {
            command: command.into(),
            inputs: BTreeMap::new(),
            budget,
            flags: Map::new(),
            results: Map::new(),
            warnings: Vec::new(),
            error: None,
        }
    }

    pub fn input(&mut self, name: &str, bytes: &[u8]) {
        self.inputs.insert(name.into(), digest(bytes));
    }

    pub fn flag(&mut self, key: &str, v: impl Into<Value>) {
        self.flags.insert(key.into(), v.into());
    }

    pub fn set(&mut self, key: &str, v: impl Into<Value>) {
        self.results.insert(key.into(), v.into());
    }

    pub fn to_value(&self) -> Value {
        let mut top = Map::new();
        top.insert("schema".into(), json!(SCHEMA_VERSION));
        top.insert("tool".into(), json!({ "name": TOOL, "version": env!("CARGO_PKG_VERSION") }));
        top.insert("command".into(), json!(self.command));
        top.insert("inputs".into(), json!(self.inputs));
        top.insert(
            "budget".into(),
            json!({ "max_family": self.budget.max_members, "max_work": self.budget.max_work }),
        );
        top.insert("flags".into(), Value::Object(self.flags.clone()));
        top.insert("results".into(), Value::Object(self.results.clone()));
        top.insert("warnings".into(), json!(self.warnings));
        if let Some((kind, message)) = &self.error {
            top.insert("error".into(), json!({ "kind": kind, "message": message }));
        }
        Value::Object(top)
    }

    pub fn render(&self, format: Format) -> String {
        let v = self.to_value();
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&v).expect("a report serializes");
                s.push('\n');
                s
            }
            Format::Text => {
                let mut out = String::new();
                flatten("", &v, &mut out);
                out
            }
        }
    }
}

/// `path = value` lines, arrays of scalars kept on one line.
fn flatten(path: &str, v: &Value, out: &mut String) {
    let scalar_array = |a: &[Value]| a.iter().all(|x| !x.is_array() && !x.is_object());
    match v {
        Value::Object(m) if !m.is_empty() => {
            for (k, x) in m {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                flatten(&p, x, out);
            }
        }
        Value::Array(a) if !a.is_empty() && !scalar_array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{path}[{i}]"), x, out);
            }
        }
        _ => {
            out.push_str(path);
            out.push_str(" = ");
            out.push_str(&v.to_string());
            out.push('\n');
        }
    }
}

/// Counts that may not fit JSON integers are written as strings.
pub fn count(x: u128) -> Value {
    match u64::try_from(x) {
        Ok(v) => json!(v),
        Err(_) => json!(x.to_string()),
    }
}

pub fn set(s: &ElemSet) -> Value {
    json!(s.to_vec())
}

pub fn tuples(r: &Relation) -> Value {
    Value::Array(r.tuples().map(|t| json!(t)).collect())
}

pub fn relation(r: &Relation) -> Value {
    json!({ "arity": r.arity(), "size": r.len(), "tuples": tuples(r) })
}

pub fn permutation(p: &Permutation) -> Value {
    json!(p.images())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_are_sorted_and_text_is_flat() {
        let mut r = Report::new("demo", Budget::default());
        r.set("zeta", 1);
        r.set("alpha", json!({ "b": [1, 2], "a": [[0, 1]] }));
        r.input("file", b"abc");
        let j = r.render(Format::Json);
        assert!(j.find("\"alpha\"").unwrap() < j.find("\"zeta\"").unwrap());
        assert!(j.contains("ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"));
        let t = r.render(Format::Text);
        assert!(t.contains("results.alpha.a[0] = [0,1]\n"));
        assert!(t.contains("results.alpha.b = [1,2]\n"));
        assert!(t.contains("schema = 1\n"));
    }

    #[test]
    fn large_counts_become_strings() {
        assert_eq!(count(5), json!(5));
        assert_eq!(count(u128::MAX), json!(u128::MAX.to_string()));
    }
}
