//! The line-oriented relation file format.
//!
//! ```text
//! # comment
//! universe 6
//! rel R 2
//! 0 1
//! 1 0
//! end
//! eq E
//! 0 1 2
//! 3 4
//! end
//! inj H
//! 0 3
//! end
//! ```
//!
//! `rel` blocks list tuples, `eq` blocks list classes, `inj` blocks list
//! `source target` pairs. Blank lines and `#` comments are ignored.

use std::fmt::Write as _;

use quantclass_core::logic::Model;
use quantclass_core::{EquivalenceRelation, PartialInjection, Relation, Universe};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Structure {
    Rel(Relation),
    Eq(EquivalenceRelation),
    Inj(PartialInjection),
}

impl Structure {
    pub fn relation(&self) -> Relation {
        match self {
            Structure::Rel(r) => r.clone(),
            Structure::Eq(e) => e.to_relation(),
            Structure::Inj(h) => h.to_relation(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Structure::Rel(_) => "rel",
            Structure::Eq(_) => "eq",
            Structure::Inj(_) => "inj",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationFile {
    pub universe: Universe,
    pub items: Vec<(String, Structure)>,
}

/// A parsed file and the warnings raised while reading it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parsed {
    pub file: RelationFile,
    pub warnings: Vec<String>,
}

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl RelationFile {
    pub fn new(universe: Universe) -> Self {
        RelationFile { universe, items: Vec::new() }
    }

    pub fn get(&self, name: &str) -> Option<&Structure> {
        self.items.iter().find(|(n, _)| n == name).map(|(_, s)| s)
    }

    pub fn relation(&self, name: &str) -> Result<Relation, CliError> {
        self.get(name).map(Structure::relation).ok_or_else(|| CliError::Usage(format!("no structure named `{name}`")))
    }

    pub fn push(&mut self, name: &str, s: Structure) -> Result<(), CliError> {
        if !is_name(name) {
            return Err(CliError::Usage(format!("`{name}` is not a valid name")));
        }
        if self.get(name).is_some() {
            return Err(CliError::Usage(format!("`{name}` is defined twice")));
        }
        self.items.push((name.to_string(), s));
        Ok(())
    }

    /// Every structure as a relation of the same name.
    pub fn model(&self) -> Result<Model, CliError> {
        let mut m = Model::new(self.universe);
        for (name, s) in &self.items {
            m = m.with_relation(name, s.relation())?;
        }
        Ok(m)
    }

    pub fn parse(text: &str) -> Result<Parsed, CliError> {
        let err = |line: usize, message: String| CliError::Parse { line, message };
        let mut universe: Option<Universe> = None;
        let mut file: Option<RelationFile> = None;
        let mut warnings = Vec::new();
        let mut block: Option<(usize, String, String, usize, Vec<Vec<u32>>)> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let words: Vec<&str> = line.split_whitespace().collect();
            if let Some((start, kind, name, arity, rows)) = block.as_mut() {
                if words == ["end"] {
                    let u = universe.expect("a block starts after the universe line");
                    let s = finish(u, kind, *arity, std::mem::take(rows), name, &mut warnings)
                        .map_err(|e| err(*start, e.to_string()))?;
                    file.as_mut().expect("set with the universe").push(name, s).map_err(|e| err(*start, e.to_string()))?;
                    block = None;
                    continue;
                }
                let mut row = Vec::with_capacity(words.len());
                for w in &words {
                    let x: u32 = w.parse().map_err(|_| err(line_no, format!("`{w}` is not an element")))?;
                    row.push(x);
                }
                let expected = match kind.as_str() {
                    "rel" => Some(*arity),
                    "inj" => Some(2),
                    _ => None,
                };
                if let Some(k) = expected {
                    if row.len() != k {
                        return Err(err(line_no, format!("expected {k} elements, found {}", row.len())));
                    }
                }
                let u = universe.expect("a block starts after the universe line");
                if let Some(&x) = row.iter().find(|&&x| x >= u.size()) {
                    return Err(err(line_no, format!("element {x} is outside the universe of size {}", u.size())));
                }
                rows.push(row);
                continue;
            }
            match words.as_slice() {
                ["universe", n] => {
                    if universe.is_some() {
                        return Err(err(line_no, "second universe line".into()));
                    }
                    let n: u32 = n.parse().map_err(|_| err(line_no, format!("`{n}` is not a size")))?;
                    let u = Universe::new(n).map_err(|e| err(line_no, e.to_string()))?;
                    universe = Some(u);
                    file = Some(RelationFile::new(u));
                }
                [kind @ ("rel" | "eq" | "inj"), rest @ ..] => {
                    if universe.is_none() {
                        return Err(err(line_no, "the universe line must come first".into()));
                    }
                    let (name, arity) = match (*kind, rest) {
                        ("rel", [name, arity]) => {
                            let a: usize = arity.parse().map_err(|_| err(line_no, format!("`{arity}` is not an arity")))?;
                            if a == 0 {
                                return Err(err(line_no, "arity must be positive".into()));
                            }
                            (*name, a)
                        }
                        ("eq" | "inj", [name]) => (*name, 2),
                        _ => return Err(err(line_no, format!("malformed `{kind}` header"))),
                    };
                    if !is_name(name) {
                        return Err(err(line_no, format!("`{name}` is not a valid name")));
                    }
                    block = Some((line_no, kind.to_string(), name.to_string(), arity, Vec::new()));
                }
                _ => return Err(err(line_no, format!("unexpected line `{line}`"))),
            }
        }
        if let Some((start, _, name, _, _)) = block {
            return Err(err(start, format!("block `{name}` has no `end`")));
        }
        let file = file.ok_or_else(|| err(1, "missing universe line".into()))?;
        Ok(Parsed { file, warnings })
    }

    /// The canonical text: structures in order, rows sorted.
    pub fn format(&self) -> String {
        let mut out = format!("universe {}\n", self.universe.size());
        for (name, s) in &self.items {
            match s {
                Structure::Rel(r) => {
                    writeln!(out, "rel {name} {}", r.arity()).expect("writing to a string");
                    for t in r.tuples() {
                        out.push_str(&join(t));
                        out.push('\n');
                    }
                }
                Structure::Eq(e) => {
                    writeln!(out, "eq {name}").expect("writing to a string");
                    for b in e.blocks() {
                        out.push_str(&join(b));
                        out.push('\n');
                    }
                }
                Structure::Inj(h) => {
                    writeln!(out, "inj {name}").expect("writing to a string");
                    for &(s, t) in h.pairs() {
                        writeln!(out, "{s} {t}").expect("writing to a string");
                    }
                }
            }
            out.push_str("end\n");
        }
        out
    }
}

pub(crate) fn join(t: &[u32]) -> String {
    t.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn finish(
    u: Universe,
    kind: &str,
    arity: usize,
    rows: Vec<Vec<u32>>,
    name: &str,
    warnings: &mut Vec<String>,
) -> Result<Structure, CliError> {
    Ok(match kind {
        "rel" => {
            let before = rows.len();
            let r = Relation::new(u, arity, rows)?;
            if r.len() < before {
                warnings.push(format!("{name}: {} duplicate tuple(s) dropped", before - r.len()));
            }
            Structure::Rel(r)
        }
        "eq" => Structure::Eq(EquivalenceRelation::new(u, rows)?),
        _ => {
            let before = rows.len();
            let pairs: Vec<(u32, u32)> = rows.iter().map(|r| (r[0], r[1])).collect();
            let h = PartialInjection::new(u, pairs)?;
            if h.len() < before {
                warnings.push(format!("{name}: {} duplicate pair(s) dropped", before - h.len()));
            }
            Structure::Inj(h)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file() {
        let p = RelationFile::parse("universe 6\nrel R 1\n0\n1\nend\n").unwrap();
        let r = p.file.relation("R").unwrap();
        assert_eq!(r.as_set().unwrap().to_vec(), [0, 1]);
        assert!(p.warnings.is_empty());
    }

    #[test]
    fn duplicates_warn() {
        let p = RelationFile::parse("universe 3\nrel R 2\n0 1\n0 1 # again\nend\n").unwrap();
        assert_eq!(p.file.relation("R").unwrap().len(), 1);
        assert_eq!(p.warnings.len(), 1);
    }

    #[test]
    fn errors_carry_lines() {
        let cases = [
            ("rel R 1\n0\nend\n", 1),
            ("universe 3\nrel R 2\n0 1 2\nend\n", 3),
            ("universe 3\nrel R 1\n7\nend\n", 3),
            ("universe 3\nrel R 1\n0\n", 2),
            ("universe 3\ninj H\n0 1\n0 2\nend\n", 2),
            ("universe 3\nrel R 1\nend\nrel R 1\nend\n", 4),
            ("universe 3\nfoo\n", 2),
        ];
        for (text, line) in cases {
            match RelationFile::parse(text) {
                Err(CliError::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn formats_all_kinds() {
        let text = "universe 6\nrel R 2\n1 0\n0 1\nend\neq E\n4 3\n0 1 2\nend\ninj H\n2 5\n0 3\nend\n";
        let p = RelationFile::parse(text).unwrap();
        let out = p.file.format();
        assert_eq!(out, "universe 6\nrel R 2\n0 1\n1 0\nend\neq E\n0 1 2\n3 4\nend\ninj H\n0 3\n2 5\nend\n");
        assert_eq!(RelationFile::parse(&out).unwrap().file, p.file);
        assert_eq!(p.file.relation("E").unwrap().len(), 13);
    }
}
