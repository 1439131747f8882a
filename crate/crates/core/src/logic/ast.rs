//! Formulas of first-order logic with second-order quantifiers over families.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::elements::Elem;
use crate::family::FamilyRef;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Const(Elem),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const(c) => write!(f, "{c}"),
        }
    }
}

/// The binder of a second-order quantifier: `∃_K S` or `∀_K S`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SoBinder {
    pub family: FamilyRef,
    pub var: String,
    /// Declared arity, checked against the family when present.
    pub arity: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Atom(String, Vec<Term>),
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
    SoExists(SoBinder, Box<Formula>),
    SoForall(SoBinder, Box<Formula>),
}

impl Formula {
    pub fn atom(rel: &str, args: &[&str]) -> Formula {
        Formula::Atom(rel.to_string(), args.iter().map(|a| Term::var(a)).collect())
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn exists(v: &str, f: Formula) -> Formula {
        Formula::Exists(v.to_string(), Box::new(f))
    }

    pub fn forall(v: &str, f: Formula) -> Formula {
        Formula::Forall(v.to_string(), Box::new(f))
    }

    pub fn exists_all(vs: &[String], f: Formula) -> Formula {
        vs.iter().rev().fold(f, |acc, v| Formula::Exists(v.clone(), Box::new(acc)))
    }

    pub fn forall_all(vs: &[String], f: Formula) -> Formula {
        vs.iter().rev().fold(f, |acc, v| Formula::Forall(v.clone(), Box::new(acc)))
    }

    /// Number of nodes (terms not counted).
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Quantifier depth, first- and second-order quantifiers alike.
    pub fn depth(&self) -> usize {
        let inner = self.children().iter().map(|c| c.depth()).max().unwrap_or(0);
        match self {
            Formula::Exists(..) | Formula::Forall(..) | Formula::SoExists(..) | Formula::SoForall(..) => inner + 1,
            _ => inner,
        }
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::True | Formula::False | Formula::Atom(..) | Formula::Eq(..) => Vec::new(),
            Formula::Not(a) => alloc::vec![a],
            Formula::And(v) | Formula::Or(v) => v.iter().collect(),
            Formula::Implies(a, b) | Formula::Iff(a, b) => alloc::vec![a, b],
            Formula::Exists(_, a) | Formula::Forall(_, a) | Formula::SoExists(_, a) | Formula::SoForall(_, a) => {
                alloc::vec![a]
            }
        }
    }

    pub fn has_second_order(&self) -> bool {
        matches!(self, Formula::SoExists(..) | Formula::SoForall(..))
            || self.children().iter().any(|c| c.has_second_order())
    }

    /// Free element variables, sorted.
    pub fn free_elem_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free_elems(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free_elems(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut term = |t: &Term, bound: &Vec<String>| {
            if let Term::Var(v) = t {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
        };
        match self {
            Formula::Atom(_, args) => args.iter().for_each(|t| term(t, bound)),
            Formula::Eq(a, b) => {
                term(a, bound);
                term(b, bound);
            }
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                bound.push(v.clone());
                body.collect_free_elems(bound, out);
                bound.pop();
            }
            _ => {
                for c in self.children() {
                    c.collect_free_elems(bound, out);
                }
            }
        }
    }

    /// Free relation symbols with the arity of their first use.
    pub fn free_rel_vars(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        self.collect_free_rels(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free_rels(&self, bound: &mut Vec<String>, out: &mut BTreeMap<String, usize>) {
        match self {
            Formula::Atom(r, args) => {
                if !bound.contains(r) {
                    out.entry(r.clone()).or_insert(args.len());
                }
            }
            Formula::SoExists(b, body) | Formula::SoForall(b, body) => {
                bound.push(b.var.clone());
                body.collect_free_rels(bound, out);
                bound.pop();
            }
            _ => {
                for c in self.children() {
                    c.collect_free_rels(bound, out);
                }
            }
        }
    }

    /// All variable names used anywhere, free or bound.
    pub fn all_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Atom(r, args) => {
                out.insert(r.clone());
                out.extend(args.iter().filter_map(|t| match t {
                    Term::Var(v) => Some(v.clone()),
                    Term::Const(_) => None,
                }));
            }
            Formula::Eq(a, b) => {
                for t in [a, b] {
                    if let Term::Var(v) = t {
                        out.insert(v.clone());
                    }
                }
            }
            Formula::Exists(v, _) | Formula::Forall(v, _) => {
                out.insert(v.clone());
            }
            Formula::SoExists(b, _) | Formula::SoForall(b, _) => {
                out.insert(b.var.clone());
            }
            _ => {}
        });
        out
    }

    fn visit(&self, f: &mut dyn FnMut(&Formula)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    /// Replaces free element variables by terms. Bound variables that would
    /// capture a substituted variable are renamed first.
    pub fn substitute_terms(&self, map: &BTreeMap<String, Term>) -> Formula {
        let mut avoid: BTreeSet<String> = self.all_names();
        for t in map.values() {
            if let Term::Var(v) = t {
                avoid.insert(v.clone());
            }
        }
        self.subst(map, &mut avoid)
    }

    fn subst(&self, map: &BTreeMap<String, Term>, avoid: &mut BTreeSet<String>) -> Formula {
        let st = |t: &Term| match t {
            Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::Const(_) => t.clone(),
        };
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Atom(r, args) => Formula::Atom(r.clone(), args.iter().map(st).collect()),
            Formula::Eq(a, b) => Formula::Eq(st(a), st(b)),
            Formula::Not(a) => Formula::Not(Box::new(a.subst(map, avoid))),
            Formula::And(v) => Formula::And(v.iter().map(|c| c.subst(map, avoid)).collect()),
            Formula::Or(v) => Formula::Or(v.iter().map(|c| c.subst(map, avoid)).collect()),
            Formula::Implies(a, b) => Formula::Implies(Box::new(a.subst(map, avoid)), Box::new(b.subst(map, avoid))),
            Formula::Iff(a, b) => Formula::Iff(Box::new(a.subst(map, avoid)), Box::new(b.subst(map, avoid))),
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                let mut inner = map.clone();
                inner.remove(v);
                let captures = inner.values().any(|t| matches!(t, Term::Var(w) if w == v));
                let (name, body) = if captures {
                    let fresh = fresh_name(v, avoid);
                    let mut ren = BTreeMap::new();
                    ren.insert(v.clone(), Term::Var(fresh.clone()));
                    (fresh, body.subst(&ren, avoid))
                } else {
                    (v.clone(), (**body).clone())
                };
                let body = Box::new(body.subst(&inner, avoid));
                if matches!(self, Formula::Exists(..)) {
                    Formula::Exists(name, body)
                } else {
                    Formula::Forall(name, body)
                }
            }
            Formula::SoExists(b, body) => Formula::SoExists(b.clone(), Box::new(body.subst(map, avoid))),
            Formula::SoForall(b, body) => Formula::SoForall(b.clone(), Box::new(body.subst(map, avoid))),
        }
    }

    /// Replaces every free occurrence `S(t̄)` of the relation symbol `rel` by
    /// `def` with its free variables `params` set to `t̄`.
    pub fn substitute_relation(&self, rel: &str, params: &[String], def: &Formula) -> Formula {
        match self {
            Formula::Atom(r, args) if r == rel => {
                let map: BTreeMap<String, Term> = params.iter().cloned().zip(args.iter().cloned()).collect();
                def.substitute_terms(&map)
            }
            Formula::True | Formula::False | Formula::Atom(..) | Formula::Eq(..) => self.clone(),
            Formula::Not(a) => Formula::Not(Box::new(a.substitute_relation(rel, params, def))),
            Formula::And(v) => Formula::And(v.iter().map(|c| c.substitute_relation(rel, params, def)).collect()),
            Formula::Or(v) => Formula::Or(v.iter().map(|c| c.substitute_relation(rel, params, def)).collect()),
            Formula::Implies(a, b) => Formula::Implies(
                Box::new(a.substitute_relation(rel, params, def)),
                Box::new(b.substitute_relation(rel, params, def)),
            ),
            Formula::Iff(a, b) => Formula::Iff(
                Box::new(a.substitute_relation(rel, params, def)),
                Box::new(b.substitute_relation(rel, params, def)),
            ),
            Formula::Exists(v, body) => Formula::Exists(v.clone(), Box::new(body.substitute_relation(rel, params, def))),
            Formula::Forall(v, body) => Formula::Forall(v.clone(), Box::new(body.substitute_relation(rel, params, def))),
            Formula::SoExists(b, body) | Formula::SoForall(b, body) => {
                let body = if b.var == rel { (**body).clone() } else { body.substitute_relation(rel, params, def) };
                if matches!(self, Formula::SoExists(..)) {
                    Formula::SoExists(b.clone(), Box::new(body))
                } else {
                    Formula::SoForall(b.clone(), Box::new(body))
                }
            }
        }
    }

    /// Applies `f` to every constant.
    pub fn map_constants(&self, f: &dyn Fn(Elem) -> Elem) -> Formula {
        let t = |x: &Term| match x {
            Term::Const(c) => Term::Const(f(*c)),
            v => v.clone(),
        };
        let m = |g: &Formula| g.map_constants(f);
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Atom(r, args) => Formula::Atom(r.clone(), args.iter().map(t).collect()),
            Formula::Eq(a, b) => Formula::Eq(t(a), t(b)),
            Formula::Not(a) => Formula::Not(Box::new(m(a))),
            Formula::And(v) => Formula::And(v.iter().map(m).collect()),
            Formula::Or(v) => Formula::Or(v.iter().map(m).collect()),
            Formula::Implies(a, b) => Formula::Implies(Box::new(m(a)), Box::new(m(b))),
            Formula::Iff(a, b) => Formula::Iff(Box::new(m(a)), Box::new(m(b))),
            Formula::Exists(v, a) => Formula::Exists(v.clone(), Box::new(m(a))),
            Formula::Forall(v, a) => Formula::Forall(v.clone(), Box::new(m(a))),
            Formula::SoExists(b, a) => Formula::SoExists(b.clone(), Box::new(m(a))),
            Formula::SoForall(b, a) => Formula::SoForall(b.clone(), Box::new(m(a))),
        }
    }

    /// Renames free relation symbols, all at once.
    pub fn rename_relations(&self, map: &BTreeMap<String, String>) -> Formula {
        let r = |f: &Formula| f.rename_relations(map);
        match self {
            Formula::Atom(name, args) => Formula::Atom(map.get(name).unwrap_or(name).clone(), args.clone()),
            Formula::True | Formula::False | Formula::Eq(..) => self.clone(),
            Formula::Not(a) => Formula::Not(Box::new(r(a))),
            Formula::And(v) => Formula::And(v.iter().map(r).collect()),
            Formula::Or(v) => Formula::Or(v.iter().map(r).collect()),
            Formula::Implies(a, b) => Formula::Implies(Box::new(r(a)), Box::new(r(b))),
            Formula::Iff(a, b) => Formula::Iff(Box::new(r(a)), Box::new(r(b))),
            Formula::Exists(v, b) => Formula::Exists(v.clone(), Box::new(r(b))),
            Formula::Forall(v, b) => Formula::Forall(v.clone(), Box::new(r(b))),
            Formula::SoExists(bd, b) | Formula::SoForall(bd, b) => {
                let body = if map.contains_key(&bd.var) {
                    let mut inner = map.clone();
                    inner.remove(&bd.var);
                    b.rename_relations(&inner)
                } else {
                    r(b)
                };
                if matches!(self, Formula::SoExists(..)) {
                    Formula::SoExists(bd.clone(), Box::new(body))
                } else {
                    Formula::SoForall(bd.clone(), Box::new(body))
                }
            }
        }
    }

    /// Renames bound variables to `v0, v1, ...` in order of binding.
    pub fn normalize_bound(&self) -> Formula {
        let mut counter = 0usize;
        let avoid = self.free_elem_vars();
        self.norm(&BTreeMap::new(), &mut counter, &avoid)
    }

    fn norm(&self, map: &BTreeMap<String, Term>, counter: &mut usize, avoid: &BTreeSet<String>) -> Formula {
        let st = |t: &Term| match t {
            Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::Const(_) => t.clone(),
        };
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Atom(r, args) => Formula::Atom(r.clone(), args.iter().map(st).collect()),
            Formula::Eq(a, b) => Formula::Eq(st(a), st(b)),
            Formula::Not(a) => Formula::Not(Box::new(a.norm(map, counter, avoid))),
            Formula::And(v) => Formula::And(v.iter().map(|c| c.norm(map, counter, avoid)).collect()),
            Formula::Or(v) => Formula::Or(v.iter().map(|c| c.norm(map, counter, avoid)).collect()),
            Formula::Implies(a, b) => {
                Formula::Implies(Box::new(a.norm(map, counter, avoid)), Box::new(b.norm(map, counter, avoid)))
            }
            Formula::Iff(a, b) => Formula::Iff(Box::new(a.norm(map, counter, avoid)), Box::new(b.norm(map, counter, avoid))),
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                let mut name = format!("v{counter}");
                *counter += 1;
                while avoid.contains(&name) {
                    name = format!("v{counter}");
                    *counter += 1;
                }
                let mut inner = map.clone();
                inner.insert(v.clone(), Term::Var(name.clone()));
                let body = Box::new(body.norm(&inner, counter, avoid));
                if matches!(self, Formula::Exists(..)) {
                    Formula::Exists(name, body)
                } else {
                    Formula::Forall(name, body)
                }
            }
            Formula::SoExists(b, body) => Formula::SoExists(b.clone(), Box::new(body.norm(map, counter, avoid))),
            Formula::SoForall(b, body) => Formula::SoForall(b.clone(), Box::new(body.norm(map, counter, avoid))),
        }
    }
}

/// `base`, `base_1`, `base_2`, ... avoiding `taken`; the result is added.
pub(crate) fn fresh_name(base: &str, taken: &mut BTreeSet<String>) -> String {
    let mut i = 1usize;
    let mut name = format!("{base}_{i}");
    while taken.contains(&name) {
        i += 1;
        name = format!("{base}_{i}");
    }
    taken.insert(name.clone());
    name
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, head: &str, items: &[&Formula]| {
            write!(f, "({head}")?;
            for i in items {
                write!(f, " {i}")?;
            }
            f.write_str(")")
        };
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Atom(r, args) => {
                write!(f, "({r}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
            Formula::Eq(a, b) => write!(f, "(= {a} {b})"),
            Formula::Not(a) => write!(f, "(not {a})"),
            Formula::And(v) => list(f, "and", &v.iter().collect::<Vec<_>>()),
            Formula::Or(v) => list(f, "or", &v.iter().collect::<Vec<_>>()),
            Formula::Implies(a, b) => write!(f, "(-> {a} {b})"),
            Formula::Iff(a, b) => write!(f, "(<-> {a} {b})"),
            Formula::Exists(v, a) => write!(f, "(E {v} {a})"),
            Formula::Forall(v, a) => write!(f, "(A {v} {a})"),
            Formula::SoExists(b, a) | Formula::SoForall(b, a) => {
                let q = if matches!(self, Formula::SoExists(..)) { "E2" } else { "A2" };
                match &b.family {
                    FamilyRef::Named(n) => write!(f, "({q}{n} {}", b.var)?,
                    FamilyRef::Inline(s) => write!(f, "({q}[{s}] {}", b.var)?,
                }
                if let Some(k) = b.arity {
                    write!(f, "/{k}")?;
                }
                write!(f, " {a})")
            }
        }
    }
}
