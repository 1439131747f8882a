//! Evaluation over a finite universe.
//!
//! A formula is compiled once against the names of its free relations and
//! free element variables: variables become slots, family members are
//! enumerated up front, and evaluation then only indexes into vectors.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::budget::Budget;
use crate::elements::{Elem, Universe};
use crate::error::{Error, Result};
use crate::family::{FamilyRef, QuantifierFamily};
use crate::logic::ast::{Formula, Term};
use crate::relation::Relation;

/// Named relations and named families over one universe.
#[derive(Debug, Clone)]
pub struct Model {
    pub universe: Universe,
    pub relations: BTreeMap<String, Relation>,
    pub families: BTreeMap<String, QuantifierFamily>,
}

impl Model {
    pub fn new(universe: Universe) -> Self {
        Model { universe, relations: BTreeMap::new(), families: BTreeMap::new() }
    }

    pub fn with_relation(mut self, name: &str, r: Relation) -> Result<Self> {
        self.universe.same(&r.universe())?;
        self.relations.insert(name.into(), r);
        Ok(self)
    }

    pub fn with_family(mut self, name: &str, k: QuantifierFamily) -> Self {
        self.families.insert(name.into(), k);
        self
    }

    /// Resolves a family reference; inline `iso:NAME` specs look up `NAME`
    /// among the relations.
    pub fn family(&self, r: &FamilyRef) -> Result<QuantifierFamily> {
        match r {
            FamilyRef::Named(n) => self.families.get(n).cloned().ok_or_else(|| Error::Unbound(n.clone())),
            FamilyRef::Inline(spec) => spec.resolve(&|name| self.relations.get(name).cloned()),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum CTerm {
    Slot(usize),
    Const(Elem),
}

#[derive(Debug, Clone)]
enum Node {
    Const(bool),
    Atom(usize, Vec<CTerm>),
    Eq(CTerm, CTerm),
    Not(Box<Node>),
    And(Vec<Node>),
    Or(Vec<Node>),
    Implies(Box<Node>, Box<Node>),
    Iff(Box<Node>, Box<Node>),
    Exists(usize, Box<Node>),
    Forall(usize, Box<Node>),
    So { exists: bool, slot: usize, members: usize, body: Box<Node> },
}

/// A formula ready for repeated evaluation.
#[derive(Debug, Clone)]
pub struct Compiled {
    node: Node,
    universe: Universe,
    elem_slots: usize,
    rel_slots: usize,
    free_rels: Vec<(String, usize)>,
    free_elems: Vec<String>,
    members: Vec<Vec<Relation>>,
    max_work: u64,
}

struct Scope<'a> {
    elems: Vec<(String, usize)>,
    rels: Vec<(String, usize, usize)>,
    next_elem: usize,
    next_rel: usize,
    members: Vec<Vec<Relation>>,
    universe: Universe,
    families: &'a dyn Fn(&FamilyRef) -> Result<QuantifierFamily>,
    budget: &'a Budget,
}

impl Scope<'_> {
    fn term(&self, t: &Term) -> Result<CTerm> {
        match t {
            Term::Const(c) => {
                self.universe.check(*c)?;
                Ok(CTerm::Const(*c))
            }
            Term::Var(v) => self
                .elems
                .iter()
                .rev()
                .find(|(n, _)| n == v)
                .map(|&(_, s)| CTerm::Slot(s))
                .ok_or_else(|| Error::Unbound(v.clone())),
        }
    }

    fn compile(&mut self, f: &Formula) -> Result<Node> {
        Ok(match f {
            Formula::True => Node::Const(true),
            Formula::False => Node::Const(false),
            Formula::Atom(r, args) => {
                let &(_, slot, arity) =
                    self.rels.iter().rev().find(|(n, _, _)| n == r).ok_or_else(|| Error::Unbound(r.clone()))?;
                if arity != args.len() {
                    return Err(Error::Arity { expected: arity, found: args.len() });
                }
                Node::Atom(slot, args.iter().map(|t| self.term(t)).collect::<Result<_>>()?)
            }
            Formula::Eq(a, b) => Node::Eq(self.term(a)?, self.term(b)?),
            Formula::Not(a) => Node::Not(Box::new(self.compile(a)?)),
            Formula::And(v) => Node::And(v.iter().map(|c| self.compile(c)).collect::<Result<_>>()?),
            Formula::Or(v) => Node::Or(v.iter().map(|c| self.compile(c)).collect::<Result<_>>()?),
            Formula::Implies(a, b) => Node::Implies(Box::new(self.compile(a)?), Box::new(self.compile(b)?)),
            Formula::Iff(a, b) => Node::Iff(Box::new(self.compile(a)?), Box::new(self.compile(b)?)),
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                let slot = self.next_elem;
                self.next_elem += 1;
                self.elems.push((v.clone(), slot));
                let body = Box::new(self.compile(body)?);
                self.elems.pop();
                if matches!(f, Formula::Exists(..)) {
                    Node::Exists(slot, body)
                } else {
                    Node::Forall(slot, body)
                }
            }
            Formula::SoExists(b, body) | Formula::SoForall(b, body) => {
                let fam = (self.families)(&b.family)?;
                let arity = fam.arity();
                if let Some(k) = b.arity {
                    if k != arity {
                        return Err(Error::Arity { expected: arity, found: k });
                    }
                }
                let members = fam.members(self.universe, self.budget)?;
                let idx = self.members.len();
                self.members.push(members);
                let slot = self.next_rel;
                self.next_rel += 1;
                self.rels.push((b.var.clone(), slot, arity));
                let body = Box::new(self.compile(body)?);
                self.rels.pop();
                Node::So { exists: matches!(f, Formula::SoExists(..)), slot, members: idx, body }
            }
        })
    }
}

impl Compiled {
    /// Compiles `f` with the given free relation symbols (and arities) and
    /// free element variables, in the order values will be supplied.
    pub fn new(
        f: &Formula,
        universe: Universe,
        free_rels: &[(String, usize)],
        free_elems: &[String],
        families: &dyn Fn(&FamilyRef) -> Result<QuantifierFamily>,
        budget: &Budget,
    ) -> Result<Compiled> {
        let mut scope = Scope {
            elems: free_elems.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect(),
            rels: free_rels.iter().cloned().enumerate().map(|(i, (n, a))| (n, i, a)).collect(),
            next_elem: free_elems.len(),
            next_rel: free_rels.len(),
            members: Vec::new(),
            universe,
            families,
            budget,
        };
        let node = scope.compile(f)?;
        Ok(Compiled {
            node,
            universe,
            elem_slots: scope.next_elem,
            rel_slots: scope.next_rel,
            free_rels: free_rels.to_vec(),
            free_elems: free_elems.to_vec(),
            members: scope.members,
            max_work: budget.max_work,
        })
    }

    /// Compiles against a model: free relations are looked up by name.
    pub fn for_model(f: &Formula, model: &Model, free_elems: &[String], budget: &Budget) -> Result<(Compiled, Vec<String>)> {
        let free = f.free_rel_vars();
        let mut rels = Vec::new();
        for name in free.keys() {
            let r = model.relations.get(name).ok_or_else(|| Error::Unbound(name.clone()))?;
            rels.push((name.clone(), r.arity()));
        }
        let names = rels.iter().map(|r| r.0.clone()).collect();
        Ok((Compiled::new(f, model.universe, &rels, free_elems, &|r| model.family(r), budget)?, names))
    }

    pub fn free_rels(&self) -> &[(String, usize)] {
        &self.free_rels
    }

    pub fn free_elems(&self) -> &[String] {
        &self.free_elems
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    /// Evaluates with relations and elements in the declared order.
    pub fn eval(&self, rels: &[&Relation], elems: &[Elem]) -> Result<bool> {
        if rels.len() != self.free_rels.len() {
            return Err(Error::Arity { expected: self.free_rels.len(), found: rels.len() });
        }
        if elems.len() != self.free_elems.len() {
            return Err(Error::Arity { expected: self.free_elems.len(), found: elems.len() });
        }
        for (r, (_, a)) in rels.iter().zip(&self.free_rels) {
            self.universe.same(&r.universe())?;
            if r.arity() != *a {
                return Err(Error::Arity { expected: *a, found: r.arity() });
            }
        }
        self.universe.check_all(elems)?;
        let placeholder = rels.first().copied().or_else(|| self.members.iter().flatten().next());
        let mut frame = Frame {
            elems: alloc::vec![0; self.elem_slots],
            rels: Vec::with_capacity(self.rel_slots),
            buf: Vec::new(),
            steps: 0,
            limit: self.max_work,
            n: self.universe.size(),
        };
        frame.elems[..elems.len()].copy_from_slice(elems);
        frame.rels.extend_from_slice(rels);
        if let Some(p) = placeholder {
            frame.rels.resize(self.rel_slots, p);
        }
        ev(&self.node, &self.members, &mut frame)
    }
}

struct Frame<'a> {
    elems: Vec<Elem>,
    rels: Vec<&'a Relation>,
    buf: Vec<Elem>,
    steps: u64,
    limit: u64,
    n: u32,
}

fn val(t: &CTerm, elems: &[Elem]) -> Elem {
    match *t {
        CTerm::Slot(s) => elems[s],
        CTerm::Const(c) => c,
    }
}

fn ev<'a>(node: &Node, members: &'a [Vec<Relation>], fr: &mut Frame<'a>) -> Result<bool> {
    fr.steps += 1;
    if fr.steps > fr.limit {
        return Err(Error::BudgetExceeded { what: "formula evaluation steps", estimate: fr.steps as u128, limit: fr.limit as u128 });
    }
    Ok(match node {
        Node::Const(b) => *b,
        Node::Atom(slot, args) => {
            let mut buf = core::mem::take(&mut fr.buf);
            buf.clear();
            buf.extend(args.iter().map(|t| val(t, &fr.elems)));
            let r = fr.rels[*slot].contains(&buf);
            fr.buf = buf;
            r
        }
        Node::Eq(a, b) => val(a, &fr.elems) == val(b, &fr.elems),
        Node::Not(a) => !ev(a, members, fr)?,
        Node::And(v) => {
            for c in v {
                if !ev(c, members, fr)? {
                    return Ok(false);
                }
            }
            true
        }
        Node::Or(v) => {
            for c in v {
                if ev(c, members, fr)? {
                    return Ok(true);
                }
            }
            false
        }
        Node::Implies(a, b) => !ev(a, members, fr)? || ev(b, members, fr)?,
        Node::Iff(a, b) => ev(a, members, fr)? == ev(b, members, fr)?,
        Node::Exists(slot, body) | Node::Forall(slot, body) => {
            let want = matches!(node, Node::Exists(..));
            for x in 0..fr.n {
                fr.elems[*slot] = x;
                if ev(body, members, fr)? == want {
                    return Ok(want);
                }
            }
            !want
        }
        Node::So { exists, slot, members: idx, body } => {
            for m in &members[*idx] {
                fr.rels[*slot] = m;
                if ev(body, members, fr)? == *exists {
                    return Ok(*exists);
                }
            }
            !*exists
        }
    })
}

/// Evaluates `f` in `model` with the element variables in `assignment`.
pub fn eval_formula(f: &Formula, model: &Model, assignment: &[(&str, Elem)], budget: &Budget) -> Result<bool> {
    let names: Vec<String> = assignment.iter().map(|(n, _)| String::from(*n)).collect();
    let values: Vec<Elem> = assignment.iter().map(|a| a.1).collect();
    let (c, rel_names) = Compiled::for_model(f, model, &names, budget)?;
    let rels: Vec<&Relation> = rel_names.iter().map(|n| &model.relations[n]).collect();
    c.eval(&rels, &values)
}

/// The relation `{x̄ : φ(x̄)}` over `vars` (in that order).
pub fn defined_relation(f: &Formula, model: &Model, vars: &[String], budget: &Budget) -> Result<Relation> {
    let (c, rel_names) = Compiled::for_model(f, model, vars, budget)?;
    let rels: Vec<&Relation> = rel_names.iter().map(|n| &model.relations[n]).collect();
    let mut err = None;
    let r = Relation::from_predicate(model.universe, vars.len(), |t| match c.eval(&rels, t) {
        Ok(b) => b,
        Err(e) => {
            err.get_or_insert(e);
            false
        }
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(r),
    }
}
