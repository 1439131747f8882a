//! Exhaustive checks of definability, interpretability and expressibility
//! on one universe.
//!
//! An interpretation of `K₁` in `K₂` is a formula `φ(x̄, S₀, ..., S_{m-1})`
//! such that every `R₁ ∈ K₁[𝒰]` equals `{x̄ : φ(x̄, S̄)}` for some `S̄` from
//! `K₂[𝒰]`. A certificate lists those witnesses for every member; it is a
//! per-universe statement, so uniformity is checked by running the same
//! formula over several sizes.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::budget::Budget;
use crate::canon;
use crate::combinatorics;
use crate::elements::{Elem, Permutation, Universe};
use crate::error::{Error, Result};
use crate::family::QuantifierFamily;
use crate::logic::ast::Formula;
use crate::logic::eval::{Compiled, Model};
use crate::relation::{for_each_tuple, Relation};

/// Witnesses for every member of `K₁[𝒰]`; `entries` pairs each member with
/// its `S̄`, in the order of `rel_vars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub formula: Formula,
    pub elem_vars: Vec<String>,
    pub rel_vars: Vec<String>,
    pub k1: QuantifierFamily,
    pub k2: Vec<QuantifierFamily>,
    pub universe: Universe,
    pub entries: Vec<(Relation, Vec<Relation>)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Certified(Certificate),
    /// A member of `K₁[𝒰]` that no choice of witnesses defines.
    Counterexample(Relation),
}

impl Outcome {
    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Outcome::Certified(c) => Some(c),
            Outcome::Counterexample(_) => None,
        }
    }
}

/// Result of a definability check; `mismatch` is the first relation (in
/// enumeration order) where `φ` and membership disagree, with `φ`'s value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Definability {
    pub definable: bool,
    pub checked: u128,
    pub mismatch: Option<(Relation, bool)>,
}

/// Elementary steps of a witness search: `|K₁|·|K₂|^m·N^{|x̄|}`.
pub fn work_estimate(k1_members: u128, candidates: &[u128], n: u32, elem_vars: usize) -> u128 {
    candidates
        .iter()
        .fold(k1_members, |acc, &c| acc.saturating_mul(c))
        .saturating_mul(combinatorics::pow(n as u64, elem_vars as u64))
}

/// `{R : φ(R)} = K[𝒰]`, checked over all relations of arity `n(K)`.
pub fn check_definable(k: &QuantifierFamily, phi: &Formula, params: &Model, budget: &Budget) -> Result<Definability> {
    let u = params.universe;
    let free: Vec<(String, usize)> =
        phi.free_rel_vars().into_iter().filter(|(n, _)| !params.relations.contains_key(n)).collect();
    if free.len() != 1 {
        return Err(Error::Precondition(format!("expected one free relation variable, found {}", free.len())));
    }
    if free[0].1 != k.arity() {
        return Err(Error::Arity { expected: k.arity(), found: free[0].1 });
    }
    if let Some(v) = phi.free_elem_vars().into_iter().next() {
        return Err(Error::Unbound(v));
    }
    let arity = k.arity();
    let cells = combinatorics::pow(u.size() as u64, arity as u64);
    if cells >= 127 {
        return Err(Error::BudgetExceeded { what: "relations to enumerate", estimate: u128::MAX, limit: budget.max_members as u128 });
    }
    let total = 1u128 << cells;
    budget.check_members("relations to enumerate", total)?;
    let (fixed_names, fixed): (Vec<String>, Vec<&Relation>) = params.relations.iter().map(|(n, r)| (n.clone(), r)).unzip();
    let mut rels: Vec<(String, usize)> = fixed_names.iter().map(|n| (n.clone(), params.relations[n].arity())).collect();
    rels.push(free[0].clone());
    let compiled = Compiled::new(phi, u, &rels, &[], &|r| params.family(r), budget)?;
    let members = k.members(u, budget)?;
    let mut tuples: Vec<Vec<Elem>> = Vec::new();
    for_each_tuple(u.size(), arity, |t| {
        tuples.push(t.to_vec());
        false
    });
    for mask in 0..total {
        let r = Relation::new(u, arity, (0..cells as usize).filter(|&i| mask >> i & 1 == 1).map(|i| &tuples[i]))?;
        let mut args = fixed.clone();
        args.push(&r);
        let holds = compiled.eval(&args, &[])?;
        let member = members.binary_search(&r).is_ok();
        if holds != member {
            return Ok(Definability { definable: false, checked: mask + 1, mismatch: Some((r, holds)) });
        }
    }
    Ok(Definability { definable: true, checked: total, mismatch: None })
}

struct Setup {
    compiled: Compiled,
    fixed: Vec<Relation>,
    rel_vars: Vec<String>,
    candidates: Vec<Vec<Relation>>,
    k1_members: Vec<Relation>,
}

fn setup(
    phi: &Formula,
    elem_vars: &[String],
    rel_vars: Option<&[String]>,
    k1: &QuantifierFamily,
    k2: &[QuantifierFamily],
    params: &Model,
    budget: &Budget,
) -> Result<Setup> {
    let u = params.universe;
    if elem_vars.len() != k1.arity() {
        return Err(Error::Arity { expected: k1.arity(), found: elem_vars.len() });
    }
    for v in phi.free_elem_vars() {
        if !elem_vars.contains(&v) {
            return Err(Error::Unbound(v));
        }
    }
    let free = phi.free_rel_vars();
    let rel_vars: Vec<String> = match rel_vars {
        Some(v) => v.to_vec(),
        None => free.keys().filter(|n| !params.relations.contains_key(*n)).cloned().collect(),
    };
    for n in free.keys() {
        if !params.relations.contains_key(n) && !rel_vars.contains(n) {
            return Err(Error::Unbound(n.clone()));
        }
    }
    let k1_members = k1.members(u, budget)?;
    let mut candidates = Vec::new();
    let mut arities = Vec::new();
    for v in &rel_vars {
        let arity = match free.get(v) {
            Some(&a) => a,
            None => k2.first().map(|k| k.arity()).ok_or_else(|| Error::Precondition("no witness family".into()))?,
        };
        let mut c: Vec<Relation> = Vec::new();
        for k in k2.iter().filter(|k| k.arity() == arity) {
            c.extend(k.members(u, budget)?);
        }
        if k2.iter().all(|k| k.arity() != arity) {
            return Err(Error::Arity { expected: k2.first().map_or(0, |k| k.arity()), found: arity });
        }
        c.sort();
        c.dedup();
        candidates.push(c);
        arities.push(arity);
    }
    let sizes: Vec<u128> = candidates.iter().map(|c| c.len() as u128).collect();
    budget.check_work("interpretation search", work_estimate(k1_members.len() as u128, &sizes, u.size(), elem_vars.len()))?;
    let fixed: Vec<Relation> = params.relations.values().cloned().collect();
    let mut rels: Vec<(String, usize)> = params.relations.iter().map(|(n, r)| (n.clone(), r.arity())).collect();
    rels.extend(rel_vars.iter().cloned().zip(arities));
    let compiled = Compiled::new(phi, u, &rels, elem_vars, &|r| params.family(r), budget)?;
    Ok(Setup { compiled, fixed, rel_vars, candidates, k1_members })
}

impl Setup {
    fn defines(&self, target: &Relation, witnesses: &[&Relation]) -> Result<bool> {
        let mut args: Vec<&Relation> = self.fixed.iter().collect();
        args.extend_from_slice(witnesses);
        let mut result = Ok(true);
        let k = self.compiled.free_elems().len();
        for_each_tuple(self.compiled.universe().size(), k, |t| match self.compiled.eval(&args, t) {
            Ok(v) if v == target.contains(t) => false,
            Ok(_) => {
                result = Ok(false);
                true
            }
            Err(e) => {
                result = Err(e);
                true
            }
        });
        result
    }

    /// First witness tuple in lexicographic order of candidate indices.
    fn search(&self, target: &Relation) -> Result<Option<Vec<Relation>>> {
        let m = self.candidates.len();
        if self.candidates.iter().any(|c| c.is_empty()) {
            return Ok(None);
        }
        let mut idx = alloc::vec![0usize; m];
        loop {
            let pick: Vec<&Relation> = idx.iter().zip(&self.candidates).map(|(&i, c)| &c[i]).collect();
            if self.defines(target, &pick)? {
                return Ok(Some(pick.into_iter().cloned().collect()));
            }
            let mut j = m;
            loop {
                if j == 0 {
                    return Ok(None);
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < self.candidates[j].len() {
                    break;
                }
                idx[j] = 0;
            }
        }
    }

    fn run(self, phi: &Formula, elem_vars: &[String], k1: &QuantifierFamily, k2: &[QuantifierFamily], u: Universe) -> Result<Outcome> {
        let mut entries: Vec<(Relation, Vec<Relation>)> = Vec::new();
        // Canonical form, labelling and witnesses of the previous member.
        let mut last: Option<(Relation, Permutation, Vec<Relation>)> = None;
        for r1 in &self.k1_members {
            let form = canon::canonical_form_refined(r1, 2_000).ok();
            // Carry the previous witnesses along an isomorphism first.
            let mut found = None;
            if let (Some((c_prev, pi_prev, prev)), Some((c, pi))) = (&last, &form) {
                if c_prev == c {
                    let sigma = pi.inverse().compose(pi_prev);
                    let moved: Vec<Relation> = prev.iter().map(|s| s.permute(&sigma)).collect();
                    let members = moved.iter().zip(&self.candidates).all(|(s, c)| c.binary_search(s).is_ok());
                    if members && self.defines(r1, &moved.iter().collect::<Vec<_>>())? {
                        found = Some(moved);
                    }
                }
            }
            if found.is_none() {
                found = self.search(r1)?;
            }
            let Some(w) = found else {
                return Ok(Outcome::Counterexample(r1.clone()));
            };
            last = form.map(|(c, pi)| (c, pi, w.clone()));
            entries.push((r1.clone(), w));
        }
        Ok(Outcome::Certified(Certificate {
            formula: phi.clone(),
            elem_vars: elem_vars.to_vec(),
            rel_vars: self.rel_vars,
            k1: k1.clone(),
            k2: k2.to_vec(),
            universe: u,
            entries,
        }))
    }
}

/// Searches witnesses for every member of `K₁[𝒰]`. `φ` must be first-order;
/// relations of `params` are fixed parameters, every other free relation
/// symbol is a witness variable ranging over the `K₂` families of its arity.
pub fn check_interpretation(
    phi: &Formula,
    elem_vars: &[String],
    k1: &QuantifierFamily,
    k2: &[QuantifierFamily],
    params: &Model,
    budget: &Budget,
) -> Result<Outcome> {
    if phi.has_second_order() {
        return Err(Error::Precondition("an interpreting formula must be first-order".into()));
    }
    let s = setup(phi, elem_vars, None, k1, k2, params, budget)?;
    s.run(phi, elem_vars, k1, k2, params.universe)
}

/// As [`check_interpretation`], but `φ` may quantify over families named in
/// `params` or given inline.
pub fn check_expressibility(
    phi: &Formula,
    elem_vars: &[String],
    k1: &QuantifierFamily,
    k2: &[QuantifierFamily],
    params: &Model,
    budget: &Budget,
) -> Result<Outcome> {
    let s = setup(phi, elem_vars, None, k1, k2, params, budget)?;
    s.run(phi, elem_vars, k1, k2, params.universe)
}

/// Witness search with an explicit order of witness variables.
pub(crate) fn check_with_vars(
    phi: &Formula,
    elem_vars: &[String],
    rel_vars: &[String],
    k1: &QuantifierFamily,
    k2: &[QuantifierFamily],
    params: &Model,
    budget: &Budget,
) -> Result<Outcome> {
    let s = setup(phi, elem_vars, Some(rel_vars), k1, k2, params, budget)?;
    s.run(phi, elem_vars, k1, k2, params.universe)
}

/// Re-checks a certificate from scratch: coverage of `K₁[𝒰]`, membership of
/// every witness, and the defining equivalence.
pub fn verify_certificate(cert: &Certificate, params: &Model, budget: &Budget) -> Result<bool> {
    let u = cert.universe;
    u.same(&params.universe)?;
    let members = cert.k1.members(u, budget)?;
    let listed: Vec<&Relation> = cert.entries.iter().map(|e| &e.0).collect();
    if members.iter().collect::<Vec<_>>() != listed {
        return Ok(false);
    }
    let free = cert.formula.free_rel_vars();
    let fixed: Vec<Relation> = params.relations.values().cloned().collect();
    let mut rels: Vec<(String, usize)> = params.relations.iter().map(|(n, r)| (n.clone(), r.arity())).collect();
    for (i, v) in cert.rel_vars.iter().enumerate() {
        let a = free.get(v).copied().or_else(|| cert.entries.first().map(|e| e.1[i].arity())).unwrap_or(1);
        rels.push((v.clone(), a));
    }
    let compiled = Compiled::new(&cert.formula, u, &rels, &cert.elem_vars, &|r| params.family(r), budget)?;
    for (r1, ws) in &cert.entries {
        if ws.len() != cert.rel_vars.len() {
            return Ok(false);
        }
        for w in ws {
            let mut ok = false;
            for k in cert.k2.iter().filter(|k| k.arity() == w.arity()) {
                ok |= k.contains(w)?;
            }
            if !ok {
                return Ok(false);
            }
        }
        let mut args: Vec<&Relation> = fixed.iter().collect();
        args.extend(ws.iter());
        let mut good = Ok(true);
        for_each_tuple(u.size(), cert.elem_vars.len(), |t| match compiled.eval(&args, t) {
            Ok(v) if v == r1.contains(t) => false,
            Ok(_) => {
                good = Ok(false);
                true
            }
            Err(e) => {
                good = Err(e);
                true
            }
        });
        if !good? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Composes `K₁ ≤ K₂` with `K₂ ≤ K₃`: each witness variable `S_i` of the
/// first formula is replaced by the second formula over fresh copies of its
/// witness variables. The result is re-verified before it is returned.
pub fn compose_interpretations(c12: &Certificate, c23: &Certificate, params: &Model, budget: &Budget) -> Result<Certificate> {
    c12.universe.same(&c23.universe)?;
    if c12.k2.len() != 1 || c12.k2[0] != c23.k1 {
        return Err(Error::Precondition("the certificates do not share the middle family".into()));
    }
    let mut taken = c12.formula.all_names();
    taken.extend(c23.formula.all_names());
    taken.extend(params.relations.keys().cloned());
    let mut formula = c12.formula.clone();
    let mut rel_vars = Vec::new();
    let mut renamings = Vec::new();
    for s in &c12.rel_vars {
        let mut map = BTreeMap::new();
        for t in &c23.rel_vars {
            let name = crate::logic::ast::fresh_name(&format!("{t}_{s}"), &mut taken);
            map.insert(t.clone(), name.clone());
            rel_vars.push(name);
        }
        let def = c23.formula.rename_relations(&map);
        formula = formula.substitute_relation(s, &c23.elem_vars, &def);
        renamings.push(map);
    }
    let lookup: BTreeMap<&Relation, &Vec<Relation>> = c23.entries.iter().map(|(r, w)| (r, w)).collect();
    let mut entries = Vec::new();
    for (r1, ws) in &c12.entries {
        let mut all = Vec::new();
        for w in ws {
            let inner = lookup
                .get(w)
                .ok_or_else(|| Error::Construction("a middle witness has no certificate entry".into()))?;
            all.extend(inner.iter().cloned());
        }
        entries.push((r1.clone(), all));
    }
    let cert = Certificate {
        formula,
        elem_vars: c12.elem_vars.clone(),
        rel_vars,
        k1: c12.k1.clone(),
        k2: c23.k2.clone(),
        universe: c12.universe,
        entries,
    };
    if !verify_certificate(&cert, params, budget)? {
        return Err(Error::Construction("the composed certificate does not verify".into()));
    }
    Ok(cert)
}
