//! Constructive decompositions of a relation.
//!
//! Every constructor checks the properties it promises before returning and
//! reports a [`Error::Construction`] if one fails. Choices are resolved by
//! taking the smallest candidate, so equal inputs give equal outputs.

mod equiv;
mod inj;
mod monadic;
mod nary;
mod system;

pub use equiv::{inj_from_equiv, InjFromEquiv};
pub use inj::{
    build_e_ac, inj_decompose, inj_reconstruct, interpret_injection, ac_support, ac_support_with,
    verify_ac_support, InjCore, InjectionInterpretation, AcSupport, AcSupportCheck,
};
pub use monadic::{
    monadic_core, monadic_extraction, monadic_reconstruct, phi_star_formula, phi_star_set, Extraction,
    ExtractionCase, MonadicCore, PhiStar, Reduction,
};
pub use nary::{decode_nary, decoding_formula, decoding_vars, encode_nary, theta_formula, NAryEncoding};
pub use system::{distinguishing_system, verify_system, DistinguishingSystem, Triple};

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::budget::Budget;
use crate::elements::{Elem, ElemSet, Permutation, Universe};
use crate::error::{Error, Result};
use crate::logic::ast::{fresh_name, Formula};
use crate::logic::eval::{defined_relation, Model};
use crate::relation::Relation;

/// Argument lists of the atomic formulas `φ(x, y_0, ..., y_{k-1})` got from
/// an `n`-place symbol by substitution: entry 0 stands for `x`, entry
/// `j + 1` for `y_j`. `x` occurs, and the `y_j` first occur in order.
pub(crate) fn patterns_with_x(n: usize) -> Vec<Vec<usize>> {
    fn go(p: &mut Vec<usize>, n: usize, used: usize, out: &mut Vec<Vec<usize>>) {
        if p.len() == n {
            if p.contains(&0) {
                out.push(p.clone());
            }
            return;
        }
        for s in 0..=used + 1 {
            p.push(s);
            go(p, n, used.max(s), out);
            p.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), n, 0, &mut out);
    out
}

/// Number of distinct `y` slots in a pattern.
pub(crate) fn pattern_width(p: &[usize]) -> usize {
    p.iter().copied().max().unwrap_or(0)
}

/// Distinct entries of `t` in order of first occurrence.
pub(crate) fn distinct_in_order(t: &[Elem]) -> Vec<Elem> {
    let mut out: Vec<Elem> = Vec::new();
    for &x in t {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

/// A set `{x : φ(x)}` given by a first-order formula over permuted copies
/// of one relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetDefinition {
    pub universe: Universe,
    pub var: String,
    pub formula: Formula,
    pub base: Relation,
    /// Relation symbols of the formula and the permutation giving each copy.
    pub copies: Vec<(String, Permutation)>,
}

impl SetDefinition {
    pub(crate) fn over(base: &Relation, var: &str, formula: Formula, copies: Vec<(String, Permutation)>) -> Self {
        SetDefinition { universe: base.universe(), var: var.into(), formula, base: base.clone(), copies }
    }

    pub fn relations(&self) -> Vec<(String, Relation)> {
        self.copies.iter().map(|(name, p)| (name.clone(), self.base.permute(p))).collect()
    }

    pub fn model(&self) -> Result<Model> {
        let mut m = Model::new(self.universe);
        for (name, r) in self.relations() {
            m = m.with_relation(&name, r)?;
        }
        Ok(m)
    }

    /// Evaluates the formula with the logic evaluator.
    pub fn evaluate(&self, budget: &Budget) -> Result<ElemSet> {
        defined_relation(&self.formula, &self.model()?, core::slice::from_ref(&self.var), budget)?.as_set()
    }

    fn names(&self) -> BTreeSet<String> {
        let mut s = self.formula.all_names();
        s.extend(self.copies.iter().map(|r| r.0.clone()));
        s
    }

    /// The image under `σ`: copies permuted and renamed, constants moved.
    /// It defines `σ` of the original set.
    pub(crate) fn permuted(&self, sigma: &Permutation, taken: &mut BTreeSet<String>) -> SetDefinition {
        let mut map = alloc::collections::BTreeMap::new();
        let mut copies = Vec::new();
        for (name, p) in &self.copies {
            let fresh = fresh_name(name, taken);
            map.insert(name.clone(), fresh.clone());
            copies.push((fresh, sigma.compose(p)));
        }
        let formula = self.formula.rename_relations(&map).map_constants(&|c| sigma.apply(c));
        SetDefinition { formula, copies, ..self.clone() }
    }

    /// Conjunction (`and = true`) or disjunction of definitions with the
    /// same variable and base and disjoint relation names.
    pub(crate) fn combine(parts: Vec<SetDefinition>, and: bool) -> Result<SetDefinition> {
        let first = parts.first().ok_or_else(|| Error::Construction("nothing to combine".into()))?.clone();
        let mut copies = Vec::new();
        let mut formulas = Vec::new();
        for p in parts {
            copies.extend(p.copies);
            formulas.push(p.formula);
        }
        let formula = if formulas.len() == 1 {
            formulas.pop().expect("one formula")
        } else if and {
            Formula::And(formulas)
        } else {
            Formula::Or(formulas)
        };
        Ok(SetDefinition { formula, copies, ..first })
    }
}

/// A permutation sending `from` (sorted) onto `to` (sorted), of equal size.
pub(crate) fn moving(u: Universe, from: &ElemSet, to: &ElemSet) -> Result<Permutation> {
    let pairs: Vec<(Elem, Elem)> = from.iter().zip(to.iter()).collect();
    Permutation::extend_partial(u, &pairs)
}

/// Intersections or unions of permuted copies of `def` (which defines `set`)
/// with exactly `target` elements.
pub(crate) fn adjust_size(def: SetDefinition, set: &ElemSet, target: usize) -> Result<(SetDefinition, ElemSet)> {
    let u = def.universe;
    let n = u.size() as usize;
    let size = set.len();
    if size == target {
        return Ok((def, set.clone()));
    }
    let mut taken = def.names();
    if size > target {
        // σ(B) keeps the first `target` elements of B and leaves the rest.
        if size - target > n - size {
            return Err(Error::Construction("too few elements outside the set to shrink it".into()));
        }
        let keep = set.iter().take(target);
        let outside = set.complement(u).iter().take(size - target).collect::<Vec<_>>();
        let to: ElemSet = keep.chain(outside).collect();
        let copy = def.permuted(&moving(u, set, &to)?, &mut taken);
        let result = set.intersection(&to);
        let d = SetDefinition::combine(alloc::vec![def, copy], true)?;
        return Ok((d, result));
    }
    if size == 0 {
        return Err(Error::Construction("an empty set cannot be enlarged by copies".into()));
    }
    let mut parts = alloc::vec![def.clone()];
    let mut cur = set.clone();
    while cur.len() < target {
        let fresh = (target - cur.len()).min(size);
        let old: Vec<Elem> = cur.iter().take(size - fresh).collect();
        let new: Vec<Elem> = cur.complement(u).iter().take(fresh).collect();
        let to: ElemSet = old.into_iter().chain(new).collect();
        parts.push(def.permuted(&moving(u, set, &to)?, &mut taken));
        cur = cur.union(&to);
    }
    let d = SetDefinition::combine(parts, false)?;
    Ok((d, cur))
}
