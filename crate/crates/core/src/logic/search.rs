//! Bounded enumeration of interpreting formulas.
//!
//! Candidates use free variables `x0, x1, ...`, witness variables `S0, S1,
//! ...` (the indices used always form a prefix) and bound variables `y0, y1,
//! ...` named by nesting level. They are tried by size, then quantifier
//! depth, then generation order: atoms, `not`, `and`, `or`, `E`, `A`,
//! second-order `E2`. Conjunctions and disjunctions are generated once per
//! unordered pair of operands.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::family::{FamilyRef, QuantifierFamily};
use crate::logic::ast::{Formula, SoBinder, Term};
use crate::logic::eval::Model;
use crate::logic::oracle::{check_with_vars, Certificate, Outcome};

/// Name under which the witness family is visible to second-order nodes.
pub const WITNESS_FAMILY: &str = "K2";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBounds {
    pub max_witnesses: usize,
    pub max_depth: usize,
    pub max_size: usize,
    /// Nesting limit for `∃_{K₂}` nodes; 0 keeps the search first-order.
    pub max_so_depth: usize,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds { max_witnesses: 2, max_depth: 0, max_size: 3, max_so_depth: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Certificate),
    /// Nothing in the bounded space certifies; `tried` candidates were checked.
    Exhausted { tried: u64 },
}

struct Grammar {
    free: usize,
    witnesses: usize,
    arity: usize,
    so_arity: usize,
    // (size, scope, depth left, so depth left, bound relation count)
    memo: BTreeMap<(usize, usize, usize, usize, usize), Vec<Formula>>,
}

fn var_name(free: usize, i: usize) -> String {
    if i < free {
        format!("x{i}")
    } else {
        format!("y{}", i - free)
    }
}

impl Grammar {
    fn atoms(&self, scope: usize, so_bound: usize) -> Vec<Formula> {
        let mut out = alloc::vec![Formula::True, Formula::False];
        let mut rels: Vec<String> = (0..self.witnesses).map(|i| format!("S{i}")).collect();
        let mut arities = alloc::vec![self.arity; self.witnesses];
        for j in 0..so_bound {
            rels.push(format!("Z{j}"));
            arities.push(self.so_arity);
        }
        for (rel, &arity) in rels.iter().zip(&arities) {
            let total = scope.pow(arity as u32);
            for code in 0..total {
                let mut c = code;
                let mut args = alloc::vec![Term::Const(0); arity];
                for slot in args.iter_mut().rev() {
                    *slot = Term::Var(var_name(self.free, c % scope));
                    c /= scope;
                }
                out.push(Formula::Atom(rel.clone(), args));
            }
        }
        for i in 0..scope {
            for j in i + 1..scope {
                out.push(Formula::Eq(Term::Var(var_name(self.free, i)), Term::Var(var_name(self.free, j))));
            }
        }
        out
    }

    fn of_size(&mut self, size: usize, scope: usize, depth: usize, so: usize, bound: usize) -> Vec<Formula> {
        let key = (size, scope, depth, so, bound);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let mut out = Vec::new();
        if size == 1 {
            if scope > 0 || self.witnesses == 0 {
                out = self.atoms(scope, bound);
            } else {
                out = alloc::vec![Formula::True, Formula::False];
            }
        } else {
            for f in self.of_size(size - 1, scope, depth, so, bound) {
                out.push(Formula::Not(alloc::boxed::Box::new(f)));
            }
            for ctor in 0..2 {
                for left in 1..size - 1 {
                    let right = size - 1 - left;
                    if left > right {
                        break;
                    }
                    let a = self.of_size(left, scope, depth, so, bound);
                    let b = self.of_size(right, scope, depth, so, bound);
                    for (i, fa) in a.iter().enumerate() {
                        let start = if left == right { i } else { 0 };
                        for fb in &b[start..] {
                            let pair = alloc::vec![fa.clone(), fb.clone()];
                            out.push(if ctor == 0 { Formula::And(pair) } else { Formula::Or(pair) });
                        }
                    }
                }
            }
            if depth > 0 {
                let v = var_name(self.free, scope);
                let body = self.of_size(size - 1, scope + 1, depth - 1, so, bound);
                for f in &body {
                    out.push(Formula::exists(&v, f.clone()));
                }
                for f in &body {
                    out.push(Formula::forall(&v, f.clone()));
                }
            }
            if so > 0 {
                let binder = SoBinder {
                    family: FamilyRef::named(WITNESS_FAMILY),
                    var: format!("Z{bound}"),
                    arity: Some(self.so_arity),
                };
                for f in self.of_size(size - 1, scope, depth, so - 1, bound + 1) {
                    out.push(Formula::SoExists(binder.clone(), alloc::boxed::Box::new(f)));
                }
            }
        }
        self.memo.insert(key, out.clone());
        out
    }
}

fn uses_prefix(f: &Formula, witnesses: usize) -> Option<usize> {
    let rels = f.free_rel_vars();
    let used: Vec<bool> = (0..witnesses).map(|i| rels.contains_key(&format!("S{i}"))).collect();
    let m = used.iter().take_while(|&&u| u).count();
    if used[m..].iter().any(|&u| u) {
        return None;
    }
    Some(m)
}

/// Tries candidate formulas in canonical order and returns the first whose
/// certificate covers all of `K₁[𝒰]`. Candidates whose witness search would
/// exceed `budget` are skipped and counted as tried.
pub fn search_interpretation(
    k1: &QuantifierFamily,
    k2: &QuantifierFamily,
    params: &Model,
    bounds: &SearchBounds,
    budget: &Budget,
) -> Result<SearchOutcome> {
    let model = params.clone().with_family(WITNESS_FAMILY, k2.clone());
    let free = k1.arity();
    let elem_vars: Vec<String> = (0..free).map(|i| format!("x{i}")).collect();
    let mut g = Grammar { free, witnesses: bounds.max_witnesses, arity: k2.arity(), so_arity: k2.arity(), memo: BTreeMap::new() };
    let mut tried = 0u64;
    for size in 1..=bounds.max_size {
        let mut layer = g.of_size(size, free, bounds.max_depth, bounds.max_so_depth, 0);
        layer.sort_by_key(|f| f.depth());
        for f in layer {
            let Some(m) = uses_prefix(&f, bounds.max_witnesses) else { continue };
            let rel_vars: Vec<String> = (0..m).map(|i| format!("S{i}")).collect();
            tried += 1;
            budget.check_members("candidate formulas", tried as u128)?;
            let outcome = check_with_vars(&f, &elem_vars, &rel_vars, k1, core::slice::from_ref(k2), &model, budget);
            match outcome {
                Ok(Outcome::Certified(c)) => return Ok(SearchOutcome::Found(c)),
                Ok(Outcome::Counterexample(_)) | Err(Error::BudgetExceeded { .. }) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(SearchOutcome::Exhausted { tried })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::Universe;
    use crate::family::FamilySpec;
    use crate::logic::oracle::verify_certificate;
    use alloc::string::ToString;

    fn fam(s: &str) -> QuantifierFamily {
        FamilySpec::parse(s).unwrap().resolve(&|_| None).unwrap()
    }

    #[test]
    fn finds_the_intersection_formula() {
        let m = Model::new(Universe::new(6).unwrap());
        let b = Budget::default();
        let bounds = SearchBounds { max_witnesses: 2, max_depth: 0, max_size: 3, max_so_depth: 0 };
        match search_interpretation(&fam("mon:1"), &fam("mon:2"), &m, &bounds, &b).unwrap() {
            SearchOutcome::Found(c) => {
                assert_eq!(c.formula.to_string(), "(and (S0 x0) (S1 x0))");
                assert!(verify_certificate(&c, &m, &b).unwrap());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn at_most_from_exact() {
        let m = Model::new(Universe::new(8).unwrap());
        let b = Budget::default();
        let bounds = SearchBounds { max_witnesses: 2, max_depth: 0, max_size: 3, max_so_depth: 0 };
        let out = search_interpretation(&fam("mon<=:2"), &fam("mon:2"), &m, &bounds, &b).unwrap();
        assert!(matches!(out, SearchOutcome::Found(_)));
    }

    #[test]
    fn exhausted_without_witnesses() {
        let m = Model::new(Universe::new(5).unwrap());
        let b = Budget::default();
        let bounds = SearchBounds { max_witnesses: 0, max_depth: 1, max_size: 4, max_so_depth: 0 };
        let out = search_interpretation(&fam("mon:1"), &fam("mon:1"), &m, &bounds, &b).unwrap();
        assert!(matches!(out, SearchOutcome::Exhausted { tried } if tried > 0));
    }

    #[test]
    fn enumeration_is_canonical() {
        let mut g = Grammar { free: 1, witnesses: 1, arity: 1, so_arity: 1, memo: BTreeMap::new() };
        let one: Vec<String> = g.of_size(1, 1, 1, 0, 0).iter().map(|f| f.to_string()).collect();
        assert_eq!(one, ["true", "false", "(S0 x0)"]);
        let three = g.of_size(3, 1, 1, 0, 0);
        let mut seen: Vec<String> = three.iter().map(|f| f.to_string()).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), three.len());
        assert!(seen.contains(&"(E y0 (= x0 y0))".into()) || seen.contains(&"(E y0 (not (S0 y0)))".into()));
    }
}
