//! `λ₁`: the most basic 1-types realized outside a parameter set.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::budget::Budget;
use crate::combinatorics;
use crate::elements::{Elem, ElemSet};
use crate::error::Result;
use crate::relation::Relation;
use crate::types::{TypeComputer, TypeOptions};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lambda1Witness {
    pub set: ElemSet,
    pub count: usize,
}

/// `λ₁(R)`; `exact` is false when the subset budget ran out, and then
/// `value` is only a lower bound.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lambda1 {
    pub value: usize,
    pub exact: bool,
    pub witness: Lambda1Witness,
}

/// `|{tp_bs(a, A, R) : a ∈ 𝒰∖A}|`.
pub fn type_count(r: &Relation, a: &ElemSet) -> Result<usize> {
    r.universe().check_set(a)?;
    Ok(count_types(r, a))
}

pub(crate) fn count_types(r: &Relation, a: &ElemSet) -> usize {
    let tc = TypeComputer::new(1, a, core::slice::from_ref(r), TypeOptions::default());
    let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut buf = Vec::new();
    for x in r.universe().elements() {
        if !a.contains(x) {
            tc.signature(&[x], &mut buf);
            if !seen.contains(&buf) {
                seen.insert(buf.clone());
            }
        }
    }
    seen.len()
}

/// Elements of `𝒰∖A` grouped by basic type over `A`, classes in order of
/// their least element.
pub(crate) fn type_classes(r: &Relation, a: &ElemSet) -> Vec<Vec<Elem>> {
    let tc = TypeComputer::new(1, a, core::slice::from_ref(r), TypeOptions::default());
    let mut keys: Vec<Vec<u64>> = Vec::new();
    let mut classes: Vec<Vec<Elem>> = Vec::new();
    let mut buf = Vec::new();
    for x in r.universe().elements() {
        if a.contains(x) {
            continue;
        }
        tc.signature(&[x], &mut buf);
        match keys.iter().position(|k| *k == buf) {
            Some(i) => classes[i].push(x),
            None => {
                keys.push(buf.clone());
                classes.push(alloc::vec![x]);
            }
        }
    }
    classes
}

fn search(r: &Relation, candidates: &[Elem], budget: &Budget) -> Lambda1 {
    let n = r.universe().size() as usize;
    let mut best = Lambda1Witness { set: ElemSet::new(), count: count_types(r, &ElemSet::new()) };
    let mut visited: u64 = 1;
    let mut exact = true;
    for k in 1..=candidates.len() {
        // A set of size k leaves at most N - k elements to tell apart.
        if best.count >= n - k {
            break;
        }
        let stopped = combinatorics::for_each_subset_of_size(candidates, k, |s| {
            visited += 1;
            if visited > budget.max_members {
                return true;
            }
            let set: ElemSet = s.iter().collect();
            let c = count_types(r, &set);
            if c > best.count {
                best = Lambda1Witness { set, count: c };
            }
            best.count >= n - k
        });
        if stopped && visited > budget.max_members {
            exact = false;
            break;
        }
    }
    Lambda1 { value: best.count, exact, witness: best }
}

/// `λ₁(R)`, searching parameter sets inside `Dom(R)` (parameters outside the
/// domain only occur in false atoms). Ties go to the smallest, then
/// lexicographically least set.
pub fn lambda1(r: &Relation, budget: &Budget) -> Result<Lambda1> {
    Ok(search(r, &r.domain().to_vec(), budget))
}

/// `λ₁(R)` over all subsets of the universe.
pub fn lambda1_unrestricted(r: &Relation, budget: &Budget) -> Result<Lambda1> {
    let all: Vec<Elem> = r.universe().elements().collect();
    Ok(search(r, &all, budget))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::Universe;

    fn u(n: u32) -> Universe {
        Universe::new(n).unwrap()
    }

    #[test]
    fn spec_examples() {
        let b = Budget::default();
        assert_eq!(lambda1(&Relation::empty(u(5), 2).unwrap(), &b).unwrap().value, 1);
        assert_eq!(lambda1(&Relation::full(u(5), 2).unwrap(), &b).unwrap().value, 1);
        let inj = Relation::new(u(8), 2, [[0, 3], [1, 4]]).unwrap();
        let l = lambda1(&inj, &b).unwrap();
        assert_eq!(l.value, 3);
        assert_eq!(type_count(&inj, &l.witness.set).unwrap(), 3);
        assert_eq!(type_count(&inj, &[3, 4].iter().collect()).unwrap(), 3);
    }

    #[test]
    fn domain_restriction_matches_full_search() {
        let b = Budget::default();
        let uni = u(3);
        for mask in 0u32..512 {
            let r = Relation::from_predicate(uni, 2, |t| mask >> (t[0] * 3 + t[1]) & 1 == 1).unwrap();
            assert_eq!(lambda1(&r, &b).unwrap().value, lambda1_unrestricted(&r, &b).unwrap().value);
        }
    }

    #[test]
    fn budget_cut_is_flagged() {
        let r = Relation::new(u(12), 2, (0..6u32).map(|i| [i, i + 6])).unwrap();
        let l = lambda1(&r, &Budget { max_members: 3, max_work: 10 }).unwrap();
        assert!(!l.exact);
        assert!(l.value <= lambda1(&r, &Budget::default()).unwrap().value);
    }
}
