//! Class counts of equivalence relations: `nu_{≥k}` and `uq_k`.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::budget::Budget;
use crate::combinatorics::binomial;
use crate::elements::{Elem, ElemSet};
use crate::error::{Error, Result};
use crate::family::QuantifierFamily;
use crate::relation::EquivalenceRelation;

/// Number of classes with at least `k` members.
pub fn nu_ge(e: &EquivalenceRelation, k: usize) -> usize {
    e.blocks().iter().filter(|b| b.len() >= k).count()
}

/// `uq_k(E)` with the copies `E_0 = E, E_1, ...` and a set `B` of that size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Uq {
    pub value: usize,
    pub exact: bool,
    pub copies: Vec<EquivalenceRelation>,
    pub set: ElemSet,
}

/// Cell index of every element: the classes, then `𝒰∖Dom(E)`.
fn cells(e: &EquivalenceRelation) -> Vec<u32> {
    let mut out = alloc::vec![0u32; e.universe().size() as usize];
    for (i, block) in e.universe_partition().iter().enumerate() {
        for x in block.iter() {
            out[x as usize] = i as u32;
        }
    }
    out
}

/// Number of cells of the common refinement, and one element of each.
fn meet(parts: &[&Vec<u32>]) -> (usize, ElemSet) {
    let n = parts[0].len();
    let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut reps = ElemSet::new();
    for x in 0..n {
        if seen.insert(parts.iter().map(|p| p[x]).collect()) {
            reps.insert(x as Elem);
        }
    }
    (seen.len(), reps)
}

/// The largest set pairwise separated by `k` isomorphic copies of `E`: two
/// elements are separated by a copy when exactly one lies in its domain, or
/// both do and they are not equivalent. This is the number of cells of the
/// common refinement of the copies' partitions (classes plus the outside).
pub fn uq(e: &EquivalenceRelation, k: usize, budget: &Budget) -> Result<Uq> {
    if k == 0 {
        return Err(Error::Precondition("uq_k needs k >= 1".into()));
    }
    let u = e.universe();
    let n = u.size() as usize;
    let first = cells(e);
    // Permuting all copies at once keeps the cell count, so E_0 = E.
    let members = if k > 1 {
        QuantifierFamily::iso(e.to_relation()).members(u, budget)?
    } else {
        Vec::new()
    };
    let copies: Vec<(EquivalenceRelation, Vec<u32>)> = members
        .iter()
        .map(|r| {
            let c = EquivalenceRelation::from_relation(r).expect("copies of an equivalence relation");
            let cl = cells(&c);
            (c, cl)
        })
        .collect();
    let m = copies.len() as u64;
    let combos = if k > 1 { binomial(m + k as u64 - 2, k as u64 - 1) } else { 1 };
    let (best, exact) = if k == 1 || combos.saturating_mul(n as u128) <= budget.max_work as u128 {
        (exhaustive(&first, &copies, k - 1, n), true)
    } else {
        (greedy(&first, &copies, k - 1), false)
    };
    let mut parts: Vec<&Vec<u32>> = alloc::vec![&first];
    parts.extend(best.iter().map(|&i| &copies[i].1));
    let (value, set) = meet(&parts);
    let mut chosen = alloc::vec![e.clone()];
    chosen.extend(best.iter().map(|&i| copies[i].0.clone()));
    Ok(Uq { value, exact: exact || value == n, copies: chosen, set })
}

/// Best multiset of `extra` copies, as indices in nondecreasing order.
fn exhaustive(first: &Vec<u32>, copies: &[(EquivalenceRelation, Vec<u32>)], extra: usize, n: usize) -> Vec<usize> {
    let mut best: (usize, Vec<usize>) = (meet(&[first]).0, Vec::new());
    let mut cur: Vec<usize> = Vec::new();
    fn rec(
        first: &Vec<u32>,
        copies: &[(EquivalenceRelation, Vec<u32>)],
        extra: usize,
        n: usize,
        start: usize,
        cur: &mut Vec<usize>,
        best: &mut (usize, Vec<usize>),
    ) {
        if best.0 == n {
            return;
        }
        if cur.len() == extra {
            let mut parts: Vec<&Vec<u32>> = alloc::vec![first];
            parts.extend(cur.iter().map(|&i| &copies[i].1));
            let c = meet(&parts).0;
            if c > best.0 {
                *best = (c, cur.clone());
            }
            return;
        }
        for i in start..copies.len() {
            cur.push(i);
            rec(first, copies, extra, n, i, cur, best);
            cur.pop();
        }
    }
    rec(first, copies, extra, n, 0, &mut cur, &mut best);
    if best.1.len() < extra && !copies.is_empty() {
        best.1.resize(extra, 0);
    }
    best.1
}

fn greedy(first: &Vec<u32>, copies: &[(EquivalenceRelation, Vec<u32>)], extra: usize) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    for _ in 0..extra {
        let mut best = (0usize, 0usize);
        for (i, c) in copies.iter().enumerate() {
            let mut parts: Vec<&Vec<u32>> = alloc::vec![first];
            parts.extend(chosen.iter().map(|&j| &copies[j].1));
            parts.push(&c.1);
            let v = meet(&parts).0;
            if v > best.0 {
                best = (v, i);
            }
        }
        chosen.push(best.1);
    }
    chosen
}
