//! Support sets and `λ'₀`.
//!
//! `A` supports `R` when `≈_A`-equivalent tuples agree on `R`. Three checks
//! are provided: the definition over all pairs of tuples, an exact count over
//! `≈_A`-classes, and single-coordinate flips. The flip check is only sound
//! when at least `n + 1` elements lie outside `A`: then any two equivalent
//! tuples are joined by a chain of flips, each moving one value to a free
//! element.
//!
//! For the minimum, a flip `v → w` that leaves `R` (or enters it) forces `v`
//! or `w` into every support of size at most `N - n - 1`, so those supports
//! are exactly the vertex covers of the graph of such flips. Larger supports
//! are found by enumeration.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::budget::Budget;
use crate::combinatorics::{self, binomial, falling};
use crate::elements::{Elem, ElemSet};
use crate::error::{Error, Result};
use crate::relation::{approx_eq, for_each_tuple, Relation};

/// A support set; `verified` records that the class check accepted it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SupportWitness {
    pub set: ElemSet,
    pub verified: bool,
}

/// `λ'₀(R)`. When the search is cut short, `value` is the size of the
/// verified witness and `lower` a proven lower bound, with `exact` false.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lambda0Prime {
    pub value: usize,
    pub lower: usize,
    pub exact: bool,
    pub witness: SupportWitness,
}

fn check_set(a: &ElemSet, r: &Relation) -> Result<()> {
    r.universe().check_set(a)
}

/// `A` supports `R`: every `≈_A`-class met by `R` lies inside `R`.
pub fn is_support(a: &ElemSet, r: &Relation) -> Result<bool> {
    check_set(a, r)?;
    Ok(support_by_classes(a, r))
}

pub(crate) fn support_by_classes(a: &ElemSet, r: &Relation) -> bool {
    let n = r.universe().size();
    let outside = n as u64 - a.len() as u64;
    let mut classes: BTreeMap<Vec<u32>, (u128, u128)> = BTreeMap::new();
    let mut fresh: Vec<Elem> = Vec::new();
    for t in r.tuples() {
        fresh.clear();
        let key: Vec<u32> = t
            .iter()
            .map(|&x| {
                if a.contains(x) {
                    x
                } else {
                    let i = fresh.iter().position(|&y| y == x).unwrap_or_else(|| {
                        fresh.push(x);
                        fresh.len() - 1
                    });
                    n + i as u32
                }
            })
            .collect();
        let size = falling(outside, fresh.len() as u64);
        classes.entry(key).or_insert((0, size)).0 += 1;
    }
    classes.values().all(|&(seen, size)| seen == size)
}

/// The definition: all pairs `b̄ ≈_A c̄` of `n`-tuples. Costs `N^{2n}`.
pub fn is_support_naive(a: &ElemSet, r: &Relation, budget: &Budget) -> Result<bool> {
    check_set(a, r)?;
    let n = r.universe().size();
    budget.check_work("support pairs", combinatorics::pow(n as u64, 2 * r.arity() as u64))?;
    let mut ok = true;
    for_each_tuple(n, r.arity(), |b| {
        let rb = r.contains(b);
        let stop = for_each_tuple(n, r.arity(), |c| {
            r.contains(c) != rb && approx_eq(b, c, a).expect("same length")
        });
        ok = !stop;
        stop
    });
    Ok(ok)
}

/// Single-coordinate flips from tuples of `R`. Falls back to the class check
/// when fewer than `n + 1` elements lie outside `A`.
pub fn is_support_single_flip(a: &ElemSet, r: &Relation) -> Result<bool> {
    check_set(a, r)?;
    if (r.universe().size() as usize) < a.len() + r.arity() + 1 {
        return Ok(support_by_classes(a, r));
    }
    Ok(first_flip_violation(r, |x| a.contains(x)).is_none())
}

/// The first flip `(t, v, w)` with `v, w` outside `A`, `v` in `t`, `w` not in
/// `t` and `t[v→w] ∉ R`, scanning `t` in order, then `v` by position, then `w`.
pub(crate) fn first_flip_violation(
    r: &Relation,
    in_a: impl Fn(Elem) -> bool,
) -> Option<(Vec<Elem>, Elem, Elem)> {
    let n = r.universe().size();
    let mut buf: Vec<Elem> = Vec::new();
    for t in r.tuples() {
        for (p, &v) in t.iter().enumerate() {
            if in_a(v) || t[..p].contains(&v) {
                continue;
            }
            for w in 0..n {
                if in_a(w) || t.contains(&w) {
                    continue;
                }
                buf.clear();
                buf.extend(t.iter().map(|&x| if x == v { w } else { x }));
                if !r.contains(&buf) {
                    return Some((t.to_vec(), v, w));
                }
            }
        }
    }
    None
}

/// Adjacency masks of the flip-violation graph.
pub(crate) fn violation_graph(r: &Relation) -> Vec<u128> {
    let n = r.universe().size() as usize;
    let mut adj = alloc::vec![0u128; n];
    let mut buf: Vec<Elem> = Vec::new();
    for t in r.tuples() {
        for (p, &v) in t.iter().enumerate() {
            if t[..p].contains(&v) {
                continue;
            }
            for w in 0..n as Elem {
                if t.contains(&w) || adj[v as usize] >> w & 1 == 1 {
                    continue;
                }
                buf.clear();
                buf.extend(t.iter().map(|&x| if x == v { w } else { x }));
                if !r.contains(&buf) {
                    adj[v as usize] |= 1 << w;
                    adj[w as usize] |= 1 << v;
                }
            }
        }
    }
    adj
}

struct Cover<'a> {
    adj: &'a [u128],
    nodes: u64,
    limit: u64,
}

impl Cover<'_> {
    /// Whether the edges inside `alive` have a vertex cover of size `<= k`.
    fn within(&mut self, alive: u128, k: usize) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.limit {
            return Err(Error::BudgetExceeded {
                what: "vertex cover search",
                estimate: self.nodes as u128,
                limit: self.limit as u128,
            });
        }
        let mut best: Option<(u32, usize)> = None;
        let mut rest = alive;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let d = (self.adj[v] & alive).count_ones();
            if d > 0 && best.is_none_or(|(bd, _)| d > bd) {
                best = Some((d, v));
            }
        }
        let Some((d, v)) = best else {
            return Ok(true);
        };
        if k == 0 || matching_size(self.adj, alive) > k {
            return Ok(false);
        }
        if self.within(alive & !(1 << v), k - 1)? {
            return Ok(true);
        }
        let nb = self.adj[v] & alive;
        if d as usize > k {
            return Ok(false);
        }
        self.within(alive & !nb & !(1 << v), k - d as usize)
    }
}

/// Size of a greedy maximal matching inside `alive`.
fn matching_size(adj: &[u128], alive: u128) -> usize {
    let mut free = alive;
    let mut size = 0;
    let mut rest = alive;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if free >> v & 1 == 0 {
            continue;
        }
        let m = adj[v] & free & !(1 << v);
        if m != 0 {
            let w = m.trailing_zeros();
            free &= !(1 << v) & !(1 << w);
            size += 1;
        }
    }
    size
}

fn mask_to_set(mask: u128) -> ElemSet {
    (0..128u32).filter(|&i| mask >> i & 1 == 1).collect()
}

/// `λ'₀(R)` with the lexicographically least minimum support.
pub fn lambda0_prime(r: &Relation, budget: &Budget) -> Result<Lambda0Prime> {
    let u = r.universe();
    let n = u.size() as usize;
    let arity = r.arity();
    if n > 128 {
        return min_support_by_enumeration(r, &u.all(), budget, false);
    }
    let adj = violation_graph(r);
    let all: u128 = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    let small_max = n.checked_sub(arity + 1);
    let mut cover = Cover { adj: &adj, nodes: 0, limit: budget.max_work };

    let mut run = || -> Result<Option<ElemSet>> {
        let Some(small_max) = small_max else {
            return Ok(None);
        };
        let mut tau = None;
        for k in 0..=small_max {
            if cover.within(all, k)? {
                tau = Some(k);
                break;
            }
        }
        let Some(mut k) = tau else {
            return Ok(None);
        };
        // Lexicographically least cover of size tau: take each element
        // in turn whenever a cover of the right size still exists.
        let mut alive = all;
        let mut chosen: u128 = 0;
        for x in 0..n {
            if alive >> x & 1 == 0 {
                continue;
            }
            let without = alive & !(1 << x);
            if k > 0 && cover.within(without, k - 1)? {
                chosen |= 1 << x;
                alive = without;
                k -= 1;
            } else {
                let nb = adj[x] & alive;
                chosen |= nb;
                k -= nb.count_ones() as usize;
                alive = without & !nb;
            }
        }
        Ok(Some(mask_to_set(chosen)))
    };

    match run() {
        Ok(Some(set)) => {
            let verified = support_by_classes(&set, r);
            if !verified {
                return Err(Error::Construction("vertex cover is not a support".into()));
            }
            Ok(Lambda0Prime { value: set.len(), lower: set.len(), exact: true, witness: SupportWitness { set, verified } })
        }
        Ok(None) => {
            // Every support has at least N - n elements.
            let from = n.saturating_sub(arity);
            large_supports(r, from, budget)
        }
        Err(Error::BudgetExceeded { .. }) => Ok(bounds_only(r, &adj, all, arity)),
        Err(e) => Err(e),
    }
}

/// Verified upper bound and matching lower bound.
fn bounds_only(r: &Relation, adj: &[u128], all: u128, arity: usize) -> Lambda0Prime {
    let n = r.universe().size() as usize;
    let m = matching_size(adj, all);
    let lower = m.min(n.saturating_sub(arity));
    // Greedy cover by maximum degree.
    let mut alive = all;
    let mut chosen: u128 = 0;
    loop {
        let best = (0..n).filter(|&v| alive >> v & 1 == 1).max_by_key(|&v| ((adj[v] & alive).count_ones(), n - v));
        match best {
            Some(v) if (adj[v] & alive) != 0 => {
                chosen |= 1 << v;
                alive &= !(1 << v);
            }
            _ => break,
        }
    }
    let mut set = mask_to_set(chosen);
    if !(set.len() + arity < n && support_by_classes(&set, r)) {
        set = r.domain();
    }
    if set.len() > n {
        set = r.universe().all();
    }
    let verified = support_by_classes(&set, r);
    Lambda0Prime { value: set.len(), lower, exact: set.len() == lower, witness: SupportWitness { set, verified } }
}

fn large_supports(r: &Relation, from: usize, budget: &Budget) -> Result<Lambda0Prime> {
    let u = r.universe();
    let n = u.size() as usize;
    let total: u128 = (from..=n).map(|k| binomial(n as u64, k as u64)).fold(0, u128::saturating_add);
    budget.check_members("support candidates", total)?;
    let all: Vec<Elem> = u.elements().collect();
    for k in from..=n {
        let mut found = None;
        combinatorics::for_each_subset_of_size(&all, k, |s| {
            let set: ElemSet = s.iter().collect();
            if support_by_classes(&set, r) {
                found = Some(set);
                true
            } else {
                false
            }
        });
        if let Some(set) = found {
            return Ok(Lambda0Prime { value: k, lower: k, exact: true, witness: SupportWitness { set, verified: true } });
        }
    }
    Err(Error::Construction("the whole universe is always a support".into()))
}

/// Minimum support among subsets of `candidates`, by increasing size in
/// lexicographic order. With `naive`, each candidate is checked against the
/// definition instead of the class count.
pub fn min_support_by_enumeration(
    r: &Relation,
    candidates: &ElemSet,
    budget: &Budget,
    naive: bool,
) -> Result<Lambda0Prime> {
    check_set(candidates, r)?;
    let items = candidates.to_vec();
    budget.check_members("support candidates", combinatorics::pow(2, items.len() as u64))?;
    for k in 0..=items.len() {
        let mut found: Option<ElemSet> = None;
        let mut err = None;
        combinatorics::for_each_subset_of_size(&items, k, |s| {
            let set: ElemSet = s.iter().collect();
            let ok = if naive {
                match is_support_naive(&set, r, budget) {
                    Ok(b) => b,
                    Err(e) => {
                        err = Some(e);
                        return true;
                    }
                }
            } else {
                support_by_classes(&set, r)
            };
            if ok {
                found = Some(set);
            }
            ok
        });
        if let Some(e) = err {
            return Err(e);
        }
        if let Some(set) = found {
            return Ok(Lambda0Prime { value: k, lower: k, exact: true, witness: SupportWitness { set, verified: true } });
        }
    }
    Err(Error::Precondition("no subset of the candidates supports the relation".into()))
}

/// `λ'₀(R)` searching only subsets of `Dom(R)` while `|A| + |Dom(R)| + n <= N`,
/// and all subsets of the universe beyond that size.
pub fn lambda0_prime_within_domain(r: &Relation, budget: &Budget) -> Result<Lambda0Prime> {
    let u = r.universe();
    let n = u.size() as usize;
    let dom = r.domain();
    let d = dom.to_vec();
    let reduced_max = n.checked_sub(d.len() + r.arity());
    if let Some(reduced_max) = reduced_max {
        for k in 0..=reduced_max.min(d.len()) {
            let mut found = None;
            combinatorics::for_each_subset_of_size(&d, k, |s| {
                let set: ElemSet = s.iter().collect();
                let ok = support_by_classes(&set, r);
                if ok {
                    found = Some(set);
                }
                ok
            });
            if let Some(set) = found {
                return Ok(Lambda0Prime { value: k, lower: k, exact: true, witness: SupportWitness { set, verified: true } });
            }
        }
    }
    let from = reduced_max.map_or(0, |m| m + 1);
    let all: Vec<Elem> = u.elements().collect();
    budget.check_members("support candidates", combinatorics::pow(2, n as u64))?;
    for k in from..=n {
        let mut found = None;
        combinatorics::for_each_subset_of_size(&all, k, |s| {
            let set: ElemSet = s.iter().collect();
            let ok = support_by_classes(&set, r);
            if ok {
                found = Some(set);
            }
            ok
        });
        if let Some(set) = found {
            return Ok(Lambda0Prime { value: k, lower: k, exact: true, witness: SupportWitness { set, verified: true } });
        }
    }
    Err(Error::Construction("the whole universe is always a support".into()))
}

/// `λ₀(R) = min(⌊N/2⌋, λ'₀(R))`.
pub fn lambda0(r: &Relation, budget: &Budget) -> Result<usize> {
    let half = r.universe().half() as usize;
    let l = lambda0_prime(r, budget)?;
    if l.exact {
        Ok(l.value.min(half))
    } else if l.lower >= half {
        Ok(half)
    } else {
        Err(Error::BudgetExceeded { what: "exact support search", estimate: l.value as u128, limit: l.lower as u128 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::Universe;
    use crate::relation::EquivalenceRelation;
    use alloc::vec;

    fn u(n: u32) -> Universe {
        Universe::new(n).unwrap()
    }

    fn set(xs: &[Elem]) -> ElemSet {
        xs.iter().collect()
    }

    #[test]
    fn spec_examples() {
        let b = Budget::default();
        let r = Relation::new(u(6), 1, [[0], [1]]).unwrap();
        assert!(!is_support(&set(&[0]), &r).unwrap());
        assert!(!is_support_naive(&set(&[0]), &r, &b).unwrap());
        assert!(is_support(&r.domain(), &r).unwrap());
        assert!(is_support(&u(6).all(), &r).unwrap());
        assert_eq!(lambda0_prime(&r, &b).unwrap().value, 2);
        let full = Relation::full(u(5), 2).unwrap();
        assert_eq!(lambda0_prime(&full, &b).unwrap().value, 0);
        let e = EquivalenceRelation::new(u(8), vec![vec![0, 1, 2, 3, 4], vec![5], vec![6], vec![7]]).unwrap();
        let l = lambda0_prime(&e.to_relation(), &b).unwrap();
        assert_eq!((l.value, l.witness.set.clone()), (3, set(&[5, 6, 7])));
        assert_eq!(lambda0(&e.to_relation(), &b).unwrap(), 3);
        let half = Relation::new(u(8), 1, [[0], [1], [2], [3]]).unwrap();
        assert_eq!(lambda0(&half, &b).unwrap(), 4);
    }

    #[test]
    fn checks_agree_on_all_binary_relations_of_three_elements() {
        let b = Budget::default();
        let uni = u(3);
        for mask in 0u32..512 {
            let r = Relation::from_predicate(uni, 2, |t| mask >> (t[0] * 3 + t[1]) & 1 == 1).unwrap();
            for a in 0u32..8 {
                let a = (0..3).filter(|&i| a >> i & 1 == 1).collect::<ElemSet>();
                let naive = is_support_naive(&a, &r, &b).unwrap();
                assert_eq!(is_support(&a, &r).unwrap(), naive);
                assert_eq!(is_support_single_flip(&a, &r).unwrap(), naive);
            }
            let brute = min_support_by_enumeration(&r, &uni.all(), &b, true).unwrap();
            let fast = lambda0_prime(&r, &b).unwrap();
            assert_eq!(fast.value, brute.value);
            assert_eq!(fast.witness.set, brute.witness.set);
            assert_eq!(lambda0_prime_within_domain(&r, &b).unwrap().value, brute.value);
        }
    }

    #[test]
    fn flip_check_needs_a_spare_element() {
        // N = 3, arity 2, A = {0}: only two elements outside A, so no flip
        // is available, yet (1,2) and (2,1) are equivalent.
        let r = Relation::new(u(3), 2, [[1, 2]]).unwrap();
        let a = set(&[0]);
        assert!(first_flip_violation(&r, |x| a.contains(x)).is_none());
        assert!(!is_support(&a, &r).unwrap());
        assert!(!is_support_single_flip(&a, &r).unwrap());
    }

    #[test]
    fn tight_budget_gives_bounds() {
        let r = Relation::new(u(10), 2, (0..5u32).map(|i| [2 * i, 2 * i + 1])).unwrap();
        let l = lambda0_prime(&r, &Budget { max_members: 1000, max_work: 2 }).unwrap();
        assert!(!l.exact || l.value == l.lower);
        assert!(l.lower <= l.value);
        assert!(l.witness.verified);
        let exact = lambda0_prime(&r, &Budget::default()).unwrap();
        assert!(l.lower <= exact.value && exact.value <= l.value);
    }
}
