//! Distinguishing systems: a set `A` and triples `(ā_i, b_i, c_i)` where an
//! atomic formula with parameters `ā_i ⊆ A` separates `b_i` from `c_i`.

use alloc::vec::Vec;

use crate::budget::Budget;
use crate::decompose::distinct_in_order;
use crate::elements::{Elem, ElemSet};
use crate::error::{Error, Result};
use crate::invariants::{first_flip_violation, lambda0_prime, type_classes};
use crate::relation::Relation;

/// `φ(ā, y) = R(args)` with `args[p] = 0` for `y` and `j + 1` for `a[j]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub a: Vec<Elem>,
    pub b: Elem,
    pub c: Elem,
    pub pattern: Vec<usize>,
}

impl Triple {
    fn instance(&self, y: Elem) -> Vec<Elem> {
        self.pattern.iter().map(|&s| if s == 0 { y } else { self.a[s - 1] }).collect()
    }

    /// `φ(ā, b)` and `φ(ā, c)`.
    pub fn values(&self, r: &Relation) -> (bool, bool) {
        (r.contains(&self.instance(self.b)), r.contains(&self.instance(self.c)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistinguishingSystem {
    pub a: ElemSet,
    pub triples: Vec<Triple>,
    /// The index `ℓ` whose triples were kept.
    pub level: usize,
    /// `⟨A^i_ℓ : ℓ < n⟩` after every step of the induction.
    pub stages: Vec<Vec<ElemSet>>,
    /// Every triple of the induction with its `ℓ(i)`.
    pub steps: Vec<(Triple, usize)>,
    /// `⌊min(λ'₀, N−n) / (n(n−1))⌋` and `⌊min(λ'₀, N−n) / (n(n+1))⌋`.
    pub stated_bound: usize,
    pub proved_bound: usize,
    /// Whether `λ'₀` was computed exactly (else the bounds use a lower bound).
    pub exact_bounds: bool,
    /// Whether the triples come from the type-matching phase rather than the
    /// induction.
    pub rematched: bool,
}

impl DistinguishingSystem {
    pub fn meets_stated_bound(&self) -> bool {
        self.triples.len() >= self.stated_bound
    }
}

/// Runs the induction: while `A = ⋃ A_ℓ` leaves at least `n+1` elements and a
/// one-coordinate change outside `A` flips `R`, record the flip and grow the
/// sets. The level with the most triples is kept; if that misses the stated
/// bound, the best type matching over other parameter sets is tried as well.
pub fn distinguishing_system(r: &Relation, budget: &Budget) -> Result<DistinguishingSystem> {
    let n = r.arity();
    if n < 2 {
        return Err(Error::Precondition("a distinguishing system needs arity at least 2".into()));
    }
    let size = r.universe().size() as usize;
    let mut sets = alloc::vec![ElemSet::new(); n];
    let mut stages = alloc::vec![sets.clone()];
    let mut steps: Vec<(Triple, usize)> = Vec::new();
    loop {
        let union = sets.iter().fold(ElemSet::new(), |acc, s| acc.union(s));
        if size - union.len() < n + 1 {
            break;
        }
        let Some((t, v, w)) = first_flip_violation(r, |x| union.contains(x)) else { break };
        let a: Vec<Elem> = distinct_in_order(&t).into_iter().filter(|&x| x != v).collect();
        let pattern = t
            .iter()
            .map(|&x| if x == v { 0 } else { 1 + a.iter().position(|&y| y == x).expect("listed") })
            .collect();
        let level = (0..n)
            .find(|&l| a.iter().all(|&x| !sets[l].contains(x)))
            .ok_or_else(|| Error::Construction("no level avoids the parameters".into()))?;
        let fresh: Vec<Elem> = a.iter().copied().filter(|&x| !union.contains(x)).collect();
        sets[level].insert(v);
        sets[level].insert(w);
        let target = if level > 0 { 0 } else { 1 };
        for x in fresh {
            sets[target].insert(x);
        }
        steps.push((Triple { a, b: v, c: w, pattern }, level));
        stages.push(sets.clone());
    }
    let mut counts = alloc::vec![0usize; n];
    for (_, l) in &steps {
        counts[*l] += 1;
    }
    let level = (0..n).max_by_key(|&l| (counts[l], core::cmp::Reverse(l))).expect("n >= 2");
    let a = (0..n).filter(|&l| l != level).fold(ElemSet::new(), |acc, l| acc.union(&sets[l]));
    let triples: Vec<Triple> = steps.iter().filter(|(_, l)| *l == level).map(|(t, _)| t.clone()).collect();

    let l0 = lambda0_prime(r, budget)?;
    let base = if l0.exact { l0.value } else { l0.lower };
    let m = base.min(size - n);
    let mut sys = DistinguishingSystem {
        a,
        triples,
        level,
        stages,
        steps,
        stated_bound: m / (n * (n - 1)),
        proved_bound: m / (n * (n + 1)),
        exact_bounds: l0.exact,
        rematched: false,
    };
    if !sys.meets_stated_bound() {
        if let Some((a, triples)) = best_matching(r, &sys.a, budget) {
            if triples.len() > sys.triples.len() {
                sys.a = a;
                sys.triples = triples;
                sys.rematched = true;
            }
        }
    }
    if let Some(problem) = verify_system(r, &sys.a, &sys.triples) {
        return Err(Error::Construction(problem));
    }
    if sys.triples.len() < sys.proved_bound {
        return Err(Error::Construction(alloc::format!(
            "{} triples, below the guaranteed {}",
            sys.triples.len(),
            sys.proved_bound
        )));
    }
    Ok(sys)
}

/// Checks clauses (a) to (d); returns a description of the first failure.
pub fn verify_system(r: &Relation, a: &ElemSet, triples: &[Triple]) -> Option<alloc::string::String> {
    let mut used = ElemSet::new();
    for (i, t) in triples.iter().enumerate() {
        if distinct_in_order(&t.a).len() != t.a.len() || t.a.iter().any(|&x| !a.contains(x)) {
            return Some(alloc::format!("triple {i}: parameters repeat or leave A"));
        }
        if a.contains(t.b) || a.contains(t.c) || t.b == t.c {
            return Some(alloc::format!("triple {i}: b or c in A, or b = c"));
        }
        if used.contains(t.b) || used.contains(t.c) {
            return Some(alloc::format!("triple {i}: b or c repeats an earlier pair"));
        }
        used.insert(t.b);
        used.insert(t.c);
        if t.pattern.len() != r.arity() || t.pattern.iter().any(|&s| s > t.a.len()) || !t.pattern.contains(&0) {
            return Some(alloc::format!("triple {i}: malformed atomic formula"));
        }
        let (vb, vc) = t.values(r);
        if vb == vc {
            return Some(alloc::format!("triple {i}: the atomic formula does not separate b and c"));
        }
    }
    None
}

/// Pairs from different basic types over `A`, as many as possible, each with
/// a separating atomic formula.
fn matching_over(r: &Relation, a: &ElemSet) -> Vec<Triple> {
    let mut classes = type_classes(r, a);
    classes.sort_by_key(|c| core::cmp::Reverse(c.len()));
    let total: usize = classes.iter().map(|c| c.len()).sum();
    let largest = classes.first().map_or(0, |c| c.len());
    let seq: Vec<Elem> = classes.iter().flatten().copied().collect();
    let pairs: Vec<(Elem, Elem)> = if 2 * largest <= total {
        let h = total / 2;
        (0..h).map(|i| (seq[i], seq[i + h])).collect()
    } else {
        seq[largest..].iter().enumerate().map(|(i, &c)| (seq[i], c)).collect()
    };
    pairs.into_iter().filter_map(|(b, c)| separating(r, a, b, c)).collect()
}

/// The first atomic `φ(ā, y)` with `ā ⊆ A` telling `b` from `c`.
fn separating(r: &Relation, a: &ElemSet, b: Elem, c: Elem) -> Option<Triple> {
    let n = r.arity();
    let mut slots: Vec<Elem> = alloc::vec![b];
    slots.extend(a.iter());
    let k = slots.len();
    let mut idx = alloc::vec![0usize; n];
    loop {
        if idx.contains(&0) {
            let t: Vec<Elem> = idx.iter().map(|&i| slots[i]).collect();
            let u: Vec<Elem> = t.iter().map(|&x| if x == b { c } else { x }).collect();
            if r.contains(&t) != r.contains(&u) {
                let params: Vec<Elem> = distinct_in_order(&t).into_iter().filter(|&x| x != b).collect();
                let pattern =
                    t.iter().map(|&x| if x == b { 0 } else { 1 + params.iter().position(|&y| y == x).expect("listed") }).collect();
                return Some(Triple { a: params, b, c, pattern });
            }
        }
        let mut j = n;
        loop {
            if j == 0 {
                return None;
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < k {
                break;
            }
            idx[j] = 0;
        }
    }
}

/// Largest type matching over all parameter sets when `2^N` fits the budget,
/// otherwise by toggling single elements starting from `start`.
fn best_matching(r: &Relation, start: &ElemSet, budget: &Budget) -> Option<(ElemSet, Vec<Triple>)> {
    let n = r.universe().size();
    if n <= 20 && (1u64 << n) <= budget.max_members.min(1 << 14) {
        let mut best: Option<(ElemSet, Vec<Triple>)> = None;
        for size in 0..=n as usize {
            crate::combinatorics::for_each_subset_of_size(&r.universe().elements().collect::<Vec<_>>(), size, |s| {
                let a: ElemSet = s.iter().collect();
                let t = matching_over(r, &a);
                if best.as_ref().is_none_or(|(_, b)| t.len() > b.len()) {
                    best = Some((a, t));
                }
                false
            });
        }
        return best;
    }
    let mut a = start.clone();
    let mut cur = matching_over(r, &a);
    loop {
        let mut improved = false;
        for x in r.universe().elements() {
            let mut b = a.clone();
            if !b.remove(x) {
                b.insert(x);
            }
            let t = matching_over(r, &b);
            if t.len() > cur.len() {
                a = b;
                cur = t;
                improved = true;
            }
        }
        if !improved {
            return Some((a, cur));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::Universe;

    #[test]
    fn full_relation_needs_no_triples() {
        let r = Relation::full(Universe::new(6).unwrap(), 2).unwrap();
        let s = distinguishing_system(&r, &Budget::default()).unwrap();
        assert!(s.triples.is_empty());
        assert_eq!(s.stated_bound, 0);
    }

    #[test]
    fn lifted_unary_relation() {
        let u = Universe::new(12).unwrap();
        let r = Relation::from_predicate(u, 2, |t| t[0] < 3).unwrap();
        let s = distinguishing_system(&r, &Budget::default()).unwrap();
        assert!(!s.triples.is_empty());
        assert!(verify_system(&r, &s.a, &s.triples).is_none());
        for t in &s.triples {
            let (x, y) = t.values(&r);
            assert_ne!(x, y);
        }
        assert!(s.meets_stated_bound());
    }

    #[test]
    fn unary_input_is_rejected() {
        let r = Relation::full(Universe::new(4).unwrap(), 1).unwrap();
        assert!(matches!(distinguishing_system(&r, &Budget::default()), Err(Error::Precondition(_))));
    }

    #[test]
    fn stages_grow_and_stay_disjoint() {
        let u = Universe::new(10).unwrap();
        let r = Relation::new(u, 2, [[0, 1], [2, 3], [4, 4], [5, 0], [6, 7]]).unwrap();
        let s = distinguishing_system(&r, &Budget::default()).unwrap();
        for w in s.stages.windows(2) {
            for l in 0..2 {
                assert!(w[0][l].is_subset(&w[1][l]));
            }
        }
        for st in &s.stages {
            assert!(st[0].is_disjoint(&st[1]));
        }
        assert_eq!(s.stages.len(), s.steps.len() + 1);
    }

    #[test]
    fn checker_rejects_bad_triples() {
        let u = Universe::new(6).unwrap();
        let r = Relation::new(u, 2, [[0, 1]]).unwrap();
        let a: ElemSet = [0u32].iter().collect();
        let good = Triple { a: alloc::vec![0], b: 1, c: 2, pattern: alloc::vec![1, 0] };
        assert!(verify_system(&r, &a, core::slice::from_ref(&good)).is_none());
        let bad = Triple { c: 3, ..good.clone() };
        assert!(verify_system(&r, &a, &[good.clone(), bad.clone()]).is_some());
        let same = Triple { b: 2, c: 3, ..good };
        assert!(verify_system(&r, &a, &[same]).is_some());
    }
}
