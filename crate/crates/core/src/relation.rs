//! Relations on a finite universe and the two structured special cases the
//! quantifier zoo needs: equivalence relations and partial injections.

use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::hash::{Hash, Hasher};

use crate::combinatorics;
use crate::elements::{Elem, ElemSet, Permutation, Universe};
use crate::error::{Error, Result};

/// Largest `N^n` for which a packed membership bitset is kept.
const DENSE_LIMIT: u128 = 1 << 22;

/// An `n`-ary relation on a universe.
///
/// Tuples are kept as a sorted, duplicate-free flat array. When `N^n` is
/// small a packed bitset is built as well and used for membership; the two
/// views always agree.
#[derive(Clone)]
pub struct Relation {
    universe: Universe,
    arity: usize,
    tuples: Vec<Elem>,
    dense: Option<Vec<u64>>,
}

impl Relation {
    pub fn new<I, T>(universe: Universe, arity: usize, tuples: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[Elem]>,
    {
        if arity == 0 {
            return Err(Error::Arity { expected: 1, found: 0 });
        }
        let mut flat = Vec::new();
        for t in tuples {
            let t = t.as_ref();
            if t.len() != arity {
                return Err(Error::Arity { expected: arity, found: t.len() });
            }
            universe.check_all(t)?;
            flat.extend_from_slice(t);
        }
        Ok(Self::from_flat(universe, arity, flat))
    }

    /// Builds from a flat tuple array whose coordinates are already known to
    /// be in range.
    pub(crate) fn from_flat(universe: Universe, arity: usize, flat: Vec<Elem>) -> Self {
        let mut rows: Vec<&[Elem]> = flat.chunks_exact(arity).collect();
        rows.sort_unstable();
        rows.dedup();
        let tuples: Vec<Elem> = rows.into_iter().flatten().copied().collect();
        let mut r = Relation { universe, arity, tuples, dense: None };
        r.build_dense();
        r
    }

    fn build_dense(&mut self) {
        let cells = combinatorics::pow(self.universe.size() as u64, self.arity as u64);
        if cells > DENSE_LIMIT {
            return;
        }
        let mut bits = alloc::vec![0u64; (cells as usize).div_ceil(64)];
        for t in self.tuples.chunks_exact(self.arity) {
            let i = tuple_index(t, self.universe.size());
            bits[i / 64] |= 1 << (i % 64);
        }
        self.dense = Some(bits);
    }

    pub fn empty(universe: Universe, arity: usize) -> Result<Self> {
        Self::new(universe, arity, core::iter::empty::<Vec<Elem>>())
    }

    /// `U^n`. Refuses when `N^n` does not fit the dense view.
    pub fn full(universe: Universe, arity: usize) -> Result<Self> {
        let cells = combinatorics::pow(universe.size() as u64, arity as u64);
        if cells > DENSE_LIMIT {
            return Err(Error::BudgetExceeded { what: "full relation", estimate: cells, limit: DENSE_LIMIT });
        }
        let mut flat = Vec::with_capacity(cells as usize * arity);
        for_each_tuple(universe.size(), arity, |t| {
            flat.extend_from_slice(t);
            false
        });
        Ok(Self::from_flat(universe, arity, flat))
    }

    /// A unary relation from a set.
    pub fn unary(universe: Universe, set: &ElemSet) -> Result<Self> {
        universe.check_set(set)?;
        Ok(Self::from_flat(universe, 1, set.to_vec()))
    }

    /// All tuples of `U^n` satisfying `pred`.
    pub fn from_predicate(universe: Universe, arity: usize, mut pred: impl FnMut(&[Elem]) -> bool) -> Result<Self> {
        if arity == 0 {
            return Err(Error::Arity { expected: 1, found: 0 });
        }
        let cells = combinatorics::pow(universe.size() as u64, arity as u64);
        if cells > DENSE_LIMIT {
            return Err(Error::BudgetExceeded { what: "tuple space", estimate: cells, limit: DENSE_LIMIT });
        }
        let mut flat = Vec::new();
        for_each_tuple(universe.size(), arity, |t| {
            if pred(t) {
                flat.extend_from_slice(t);
            }
            false
        });
        Ok(Self::from_flat(universe, arity, flat))
    }

    #[inline]
    pub fn universe(&self) -> Universe {
        self.universe
    }

    #[inline]
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.tuples.len() / self.arity
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    /// Tuples in lexicographic order.
    pub fn tuples(&self) -> core::slice::ChunksExact<'_, Elem> {
        self.tuples.chunks_exact(self.arity)
    }

    pub fn has_dense_view(&self) -> bool {
        self.dense.is_some()
    }

    #[inline]
    pub fn contains(&self, t: &[Elem]) -> bool {
        debug_assert_eq!(t.len(), self.arity);
        match &self.dense {
            Some(bits) => {
                if t.iter().any(|&x| x >= self.universe.size()) {
                    return false;
                }
                let i = tuple_index(t, self.universe.size());
                bits[i / 64] >> (i % 64) & 1 == 1
            }
            None => self.contains_sorted(t),
        }
    }

    /// Membership through the sorted tuple list only.
    pub fn contains_sorted(&self, t: &[Elem]) -> bool {
        let n = self.len();
        let (mut lo, mut hi) = (0usize, n);
        while lo < hi {
            let mid = (lo + hi) / 2;
            let row = &self.tuples[mid * self.arity..(mid + 1) * self.arity];
            match row.cmp(t) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return true,
            }
        }
        false
    }

    /// `Dom(R)`: every element occurring in some tuple.
    pub fn domain(&self) -> ElemSet {
        self.tuples.iter().copied().collect()
    }

    /// The image `σ(R)`.
    pub fn permute(&self, sigma: &Permutation) -> Relation {
        let flat = self.tuples.iter().map(|&x| sigma.apply(x)).collect();
        Self::from_flat(self.universe, self.arity, flat)
    }

    /// `R ↾ S`: tuples with every coordinate in `set`.
    pub fn restrict(&self, set: &ElemSet) -> Relation {
        let flat = self
            .tuples()
            .filter(|t| t.iter().all(|&x| set.contains(x)))
            .flatten()
            .copied()
            .collect();
        Self::from_flat(self.universe, self.arity, flat)
    }

    fn compatible(&self, other: &Relation) -> Result<()> {
        self.universe.same(&other.universe)?;
        if self.arity != other.arity {
            return Err(Error::Arity { expected: self.arity, found: other.arity });
        }
        Ok(())
    }

    pub fn union(&self, other: &Relation) -> Result<Relation> {
        self.compatible(other)?;
        let mut flat = self.tuples.clone();
        flat.extend_from_slice(&other.tuples);
        Ok(Self::from_flat(self.universe, self.arity, flat))
    }

    pub fn intersection(&self, other: &Relation) -> Result<Relation> {
        self.compatible(other)?;
        let flat = self.tuples().filter(|t| other.contains(t)).flatten().copied().collect();
        Ok(Self::from_flat(self.universe, self.arity, flat))
    }

    pub fn difference(&self, other: &Relation) -> Result<Relation> {
        self.compatible(other)?;
        let flat = self.tuples().filter(|t| !other.contains(t)).flatten().copied().collect();
        Ok(Self::from_flat(self.universe, self.arity, flat))
    }

    pub fn complement(&self) -> Result<Relation> {
        Relation::from_predicate(self.universe, self.arity, |t| !self.contains(t))
    }

    /// The relation as a set, when it is unary.
    pub fn as_set(&self) -> Result<ElemSet> {
        if self.arity != 1 {
            return Err(Error::Arity { expected: 1, found: self.arity });
        }
        Ok(self.tuples.iter().copied().collect())
    }
}

impl PartialEq for Relation {
    fn eq(&self, other: &Self) -> bool {
        self.universe == other.universe && self.arity == other.arity && self.tuples == other.tuples
    }
}

impl Eq for Relation {}

impl Hash for Relation {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.universe.hash(state);
        self.arity.hash(state);
        self.tuples.hash(state);
    }
}

/// Relations are ordered by universe, arity, then cardinality, then the
/// sorted tuple lists lexicographically.
impl Ord for Relation {
    fn cmp(&self, other: &Self) -> Ordering {
        self.universe
            .cmp(&other.universe)
            .then(self.arity.cmp(&other.arity))
            .then(self.tuples.len().cmp(&other.tuples.len()))
            .then_with(|| self.tuples.cmp(&other.tuples))
    }
}

impl PartialOrd for Relation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Relation(N={}, n={}, ", self.universe.size(), self.arity)?;
        f.debug_set().entries(self.tuples()).finish()?;
        f.write_str(")")
    }
}

#[inline]
pub(crate) fn tuple_index(t: &[Elem], n: u32) -> usize {
    t.iter().fold(0usize, |acc, &x| acc * n as usize + x as usize)
}

/// Calls `f` on every tuple of `0..n` of the given length in lexicographic
/// order; stops when `f` returns true.
pub fn for_each_tuple(n: u32, len: usize, mut f: impl FnMut(&[Elem]) -> bool) -> bool {
    let mut t = alloc::vec![0 as Elem; len];
    if n == 0 && len > 0 {
        return false;
    }
    loop {
        if f(&t) {
            return true;
        }
        let mut i = len;
        loop {
            if i == 0 {
                return false;
            }
            i -= 1;
            t[i] += 1;
            if t[i] < n {
                break;
            }
            t[i] = 0;
        }
    }
}

/// `b̄ ≈_A c̄`: positions in `A` agree, membership in `A` agrees, and the
/// equality patterns agree.
pub fn approx_eq(b: &[Elem], c: &[Elem], a: &ElemSet) -> Result<bool> {
    if b.len() != c.len() {
        return Err(Error::Arity { expected: b.len(), found: c.len() });
    }
    for i in 0..b.len() {
        let (bi, ci) = (a.contains(b[i]), a.contains(c[i]));
        if bi != ci || (bi && b[i] != c[i]) {
            return Ok(false);
        }
    }
    for i in 0..b.len() {
        for j in i + 1..b.len() {
            if (b[i] == b[j]) != (c[i] == c[j]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `Σ R_ℓ`: concatenations `ā₀⌢⋯⌢ā_{k-1}` with `ā_ℓ ∈ R_ℓ`.
pub fn sum_relations(rels: &[Relation]) -> Result<Relation> {
    let first = rels.first().ok_or(Error::Arity { expected: 1, found: 0 })?;
    for r in rels {
        first.universe.same(&r.universe)?;
    }
    let arity: usize = rels.iter().map(|r| r.arity).sum();
    let mut flat: Vec<Elem> = Vec::new();
    let mut prefix: Vec<Elem> = Vec::new();
    fn rec(rels: &[Relation], prefix: &mut Vec<Elem>, out: &mut Vec<Elem>) {
        match rels.split_first() {
            None => out.extend_from_slice(prefix),
            Some((r, rest)) => {
                for t in r.tuples() {
                    let len = prefix.len();
                    prefix.extend_from_slice(t);
                    rec(rest, prefix, out);
                    prefix.truncate(len);
                }
            }
        }
    }
    rec(rels, &mut prefix, &mut flat);
    Ok(Relation::from_flat(first.universe, arity, flat))
}

/// An equivalence relation on a subset `Dom(E)` of the universe.
///
/// Blocks are kept sorted, each block ascending and blocks ordered by their
/// least element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EquivalenceRelation {
    universe: Universe,
    blocks: Vec<Vec<Elem>>,
}

impl EquivalenceRelation {
    pub fn new(universe: Universe, blocks: Vec<Vec<Elem>>) -> Result<Self> {
        let mut seen = ElemSet::new();
        let mut blocks: Vec<Vec<Elem>> = blocks;
        for b in blocks.iter_mut() {
            if b.is_empty() {
                return Err(Error::InvalidStructure("empty equivalence class".into()));
            }
            universe.check_all(b)?;
            b.sort_unstable();
            for &x in b.iter() {
                if !seen.insert(x) {
                    return Err(Error::InvalidStructure(format!("element {x} lies in two classes")));
                }
            }
        }
        blocks.sort_unstable();
        Ok(EquivalenceRelation { universe, blocks })
    }

    /// Reads an equivalence relation off a binary relation, which must be
    /// reflexive on its domain, symmetric and transitive.
    pub fn from_relation(r: &Relation) -> Result<Self> {
        if r.arity() != 2 {
            return Err(Error::Arity { expected: 2, found: r.arity() });
        }
        let dom = r.domain();
        let mut blocks: Vec<Vec<Elem>> = Vec::new();
        let mut placed = ElemSet::new();
        for x in dom.iter() {
            if placed.contains(x) {
                continue;
            }
            let block: Vec<Elem> = dom.iter().filter(|&y| r.contains(&[x, y])).collect();
            for &y in &block {
                placed.insert(y);
            }
            blocks.push(block);
        }
        let e = EquivalenceRelation::new(r.universe(), blocks)?;
        if &e.to_relation() != r {
            return Err(Error::InvalidStructure("relation is not an equivalence relation on its domain".into()));
        }
        Ok(e)
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn blocks(&self) -> &[Vec<Elem>] {
        &self.blocks
    }

    pub fn num_classes(&self) -> usize {
        self.blocks.len()
    }

    pub fn dom(&self) -> ElemSet {
        self.blocks.iter().flatten().copied().collect()
    }

    pub fn to_relation(&self) -> Relation {
        let mut flat = Vec::new();
        for b in &self.blocks {
            for &x in b {
                for &y in b {
                    flat.push(x);
                    flat.push(y);
                }
            }
        }
        Relation::from_flat(self.universe, 2, flat)
    }

    /// `x/E`; for `x ∉ Dom(E)` this is `U ∖ Dom(E)`.
    pub fn class_of(&self, x: Elem) -> ElemSet {
        match self.blocks.iter().find(|b| b.contains(&x)) {
            Some(b) => b.iter().collect(),
            None => self.dom().complement(self.universe),
        }
    }

    /// The partition of the whole universe into the classes plus, when it
    /// is nonempty, the outside block `U ∖ Dom(E)` (listed last).
    pub fn universe_partition(&self) -> Vec<ElemSet> {
        let mut parts: Vec<ElemSet> = self.blocks.iter().map(|b| b.iter().collect()).collect();
        let outside = self.dom().complement(self.universe);
        if !outside.is_empty() {
            parts.push(outside);
        }
        parts
    }

    pub fn permute(&self, sigma: &Permutation) -> EquivalenceRelation {
        let blocks = self.blocks.iter().map(|b| sigma.apply_tuple(b)).collect();
        EquivalenceRelation::new(self.universe, blocks).expect("a permutation preserves the shape")
    }
}

/// A partial one-to-one function on the universe.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialInjection {
    universe: Universe,
    pairs: Vec<(Elem, Elem)>,
}

impl PartialInjection {
    pub fn new(universe: Universe, pairs: Vec<(Elem, Elem)>) -> Result<Self> {
        let mut pairs = pairs;
        pairs.sort_unstable();
        pairs.dedup();
        let mut sources = ElemSet::new();
        let mut targets = ElemSet::new();
        for &(s, t) in &pairs {
            universe.check(s)?;
            universe.check(t)?;
            if !sources.insert(s) {
                return Err(Error::InvalidStructure(format!("{s} has two images")));
            }
            if !targets.insert(t) {
                return Err(Error::InvalidStructure(format!("{t} has two preimages")));
            }
        }
        Ok(PartialInjection { universe, pairs })
    }

    pub fn from_relation(r: &Relation) -> Result<Self> {
        if r.arity() != 2 {
            return Err(Error::Arity { expected: 2, found: r.arity() });
        }
        PartialInjection::new(r.universe(), r.tuples().map(|t| (t[0], t[1])).collect())
    }

    pub fn to_relation(&self) -> Relation {
        let flat = self.pairs.iter().flat_map(|&(s, t)| [s, t]).collect();
        Relation::from_flat(self.universe, 2, flat)
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn pairs(&self) -> &[(Elem, Elem)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `Dom(h)`, the set of sources.
    pub fn domain(&self) -> ElemSet {
        self.pairs.iter().map(|p| p.0).collect()
    }

    pub fn range(&self) -> ElemSet {
        self.pairs.iter().map(|p| p.1).collect()
    }

    pub fn apply(&self, x: Elem) -> Option<Elem> {
        self.pairs.binary_search_by_key(&x, |p| p.0).ok().map(|i| self.pairs[i].1)
    }

    pub fn permute(&self, sigma: &Permutation) -> PartialInjection {
        let pairs = self.pairs.iter().map(|&(s, t)| (sigma.apply(s), sigma.apply(t))).collect();
        PartialInjection::new(self.universe, pairs).expect("a permutation preserves injectivity")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn u(n: u32) -> Universe {
        Universe::new(n).unwrap()
    }

    #[test]
    fn relation_normalizes_and_checks() {
        let r = Relation::new(u(4), 2, [[1, 2], [0, 3], [1, 2]]).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r.tuples().next().unwrap(), &[0, 3]);
        assert!(r.contains(&[1, 2]) && !r.contains(&[2, 1]));
        assert_eq!(r.domain().to_vec(), vec![0, 1, 2, 3]);
        assert!(Relation::new(u(4), 2, [[1, 4]]).is_err());
        assert!(Relation::new(u(4), 2, [vec![1]]).is_err());
    }

    #[test]
    fn dense_and_sorted_views_agree() {
        let r = Relation::new(u(5), 3, [[1, 2, 3], [4, 4, 0], [0, 0, 0]]).unwrap();
        assert!(r.has_dense_view());
        for_each_tuple(5, 3, |t| {
            assert_eq!(r.contains(t), r.contains_sorted(t));
            false
        });
    }

    #[test]
    fn approx_eq_examples() {
        let a: ElemSet = [0u32].iter().collect();
        assert!(approx_eq(&[0, 5], &[0, 6], &a).unwrap());
        assert!(!approx_eq(&[0, 0], &[0, 1], &a).unwrap());
        assert!(approx_eq(&[2, 3], &[2, 3], &ElemSet::new()).unwrap());
        assert!(approx_eq(&[1], &[1, 2], &a).is_err());
    }

    #[test]
    fn sums() {
        let r0 = Relation::new(u(4), 1, [[0], [1]]).unwrap();
        let r1 = Relation::new(u(4), 1, [[2]]).unwrap();
        let s = sum_relations(&[r0.clone(), r1]).unwrap();
        assert_eq!(s, Relation::new(u(4), 2, [[0, 2], [1, 2]]).unwrap());
        let e = Relation::empty(u(4), 2).unwrap();
        assert!(sum_relations(&[r0, e]).unwrap().is_empty());
        assert!(sum_relations(&[]).is_err());
    }

    #[test]
    fn equivalence_round_trip() {
        let e = EquivalenceRelation::new(u(6), vec![vec![3, 4], vec![0, 2, 1], vec![5]]).unwrap();
        assert_eq!(e.blocks(), &[vec![0, 1, 2], vec![3, 4], vec![5]]);
        let r = e.to_relation();
        assert_eq!(r.len(), 9 + 4 + 1);
        assert_eq!(EquivalenceRelation::from_relation(&r).unwrap(), e);
        let bad = Relation::new(u(6), 2, [[0, 1]]).unwrap();
        assert!(EquivalenceRelation::from_relation(&bad).is_err());
        let small = EquivalenceRelation::new(u(6), vec![vec![0, 1]]).unwrap();
        assert_eq!(small.class_of(4).to_vec(), vec![2, 3, 4, 5]);
        assert!(EquivalenceRelation::new(u(6), vec![vec![0], vec![0, 1]]).is_err());
    }

    #[test]
    fn injections() {
        let h = PartialInjection::new(u(8), vec![(1, 4), (0, 3)]).unwrap();
        assert_eq!(h.apply(1), Some(4));
        assert_eq!(h.apply(2), None);
        assert_eq!(PartialInjection::from_relation(&h.to_relation()).unwrap(), h);
        assert!(PartialInjection::new(u(8), vec![(0, 3), (1, 3)]).is_err());
        assert!(PartialInjection::new(u(8), vec![(0, 3), (0, 4)]).is_err());
    }
}
