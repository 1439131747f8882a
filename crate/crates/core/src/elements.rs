//! Universes, element sets and permutations.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::error::{Error, Result};

/// An element of a universe, identified with `0..N`.
pub type Elem = u32;

/// A finite universe `{0, ..., size-1}` with `size >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Universe {
    size: u32,
}

impl Universe {
    pub fn new(size: u32) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyUniverse);
        }
        Ok(Universe { size })
    }

    #[inline]
    pub fn size(&self) -> u32 {
        self.size
    }

    /// `⌊N/2⌋`, the "half the universe" bound.
    #[inline]
    pub fn half(&self) -> u32 {
        self.size / 2
    }

    pub fn elements(&self) -> core::ops::Range<Elem> {
        0..self.size
    }

    pub fn all(&self) -> ElemSet {
        ElemSet::from_iter(self.elements())
    }

    pub fn check(&self, x: Elem) -> Result<()> {
        if x >= self.size {
            return Err(Error::OutOfRange { element: x, size: self.size });
        }
        Ok(())
    }

    pub fn check_all(&self, xs: &[Elem]) -> Result<()> {
        xs.iter().try_for_each(|&x| self.check(x))
    }

    pub fn check_set(&self, set: &ElemSet) -> Result<()> {
        match set.last() {
            Some(m) => self.check(m),
            None => Ok(()),
        }
    }

    pub(crate) fn same(&self, other: &Universe) -> Result<()> {
        if self.size != other.size {
            return Err(Error::UniverseMismatch { left: self.size, right: other.size });
        }
        Ok(())
    }
}

/// A finite set of elements, stored as a packed bitset.
///
/// Equality ignores trailing zero words. The order is lexicographic on the
/// ascending element lists, so `{0, 5} < {1, 2}` and `{0} < {0, 1}`.
#[derive(Clone, Default)]
pub struct ElemSet {
    words: Vec<u64>,
}

impl ElemSet {
    pub fn new() -> Self {
        ElemSet { words: Vec::new() }
    }

    fn normalize(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    #[inline]
    pub fn contains(&self, x: Elem) -> bool {
        let w = (x / 64) as usize;
        w < self.words.len() && self.words[w] >> (x % 64) & 1 == 1
    }

    pub fn insert(&mut self, x: Elem) -> bool {
        let w = (x / 64) as usize;
        if w >= self.words.len() {
            self.words.resize(w + 1, 0);
        }
        let had = self.words[w] >> (x % 64) & 1 == 1;
        self.words[w] |= 1 << (x % 64);
        !had
    }

    pub fn remove(&mut self, x: Elem) -> bool {
        let w = (x / 64) as usize;
        if w >= self.words.len() {
            return false;
        }
        let had = self.words[w] >> (x % 64) & 1 == 1;
        self.words[w] &= !(1 << (x % 64));
        self.normalize();
        had
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Elem> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            core::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros();
                w &= w - 1;
                Some(i as u32 * 64 + b)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<Elem> {
        self.iter().collect()
    }

    pub fn first(&self) -> Option<Elem> {
        self.iter().next()
    }

    pub fn last(&self) -> Option<Elem> {
        let (i, w) = self.words.iter().enumerate().rev().find(|(_, &w)| w != 0)?;
        Some(i as u32 * 64 + 63 - w.leading_zeros())
    }

    pub fn union(&self, other: &ElemSet) -> ElemSet {
        let n = self.words.len().max(other.words.len());
        let words = (0..n)
            .map(|i| self.words.get(i).copied().unwrap_or(0) | other.words.get(i).copied().unwrap_or(0))
            .collect();
        ElemSet { words }
    }

    pub fn intersection(&self, other: &ElemSet) -> ElemSet {
        let words = self.words.iter().zip(other.words.iter()).map(|(a, b)| a & b).collect();
        let mut s = ElemSet { words };
        s.normalize();
        s
    }

    pub fn difference(&self, other: &ElemSet) -> ElemSet {
        let words = self
            .words
            .iter()
            .enumerate()
            .map(|(i, &a)| a & !other.words.get(i).copied().unwrap_or(0))
            .collect();
        let mut s = ElemSet { words };
        s.normalize();
        s
    }

    pub fn is_subset(&self, other: &ElemSet) -> bool {
        self.words
            .iter()
            .enumerate()
            .all(|(i, &a)| a & !other.words.get(i).copied().unwrap_or(0) == 0)
    }

    pub fn is_disjoint(&self, other: &ElemSet) -> bool {
        self.words.iter().zip(other.words.iter()).all(|(a, b)| a & b == 0)
    }

    /// Complement within a universe.
    pub fn complement(&self, universe: Universe) -> ElemSet {
        universe.all().difference(self)
    }
}

impl PartialEq for ElemSet {
    fn eq(&self, other: &Self) -> bool {
        self.words == other.words
    }
}

impl Eq for ElemSet {}

impl core::hash::Hash for ElemSet {
    fn hash<H: core::hash::Hasher>(&self, state: &mut H) {
        self.words.hash(state);
    }
}

impl Ord for ElemSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for ElemSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl FromIterator<Elem> for ElemSet {
    fn from_iter<I: IntoIterator<Item = Elem>>(iter: I) -> Self {
        let mut s = ElemSet::new();
        for x in iter {
            s.insert(x);
        }
        s
    }
}

impl<'a> FromIterator<&'a Elem> for ElemSet {
    fn from_iter<I: IntoIterator<Item = &'a Elem>>(iter: I) -> Self {
        iter.into_iter().copied().collect()
    }
}

impl fmt::Debug for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A permutation of a universe, `perm[x]` is the image of `x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    map: Vec<Elem>,
}

impl Permutation {
    pub fn identity(universe: Universe) -> Self {
        Permutation { map: universe.elements().collect() }
    }

    pub fn from_images(map: Vec<Elem>) -> Result<Self> {
        let n = map.len();
        let mut seen = alloc::vec![false; n];
        for &y in &map {
            if y as usize >= n || seen[y as usize] {
                return Err(Error::InvalidStructure(alloc::format!(
                    "{map:?} is not a permutation of 0..{n}"
                )));
            }
            seen[y as usize] = true;
        }
        Ok(Permutation { map })
    }

    /// Extends an injective partial map `pairs` (source, target) to a
    /// permutation: unmapped sources are sent, in increasing order, to the
    /// unused targets in increasing order.
    pub fn extend_partial(universe: Universe, pairs: &[(Elem, Elem)]) -> Result<Self> {
        let n = universe.size() as usize;
        let mut map = alloc::vec![u32::MAX; n];
        let mut used = alloc::vec![false; n];
        for &(s, t) in pairs {
            universe.check(s)?;
            universe.check(t)?;
            if map[s as usize] == t {
                continue;
            }
            if map[s as usize] != u32::MAX || used[t as usize] {
                return Err(Error::InvalidStructure(alloc::format!(
                    "partial map {pairs:?} is not injective"
                )));
            }
            map[s as usize] = t;
            used[t as usize] = true;
        }
        let mut free = (0..n as u32).filter(|&t| !used[t as usize]);
        for slot in map.iter_mut() {
            if *slot == u32::MAX {
                *slot = free.next().expect("counts of free sources and targets agree");
            }
        }
        Ok(Permutation { map })
    }

    /// The permutation exchanging `a_i` with `b_i` for every pair. The pairs
    /// must be pairwise disjoint.
    pub fn transpositions(universe: Universe, pairs: &[(Elem, Elem)]) -> Result<Self> {
        let mut p = Permutation::identity(universe);
        for &(a, b) in pairs {
            universe.check(a)?;
            universe.check(b)?;
            p.map.swap(a as usize, b as usize);
        }
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    #[inline]
    pub fn apply(&self, x: Elem) -> Elem {
        self.map[x as usize]
    }

    pub fn apply_tuple(&self, t: &[Elem]) -> Vec<Elem> {
        t.iter().map(|&x| self.apply(x)).collect()
    }

    pub fn apply_set(&self, s: &ElemSet) -> ElemSet {
        s.iter().map(|x| self.apply(x)).collect()
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = alloc::vec![0; self.map.len()];
        for (x, &y) in self.map.iter().enumerate() {
            inv[y as usize] = x as u32;
        }
        Permutation { map: inv }
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation { map: other.map.iter().map(|&x| self.apply(x)).collect() }
    }

    pub fn images(&self) -> &[Elem] {
        &self.map
    }
}
