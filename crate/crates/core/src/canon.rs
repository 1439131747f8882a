//! Canonical forms of relations under permutations of the universe.
//!
//! Up to `N = 8` the canonical form is the least image of `R` over all
//! permutations (in the order of [`Relation`]). Above that an
//! individualization-refinement search is used: colour refinement seeded by
//! occurrence patterns, then every branch of the search tree is explored and
//! the least leaf image is kept. Both are complete invariants, so
//! `canonical_form(R) == canonical_form(S)` iff `R` and `S` are isomorphic,
//! but they pick different representatives.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::combinatorics;
use crate::elements::{Elem, Permutation};
use crate::error::{Error, Result};
use crate::relation::Relation;

/// Largest universe handled by exhaustive permutation search.
pub const EXHAUSTIVE_MAX: u32 = 8;

/// Default cap on leaves of the refinement search tree.
pub const DEFAULT_LEAF_BUDGET: u64 = 200_000;

/// The canonical representative of `R` and a permutation `π` with
/// `π(R)` equal to it.
pub fn canonical_form(r: &Relation) -> Result<(Relation, Permutation)> {
    if r.universe().size() <= EXHAUSTIVE_MAX {
        Ok(canonical_form_exhaustive(r))
    } else {
        canonical_form_refined(r, DEFAULT_LEAF_BUDGET)
    }
}

/// Least image over all `N!` permutations.
pub fn canonical_form_exhaustive(r: &Relation) -> (Relation, Permutation) {
    let u = r.universe();
    let mut images: Vec<Elem> = u.elements().collect();
    let mut best: Option<(Relation, Vec<Elem>)> = None;
    loop {
        let p = Permutation::from_images(images.clone()).expect("a permutation");
        let img = r.permute(&p);
        if best.as_ref().is_none_or(|(b, _)| img < *b) {
            best = Some((img, images.clone()));
        }
        if !combinatorics::next_permutation(&mut images) {
            break;
        }
    }
    let (rel, images) = best.expect("at least the identity");
    (rel, Permutation::from_images(images).expect("a permutation"))
}

/// Individualization-refinement search exploring every branch; fails when
/// more than `leaf_budget` leaves would be visited.
pub fn canonical_form_refined(r: &Relation, leaf_budget: u64) -> Result<(Relation, Permutation)> {
    let n = r.universe().size() as usize;
    let index = Incidence::new(r);
    let mut colors = alloc::vec![0u32; n];
    index.refine(&mut colors);
    let mut search = Search { r, index: &index, best: None, leaves: 0, leaf_budget };
    search.descend(colors)?;
    let (rel, images) = search.best.expect("the search reaches a leaf");
    Ok((rel, Permutation::from_images(images)?))
}

/// For each element, the tuples it occurs in.
struct Incidence<'a> {
    by_elem: Vec<Vec<usize>>,
    rows: Vec<&'a [Elem]>,
}

impl<'a> Incidence<'a> {
    fn new(r: &'a Relation) -> Self {
        let rows: Vec<&[Elem]> = r.tuples().collect();
        let mut by_elem = alloc::vec![Vec::new(); r.universe().size() as usize];
        for (i, t) in rows.iter().enumerate() {
            let mut seen: Vec<Elem> = Vec::new();
            for &x in t.iter() {
                if !seen.contains(&x) {
                    seen.push(x);
                    by_elem[x as usize].push(i);
                }
            }
        }
        Incidence { by_elem, rows }
    }

    /// Colour refinement to a stable partition. New colours are ranked by
    /// (old colour, signature), so cells keep their relative order.
    fn refine(&self, colors: &mut [u32]) {
        let n = colors.len();
        let mut count = distinct(colors);
        loop {
            let sigs: Vec<(u32, Vec<(u64, Vec<u32>)>)> = (0..n)
                .map(|x| {
                    let mut sig: Vec<(u64, Vec<u32>)> = self.by_elem[x]
                        .iter()
                        .map(|&i| {
                            let t = self.rows[i];
                            let mask = t
                                .iter()
                                .enumerate()
                                .filter(|(_, &y)| y as usize == x)
                                .fold(0u64, |m, (p, _)| m | 1 << p);
                            (mask, t.iter().map(|&y| colors[y as usize]).collect())
                        })
                        .collect();
                    sig.sort_unstable();
                    (colors[x], sig)
                })
                .collect();
            let ranks: BTreeMap<&(u32, Vec<(u64, Vec<u32>)>), u32> = {
                let mut keys: Vec<_> = sigs.iter().collect();
                keys.sort_unstable();
                keys.dedup();
                keys.into_iter().enumerate().map(|(i, k)| (k, i as u32)).collect()
            };
            for x in 0..n {
                colors[x] = ranks[&sigs[x]];
            }
            let c = distinct(colors);
            if c == count {
                return;
            }
            count = c;
        }
    }
}

fn distinct(colors: &[u32]) -> usize {
    let mut v = colors.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

struct Search<'a> {
    r: &'a Relation,
    index: &'a Incidence<'a>,
    best: Option<(Relation, Vec<Elem>)>,
    leaves: u64,
    leaf_budget: u64,
}

impl Search<'_> {
    fn is_twin(&self, a: Elem, b: Elem) -> bool {
        let swap = |z: Elem| if z == a { b } else if z == b { a } else { z };
        let mut buf: Vec<Elem> = Vec::new();
        let touched = self.index.by_elem[a as usize].iter().chain(&self.index.by_elem[b as usize]);
        touched.into_iter().all(|&i| {
            buf.clear();
            buf.extend(self.index.rows[i].iter().map(|&z| swap(z)));
            self.r.contains(&buf)
        })
    }

    fn descend(&mut self, colors: Vec<u32>) -> Result<()> {
        let n = colors.len();
        let mut sizes = alloc::vec![0usize; n];
        for &c in &colors {
            sizes[c as usize] += 1;
        }
        let target = (0..n).find(|&c| sizes[c] > 1);
        let Some(cell) = target else {
            self.leaves += 1;
            if self.leaves > self.leaf_budget {
                return Err(Error::BudgetExceeded {
                    what: "canonical form search leaves",
                    estimate: self.leaves as u128,
                    limit: self.leaf_budget as u128,
                });
            }
            let images = colors;
            let img = self.r.permute(&Permutation::from_images(images.clone())?);
            if self.best.as_ref().is_none_or(|(b, _)| img < *b) {
                self.best = Some((img, images));
            }
            return Ok(());
        };
        let mut explored: Vec<Elem> = Vec::new();
        for x in 0..n {
            if colors[x] as usize != cell {
                continue;
            }
            // A transposition with an explored candidate that is an
            // automorphism yields the same set of leaf images.
            let x = x as Elem;
            if explored.iter().any(|&y| self.is_twin(y, x)) {
                continue;
            }
            explored.push(x);
            let x = x as usize;
            let mut next: Vec<u32> = colors
                .iter()
                .enumerate()
                .map(|(y, &c)| 2 * c + u32::from(c as usize == cell && y != x))
                .collect();
            let mut keys = next.clone();
            keys.sort_unstable();
            keys.dedup();
            for c in next.iter_mut() {
                *c = keys.binary_search(c).expect("present") as u32;
            }
            self.index.refine(&mut next);
            self.descend(next)?;
        }
        Ok(())
    }
}

/// Whether two relations are isomorphic.
pub fn isomorphic(a: &Relation, b: &Relation) -> Result<bool> {
    if a.universe() != b.universe() || a.arity() != b.arity() || a.len() != b.len() {
        return Ok(false);
    }
    Ok(canonical_form(a)?.0 == canonical_form(b)?.0)
}
