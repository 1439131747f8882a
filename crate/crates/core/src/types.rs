//! Basic types: the signed atomic diagram of a tuple over a parameter set.
//!
//! For `m` free variables, a sorted parameter list `a_0 < ... < a_{p-1}` and
//! relations `R_0, ..., R_{r-1}`, the atomic patterns are enumerated in a
//! fixed order:
//!
//! 1. equalities `x_i = x_j` for `i < j`;
//! 2. equalities `x_i = a_q` (these can be switched off);
//! 3. for every relation in turn, every assignment of its argument places
//!    to slots `x_0, ..., x_{m-1}, a_0, ..., a_{p-1}` that uses at least one
//!    variable, in lexicographic order of the slot sequence.
//!
//! A [`BasicType`] stores one truth bit per pattern. Parameter-only atoms
//! are left out since they are the same for every tuple.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::budget::Budget;
use crate::combinatorics;
use crate::elements::{Elem, ElemSet, Permutation};
use crate::error::{Error, Result};
use crate::relation::{for_each_tuple, Relation};

/// An argument place of an atom: a free variable or a parameter element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Var(u8),
    Param(Elem),
}

/// One atomic formula with its truth value. `rel` is `None` for equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomicInstance {
    pub rel: Option<usize>,
    pub args: Vec<Slot>,
    pub positive: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeOptions {
    /// Include the `x_i = a_q` atoms.
    pub param_equalities: bool,
}

impl Default for TypeOptions {
    fn default() -> Self {
        TypeOptions { param_equalities: true }
    }
}

/// The basic type `tp_bs(b̄, A, R̄)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasicType {
    m: usize,
    params: Vec<Elem>,
    arities: Vec<usize>,
    options: TypeOptions,
    bits: Vec<u64>,
    len: usize,
}

impl BasicType {
    pub fn tuple_len(&self) -> usize {
        self.m
    }

    pub fn params(&self) -> &[Elem] {
        &self.params
    }

    /// Number of atomic patterns, each present exactly once.
    pub fn num_atoms(&self) -> usize {
        self.len
    }

    fn bit(&self, i: usize) -> bool {
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    /// The signed atoms in canonical order.
    pub fn instances(&self) -> Vec<AtomicInstance> {
        let mut out = Vec::with_capacity(self.len);
        let mut i = 0;
        for_each_pattern(self.m, &self.params, &self.arities, self.options, |rel, args| {
            out.push(AtomicInstance { rel, args: args.to_vec(), positive: self.bit(i) });
            i += 1;
        });
        out
    }

    /// The type of `σ(b̄)` over `σ(A)` in `σ(R̄)`, computed from this one.
    pub fn relabel(&self, sigma: &Permutation) -> BasicType {
        let map_slot = |s: &Slot| match *s {
            Slot::Param(a) => Slot::Param(sigma.apply(a)),
            v => v,
        };
        let signs: BTreeMap<(Option<usize>, Vec<Slot>), bool> = self
            .instances()
            .into_iter()
            .map(|a| ((a.rel, a.args.iter().map(map_slot).collect()), a.positive))
            .collect();
        let mut params: Vec<Elem> = self.params.iter().map(|&a| sigma.apply(a)).collect();
        params.sort_unstable();
        let mut out = BasicType {
            m: self.m,
            params,
            arities: self.arities.clone(),
            options: self.options,
            bits: Vec::new(),
            len: 0,
        };
        let mut bits = BitPush::default();
        for_each_pattern(out.m, &out.params, &out.arities, out.options, |rel, args| {
            bits.push(signs[&(rel, args.to_vec())]);
        });
        out.len = bits.len;
        out.bits = bits.words;
        out
    }
}

#[derive(Default)]
struct BitPush {
    words: Vec<u64>,
    len: usize,
}

impl BitPush {
    #[inline]
    fn push(&mut self, b: bool) {
        if self.len % 64 == 0 {
            self.words.push(0);
        }
        if b {
            *self.words.last_mut().unwrap() |= 1 << (self.len % 64);
        }
        self.len += 1;
    }
}

/// Calls `f(rel, args)` for every pattern in canonical order.
fn for_each_pattern(
    m: usize,
    params: &[Elem],
    arities: &[usize],
    options: TypeOptions,
    mut f: impl FnMut(Option<usize>, &[Slot]),
) {
    for i in 0..m {
        for j in i + 1..m {
            f(None, &[Slot::Var(i as u8), Slot::Var(j as u8)]);
        }
    }
    if options.param_equalities {
        for i in 0..m {
            for &a in params {
                f(None, &[Slot::Var(i as u8), Slot::Param(a)]);
            }
        }
    }
    let slots: Vec<Slot> =
        (0..m).map(|i| Slot::Var(i as u8)).chain(params.iter().map(|&a| Slot::Param(a))).collect();
    let mut args: Vec<Slot> = Vec::new();
    for (r, &k) in arities.iter().enumerate() {
        for_each_tuple(slots.len() as u32, k, |idx| {
            if idx.iter().any(|&s| (s as usize) < m) {
                args.clear();
                args.extend(idx.iter().map(|&s| slots[s as usize]));
                f(Some(r), &args);
            }
            false
        });
    }
}

/// Reusable evaluator for many tuples over one parameter set.
pub(crate) struct TypeComputer<'a> {
    m: usize,
    params: Vec<Elem>,
    rels: &'a [Relation],
    options: TypeOptions,
    // Per relation, the patterns as indices into `x_0..x_{m-1}, a_0..`.
    patterns: Vec<Vec<Vec<u32>>>,
}

impl<'a> TypeComputer<'a> {
    pub(crate) fn new(m: usize, params: &ElemSet, rels: &'a [Relation], options: TypeOptions) -> Self {
        let params = params.to_vec();
        let slots = (m + params.len()) as u32;
        let patterns = rels
            .iter()
            .map(|r| {
                let mut ps = Vec::new();
                for_each_tuple(slots, r.arity(), |idx| {
                    if idx.iter().any(|&s| (s as usize) < m) {
                        ps.push(idx.to_vec());
                    }
                    false
                });
                ps
            })
            .collect();
        TypeComputer { m, params, rels, options, patterns }
    }

    /// Writes the truth bits of `b̄` into `out` (cleared first).
    pub(crate) fn signature(&self, b: &[Elem], out: &mut Vec<u64>) -> usize {
        let mut bits = BitPush { words: core::mem::take(out), len: 0 };
        bits.words.clear();
        for i in 0..self.m {
            for j in i + 1..self.m {
                bits.push(b[i] == b[j]);
            }
        }
        if self.options.param_equalities {
            for i in 0..self.m {
                for &a in &self.params {
                    bits.push(b[i] == a);
                }
            }
        }
        let mut buf: Vec<Elem> = Vec::new();
        for (r, ps) in self.rels.iter().zip(&self.patterns) {
            for p in ps {
                buf.clear();
                buf.extend(p.iter().map(|&s| {
                    let s = s as usize;
                    if s < self.m {
                        b[s]
                    } else {
                        self.params[s - self.m]
                    }
                }));
                bits.push(r.contains(&buf));
            }
        }
        *out = bits.words;
        bits.len
    }

    pub(crate) fn basic_type(&self, b: &[Elem]) -> BasicType {
        let mut bits = Vec::new();
        let len = self.signature(b, &mut bits);
        BasicType {
            m: self.m,
            params: self.params.clone(),
            arities: self.rels.iter().map(|r| r.arity()).collect(),
            options: self.options,
            bits,
            len,
        }
    }
}

fn check_inputs(b: &[Elem], a: &ElemSet, rels: &[Relation]) -> Result<()> {
    let first = rels.first().ok_or(Error::Arity { expected: 1, found: 0 })?;
    let u = first.universe();
    for r in rels {
        u.same(&r.universe())?;
    }
    u.check_all(b)?;
    u.check_set(a)
}

/// `tp_bs(b̄, A, R̄)` including parameter equalities.
pub fn tp_bs(b: &[Elem], a: &ElemSet, rels: &[Relation]) -> Result<BasicType> {
    tp_bs_with(b, a, rels, TypeOptions::default())
}

pub fn tp_bs_with(b: &[Elem], a: &ElemSet, rels: &[Relation], options: TypeOptions) -> Result<BasicType> {
    check_inputs(b, a, rels)?;
    Ok(TypeComputer::new(b.len(), a, rels, options).basic_type(b))
}

/// `S^m_bs(A, R̄)`: the set of basic types of all `m`-tuples.
pub fn type_space(m: usize, a: &ElemSet, rels: &[Relation], budget: &Budget) -> Result<BTreeSet<BasicType>> {
    if m == 0 {
        return Err(Error::Precondition("type_space needs m >= 1".into()));
    }
    check_inputs(&[], a, rels)?;
    let n = rels[0].universe().size();
    budget.check_work("type space tuples", combinatorics::pow(n as u64, m as u64))?;
    let tc = TypeComputer::new(m, a, rels, TypeOptions::default());
    let mut out = BTreeSet::new();
    for_each_tuple(n, m, |b| {
        out.insert(tc.basic_type(b));
        false
    });
    Ok(out)
}
