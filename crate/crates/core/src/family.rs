//! Quantifier families: permutation-closed families of relations, given per
//! universe, with counting, enumeration and membership.
//!
//! Bounds are functions of the universe size ([`Bound`]); "half" is `⌊N/2⌋`.
//! Families can be written as short specs:
//!
//! ```text
//! trivial            singletons
//! mon:2  mon<=:2  mon<:N/2  mon:*        subsets by size
//! inj:3  inj<=:N/4                       partial injections by |Dom|
//! eq:2,3  eq:<=2,*                       equivalence relations (classes, class size)
//! eqdom:4                                equivalence relations with |Dom| <= 4
//! ord:4  ord<:4                          linear orders of a subset by size
//! nary:2,3  nary:2,=3                    n-ary relations with |Dom| <= 3 (or = 3)
//! iso:NAME                               isomorphism closure of a named relation
//! sum(mon:1;mon:2)  union(mon:1;mon:2)   sums and unions
//! ```

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::budget::Budget;
use crate::canon;
use crate::combinatorics::{self, binomial, falling};
use crate::elements::{Elem, ElemSet, Universe};
use crate::error::{Error, Result};
use crate::relation::{sum_relations, EquivalenceRelation, PartialInjection, Relation};

/// A size bound as a function of the universe size `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bound {
    Const(u32),
    /// `⌊N·num/den⌋`.
    Fraction { num: u32, den: u32 },
}

impl Bound {
    pub const HALF: Bound = Bound::Fraction { num: 1, den: 2 };

    pub fn eval(&self, n: u32) -> u32 {
        match *self {
            Bound::Const(k) => k,
            Bound::Fraction { num, den } => (n as u64 * num as u64 / den.max(1) as u64) as u32,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Bound::Const(k) => write!(f, "{k}"),
            Bound::Fraction { num: 1, den: 1 } => f.write_str("N"),
            Bound::Fraction { num: 1, den } => write!(f, "N/{den}"),
            Bound::Fraction { num, den: 1 } => write!(f, "N*{num}"),
            Bound::Fraction { num, den } => write!(f, "N*{num}/{den}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    Exact,
    AtMost,
    LessThan,
    Any,
}

/// A constraint `= b`, `<= b`, `< b` or no constraint on a count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Constraint {
    pub mode: Mode,
    pub bound: Bound,
}

impl Constraint {
    pub const ANY: Constraint = Constraint { mode: Mode::Any, bound: Bound::Const(0) };

    pub fn exact(k: u32) -> Self {
        Constraint { mode: Mode::Exact, bound: Bound::Const(k) }
    }

    pub fn at_most(k: u32) -> Self {
        Constraint { mode: Mode::AtMost, bound: Bound::Const(k) }
    }

    pub fn less_than(k: u32) -> Self {
        Constraint { mode: Mode::LessThan, bound: Bound::Const(k) }
    }

    pub fn admits(&self, k: u64, n: u32) -> bool {
        let b = self.bound.eval(n) as u64;
        match self.mode {
            Mode::Exact => k == b,
            Mode::AtMost => k <= b,
            Mode::LessThan => k < b,
            Mode::Any => true,
        }
    }

    /// Admitted values in `0..=max`.
    fn values(&self, max: u32, n: u32) -> impl Iterator<Item = u32> + '_ {
        (0..=max).filter(move |&k| self.admits(k as u64, n))
    }

    fn prefix(&self) -> &'static str {
        match self.mode {
            Mode::Exact => "",
            Mode::AtMost => "<=",
            Mode::LessThan => "<",
            Mode::Any => "",
        }
    }

    fn fmt_inline(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mode {
            Mode::Any => f.write_str("*"),
            _ => write!(f, "{}{}", self.prefix(), self.bound),
        }
    }
}

/// A quantifier family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuantifierFamily {
    /// `K^tr`: the singleton subsets.
    Trivial,
    /// `K^mon`: subsets whose size meets the constraint.
    Mon(Constraint),
    /// `K^1-1`: partial injections (as graphs) with `|Dom(f)|` constrained.
    Inj(Constraint),
    /// `K^eq`: equivalence relations on subsets, constrained on the number
    /// of classes, on every class size, and on `|Dom(E)|`.
    Eq { classes: Constraint, class_size: Constraint, domain: Constraint },
    /// `Q^ord`: reflexive linear orders of a subset, `|Dom|` constrained.
    Ord(Constraint),
    /// `Q^n-ary`: `arity`-place relations with `|Dom|` constrained.
    NAry { arity: usize, domain: Constraint },
    /// `K_R`: all relations isomorphic to `seed`.
    IsoClosure { name: Option<String>, seed: Relation },
    /// A fixed list of relations on one universe. Not permutation-closed in
    /// general.
    Explicit { universe: Universe, arity: usize, members: Vec<Relation> },
    /// `Σ K_ℓ`.
    Sum(Vec<QuantifierFamily>),
    /// `⋃ K_ℓ`, all of the same arity.
    Union(Vec<QuantifierFamily>),
}

impl QuantifierFamily {
    pub fn mon_exact(k: u32) -> Self {
        QuantifierFamily::Mon(Constraint::exact(k))
    }

    pub fn iso(seed: Relation) -> Self {
        QuantifierFamily::IsoClosure { name: None, seed }
    }

    pub fn explicit(universe: Universe, arity: usize, members: Vec<Relation>) -> Result<Self> {
        let mut members = members;
        for r in &members {
            universe.same(&r.universe())?;
            if r.arity() != arity {
                return Err(Error::Arity { expected: arity, found: r.arity() });
            }
        }
        members.sort();
        members.dedup();
        Ok(QuantifierFamily::Explicit { universe, arity, members })
    }

    pub fn sum(parts: Vec<QuantifierFamily>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Arity { expected: 1, found: 0 });
        }
        Ok(QuantifierFamily::Sum(parts))
    }

    pub fn union(parts: Vec<QuantifierFamily>) -> Result<Self> {
        let first = parts.first().ok_or(Error::Arity { expected: 1, found: 0 })?;
        let a = first.arity();
        for p in &parts {
            if p.arity() != a {
                return Err(Error::Arity { expected: a, found: p.arity() });
            }
        }
        Ok(QuantifierFamily::Union(parts))
    }

    /// `n(K)`.
    pub fn arity(&self) -> usize {
        match self {
            QuantifierFamily::Trivial | QuantifierFamily::Mon(_) => 1,
            QuantifierFamily::Inj(_) | QuantifierFamily::Eq { .. } | QuantifierFamily::Ord(_) => 2,
            QuantifierFamily::NAry { arity, .. } => *arity,
            QuantifierFamily::IsoClosure { seed, .. } => seed.arity(),
            QuantifierFamily::Explicit { arity, .. } => *arity,
            QuantifierFamily::Sum(parts) => parts.iter().map(|p| p.arity()).sum(),
            QuantifierFamily::Union(parts) => parts[0].arity(),
        }
    }

    fn fixed_universe(&self, u: Universe) -> Result<()> {
        match self {
            QuantifierFamily::IsoClosure { seed, .. } => seed.universe().same(&u),
            QuantifierFamily::Explicit { universe, .. } => universe.same(&u),
            QuantifierFamily::Sum(ps) | QuantifierFamily::Union(ps) => {
                ps.iter().try_for_each(|p| p.fixed_universe(u))
            }
            _ => Ok(()),
        }
    }

    /// `|K[𝒰]|`, saturating. Closed forms where available; iso-closures and
    /// unions are counted by enumeration under `budget`.
    pub fn count(&self, u: Universe, budget: &Budget) -> Result<u128> {
        self.fixed_universe(u)?;
        let n = u.size();
        let n64 = n as u64;
        Ok(match self {
            QuantifierFamily::Trivial => n as u128,
            QuantifierFamily::Mon(c) => c.values(n, n).map(|k| binomial(n64, k as u64)).fold(0, u128::saturating_add),
            QuantifierFamily::Inj(c) => c
                .values(n, n)
                .map(|k| binomial(n64, k as u64).saturating_mul(falling(n64, k as u64)))
                .fold(0, u128::saturating_add),
            QuantifierFamily::Ord(c) => c
                .values(n, n)
                .map(|k| binomial(n64, k as u64).saturating_mul(falling(k as u64, k as u64)))
                .fold(0, u128::saturating_add),
            QuantifierFamily::Eq { classes, class_size, domain } => domain
                .values(n, n)
                .map(|d| binomial(n64, d as u64).saturating_mul(count_partitions(d, classes, class_size, n)))
                .fold(0, u128::saturating_add),
            QuantifierFamily::NAry { arity, domain } => domain
                .values(n, n)
                .map(|d| binomial(n64, d as u64).saturating_mul(count_exact_domain(d, *arity)))
                .fold(0, u128::saturating_add),
            QuantifierFamily::Explicit { members, .. } => members.len() as u128,
            QuantifierFamily::IsoClosure { .. } | QuantifierFamily::Union(_) => {
                self.members(u, budget)?.len() as u128
            }
            QuantifierFamily::Sum(parts) => {
                let empty = Relation::empty(u, 1)?;
                let mut product: u128 = 1;
                let mut all_nonempty = true;
                let mut some_empty = false;
                for p in parts {
                    let c = p.count(u, budget)?;
                    let e = p.contains(&empty_like(&empty, p.arity())?)?;
                    all_nonempty &= c > 0;
                    some_empty |= e;
                    product = product.saturating_mul(c - u128::from(e));
                }
                product + u128::from(some_empty && all_nonempty)
            }
        })
    }

    /// The members of `K[𝒰]` in increasing order, each once.
    pub fn members(&self, u: Universe, budget: &Budget) -> Result<Vec<Relation>> {
        self.fixed_universe(u)?;
        let n = u.size();
        if !matches!(self, QuantifierFamily::IsoClosure { .. } | QuantifierFamily::Union(_)) {
            budget.check_members("family members", self.count(u, budget)?)?;
        }
        let mut out: Vec<Relation> = Vec::new();
        match self {
            QuantifierFamily::Trivial => {
                for x in u.elements() {
                    out.push(Relation::unary(u, &[x].iter().collect())?);
                }
            }
            QuantifierFamily::Mon(c) => {
                let all: Vec<Elem> = u.elements().collect();
                for k in c.values(n, n) {
                    combinatorics::for_each_subset_of_size(&all, k as usize, |s| {
                        out.push(Relation::from_flat(u, 1, s.to_vec()));
                        false
                    });
                }
            }
            QuantifierFamily::Inj(c) => {
                let all: Vec<Elem> = u.elements().collect();
                for k in c.values(n, n) {
                    combinatorics::for_each_subset_of_size(&all, k as usize, |dom| {
                        combinatorics::for_each_injection(n, dom.len(), |img| {
                            let flat = dom.iter().zip(img).flat_map(|(&s, &t)| [s, t]).collect();
                            out.push(Relation::from_flat(u, 2, flat));
                            false
                        });
                        false
                    });
                }
            }
            QuantifierFamily::Ord(c) => {
                let all: Vec<Elem> = u.elements().collect();
                for k in c.values(n, n) {
                    combinatorics::for_each_subset_of_size(&all, k as usize, |dom| {
                        let mut order = dom.to_vec();
                        loop {
                            out.push(order_relation(u, &order));
                            if !combinatorics::next_permutation(&mut order) {
                                break;
                            }
                        }
                        false
                    });
                }
            }
            QuantifierFamily::Eq { classes, class_size, domain } => {
                let all: Vec<Elem> = u.elements().collect();
                for d in domain.values(n, n) {
                    combinatorics::for_each_subset_of_size(&all, d as usize, |dom| {
                        combinatorics::for_each_set_partition(dom, |blocks| {
                            if classes.admits(blocks.len() as u64, n)
                                && blocks.iter().all(|b| class_size.admits(b.len() as u64, n))
                            {
                                let e = EquivalenceRelation::new(u, blocks.to_vec()).expect("a partition");
                                out.push(e.to_relation());
                            }
                        });
                        false
                    });
                }
            }
            QuantifierFamily::NAry { arity, domain } => {
                let all: Vec<Elem> = u.elements().collect();
                for d in domain.values(n, n) {
                    combinatorics::for_each_subset_of_size(&all, d as usize, |dom| {
                        nary_on_exact_domain(u, *arity, dom, &mut out);
                        false
                    });
                }
            }
            QuantifierFamily::IsoClosure { seed, .. } => {
                let dom = seed.domain().to_vec();
                budget.check_members("iso-closure images", falling(n as u64, dom.len() as u64))?;
                let mut pos = alloc::vec![usize::MAX; n as usize];
                for (i, &x) in dom.iter().enumerate() {
                    pos[x as usize] = i;
                }
                let mut seen = BTreeSet::new();
                combinatorics::for_each_injection(n, dom.len(), |img| {
                    let flat = seed.tuples().flatten().map(|&x| img[pos[x as usize]]).collect();
                    seen.insert(Relation::from_flat(u, seed.arity(), flat));
                    false
                });
                out.extend(seen);
            }
            QuantifierFamily::Explicit { members, .. } => out.extend(members.iter().cloned()),
            QuantifierFamily::Sum(parts) => {
                let lists: Vec<Vec<Relation>> =
                    parts.iter().map(|p| p.members(u, budget)).collect::<Result<_>>()?;
                let mut idx = alloc::vec![0usize; lists.len()];
                if lists.iter().all(|l| !l.is_empty()) {
                    loop {
                        let pick: Vec<Relation> = idx.iter().zip(&lists).map(|(&i, l)| l[i].clone()).collect();
                        out.push(sum_relations(&pick)?);
                        let mut j = lists.len();
                        loop {
                            if j == 0 {
                                break;
                            }
                            j -= 1;
                            idx[j] += 1;
                            if idx[j] < lists[j].len() {
                                break;
                            }
                            idx[j] = 0;
                        }
                        if idx.iter().all(|&i| i == 0) {
                            break;
                        }
                    }
                }
            }
            QuantifierFamily::Union(parts) => {
                let mut seen = BTreeSet::new();
                for p in parts {
                    seen.extend(p.members(u, budget)?);
                    budget.check_members("union members", seen.len() as u128)?;
                }
                out.extend(seen);
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// `R ∈ K[𝒰]`.
    pub fn contains(&self, r: &Relation) -> Result<bool> {
        if r.arity() != self.arity() {
            return Err(Error::Arity { expected: self.arity(), found: r.arity() });
        }
        self.fixed_universe(r.universe())?;
        let n = r.universe().size();
        Ok(match self {
            QuantifierFamily::Trivial => r.len() == 1,
            QuantifierFamily::Mon(c) => c.admits(r.len() as u64, n),
            QuantifierFamily::Inj(c) => match PartialInjection::from_relation(r) {
                Ok(h) => c.admits(h.len() as u64, n),
                Err(_) => false,
            },
            QuantifierFamily::Eq { classes, class_size, domain } => match EquivalenceRelation::from_relation(r) {
                Ok(e) => {
                    classes.admits(e.num_classes() as u64, n)
                        && e.blocks().iter().all(|b| class_size.admits(b.len() as u64, n))
                        && domain.admits(e.dom().len() as u64, n)
                }
                Err(_) => false,
            },
            QuantifierFamily::Ord(c) => is_reflexive_linear_order(r) && c.admits(r.domain().len() as u64, n),
            QuantifierFamily::NAry { domain, .. } => domain.admits(r.domain().len() as u64, n),
            QuantifierFamily::IsoClosure { seed, .. } => {
                r.len() == seed.len()
                    && r.domain().len() == seed.domain().len()
                    && canon::isomorphic(r, seed)?
            }
            QuantifierFamily::Explicit { members, .. } => members.binary_search(r).is_ok(),
            QuantifierFamily::Sum(parts) => {
                let u = r.universe();
                if r.is_empty() {
                    let mut some_empty = false;
                    for p in parts {
                        some_empty |= p.contains(&Relation::empty(u, p.arity())?)?;
                    }
                    // Every other summand still needs some member.
                    some_empty && parts.iter().all(|p| p.count(u, &Budget::default()).map(|c| c > 0).unwrap_or(true))
                } else {
                    let mut offset = 0;
                    let mut projections = Vec::new();
                    for p in parts {
                        let k = p.arity();
                        let flat: Vec<Elem> = r.tuples().flat_map(|t| t[offset..offset + k].iter().copied()).collect();
                        projections.push(Relation::from_flat(u, k, flat));
                        offset += k;
                    }
                    if &sum_relations(&projections)? != r {
                        false
                    } else {
                        let mut ok = true;
                        for (p, q) in parts.iter().zip(&projections) {
                            ok &= p.contains(q)?;
                        }
                        ok
                    }
                }
            }
            QuantifierFamily::Union(parts) => {
                let mut any = false;
                for p in parts {
                    any |= p.contains(r)?;
                }
                any
            }
        })
    }
}

fn empty_like(unary: &Relation, arity: usize) -> Result<Relation> {
    Relation::empty(unary.universe(), arity)
}

/// The reflexive order `order[0] <= order[1] <= ...`.
fn order_relation(u: Universe, order: &[Elem]) -> Relation {
    let mut flat = Vec::new();
    for i in 0..order.len() {
        for j in i..order.len() {
            flat.push(order[i]);
            flat.push(order[j]);
        }
    }
    Relation::from_flat(u, 2, flat)
}

fn is_reflexive_linear_order(r: &Relation) -> bool {
    let dom = r.domain().to_vec();
    let k = dom.len();
    if r.len() != k * (k + 1) / 2 {
        return false;
    }
    // Sort the domain by the number of predecessors; a linear order gives
    // counts 1..=k and is then determined by that ranking.
    let mut ranked: Vec<(usize, Elem)> =
        dom.iter().map(|&y| (dom.iter().filter(|&&x| r.contains(&[x, y])).count(), y)).collect();
    ranked.sort_unstable();
    let order: Vec<Elem> = ranked.iter().map(|p| p.1).collect();
    order_relation(r.universe(), &order) == *r
}

/// Partitions of a `d`-set obeying both constraints.
fn count_partitions(d: u32, classes: &Constraint, class_size: &Constraint, n: u32) -> u128 {
    let d = d as usize;
    // p[s][k]: partitions of an s-set into k admissible blocks.
    let mut p = alloc::vec![alloc::vec![0u128; d + 1]; d + 1];
    p[0][0] = 1;
    for s in 1..=d {
        for k in 1..=s {
            let mut acc: u128 = 0;
            for b in 1..=s {
                if class_size.admits(b as u64, n) {
                    acc = acc.saturating_add(binomial(s as u64 - 1, b as u64 - 1).saturating_mul(p[s - b][k - 1]));
                }
            }
            p[s][k] = acc;
        }
    }
    (0..=d).filter(|&k| classes.admits(k as u64, n)).map(|k| p[d][k]).fold(0, u128::saturating_add)
}

/// Number of `arity`-place relations on a `d`-set with domain exactly that set.
fn count_exact_domain(d: u32, arity: usize) -> u128 {
    let mut acc: i128 = 0;
    for j in 0..=d as u64 {
        let cells = combinatorics::pow(j, arity as u64);
        if cells >= 126 {
            return u128::MAX;
        }
        let term = (binomial(d as u64, j) as i128) * (1i128 << cells);
        if (d as u64 - j) % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc.max(0) as u128
}

fn nary_on_exact_domain(u: Universe, arity: usize, dom: &[Elem], out: &mut Vec<Relation>) {
    let mut cells: Vec<Vec<Elem>> = Vec::new();
    crate::relation::for_each_tuple(dom.len() as u32, arity, |t| {
        cells.push(t.iter().map(|&i| dom[i as usize]).collect());
        false
    });
    let full: ElemSet = dom.iter().collect();
    let total = cells.len();
    if total >= 64 {
        return;
    }
    for mask in 0u64..(1u64 << total) {
        let flat: Vec<Elem> = (0..total).filter(|&i| mask >> i & 1 == 1).flat_map(|i| cells[i].iter().copied()).collect();
        let covered: ElemSet = flat.iter().collect();
        if covered == full {
            out.push(Relation::from_flat(u, arity, flat));
        }
    }
}

/// Unresolved family syntax, as written in specs and formulas.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FamilySpec {
    Trivial,
    Mon(Constraint),
    Inj(Constraint),
    Eq { classes: Constraint, class_size: Constraint },
    EqDom(Constraint),
    Ord(Constraint),
    NAry { arity: usize, domain: Constraint },
    Iso(String),
    Sum(Vec<FamilySpec>),
    Union(Vec<FamilySpec>),
}

/// A family reference inside a formula: a name bound by the caller, or an
/// inline spec.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FamilyRef {
    Named(String),
    Inline(FamilySpec),
}

impl FamilySpec {
    pub fn parse(text: &str) -> Result<FamilySpec> {
        let mut p = SpecParser { s: text.as_bytes(), pos: 0 };
        let spec = p.spec()?;
        if p.pos != p.s.len() {
            return Err(p.err("trailing characters after family spec"));
        }
        Ok(spec)
    }

    /// Builds the family, looking up `iso:` names with `lookup`.
    pub fn resolve(&self, lookup: &dyn Fn(&str) -> Option<Relation>) -> Result<QuantifierFamily> {
        Ok(match self {
            FamilySpec::Trivial => QuantifierFamily::Trivial,
            FamilySpec::Mon(c) => QuantifierFamily::Mon(*c),
            FamilySpec::Inj(c) => QuantifierFamily::Inj(*c),
            FamilySpec::Eq { classes, class_size } => {
                QuantifierFamily::Eq { classes: *classes, class_size: *class_size, domain: Constraint::ANY }
            }
            FamilySpec::EqDom(c) => {
                QuantifierFamily::Eq { classes: Constraint::ANY, class_size: Constraint::ANY, domain: *c }
            }
            FamilySpec::Ord(c) => QuantifierFamily::Ord(*c),
            FamilySpec::NAry { arity, domain } => QuantifierFamily::NAry { arity: *arity, domain: *domain },
            FamilySpec::Iso(name) => {
                let seed = lookup(name).ok_or_else(|| Error::Unbound(name.clone()))?;
                QuantifierFamily::IsoClosure { name: Some(name.clone()), seed }
            }
            FamilySpec::Sum(ps) => QuantifierFamily::sum(ps.iter().map(|p| p.resolve(lookup)).collect::<Result<_>>()?)?,
            FamilySpec::Union(ps) => {
                QuantifierFamily::union(ps.iter().map(|p| p.resolve(lookup)).collect::<Result<_>>()?)?
            }
        })
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let single = |f: &mut fmt::Formatter<'_>, name: &str, c: &Constraint| match c.mode {
            Mode::Any => write!(f, "{name}:*"),
            _ => write!(f, "{name}{}:{}", c.prefix(), c.bound),
        };
        match self {
            FamilySpec::Trivial => f.write_str("trivial"),
            FamilySpec::Mon(c) => single(f, "mon", c),
            FamilySpec::Inj(c) => single(f, "inj", c),
            FamilySpec::Ord(c) => single(f, "ord", c),
            FamilySpec::EqDom(c) => match c.mode {
                Mode::AtMost => write!(f, "eqdom:{}", c.bound),
                Mode::Exact => write!(f, "eqdom:={}", c.bound),
                _ => {
                    f.write_str("eqdom:")?;
                    c.fmt_inline(f)
                }
            },
            FamilySpec::Eq { classes, class_size } => {
                f.write_str("eq:")?;
                classes.fmt_inline(f)?;
                f.write_str(",")?;
                class_size.fmt_inline(f)
            }
            FamilySpec::NAry { arity, domain } => {
                write!(f, "nary:{arity},")?;
                match domain.mode {
                    Mode::AtMost => write!(f, "{}", domain.bound),
                    Mode::Exact => write!(f, "={}", domain.bound),
                    _ => domain.fmt_inline(f),
                }
            }
            FamilySpec::Iso(name) => write!(f, "iso:{name}"),
            FamilySpec::Sum(ps) | FamilySpec::Union(ps) => {
                f.write_str(if matches!(self, FamilySpec::Sum(_)) { "sum(" } else { "union(" })?;
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        f.write_str(";")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str(")")
            }
        }
    }
}

struct SpecParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl SpecParser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, message: msg.to_string() }
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, lit: &str) -> bool {
        if self.s[self.pos..].starts_with(lit.as_bytes()) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn word(&mut self) -> String {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_alphabetic()) {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.s[start..self.pos]).into_owned()
    }

    fn number(&mut self) -> Result<u32> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        core::str::from_utf8(&self.s[start..self.pos])
            .ok()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| self.err("number out of range"))
    }

    fn bound(&mut self) -> Result<Bound> {
        if self.eat("N") {
            let mut num = 1;
            let mut den = 1;
            if self.eat("*") {
                num = self.number()?;
            }
            if self.eat("/") {
                den = self.number()?;
                if den == 0 {
                    return Err(self.err("division by zero in bound"));
                }
            }
            Ok(Bound::Fraction { num, den })
        } else {
            Ok(Bound::Const(self.number()?))
        }
    }

    /// `*`, or an optional `<=`, `<`, `=` followed by a bound.
    fn constraint(&mut self, default: Mode) -> Result<Constraint> {
        if self.eat("*") {
            return Ok(Constraint::ANY);
        }
        let mode = if self.eat("<=") {
            Mode::AtMost
        } else if self.eat("<") {
            Mode::LessThan
        } else if self.eat("=") {
            Mode::Exact
        } else {
            default
        };
        Ok(Constraint { mode, bound: self.bound()? })
    }

    /// `name`, `name<=`, `name<` followed by `:` and a constraint.
    fn single(&mut self) -> Result<Constraint> {
        let mode = if self.eat("<=") {
            Some(Mode::AtMost)
        } else if self.eat("<") {
            Some(Mode::LessThan)
        } else {
            None
        };
        if !self.eat(":") {
            return Err(self.err("expected ':'"));
        }
        match mode {
            Some(m) => Ok(Constraint { mode: m, bound: self.bound()? }),
            None => self.constraint(Mode::Exact),
        }
    }

    fn list(&mut self) -> Result<Vec<FamilySpec>> {
        if !self.eat("(") {
            return Err(self.err("expected '('"));
        }
        let mut out = alloc::vec![self.spec()?];
        while self.eat(";") {
            out.push(self.spec()?);
        }
        if !self.eat(")") {
            return Err(self.err("expected ')'"));
        }
        Ok(out)
    }

    fn spec(&mut self) -> Result<FamilySpec> {
        let start = self.pos;
        let name = self.word();
        Ok(match name.as_str() {
            "trivial" => FamilySpec::Trivial,
            "mon" => FamilySpec::Mon(self.single()?),
            "inj" => FamilySpec::Inj(self.single()?),
            "ord" => FamilySpec::Ord(self.single()?),
            "eqdom" => {
                if !self.eat(":") {
                    return Err(self.err("expected ':'"));
                }
                FamilySpec::EqDom(self.constraint(Mode::AtMost)?)
            }
            "eq" => {
                if !self.eat(":") {
                    return Err(self.err("expected ':'"));
                }
                let classes = self.constraint(Mode::Exact)?;
                if !self.eat(",") {
                    return Err(self.err("expected ','"));
                }
                let class_size = self.constraint(Mode::Exact)?;
                FamilySpec::Eq { classes, class_size }
            }
            "nary" => {
                if !self.eat(":") {
                    return Err(self.err("expected ':'"));
                }
                let arity = self.number()? as usize;
                if arity == 0 {
                    return Err(self.err("arity must be positive"));
                }
                if !self.eat(",") {
                    return Err(self.err("expected ','"));
                }
                FamilySpec::NAry { arity, domain: self.constraint(Mode::AtMost)? }
            }
            "iso" => {
                if !self.eat(":") {
                    return Err(self.err("expected ':'"));
                }
                let s = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_') {
                    self.pos += 1;
                }
                if s == self.pos {
                    return Err(self.err("expected a relation name"));
                }
                FamilySpec::Iso(String::from_utf8_lossy(&self.s[s..self.pos]).into_owned())
            }
            "sum" => FamilySpec::Sum(self.list()?),
            "union" => FamilySpec::Union(self.list()?),
            _ => {
                self.pos = start;
                return Err(self.err(&format!("unknown family `{name}`")));
            }
        })
    }
}

impl From<FamilySpec> for FamilyRef {
    fn from(s: FamilySpec) -> Self {
        FamilyRef::Inline(s)
    }
}

impl FamilyRef {
    pub fn named(name: &str) -> Self {
        FamilyRef::Named(name.to_string())
    }

    pub fn inline(spec: &str) -> Result<Self> {
        Ok(FamilyRef::Inline(FamilySpec::parse(spec)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn u(n: u32) -> Universe {
        Universe::new(n).unwrap()
    }

    fn all_relations(n: u32, arity: usize) -> Vec<Relation> {
        let cells = (n as usize).pow(arity as u32);
        let mut tuples = Vec::new();
        crate::relation::for_each_tuple(n, arity, |t| {
            tuples.push(t.to_vec());
            false
        });
        (0u64..1 << cells)
            .map(|m| Relation::new(u(n), arity, (0..cells).filter(|&i| m >> i & 1 == 1).map(|i| tuples[i].clone())).unwrap())
            .collect()
    }

    #[test]
    fn spec_examples() {
        let b = Budget::default();
        let mon2 = QuantifierFamily::mon_exact(2);
        assert_eq!(mon2.members(u(4), &b).unwrap().len(), 6);
        assert_eq!(QuantifierFamily::Trivial.members(u(5), &b).unwrap().len(), 5);
        let seed = Relation::new(u(4), 2, [[0, 1]]).unwrap();
        assert_eq!(QuantifierFamily::iso(seed).members(u(4), &b).unwrap().len(), 12);
        let s01 = Relation::new(u(6), 1, [[0], [1]]).unwrap();
        let s012 = Relation::new(u(6), 1, [[0], [1], [2]]).unwrap();
        assert!(mon2.contains(&s01).unwrap());
        assert!(!mon2.contains(&s012).unwrap());
        assert!(mon2.contains(&Relation::new(u(6), 2, [[0, 1]]).unwrap()).is_err());
    }

    #[test]
    fn enumeration_and_membership_agree_on_binary_relations() {
        let b = Budget::default();
        let all = all_relations(3, 2);
        let families = [
            QuantifierFamily::Inj(Constraint::at_most(2)),
            QuantifierFamily::Inj(Constraint::ANY),
            QuantifierFamily::Eq { classes: Constraint::ANY, class_size: Constraint::ANY, domain: Constraint::ANY },
            QuantifierFamily::Eq { classes: Constraint::exact(1), class_size: Constraint::exact(2), domain: Constraint::ANY },
            QuantifierFamily::Ord(Constraint::ANY),
            QuantifierFamily::Ord(Constraint::exact(2)),
            QuantifierFamily::NAry { arity: 2, domain: Constraint::at_most(2) },
            QuantifierFamily::iso(Relation::new(u(3), 2, [[0, 1], [1, 1]]).unwrap()),
            QuantifierFamily::sum(vec![QuantifierFamily::Trivial, QuantifierFamily::Mon(Constraint::at_most(1))]).unwrap(),
            QuantifierFamily::union(vec![QuantifierFamily::Inj(Constraint::exact(1)), QuantifierFamily::Ord(Constraint::exact(1))]).unwrap(),
        ];
        for fam in &families {
            let members = fam.members(u(3), &b).unwrap();
            let mut expected: Vec<Relation> = all.iter().filter(|r| fam.contains(r).unwrap()).cloned().collect();
            expected.sort();
            assert_eq!(members, expected, "{fam:?}");
            assert_eq!(fam.count(u(3), &b).unwrap(), members.len() as u128, "{fam:?}");
        }
    }

    #[test]
    fn closed_form_counts() {
        let b = Budget::default();
        // Bell(4) = 15 equivalence relations on the whole 4-set plus those on subsets.
        let eq_all = QuantifierFamily::Eq { classes: Constraint::ANY, class_size: Constraint::ANY, domain: Constraint::ANY };
        assert_eq!(eq_all.count(u(4), &b).unwrap(), 1 + 4 + 6 * 2 + 4 * 5 + 15);
        assert_eq!(QuantifierFamily::Inj(Constraint::exact(1)).count(u(4), &b).unwrap(), 16);
        assert_eq!(QuantifierFamily::Ord(Constraint::exact(3)).count(u(4), &b).unwrap(), 24);
        assert_eq!(QuantifierFamily::NAry { arity: 1, domain: Constraint::ANY }.count(u(5), &b).unwrap(), 32);
        let tight = Budget { max_members: 3, max_work: 10 };
        assert!(matches!(QuantifierFamily::mon_exact(2).members(u(6), &tight), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn spec_round_trip() {
        for text in [
            "trivial", "mon:2", "mon<=:2", "mon<:N/2", "mon:*", "inj:3", "inj<=:N/4", "eq:2,3", "eq:<=2,*",
            "eqdom:4", "ord:4", "ord<:4", "nary:2,3", "nary:2,=3", "iso:R", "sum(mon:1;mon:2)", "union(mon:1;trivial)",
            "mon:N*2/3", "mon:N",
        ] {
            let s = FamilySpec::parse(text).unwrap();
            assert_eq!(s.to_string(), text);
        }
        assert_eq!(FamilySpec::parse("mon:<=2").unwrap().to_string(), "mon<=:2");
        assert!(matches!(FamilySpec::parse("mon2"), Err(Error::Parse { pos: 3, .. })));
        assert!(FamilySpec::parse("bogus:1").is_err());
        let lookup = |_: &str| None;
        assert!(matches!(FamilySpec::parse("iso:S").unwrap().resolve(&lookup), Err(Error::Unbound(_))));
        assert_eq!(Bound::HALF.eval(7), 3);
    }
}
