//! The `(A, C̄)` support, the core `R₁ = R ↾ (A ∪ A¹)` through which `R`
//! factors, and injections defined from permuted copies of `R`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::budget::Budget;
use crate::combinatorics;
use crate::decompose::{pattern_width, patterns_with_x};
use crate::elements::{Elem, ElemSet, Permutation};
use crate::error::{Error, Result};
use crate::invariants::{lambda1, type_classes};
use crate::logic::ast::{Formula, Term};
use crate::logic::eval::{defined_relation, Model};
use crate::relation::{for_each_tuple, EquivalenceRelation, PartialInjection, Relation};
use crate::types::{TypeComputer, TypeOptions};

/// `Σ_k |{tp_bs(b, ∪_{ℓ≠k} A_ℓ, R) : b ∈ A_k}|`.
fn level_score(r: &Relation, levels: &[ElemSet]) -> usize {
    let rels = core::slice::from_ref(r);
    let mut buf = Vec::new();
    let mut total = 0;
    for (k, level) in levels.iter().enumerate() {
        if level.is_empty() {
            continue;
        }
        let others = levels
            .iter()
            .enumerate()
            .filter(|&(l, _)| l != k)
            .fold(ElemSet::new(), |acc, (_, s)| acc.union(s));
        let tc = TypeComputer::new(1, &others, rels, TypeOptions::default());
        let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
        for b in level.iter() {
            tc.signature(&[b], &mut buf);
            seen.insert(buf.clone());
        }
        total += seen.len();
    }
    total
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcSupport {
    /// The final stage `A_0, ..., A_{n-1}`.
    pub levels: Vec<ElemSet>,
    pub score: usize,
    pub steps: usize,
    pub a: ElemSet,
    /// Classes of `E_A` outside `A`, in order of least element.
    pub classes: Vec<Vec<Elem>>,
    pub c: Vec<ElemSet>,
    pub e_ac: EquivalenceRelation,
    pub lambda1: usize,
    pub lambda1_exact: bool,
}

/// The outcome of checking clauses (A)-(D).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcSupportCheck {
    pub size_bound: bool,
    /// A pair `b̄ ≅ c̄`, coordinatewise `E_{A,C̄}`-equivalent, with
    /// `R(b̄) ≠ R(c̄)`.
    pub factor_violation: Option<(Vec<Elem>, Vec<Elem>)>,
    pub class_bound: bool,
    pub c_bound: bool,
}

impl AcSupportCheck {
    pub fn ok(&self) -> bool {
        self.size_bound && self.factor_violation.is_none() && self.class_bound && self.c_bound
    }
}

fn check_precondition(r: &Relation, l1: usize) -> Result<()> {
    let n = r.arity();
    let size = r.universe().size() as usize;
    if l1 * n * n + n >= size {
        return Err(Error::Precondition(format!(
            "lambda1 * n^2 + n = {} must be below N = {size}",
            l1 * n * n + n
        )));
    }
    Ok(())
}

/// The `(A, C̄)` support with `n - 1` sets in `C̄`, clauses verified.
pub fn ac_support(r: &Relation, budget: &Budget) -> Result<AcSupport> {
    let l = ac_support_with(r, r.arity().saturating_sub(1), budget)?;
    let check = verify_ac_support(r, &l, budget)?;
    if !check.ok() {
        return Err(Error::Construction(format!("(A, C) support clauses fail: {check:?}")));
    }
    Ok(l)
}

/// The construction with `c_len` sets in `C̄`, unverified.
pub fn ac_support_with(r: &Relation, c_len: usize, budget: &Budget) -> Result<AcSupport> {
    let u = r.universe();
    let n = r.arity();
    let l1 = lambda1(r, budget)?;
    check_precondition(r, l1.value)?;
    let mut levels: Vec<ElemSet> = alloc::vec![ElemSet::new(); n];
    let mut score = 0;
    let mut steps = 0;
    // Each step adds at most one new element to each level, trying the
    // choices in lexicographic order with "nothing" first.
    loop {
        let used = levels.iter().fold(ElemSet::new(), |acc, s| acc.union(s));
        let free: Vec<Elem> = used.complement(u).to_vec();
        budget.check_work("(A, C) support step", combinatorics::pow(free.len() as u64 + 1, n as u64))?;
        let mut choice = alloc::vec![0usize; n];
        let mut found = None;
        'odometer: loop {
            let mut i = n;
            loop {
                if i == 0 {
                    break 'odometer;
                }
                i -= 1;
                choice[i] += 1;
                if choice[i] <= free.len() {
                    break;
                }
                choice[i] = 0;
            }
            let picked: Vec<usize> = choice.iter().copied().filter(|&c| c > 0).collect();
            let distinct: BTreeSet<usize> = picked.iter().copied().collect();
            if distinct.len() != picked.len() {
                continue;
            }
            let next: Vec<ElemSet> = levels
                .iter()
                .zip(&choice)
                .map(|(s, &c)| {
                    let mut s = s.clone();
                    if c > 0 {
                        s.insert(free[c - 1]);
                    }
                    s
                })
                .collect();
            let s = level_score(r, &next);
            if s > score {
                found = Some((next, s));
                break;
            }
        }
        match found {
            Some((next, s)) => {
                levels = next;
                score = s;
                steps += 1;
            }
            None => break,
        }
    }
    let a = levels.iter().fold(ElemSet::new(), |acc, s| acc.union(s));
    let classes = type_classes(r, &a);
    let mut c: Vec<ElemSet> = Vec::with_capacity(c_len);
    let mut taken = ElemSet::new();
    for l in 0..c_len {
        let mut cl = ElemSet::new();
        for class in classes.iter().filter(|k| k.len() >= 2 + l && k.len() <= n) {
            if let Some(&x) = class.iter().find(|&&x| !taken.contains(x)) {
                cl.insert(x);
            }
        }
        taken = taken.union(&cl);
        c.push(cl);
    }
    let e_ac = build_e_ac(r, &a, &c)?;
    Ok(AcSupport { levels, score, steps, a, classes, c, e_ac, lambda1: l1.value, lambda1_exact: l1.exact })
}

/// `a E_{A,C̄} b` iff `a, b` have the same basic type over `A` and lie in
/// the same `C_ℓ`s. Every element of the universe lies in a class.
pub fn build_e_ac(r: &Relation, a: &ElemSet, c: &[ElemSet]) -> Result<EquivalenceRelation> {
    let u = r.universe();
    u.check_set(a)?;
    let mut blocks: Vec<Vec<Elem>> = a.iter().map(|x| alloc::vec![x]).collect();
    for class in type_classes(r, a) {
        let mut parts: Vec<(Vec<bool>, Vec<Elem>)> = Vec::new();
        for x in class {
            let key: Vec<bool> = c.iter().map(|s| s.contains(x)).collect();
            match parts.iter_mut().find(|(k, _)| *k == key) {
                Some((_, p)) => p.push(x),
                None => parts.push((key, alloc::vec![x])),
            }
        }
        blocks.extend(parts.into_iter().map(|(_, p)| p));
    }
    EquivalenceRelation::new(u, blocks)
}

fn class_index(e: &EquivalenceRelation) -> Vec<usize> {
    let mut idx = alloc::vec![usize::MAX; e.universe().size() as usize];
    for (i, b) in e.blocks().iter().enumerate() {
        for &x in b {
            idx[x as usize] = i;
        }
    }
    idx
}

/// Checks clauses (A)-(D), clause (B) over all `N^n` tuples.
pub fn verify_ac_support(r: &Relation, l: &AcSupport, budget: &Budget) -> Result<AcSupportCheck> {
    let u = r.universe();
    let n = r.arity();
    budget.check_work("(A, C) support factor clause", combinatorics::pow(u.size() as u64, n as u64))?;
    let idx = class_index(&l.e_ac);
    let mut seen: alloc::collections::BTreeMap<(Vec<usize>, Vec<u8>), (Vec<Elem>, bool)> = Default::default();
    let mut violation = None;
    for_each_tuple(u.size(), n, |t| {
        let key = (t.iter().map(|&x| idx[x as usize]).collect(), combinatorics::equality_pattern(t));
        let value = r.contains(t);
        match seen.get(&key) {
            Some((first, v)) if *v != value => {
                violation = Some((first.clone(), t.to_vec()));
                true
            }
            Some(_) => false,
            None => {
                seen.insert(key, (t.to_vec(), value));
                false
            }
        }
    });
    Ok(AcSupportCheck {
        size_bound: l.a.len() <= n * n * l.lambda1,
        factor_violation: violation,
        class_bound: l.a.len() + l.classes.len() <= l.a.len() + l.lambda1,
        c_bound: l.c.iter().all(|s| s.len() <= l.lambda1),
    })
}

/// `R₁ = R ↾ (A ∪ A¹)` with `A¹` holding `min(n, |K|)` elements of each
/// `E_A`-class `K` outside `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InjCore {
    pub support: AcSupport,
    pub a1: ElemSet,
    pub r1: Relation,
    /// `|Dom(R₁)| ≤ n² λ₁(R)`.
    pub domain_bound: bool,
}

pub fn inj_decompose(r: &Relation, budget: &Budget) -> Result<InjCore> {
    let u = r.universe();
    let n = r.arity();
    let lemma = ac_support(r, budget)?;
    let a1: ElemSet = lemma.classes.iter().flat_map(|k| k.iter().take(n).copied()).collect();
    let r1 = r.restrict(&lemma.a.union(&a1));
    let domain_bound = r1.domain().len() <= n * n * lemma.lambda1;
    let core = InjCore { support: lemma, a1, r1, domain_bound };
    let mut bad = None;
    for_each_tuple(u.size(), n, |t| {
        if inj_reconstruct(&core, t) != r.contains(t) {
            bad = Some(t.to_vec());
            return true;
        }
        false
    });
    if let Some(t) = bad {
        return Err(Error::Construction(format!("reconstruction from R1 disagrees with R at {t:?}")));
    }
    Ok(core)
}

/// `∃ȳ (⋀ x_i E_{A,C̄} y_i ∧ ⋀ (x_i = x_j ↔ y_i = y_j) ∧ R₁(ȳ))`, with `ȳ`
/// ranging over `A ∪ A¹`.
pub fn inj_reconstruct(core: &InjCore, x: &[Elem]) -> bool {
    if x.len() != core.r1.arity() {
        return false;
    }
    let pool = core.support.a.union(&core.a1);
    let e = &core.support.e_ac;
    let candidates: Vec<Vec<Elem>> =
        x.iter().map(|&xi| e.class_of(xi).iter().filter(|&y| pool.contains(y)).collect()).collect();
    fn go(x: &[Elem], cand: &[Vec<Elem>], y: &mut Vec<Elem>, r1: &Relation) -> bool {
        let i = y.len();
        if i == x.len() {
            return r1.contains(y);
        }
        if let Some(j) = x[..i].iter().position(|&z| z == x[i]) {
            y.push(y[j]);
            let found = go(x, cand, y, r1);
            y.pop();
            return found;
        }
        for &c in &cand[i] {
            if y.contains(&c) {
                continue;
            }
            y.push(c);
            let found = go(x, cand, y, r1);
            y.pop();
            if found {
                return true;
            }
        }
        false
    }
    go(x, &candidates, &mut Vec::with_capacity(x.len()), &core.r1)
}

/// Parameters and copies of `R` defining a partial injection `h`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InjectionInterpretation {
    pub p0: ElemSet,
    pub p1: ElemSet,
    pub p2: ElemSet,
    pub r1: Relation,
    pub r2: Relation,
    /// `φ(x, y)` over `P0, P1, P2, R1, R2`.
    pub formula: Formula,
}

impl InjectionInterpretation {
    pub fn model(&self) -> Result<Model> {
        let u = self.r1.universe();
        Model::new(u)
            .with_relation("P0", Relation::unary(u, &self.p0)?)?
            .with_relation("P1", Relation::unary(u, &self.p1)?)?
            .with_relation("P2", Relation::unary(u, &self.p2)?)?
            .with_relation("R1", self.r1.clone())?
            .with_relation("R2", self.r2.clone())
    }

    pub fn defined(&self, budget: &Budget) -> Result<Relation> {
        defined_relation(&self.formula, &self.model()?, &["x".into(), "y".into()], budget)
    }
}

/// Parameters inside `A` of an atomic formula telling `b` from `c` over `A`.
fn separating(r: &Relation, a: &ElemSet, b: Elem, c: Elem) -> Option<Vec<Elem>> {
    let mut buf = Vec::new();
    let mut out = None;
    for_each_tuple(r.universe().size(), r.arity(), |t| {
        if !t.contains(&b) || t.iter().any(|&x| x != b && !a.contains(x)) {
            return false;
        }
        buf.clear();
        buf.extend(t.iter().map(|&x| if x == b { c } else { x }));
        if r.contains(t) != r.contains(&buf) {
            out = Some(t.iter().copied().filter(|&x| x != b).collect());
            return true;
        }
        false
    });
    out
}

fn injection_formula(n: usize) -> Formula {
    let mut parts = alloc::vec![Formula::atom("P1", &["x"]), Formula::atom("P2", &["y"])];
    for p in patterns_with_x(n) {
        let k = pattern_width(&p);
        let zs: Vec<String> = (0..k).map(|j| format!("z{j}")).collect();
        let args = |v: &str| -> Vec<Term> {
            p.iter().map(|&s| if s == 0 { Term::var(v) } else { Term::Var(zs[s - 1].clone()) }).collect()
        };
        let same = Formula::iff(Formula::Atom("R1".into(), args("x")), Formula::Atom("R2".into(), args("y")));
        if k == 0 {
            parts.push(same);
        } else {
            let guard = Formula::And(zs.iter().map(|z| Formula::atom("P0", &[z])).collect());
            parts.push(Formula::forall_all(&zs, Formula::implies(guard, same)));
        }
    }
    Formula::And(parts)
}

/// `x ∈ P1, y ∈ P2` and `x` over `R1` has the basic type of `y` over `R2`,
/// parameters from `P0`.
pub fn interpret_injection(r: &Relation, h: &PartialInjection, budget: &Budget) -> Result<InjectionInterpretation> {
    let u = r.universe();
    u.same(&h.universe())?;
    let n = r.arity();
    let lam = h.len();
    let size = u.size() as usize;
    let l1 = lambda1(r, budget)?;
    if lam > l1.value {
        return Err(Error::Precondition(format!("|Dom(h)| = {lam} exceeds lambda1 = {}", l1.value)));
    }
    if lam * (n + 1) > size {
        return Err(Error::Precondition(format!("|Dom(h)| = {lam} exceeds N/(n+1) = {}", size / (n + 1))));
    }
    let a = &l1.witness.set;
    let reps: Vec<Elem> = type_classes(r, a).iter().take(lam).map(|k| k[0]).collect();
    // Keep only parameters needed to separate the representatives.
    let mut small = ElemSet::new();
    for i in 0..reps.len() {
        for j in 0..i {
            let tc = TypeComputer::new(1, &small, core::slice::from_ref(r), TypeOptions::default());
            if tc.basic_type(&[reps[i]]) != tc.basic_type(&[reps[j]]) {
                continue;
            }
            let params = separating(r, a, reps[i], reps[j])
                .ok_or_else(|| Error::Construction("representatives of distinct types are not separated".into()))?;
            small = small.union(&params.iter().collect());
        }
    }
    if small.len() + 2 * lam > size {
        return Err(Error::Construction(format!("{} parameters leave no room for h", small.len())));
    }
    let support: ElemSet = h.domain().union(&h.range());
    let room: Vec<Elem> = support.complement(u).iter().take(small.len()).collect();
    let pi = Permutation::extend_partial(u, &small.iter().zip(room.iter().copied()).collect::<Vec<_>>())?;
    let r_moved = r.permute(&pi);
    let p0 = pi.apply_set(&small);
    let moved_reps: Vec<Elem> = reps.iter().map(|&x| pi.apply(x)).collect();
    let fix: Vec<(Elem, Elem)> = p0.iter().map(|x| (x, x)).collect();
    let pairs = h.pairs();
    let f = |pick: &dyn Fn(&(Elem, Elem)) -> Elem| -> Result<Permutation> {
        let mut m = fix.clone();
        m.extend(moved_reps.iter().zip(pairs).map(|(&a, p)| (a, pick(p))));
        Permutation::extend_partial(u, &m)
    };
    let r1 = r_moved.permute(&f(&|p| p.0)?);
    let r2 = r_moved.permute(&f(&|p| p.1)?);
    let out = InjectionInterpretation {
        p0,
        p1: h.domain(),
        p2: h.range(),
        r1,
        r2,
        formula: injection_formula(n),
    };
    if out.defined(budget)? != h.to_relation() {
        return Err(Error::Construction("the formula does not define h".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::Universe;
    use alloc::vec;

    fn u(n: u32) -> Universe {
        Universe::new(n).unwrap()
    }

    fn two_pairs() -> Relation {
        Relation::new(u(16), 2, [[0, 1], [2, 3]]).unwrap()
    }

    #[test]
    fn full_relation() {
        let r = Relation::full(u(8), 2).unwrap();
        let l = ac_support(&r, &Budget::default()).unwrap();
        assert_eq!(l.lambda1, 1);
        assert_eq!(l.a.to_vec(), [0, 1]);
        let core = inj_decompose(&r, &Budget::default()).unwrap();
        assert_eq!(core.a1.to_vec(), [2, 3]);
        assert!(core.domain_bound);
    }

    #[test]
    fn injection_graph() {
        let r = two_pairs();
        let l = ac_support(&r, &Budget::default()).unwrap();
        assert!(verify_ac_support(&r, &l, &Budget::default()).unwrap().ok());
        let core = inj_decompose(&r, &Budget::default()).unwrap();
        assert!(core.domain_bound);
        let empty = Relation::empty(u(8), 2).unwrap();
        let core = inj_decompose(&empty, &Budget::default()).unwrap();
        assert!(core.r1.is_empty());
    }

    #[test]
    fn short_c_sequence_misses_classes_of_size_n() {
        // Over A = ∅ the loops {0, 1} form a class of size n = 2, and
        // R(0,1) holds while R(1,0) does not.
        let r = Relation::new(u(16), 2, [[0, 0], [1, 1], [0, 1]]).unwrap();
        let a = ElemSet::new();
        let with = |c: Vec<ElemSet>| AcSupport {
            levels: vec![ElemSet::new(); 2],
            score: 0,
            steps: 0,
            a: a.clone(),
            classes: type_classes(&r, &a),
            e_ac: build_e_ac(&r, &a, &c).unwrap(),
            c,
            lambda1: 2,
            lambda1_exact: true,
        };
        let check = verify_ac_support(&r, &with(vec![]), &Budget::default()).unwrap();
        assert_eq!(check.factor_violation, Some((vec![0, 1], vec![1, 0])));
        let c0: ElemSet = [0u32].iter().collect();
        assert!(verify_ac_support(&r, &with(vec![c0]), &Budget::default()).unwrap().ok());
        assert!(ac_support(&r, &Budget::default()).is_ok());
    }

    #[test]
    fn precondition() {
        let r = Relation::from_predicate(u(6), 2, |t| t[0] < t[1]).unwrap();
        assert!(matches!(ac_support(&r, &Budget::default()), Err(Error::Precondition(_))));
    }

    #[test]
    fn interpreting_injections() {
        let r = two_pairs();
        for pairs in [vec![], vec![(5, 9)], vec![(0, 1), (1, 2)], vec![(3, 3), (7, 0), (10, 15)]] {
            let h = PartialInjection::new(u(16), pairs).unwrap();
            let got = interpret_injection(&r, &h, &Budget::default()).unwrap();
            assert_eq!(got.defined(&Budget::default()).unwrap(), h.to_relation());
        }
        let h = PartialInjection::new(u(16), vec![(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        assert!(matches!(interpret_injection(&r, &h, &Budget::default()), Err(Error::Precondition(_))));
    }
}
