//! Monadic content of a relation: a definable minimum support (`φ*`), sets
//! of size `λ₀(R)` defined from copies of `R`, and the monadic core.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::budget::Budget;
use crate::combinatorics;
use crate::decompose::{adjust_size, pattern_width, patterns_with_x, SetDefinition};
use crate::elements::{Elem, ElemSet, Permutation};
use crate::error::{Error, Result};
use crate::invariants::{is_support, lambda0, lambda0_prime, Lambda0Prime};
use crate::logic::ast::{Formula, Term};
use crate::relation::{for_each_tuple, Relation};

fn exact_lambda0_prime(r: &Relation, budget: &Budget) -> Result<Lambda0Prime> {
    let l = lambda0_prime(r, budget)?;
    if !l.exact {
        return Err(Error::BudgetExceeded {
            what: "exact minimum support",
            estimate: l.value as u128,
            limit: budget.max_work as u128,
        });
    }
    Ok(l)
}

/// The set defined by `φ*` and the parameters behind it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiStar {
    /// The minimum support the parameters avoid.
    pub support: ElemSet,
    pub d: Vec<Elem>,
    pub set: ElemSet,
    pub lambda0_prime: usize,
}

/// `{x : some atomic φ(x, ȳ) and some m < n² give φ(x, ȳ) ≢ φ(d_m, ȳ)}`,
/// with `ȳ, x, d_m` pairwise distinct.
pub(crate) fn phi_star_direct(r: &Relation, d: &[Elem]) -> ElemSet {
    let u = r.universe();
    let n = r.arity();
    let mut set = ElemSet::new();
    let mut buf: Vec<Elem> = Vec::new();
    for_each_tuple(u.size(), n, |t| {
        let inside = r.contains(t);
        for &x in t {
            if set.contains(x) {
                continue;
            }
            for &dm in d {
                if t.contains(&dm) {
                    continue;
                }
                buf.clear();
                buf.extend(t.iter().map(|&z| if z == x { dm } else { z }));
                if r.contains(&buf) != inside {
                    set.insert(x);
                    break;
                }
            }
        }
        false
    });
    set
}

/// `φ*(x, d̄; P)` as a formula, `P` an `n`-place symbol and `d̄` constants.
pub fn phi_star_formula(symbol: &str, n: usize, d: &[Elem], var: &str) -> Formula {
    let mut disjuncts = Vec::new();
    for p in patterns_with_x(n) {
        let k = pattern_width(&p);
        let ys: Vec<String> = (0..k).map(|j| format!("y{j}")).collect();
        let term = |s: usize, first: &Term| if s == 0 { first.clone() } else { Term::Var(ys[s - 1].clone()) };
        let x = Term::var(var);
        for &dm in d {
            let dm = Term::Const(dm);
            let mut parts = Vec::new();
            let mut all: Vec<Term> = ys.iter().map(|y| Term::Var(y.clone())).collect();
            all.push(x.clone());
            all.push(dm.clone());
            for i in 0..all.len() {
                for j in i + 1..all.len() {
                    parts.push(Formula::not(Formula::Eq(all[i].clone(), all[j].clone())));
                }
            }
            let at_x = Formula::Atom(symbol.into(), p.iter().map(|&s| term(s, &x)).collect());
            let at_d = Formula::Atom(symbol.into(), p.iter().map(|&s| term(s, &dm)).collect());
            parts.push(Formula::iff(at_x, Formula::not(at_d)));
            disjuncts.push(Formula::exists_all(&ys, Formula::And(parts)));
        }
    }
    match disjuncts.len() {
        0 => Formula::False,
        1 => disjuncts.pop().expect("one"),
        _ => Formula::Or(disjuncts),
    }
}

fn check_phi_star_thresholds(n: usize, size: usize, l0: usize) -> Result<()> {
    if 3 * (n * n + n) >= size {
        return Err(Error::Precondition(format!(
            "N/3 must exceed n^2 + n = {} (N = {size}, n = {n})",
            n * n + n
        )));
    }
    if 3 * l0 >= 2 * size {
        return Err(Error::Precondition(format!("lambda0' = {l0} must be below 2N/3 (N = {size})")));
    }
    Ok(())
}

/// The `φ*` set: parameters `d̄` are the `n²` least elements outside the
/// least minimum support, and the set is checked to be a support of size
/// `λ'₀(R)` inside it.
pub fn phi_star_set(r: &Relation, budget: &Budget) -> Result<PhiStar> {
    let n = r.arity();
    let size = r.universe().size() as usize;
    if 3 * (n * n + n) >= size {
        check_phi_star_thresholds(n, size, 0)?;
    }
    let l0 = exact_lambda0_prime(r, budget)?;
    check_phi_star_thresholds(n, size, l0.value)?;
    let support = l0.witness.set.clone();
    let d: Vec<Elem> = support.complement(r.universe()).iter().take(n * n).collect();
    let set = phi_star_direct(r, &d);
    if !set.is_subset(&support) || set.len() != l0.value || !is_support(&set, r)? {
        return Err(Error::Construction(format!(
            "phi* defines {:?}, expected a support of size {} inside {:?}",
            set, l0.value, support
        )));
    }
    Ok(PhiStar { support, d, set, lambda0_prime: l0.value })
}

/// A relation of arity `n - 1` read off `R` by identifying two places or
/// fixing one place to a constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reduction {
    /// Place `drop` takes the value of place `keep < drop`.
    Identify { keep: usize, drop: usize },
    Constant { place: usize, value: Elem },
}

impl Reduction {
    fn candidates(r: &Relation) -> Vec<Reduction> {
        let n = r.arity();
        let mut out = Vec::new();
        for drop in 1..n {
            for keep in 0..drop {
                out.push(Reduction::Identify { keep, drop });
            }
        }
        for place in 0..n {
            out.extend(r.universe().elements().map(|value| Reduction::Constant { place, value }));
        }
        out
    }

    /// Arguments of `R` for the reduced tuple `ȳ`, the constant moved by `σ`.
    fn arguments<T: Clone>(&self, y: &[T], constant: impl Fn(Elem) -> T) -> Vec<T> {
        let n = y.len() + 1;
        match *self {
            Reduction::Identify { keep, drop } => (0..n)
                .map(|i| match i.cmp(&drop) {
                    core::cmp::Ordering::Less => y[i].clone(),
                    core::cmp::Ordering::Equal => y[keep].clone(),
                    core::cmp::Ordering::Greater => y[i - 1].clone(),
                })
                .collect(),
            Reduction::Constant { place, value } => (0..n)
                .map(|i| match i.cmp(&place) {
                    core::cmp::Ordering::Less => y[i].clone(),
                    core::cmp::Ordering::Equal => constant(value),
                    core::cmp::Ordering::Greater => y[i - 1].clone(),
                })
                .collect(),
        }
    }

    fn apply(&self, r: &Relation) -> Result<Relation> {
        Relation::from_predicate(r.universe(), r.arity() - 1, |y| r.contains(&self.arguments(y, |c| c)))
    }

    /// Turns a definition over copies of the reduced relation into one over
    /// the same copies of `R`.
    fn lift(&self, def: SetDefinition, r: &Relation) -> SetDefinition {
        let params: Vec<String> = (0..r.arity() - 1).map(|i| format!("p{i}")).collect();
        let vars: Vec<Term> = params.iter().map(|p| Term::Var(p.clone())).collect();
        let mut formula = def.formula;
        for (name, sigma) in &def.copies {
            let atom = Formula::Atom(name.clone(), self.arguments(&vars, |c| Term::Const(sigma.apply(c))));
            formula = formula.substitute_relation(name, &params, &atom);
        }
        SetDefinition::over(r, &def.var, formula, def.copies)
    }
}

/// How the extracted set was obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtractionCase {
    /// `R` is unary: `R` or its complement.
    Unary { complement: bool },
    /// `λ'₀(R) < 2N/3`: `φ*` over `R`.
    PhiStar,
    /// Extraction from a relation of smaller arity defined from `R`.
    Reduced { reduction: Reduction, lambda0: usize, inner: alloc::boxed::Box<ExtractionCase> },
    /// `φ*` over `ψ_j = φ(x̄, y, R) ∧ ¬φ(x̄, y, F_j(R))`, where `F_j` swaps
    /// the first `j` pairs of a distinguishing system.
    Distinguishing { j: usize, lambda0_prime_psi: usize, pattern: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extraction {
    pub set: ElemSet,
    /// `λ₀(R)`.
    pub target: usize,
    pub lambda0_prime: usize,
    pub case: ExtractionCase,
    pub definition: SetDefinition,
}

/// A set of exactly `λ₀(R)` elements defined by a first-order formula over
/// permuted copies of `R`. The definition is re-evaluated by the formula
/// evaluator before it is returned.
///
/// When `λ'₀(R) ≥ 2N/3` and some relation of arity `n - 1` got by
/// identifying two places or fixing one has `λ₀ ≥ min(λ₀(R), N/7n)`, the
/// extraction recurses on the one with the largest `λ₀`; otherwise it uses a
/// distinguishing system.
pub fn monadic_extraction(r: &Relation, budget: &Budget) -> Result<Extraction> {
    let (def, set, case, l0) = extract(r, budget)?;
    let target = target_size(r, &l0, budget)?;
    let (definition, set) = adjust_size(def, &set, target)?;
    let evaluated = definition.evaluate(budget)?;
    if evaluated != set || set.len() != target {
        return Err(Error::Construction(format!(
            "{case:?}: the formula defines {} elements, expected {target}",
            evaluated.len()
        )));
    }
    Ok(Extraction { set, target, lambda0_prime: if l0.exact { l0.value } else { l0.lower }, case, definition })
}

fn target_size(r: &Relation, l0: &Lambda0Prime, budget: &Budget) -> Result<usize> {
    let half = r.universe().half() as usize;
    if l0.exact {
        Ok(l0.value.min(half))
    } else if l0.lower >= half {
        Ok(half)
    } else {
        Err(Error::BudgetExceeded { what: "exact minimum support", estimate: l0.value as u128, limit: budget.max_work as u128 })
    }
}

/// A definable set of size between 1 and `λ₀(R)` (exactly `λ₀(R)` unless
/// the reduction step was taken), or empty when `λ₀(R) = 0`.
fn extract(r: &Relation, budget: &Budget) -> Result<(SetDefinition, ElemSet, ExtractionCase, Lambda0Prime)> {
    let u = r.universe();
    let n = r.arity();
    let size = u.size() as usize;
    let l0 = lambda0_prime(r, budget)?;
    let target = target_size(r, &l0, budget)?;
    let id = Permutation::identity(u);
    if n == 1 {
        let complement = 2 * r.len() > size;
        let atom = Formula::atom("R0", &["x"]);
        let formula = if complement { Formula::not(atom) } else { atom };
        let set = if complement { r.as_set()?.complement(u) } else { r.as_set()? };
        let def = SetDefinition::over(r, "x", formula, alloc::vec![("R0".into(), id)]);
        return Ok((def, set, ExtractionCase::Unary { complement }, l0));
    }
    if l0.exact && 3 * l0.value < 2 * size {
        let ps = phi_star_set(r, budget)?;
        let def = SetDefinition::over(r, "x", phi_star_formula("R0", n, &ps.d, "x"), alloc::vec![("R0".into(), id)]);
        return Ok((def, ps.set, ExtractionCase::PhiStar, l0));
    }
    let mut best: Option<(usize, Reduction, Relation)> = None;
    for red in Reduction::candidates(r) {
        let reduced = red.apply(r)?;
        let v = lambda0(&reduced, budget)?;
        if (v >= target || 7 * n * v >= size) && best.as_ref().is_none_or(|(b, _, _)| v > *b) {
            best = Some((v, red, reduced));
        }
    }
    if let Some((v, red, reduced)) = best {
        let (inner_def, inner_set, inner_case, _) = extract(&reduced, budget)?;
        let (inner_def, inner_set) = adjust_size(inner_def, &inner_set, v.min(target))?;
        let def = red.lift(inner_def, r);
        let case = ExtractionCase::Reduced { reduction: red, lambda0: v, inner: alloc::boxed::Box::new(inner_case) };
        return Ok((def, inner_set, case, l0));
    }
    let (def, set, case) = distinguishing_case(r, budget)?;
    Ok((def, set, case, l0))
}

fn distinguishing_case(r: &Relation, budget: &Budget) -> Result<(SetDefinition, ElemSet, ExtractionCase)> {
    let u = r.universe();
    let size = u.size() as usize;
    let sys = super::distinguishing_system(r, budget)?;
    // Orient every triple so that φ holds at b, then keep the most common φ.
    let oriented: Vec<super::Triple> = sys
        .triples
        .iter()
        .map(|t| if t.values(r).0 { t.clone() } else { super::Triple { b: t.c, c: t.b, ..t.clone() } })
        .collect();
    let mut best: Option<(usize, Vec<usize>)> = None;
    for t in &oriented {
        let count = oriented.iter().filter(|s| s.pattern == t.pattern).count();
        if best.as_ref().is_none_or(|(c, p)| count > *c || (count == *c && t.pattern < *p)) {
            best = Some((count, t.pattern.clone()));
        }
    }
    let Some((_, pattern)) = best else {
        return Err(Error::Construction("case 2: the distinguishing system has no triples".into()));
    };
    let chosen: Vec<&super::Triple> = oriented.iter().filter(|t| t.pattern == pattern).collect();
    let k = pattern_width(&pattern);
    let m = k + 1;
    if 3 * (m * m + m) >= size {
        return Err(Error::Precondition(format!(
            "case 2: N/3 must exceed {} for the {m}-place formulas psi_j (N = {size})",
            m * m + m
        )));
    }
    // ψ_j(x̄, y): argument 0 of the pattern is y, argument s > 0 is x_{s-1}.
    let instance = |t: &[Elem]| -> Vec<Elem> { pattern.iter().map(|&s| if s == 0 { t[k] } else { t[s - 1] }).collect() };

    let mut levels: Vec<(usize, Permutation, Relation, Lambda0Prime)> = Vec::new();
    for j in 1..=chosen.len() {
        let swaps: Vec<(Elem, Elem)> = chosen[..j].iter().map(|t| (t.b, t.c)).collect();
        let fj = Permutation::transpositions(u, &swaps)?;
        let rj = r.permute(&fj);
        let psi = Relation::from_predicate(u, m, |t| {
            let inst = instance(t);
            r.contains(&inst) && !rj.contains(&inst)
        })?;
        let l = exact_lambda0_prime(&psi, budget)?;
        levels.push((j, fj, psi, l));
    }
    let middle = levels.iter().position(|(_, _, _, l)| 3 * l.value >= size && 3 * l.value < 2 * size);
    let pick = match middle {
        Some(i) => i,
        None if levels.iter().all(|(_, _, _, l)| 3 * l.value < size) => {
            match levels.iter().enumerate().max_by_key(|(i, (_, _, _, l))| (l.value, core::cmp::Reverse(*i))) {
                Some((i, (_, _, _, l))) if l.value > 0 => i,
                _ => return Err(Error::Construction("case 2: every psi_j is trivial".into())),
            }
        }
        None => {
            return Err(Error::Construction(
                "case 2: lambda0'(psi_j) jumps from below N/3 to at least 2N/3, the case the proof excludes".into(),
            ))
        }
    };
    let (j, fj, psi, l) = levels.swap_remove(pick);
    let ps = phi_star_set(&psi, budget)?;
    let params: Vec<String> = (0..m).map(|i| format!("z{i}")).collect();
    let args = |rel: &str| {
        Formula::Atom(
            rel.into(),
            pattern.iter().map(|&s| Term::Var(params[if s == 0 { k } else { s - 1 }].clone())).collect(),
        )
    };
    let psi_formula = Formula::And(alloc::vec![args("R0"), Formula::not(args("R1"))]);
    let formula = phi_star_formula("P", m, &ps.d, "x").substitute_relation("P", &params, &psi_formula);
    let def = SetDefinition::over(r, "x", formula, alloc::vec![("R0".into(), Permutation::identity(u)), ("R1".into(), fj)]);
    Ok((def, ps.set, ExtractionCase::Distinguishing { j, lambda0_prime_psi: l.value, pattern }))
}

/// `R₁ = R ↾ (A ∪ d̄)` for the least minimum support `A` and the `n` least
/// elements `d̄` outside it; `R` itself when `λ'₀(R) + n ≥ N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonadicCore {
    pub support: ElemSet,
    pub d: Vec<Elem>,
    pub r1: Relation,
    pub whole: bool,
}

pub fn monadic_core(r: &Relation, budget: &Budget) -> Result<MonadicCore> {
    let u = r.universe();
    let n = r.arity();
    let l0 = exact_lambda0_prime(r, budget)?;
    let support = l0.witness.set.clone();
    let core = if l0.value + n >= u.size() as usize {
        MonadicCore { support, d: Vec::new(), r1: r.clone(), whole: true }
    } else {
        let d: Vec<Elem> = support.complement(u).iter().take(n).collect();
        let keep = support.union(&d.iter().collect());
        MonadicCore { r1: r.restrict(&keep), support, d, whole: false }
    };
    budget.check_work("monadic core round trip", combinatorics::pow(u.size() as u64, n as u64))?;
    let mut bad = None;
    for_each_tuple(u.size(), n, |t| {
        if monadic_reconstruct(&core, t) != r.contains(t) {
            bad = Some(t.to_vec());
            return true;
        }
        false
    });
    if let Some(t) = bad {
        return Err(Error::Construction(format!("monadic core disagrees with R at {t:?}")));
    }
    if core.r1.domain().len() > l0.value + n {
        return Err(Error::Construction("the core's domain exceeds lambda0' + n".into()));
    }
    Ok(core)
}

/// `R(ā)` from the core: elements outside the support are renamed to
/// `d_0, d_1, ...` in order of first occurrence.
pub fn monadic_reconstruct(core: &MonadicCore, t: &[Elem]) -> bool {
    if core.whole {
        return core.r1.contains(t);
    }
    let mut seen: Vec<Elem> = Vec::new();
    let moved: Vec<Elem> = t
        .iter()
        .map(|&x| {
            if core.support.contains(x) {
                return x;
            }
            let i = seen.iter().position(|&y| y == x).unwrap_or_else(|| {
                seen.push(x);
                seen.len() - 1
            });
            core.d[i]
        })
        .collect();
    core.r1.contains(&moved)
}
