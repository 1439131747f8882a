//! Coding an `n`-place relation on `A` by `n` partial injections.
//!
//! Tuple `j` gets a carrier `b_j` outside `A`. `F_ℓ` sends `a ∈ A` to the
//! first carrier of a tuple with `a` in place `ℓ` and chains those carriers
//! in tuple order; `F_ℓ(a) = a` when no tuple has `a` in place `ℓ`. Then
//! `x̄ ∈ R` iff some `z ≠ x_ℓ` is reachable from every `x_ℓ` along `F_ℓ`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::elements::{Elem, ElemSet, Universe};
use crate::error::{Error, Result};
use crate::family::FamilyRef;
use crate::logic::ast::{Formula, SoBinder, Term};
use crate::logic::eval::Model;
use crate::relation::{PartialInjection, Relation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NAryEncoding {
    pub universe: Universe,
    pub arity: usize,
    pub a: ElemSet,
    /// `b_j` for the `j`-th tuple of `R`.
    pub carriers: Vec<Elem>,
    pub functions: Vec<PartialInjection>,
}

impl NAryEncoding {
    /// The functions as binary relations `F0, F1, ...`.
    pub fn model(&self) -> Result<Model> {
        let mut m = Model::new(self.universe);
        for (l, f) in self.functions.iter().enumerate() {
            m = m.with_relation(&format!("F{l}"), f.to_relation())?;
        }
        Ok(m)
    }
}

pub fn encode_nary(r: &Relation, a: &ElemSet) -> Result<NAryEncoding> {
    let u = r.universe();
    u.check_set(a)?;
    if !r.domain().is_subset(a) {
        return Err(Error::Precondition("Dom(R) must lie inside A".into()));
    }
    let outside = a.complement(u);
    if r.len() > outside.len() {
        return Err(Error::Precondition(format!(
            "{} tuples need distinct carriers outside A, only {} elements are available",
            r.len(),
            outside.len()
        )));
    }
    let carriers: Vec<Elem> = outside.iter().take(r.len()).collect();
    let rows: Vec<&[Elem]> = r.tuples().collect();
    let n = r.arity();
    let mut functions = Vec::with_capacity(n);
    for l in 0..n {
        let mut pairs = Vec::new();
        for x in a.iter() {
            let mut prev = x;
            for (j, t) in rows.iter().enumerate() {
                if t[l] == x {
                    pairs.push((prev, carriers[j]));
                    prev = carriers[j];
                }
            }
            if prev == x {
                pairs.push((x, x));
            }
        }
        functions.push(PartialInjection::new(u, pairs)?);
    }
    let enc = NAryEncoding { universe: u, arity: n, a: a.clone(), carriers, functions };
    let mut bad = None;
    crate::relation::for_each_tuple(u.size(), n, |t| {
        if decode_nary(&enc, t) != r.contains(t) {
            bad = Some(t.to_vec());
            return true;
        }
        false
    });
    if let Some(t) = bad {
        return Err(Error::Construction(format!("decoding disagrees with R at {t:?}")));
    }
    Ok(enc)
}

fn reachable(f: &PartialInjection, x: Elem) -> Vec<Elem> {
    let mut seen = alloc::vec![x];
    let mut cur = x;
    while let Some(y) = f.apply(cur) {
        if seen.contains(&y) {
            break;
        }
        seen.push(y);
        cur = y;
    }
    seen
}

fn is_start(f: &PartialInjection, x: Elem) -> bool {
    f.apply(x).is_some() && !f.pairs().iter().any(|&(s, t)| t == x && s != x)
}

/// Evaluates the decoding formula at `x̄`, reachability by closure.
pub fn decode_nary(enc: &NAryEncoding, x: &[Elem]) -> bool {
    if x.len() != enc.arity || x.is_empty() {
        return false;
    }
    if !x.iter().zip(&enc.functions).all(|(&xl, f)| is_start(f, xl)) {
        return false;
    }
    let chains: Vec<Vec<Elem>> = x.iter().zip(&enc.functions).map(|(&xl, f)| reachable(f, xl)).collect();
    chains[0]
        .iter()
        .any(|&z| x.iter().zip(&chains).all(|(&xl, c)| z != xl && c.contains(&z)))
}

/// `θ(x, z, F)`: every set containing `x` and closed under `F` away from `z`
/// contains `z`, with the set quantifier ranging over all subsets.
pub fn theta_formula(f: &str, x: &str, z: &str) -> Formula {
    let set = |v: &str| Formula::atom("X", &[v]);
    let closed = Formula::forall_all(
        &["y1".into(), "y2".into()],
        Formula::implies(
            Formula::And(alloc::vec![
                set("y1"),
                Formula::atom(f, &["y1", "y2"]),
                Formula::not(Formula::eq(Term::var("y1"), Term::var(z))),
            ]),
            set("y2"),
        ),
    );
    let binder = SoBinder {
        family: FamilyRef::inline("mon:*").expect("a valid family"),
        var: "X".into(),
        arity: Some(1),
    };
    Formula::SoForall(binder, alloc::boxed::Box::new(Formula::implies(Formula::And(alloc::vec![set(x), closed]), set(z))))
}

/// The decoding formula over `F0, ..., F{n-1}` with free `x0, ..., x{n-1}`.
pub fn decoding_formula(n: usize) -> Formula {
    let mut parts = Vec::new();
    for l in 0..n {
        let f = format!("F{l}");
        let x = format!("x{l}");
        parts.push(Formula::exists("w", Formula::atom(&f, &[&x, "w"])));
        parts.push(Formula::not(Formula::exists(
            "y",
            Formula::And(alloc::vec![
                Formula::not(Formula::eq(Term::var("y"), Term::var(&x))),
                Formula::atom(&f, &["y", &x]),
            ]),
        )));
        parts.push(theta_formula(&f, &x, "z"));
        parts.push(Formula::not(Formula::eq(Term::var("z"), Term::var(&x))));
    }
    Formula::exists("z", Formula::And(parts))
}

/// The free variables of [`decoding_formula`], in order.
pub fn decoding_vars(n: usize) -> Vec<String> {
    (0..n).map(|l| format!("x{l}")).collect()
}
