//! Numeric invariants of relations and of quantifier families.
//!
//! * support sets, `λ'₀(R)` and `λ₀(R) = min(⌊N/2⌋, λ'₀(R))`;
//! * `λ₁(R)`, the most basic 1-types over a parameter set;
//! * `nu_{≥k}(E)` and `uq_k(E)` for equivalence relations;
//! * family versions: the least `λ` above the invariant of every member.

mod equivalence;
mod lambda1;
mod support;

pub use equivalence::{nu_ge, uq, Uq};
pub use lambda1::{lambda1, lambda1_unrestricted, type_count, Lambda1, Lambda1Witness};
pub use support::{
    is_support, is_support_naive, is_support_single_flip, lambda0, lambda0_prime, lambda0_prime_within_domain,
    min_support_by_enumeration, Lambda0Prime, SupportWitness,
};

pub(crate) use lambda1::type_classes;
pub(crate) use support::first_flip_violation;

use crate::budget::Budget;
use crate::elements::Universe;
use crate::error::{Error, Result};
use crate::family::QuantifierFamily;
use crate::relation::Relation;

fn family_max(
    k: &QuantifierFamily,
    u: Universe,
    budget: &Budget,
    mut f: impl FnMut(&Relation) -> Result<usize>,
) -> Result<usize> {
    let mut best: Option<usize> = None;
    for r in k.members(u, budget)? {
        let v = f(&r)?;
        best = Some(best.map_or(v, |b| b.max(v)));
    }
    Ok(best.map_or(0, |b| b + 1))
}

/// `λ₀(K)`: the least `λ` with `λ₀(R) < λ` for every member, 0 when `K[𝒰]`
/// is empty.
pub fn lambda0_k(k: &QuantifierFamily, u: Universe, budget: &Budget) -> Result<usize> {
    family_max(k, u, budget, |r| lambda0(r, budget))
}

/// `λ₁(K)`: the least `λ` with `λ₁(R) < λ` for every member.
pub fn lambda1_k(k: &QuantifierFamily, u: Universe, budget: &Budget) -> Result<usize> {
    family_max(k, u, budget, |r| {
        let l = lambda1(r, budget)?;
        if !l.exact {
            return Err(Error::BudgetExceeded {
                what: "lambda1 parameter sets",
                estimate: budget.max_members as u128 + 1,
                limit: budget.max_members as u128,
            });
        }
        Ok(l.value)
    })
}

/// `μ(K)`: the least `μ` with `|Dom(R)| < μ` for every member.
pub fn mu_k(k: &QuantifierFamily, u: Universe, budget: &Budget) -> Result<usize> {
    family_max(k, u, budget, |r| Ok(r.domain().len()))
}
