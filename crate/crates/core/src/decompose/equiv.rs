//! A partial injection defined from an equivalence relation and two sets.

use alloc::vec::Vec;

use crate::budget::Budget;
use crate::elements::{Elem, ElemSet};
use crate::error::{Error, Result};
use crate::invariants::nu_ge;
use crate::logic::ast::Formula;
use crate::logic::eval::{defined_relation, Model};
use crate::relation::{EquivalenceRelation, PartialInjection, Relation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InjFromEquiv {
    /// `a_0, a_1, ...`: consecutive pairs from distinct classes.
    pub a: Vec<Elem>,
    pub p0: ElemSet,
    pub p1: ElemSet,
    pub formula: Formula,
    pub injection: PartialInjection,
}

/// `P₀(x) ∧ P₁(y) ∧ x E y` with `P₀, P₁` the least and second least
/// elements of each class of size at least 2.
pub fn inj_from_equiv(e: &EquivalenceRelation, budget: &Budget) -> Result<InjFromEquiv> {
    let nu = nu_ge(e, 2);
    if nu == 0 {
        return Err(Error::Precondition("the equivalence relation has no class of size at least 2".into()));
    }
    let u = e.universe();
    let mut a = Vec::new();
    for b in e.blocks().iter().filter(|b| b.len() >= 2) {
        a.push(b[0]);
        a.push(b[1]);
    }
    let p0: ElemSet = a.iter().step_by(2).collect();
    let p1: ElemSet = a.iter().skip(1).step_by(2).collect();
    let formula = Formula::And(alloc::vec![
        Formula::atom("P0", &["x"]),
        Formula::atom("P1", &["y"]),
        Formula::atom("E", &["x", "y"]),
    ]);
    let model = Model::new(u)
        .with_relation("P0", Relation::unary(u, &p0)?)?
        .with_relation("P1", Relation::unary(u, &p1)?)?
        .with_relation("E", e.to_relation())?;
    let defined = defined_relation(&formula, &model, &["x".into(), "y".into()], budget)?;
    let injection = PartialInjection::from_relation(&defined)
        .map_err(|_| Error::Construction("the defined relation is not one-to-one".into()))?;
    if injection.len() < nu {
        return Err(Error::Construction(alloc::format!(
            "the defined injection has domain {}, below nu = {nu}",
            injection.len()
        )));
    }
    Ok(InjFromEquiv { a, p0, p1, formula, injection })
}
