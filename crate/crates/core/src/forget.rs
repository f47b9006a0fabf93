//! Entry points that pick the propositional or first-order engine.

use crate::fo::{forget_strong_fo, forget_weak_fo};
use crate::formula::Formula;
use crate::prop::{forget_strong_prop, forget_weak_prop};
use crate::signature::{ordered_symbols, Theory};
use crate::trace::{EngineError, Outcome};

/// Strong forgetting: equivalent to `Ex2 forget. Th`.
pub fn forget_strong(th: &Theory, forget: &[String]) -> Result<Outcome, EngineError> {
    if th.is_propositional() {
        forget_strong_prop(th, forget)
    } else {
        forget_strong_fo(th, forget)
    }
}

/// Weak forgetting: equivalent to `All2 forget. Th`.
pub fn forget_weak(th: &Theory, forget: &[String]) -> Result<Outcome, EngineError> {
    if th.is_propositional() {
        forget_weak_prop(th, forget)
    } else {
        forget_weak_fo(th, forget)
    }
}

/// Symbols of `Th & A` outside `keep`, in order of first occurrence.
pub fn forget_set(th: &Theory, a: &Formula, keep: &[String]) -> Vec<String> {
    let all = Formula::and([th.conjunction(), a.clone()]);
    ordered_symbols(&all)
        .into_iter()
        .filter(|s| !keep.contains(s))
        .collect()
}

/// Strongest necessary condition of `a` on `keep` under `th`.
pub fn snc(th: &Theory, a: &Formula, keep: &[String]) -> Result<Outcome, EngineError> {
    let forget = forget_set(th, a, keep);
    let mut formulas = th.formulas.clone();
    formulas.push(a.clone());
    forget_strong(&Theory::new(th.name.clone(), formulas), &forget)
}

/// Weakest sufficient condition of `a` on `keep` under `th`.
pub fn wsc(th: &Theory, a: &Formula, keep: &[String]) -> Result<Outcome, EngineError> {
    let forget = forget_set(th, a, keep);
    let target = Formula::implies(th.conjunction(), a.clone());
    forget_weak(&Theory::new(th.name.clone(), vec![target]), &forget)
}
