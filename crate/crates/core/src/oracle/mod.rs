//! Brute-force semantics used as ground truth: truth tables for
//! propositional formulas and exhaustive finite-model evaluation for
//! first-order, second-order and fixpoint formulas.
//!
//! Nothing here calls into the elimination engines.

mod finite;
mod prop;

use thiserror::Error;

pub use finite::{
    equiv_fo_finite, eval_fo, eval_fo_with, Env, FoVerdict, Interpretation, Relation, MAX_SO_ARITY,
    MAX_SO_DOMAIN,
};
pub use prop::{counterexample_prop, equiv_prop, eval_prop, taut_prop, Valuation, MAX_PROP_VARS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("formula is not propositional")]
    NotPropositional,
    #[error("{0} propositional variables exceed the truth-table limit of {MAX_PROP_VARS}")]
    TooManyVariables(usize),
    #[error("no value for `{0}`")]
    Unmapped(String),
    #[error("`{symbol}` has arity {expected} but is applied to {found} argument(s)")]
    Arity {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("second-order quantification over `{symbol}` needs domain <= {MAX_SO_DOMAIN} and arity <= {MAX_SO_ARITY} (domain {domain}, arity {arity})")]
    SecondOrderGuard {
        symbol: String,
        domain: usize,
        arity: usize,
    },
    #[error("model enumeration too large: {0} interpretations at one domain size")]
    SearchTooLarge(u128),
}
