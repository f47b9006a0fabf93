//! Elimination traces and outcomes.
//!
//! Every step records a formula before and after one rewrite. The two sides
//! are closed under the second-order quantifier being eliminated, so each
//! step is a standalone equivalence that the oracle can check.

use std::fmt;

use crate::formula::Formula;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    ShannonExists,
    ShannonForall,
    AckermannPos,
    AckermannNeg,
    ArtificialConjunct,
    Nnf,
    Simplify,
    DistributeForall,
    ClauseRule,
    FixpointLfp,
    FixpointGfp,
    /// `All2 r. A` rewritten as `~Ex2 r. ~A`.
    Dualize,
    /// Regrouping into a definition and a remainder.
    AckermannForm,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Rule::ShannonExists => "shannon-exists",
            Rule::ShannonForall => "shannon-forall",
            Rule::AckermannPos => "ackermann-pos",
            Rule::AckermannNeg => "ackermann-neg",
            Rule::ArtificialConjunct => "artificial-conjunct",
            Rule::Nnf => "nnf",
            Rule::Simplify => "simplify",
            Rule::DistributeForall => "distribute-forall",
            Rule::ClauseRule => "clause-rule",
            Rule::FixpointLfp => "fixpoint-lfp",
            Rule::FixpointGfp => "fixpoint-gfp",
            Rule::Dualize => "dualize",
            Rule::AckermannForm => "ackermann-form",
        };
        f.write_str(name)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub rule: Rule,
    pub before: Formula,
    pub after: Formula,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trace {
    pub steps: Vec<Step>,
}

impl Trace {
    pub fn new() -> Trace {
        Trace::default()
    }

    /// Records a step unless it changed nothing.
    pub fn push(&mut self, rule: Rule, before: Formula, after: Formula) {
        if before != after {
            self.steps.push(Step { rule, before, after });
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn rules(&self) -> Vec<Rule> {
        self.steps.iter().map(|s| s.rule).collect()
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.steps.iter().enumerate() {
            writeln!(f, "[{}] {}", i + 1, s.rule)?;
            writeln!(f, "    {}", s.before)?;
            writeln!(f, " => {}", s.after)?;
        }
        Ok(())
    }
}

/// Which fragment an elimination landed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Propositional,
    FirstOrder,
    Fixpoint,
    Failed,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Propositional => "propositional",
            Status::FirstOrder => "first-order",
            Status::Fixpoint => "fixpoint",
            Status::Failed => "failed",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub status: Status,
    /// The result, or for a failure the residual formula: the symbols not yet
    /// eliminated stay under their second-order quantifiers.
    pub formula: Formula,
    pub reason: Option<String>,
    pub trace: Trace,
}

impl Outcome {
    pub fn done(status: Status, formula: Formula, trace: Trace) -> Outcome {
        Outcome {
            status,
            formula,
            reason: None,
            trace,
        }
    }

    pub fn failed(reason: String, residual: Formula, trace: Trace) -> Outcome {
        Outcome {
            status: Status::Failed,
            formula: residual,
            reason: Some(reason),
            trace,
        }
    }

    pub fn is_failed(&self) -> bool {
        self.status == Status::Failed
    }

    /// The eliminated formula; `None` on failure.
    pub fn result(&self) -> Option<&Formula> {
        (!self.is_failed()).then_some(&self.formula)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("the propositional engine needs a propositional theory")]
    NotPropositional,
    #[error("theory is not closed (free variables: {0})")]
    NotClosed(String),
    #[error("input already contains second-order quantifiers or fixpoints")]
    UnsupportedInput,
    #[error("`{0}` is both forgotten and kept")]
    Overlap(String),
}
