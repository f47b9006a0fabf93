//! Strong and weak forgetting for propositional and first-order theories.

pub mod fo;
pub mod forget;
pub mod formula;
pub mod names;
pub mod nnf;
pub mod prop;
pub mod random;
pub mod oracle;
pub mod signature;
pub mod simplify;
pub mod subst;
pub mod syntax;
pub mod trace;

pub use forget::{forget_strong, forget_weak, snc, wsc};
pub use formula::{FixKind, Fixpoint, Formula, FormulaError, Polarity, Term};
pub use signature::{Signature, SignatureError, Theory};
pub use syntax::{parse_formula, parse_theory, print_formula, ParseError};
pub use trace::{EngineError, Outcome, Rule, Status, Step, Trace};
