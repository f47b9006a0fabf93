use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::formula::Formula;

/// Declared vocabulary: propositional variables, relation symbols with their
/// arities, and individual constants.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub props: BTreeSet<String>,
    pub relations: BTreeMap<String, usize>,
    pub constants: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("symbol `{symbol}` used with arity {found}, declared with arity {declared}")]
    Arity {
        symbol: String,
        declared: usize,
        found: usize,
    },
    #[error("symbols {0:?} appear in both the forget and the keep list")]
    Overlap(Vec<String>),
}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    pub fn with_prop(mut self, name: &str) -> Signature {
        self.props.insert(name.to_string());
        self
    }

    pub fn with_relation(mut self, name: &str, arity: usize) -> Signature {
        self.relations.insert(name.to_string(), arity);
        self
    }

    pub fn with_constant(mut self, name: &str) -> Signature {
        self.constants.insert(name.to_string());
        self
    }

    /// Arity of a symbol; propositional variables have arity 0.
    pub fn arity(&self, symbol: &str) -> Option<usize> {
        if self.props.contains(symbol) {
            Some(0)
        } else {
            self.relations.get(symbol).copied()
        }
    }

    pub fn declares(&self, symbol: &str) -> bool {
        self.arity(symbol).is_some()
    }

    /// Records a symbol with the given arity, or reports a clash with an
    /// earlier declaration.
    pub fn declare(&mut self, symbol: &str, arity: usize) -> Result<(), SignatureError> {
        match self.arity(symbol) {
            Some(declared) if declared != arity => Err(SignatureError::Arity {
                symbol: symbol.to_string(),
                declared,
                found: arity,
            }),
            Some(_) => Ok(()),
            None => {
                if arity == 0 {
                    self.props.insert(symbol.to_string());
                } else {
                    self.relations.insert(symbol.to_string(), arity);
                }
                Ok(())
            }
        }
    }

    /// Adds every free symbol and constant of `f`.
    pub fn absorb(&mut self, f: &Formula) -> Result<(), SignatureError> {
        for (sym, arity) in f.free_symbols() {
            self.declare(&sym, arity)?;
        }
        self.constants.extend(f.constants());
        Ok(())
    }

    /// Checks the per-request partition into forgotten and kept symbols.
    pub fn check_partition(forget: &[String], keep: &[String]) -> Result<(), SignatureError> {
        let keep: BTreeSet<&String> = keep.iter().collect();
        let overlap: Vec<String> = forget.iter().filter(|s| keep.contains(s)).cloned().collect();
        if overlap.is_empty() {
            Ok(())
        } else {
            Err(SignatureError::Overlap(overlap))
        }
    }
}

/// A named finite list of formulas, read conjunctively.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Theory {
    pub name: String,
    pub formulas: Vec<Formula>,
}

impl Theory {
    pub fn new(name: impl Into<String>, formulas: Vec<Formula>) -> Theory {
        Theory {
            name: name.into(),
            formulas,
        }
    }

    pub fn empty() -> Theory {
        Theory::new("empty", Vec::new())
    }

    /// The conjunction of all formulas; `T` for the empty theory.
    pub fn conjunction(&self) -> Formula {
        Formula::and(self.formulas.iter().cloned())
    }

    pub fn is_propositional(&self) -> bool {
        self.formulas.iter().all(Formula::is_propositional)
    }

    pub fn is_closed(&self) -> bool {
        self.formulas.iter().all(Formula::is_closed)
    }

    /// Free symbols in order of first occurrence.
    pub fn vocabulary(&self) -> Vec<String> {
        let mut seen = Vec::new();
        for f in &self.formulas {
            for s in ordered_symbols(f) {
                if !seen.contains(&s) {
                    seen.push(s);
                }
            }
        }
        seen
    }
}

/// Free symbols of `f` in order of first (left-to-right) occurrence.
pub fn ordered_symbols(f: &Formula) -> Vec<String> {
    let free = f.free_symbols();
    let mut out: Vec<String> = Vec::new();
    f.visit(&mut |g| {
        let name = match g {
            Formula::Prop(p) => p,
            Formula::Atom(r, _) => r,
            _ => return,
        };
        if free.contains_key(name) && !out.contains(name) {
            out.push(name.clone());
        }
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn declare_detects_arity_clash() {
        let mut sig = Signature::new().with_relation("r", 2);
        assert!(sig.declare("r", 2).is_ok());
        assert!(matches!(
            sig.declare("r", 1),
            Err(SignatureError::Arity { declared: 2, found: 1, .. })
        ));
        sig.declare("p", 0).unwrap();
        assert_eq!(sig.arity("p"), Some(0));
    }

    #[test]
    fn partition_must_be_disjoint() {
        let f = vec!["p".to_string()];
        assert!(Signature::check_partition(&f, &["q".to_string()]).is_ok());
        assert!(Signature::check_partition(&f, &f).is_err());
    }

    #[test]
    fn empty_theory_is_top() {
        assert_eq!(Theory::empty().conjunction(), Formula::Top);
    }

    #[test]
    fn vocabulary_in_occurrence_order() {
        let th = Theory::new(
            "t",
            vec![
                Formula::or([Formula::prop("b"), Formula::prop("a")]),
                Formula::prop("c"),
            ],
        );
        assert_eq!(th.vocabulary(), vec!["b", "a", "c"]);
    }
}
