//! Capture-avoiding substitution.
//!
//! Three flavours share one renaming discipline: terms for individual
//! variables, a formula for a propositional variable, and a parameterised
//! formula for a relation symbol (each occurrence `r(t1..tk)` becomes the
//! replacement with its parameters instantiated to `t1..tk`). Binders of the
//! host formula that would capture a free name of the replacement are renamed
//! with names from the request's [`NameSupply`].

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::formula::{Fixpoint, Formula, Term};
use crate::names::NameSupply;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubstError {
    #[error("`{0}` is bound by a second-order quantifier inside the formula")]
    Capture(String),
    #[error("occurrence of `{symbol}` has {found} arguments, substitution expects {expected}")]
    Arity {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("substitution parameters for `{0}` are not pairwise distinct")]
    DuplicateParams(String),
}

/// `f(p = e)`: every free occurrence of the propositional variable `p`
/// replaced by `e`.
pub fn substitute_prop(f: &Formula, p: &str, e: &Formula) -> Result<Formula, SubstError> {
    if binds_symbol(f, p) {
        return Err(SubstError::Capture(p.to_string()));
    }
    let mut supply = NameSupply::from_formulas([f, e]);
    substitute_rel_with(f, p, &[], e, &mut supply)
}

/// `f(r(params) = e)`, instantiating `params` per occurrence.
pub fn substitute_rel(
    f: &Formula,
    r: &str,
    params: &[String],
    e: &Formula,
) -> Result<Formula, SubstError> {
    let mut supply = NameSupply::from_formulas([f, e]);
    substitute_rel_with(f, r, params, e, &mut supply)
}

/// As [`substitute_rel`], drawing fresh names from a caller-owned supply.
pub fn substitute_rel_with(
    f: &Formula,
    r: &str,
    params: &[String],
    e: &Formula,
    supply: &mut NameSupply,
) -> Result<Formula, SubstError> {
    let distinct: BTreeSet<&String> = params.iter().collect();
    if distinct.len() != params.len() {
        return Err(SubstError::DuplicateParams(r.to_string()));
    }
    supply.reserve_formula(f);
    supply.reserve_formula(e);
    let mut e_vars = e.free_vars();
    for p in params {
        e_vars.remove(p);
    }
    let e_syms: BTreeSet<String> = e.free_symbols().into_keys().collect();
    let ctx = RelSubst {
        symbol: r,
        params,
        replacement: e,
        e_vars: &e_vars,
        e_syms: &e_syms,
    };
    ctx.apply(f, supply)
}

struct RelSubst<'a> {
    symbol: &'a str,
    params: &'a [String],
    replacement: &'a Formula,
    e_vars: &'a BTreeSet<String>,
    e_syms: &'a BTreeSet<String>,
}

impl RelSubst<'_> {
    fn apply(&self, f: &Formula, supply: &mut NameSupply) -> Result<Formula, SubstError> {
        Ok(match f {
            Formula::Prop(p) if p == self.symbol => self.instantiate(&[], supply)?,
            Formula::Atom(r, args) if r == self.symbol => self.instantiate(args, supply)?,
            Formula::Top | Formula::Bottom | Formula::Prop(_) | Formula::Atom(..) | Formula::Eq(..) => {
                f.clone()
            }
            Formula::Not(g) => Formula::not(self.apply(g, supply)?),
            Formula::And(items) => Formula::and(
                items
                    .iter()
                    .map(|g| self.apply(g, supply))
                    .collect::<Result<Vec<_>, _>>()?,
            ),
            Formula::Or(items) => Formula::or(
                items
                    .iter()
                    .map(|g| self.apply(g, supply))
                    .collect::<Result<Vec<_>, _>>()?,
            ),
            Formula::Implies(a, b) => Formula::implies(self.apply(a, supply)?, self.apply(b, supply)?),
            Formula::Iff(a, b) => Formula::iff(self.apply(a, supply)?, self.apply(b, supply)?),
            Formula::Forall(v, g) | Formula::Exists(v, g) => {
                let (v, g) = if self.e_vars.contains(v) {
                    let fresh = supply.fresh(v);
                    let renamed = rename_var(g, v, &fresh, supply);
                    (fresh, renamed)
                } else {
                    (v.clone(), (**g).clone())
                };
                let body = self.apply(&g, supply)?;
                if matches!(f, Formula::Forall(..)) {
                    Formula::forall(v, body)
                } else {
                    Formula::exists(v, body)
                }
            }
            Formula::Forall2(s, g) | Formula::Exists2(s, g) => {
                if s == self.symbol {
                    return Ok(f.clone());
                }
                let (s, g) = if self.e_syms.contains(s) {
                    let fresh = supply.fresh(s);
                    let renamed = rename_symbol(g, s, &fresh);
                    (fresh, renamed)
                } else {
                    (s.clone(), (**g).clone())
                };
                let body = self.apply(&g, supply)?;
                if matches!(f, Formula::Forall2(..)) {
                    Formula::forall2(s, body)
                } else {
                    Formula::exists2(s, body)
                }
            }
            Formula::Fixpoint(fp) => {
                if fp.relation == self.symbol {
                    return Ok(f.clone());
                }
                let mut fp = (**fp).clone();
                if self.e_syms.contains(&fp.relation) {
                    let fresh = supply.fresh(&fp.relation);
                    fp.body = rename_symbol(&fp.body, &fp.relation, &fresh);
                    fp.relation = fresh;
                }
                rename_clashing_params(&mut fp, self.e_vars, supply);
                fp.body = self.apply(&fp.body, supply)?;
                Formula::Fixpoint(Box::new(fp))
            }
        })
    }

    fn instantiate(&self, args: &[Term], supply: &mut NameSupply) -> Result<Formula, SubstError> {
        if args.len() != self.params.len() {
            return Err(SubstError::Arity {
                symbol: self.symbol.to_string(),
                expected: self.params.len(),
                found: args.len(),
            });
        }
        let map: BTreeMap<String, Term> = self
            .params
            .iter()
            .cloned()
            .zip(args.iter().cloned())
            .collect();
        Ok(subst_terms(self.replacement, &map, supply))
    }
}

fn rename_clashing_params(fp: &mut Fixpoint, avoid: &BTreeSet<String>, supply: &mut NameSupply) {
    for i in 0..fp.params.len() {
        if avoid.contains(&fp.params[i]) {
            let fresh = supply.fresh(&fp.params[i]);
            fp.body = rename_var(&fp.body, &fp.params[i], &fresh, supply);
            fp.params[i] = fresh;
        }
    }
}

/// Simultaneous capture-avoiding substitution of terms for free variables.
pub fn subst_terms(f: &Formula, map: &BTreeMap<String, Term>, supply: &mut NameSupply) -> Formula {
    if map.is_empty() {
        return f.clone();
    }
    let term = |t: &Term| match t {
        Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| t.clone()),
        c => c.clone(),
    };
    match f {
        Formula::Top | Formula::Bottom | Formula::Prop(_) => f.clone(),
        Formula::Atom(r, args) => Formula::Atom(r.clone(), args.iter().map(term).collect()),
        Formula::Eq(a, b) => Formula::Eq(term(a), term(b)),
        Formula::Not(g) => Formula::not(subst_terms(g, map, supply)),
        Formula::And(items) => Formula::and(items.iter().map(|g| subst_terms(g, map, supply)).collect::<Vec<_>>()),
        Formula::Or(items) => Formula::or(items.iter().map(|g| subst_terms(g, map, supply)).collect::<Vec<_>>()),
        Formula::Implies(a, b) => Formula::implies(subst_terms(a, map, supply), subst_terms(b, map, supply)),
        Formula::Iff(a, b) => Formula::iff(subst_terms(a, map, supply), subst_terms(b, map, supply)),
        Formula::Forall2(s, g) => Formula::forall2(s.clone(), subst_terms(g, map, supply)),
        Formula::Exists2(s, g) => Formula::exists2(s.clone(), subst_terms(g, map, supply)),
        Formula::Forall(v, g) | Formula::Exists(v, g) => {
            let mut inner = map.clone();
            inner.remove(v);
            let (v, g) = if range_vars(&inner).contains(v) {
                let fresh = supply.fresh(v);
                let renamed = rename_var(g, v, &fresh, supply);
                (fresh, renamed)
            } else {
                (v.clone(), (**g).clone())
            };
            let body = subst_terms(&g, &inner, supply);
            if matches!(f, Formula::Forall(..)) {
                Formula::forall(v, body)
            } else {
                Formula::exists(v, body)
            }
        }
        Formula::Fixpoint(fp) => {
            let mut fp = (**fp).clone();
            fp.args = fp.args.iter().map(term).collect();
            let mut inner = map.clone();
            for p in &fp.params {
                inner.remove(p);
            }
            let avoid = range_vars(&inner);
            rename_clashing_params(&mut fp, &avoid, supply);
            fp.body = subst_terms(&fp.body, &inner, supply);
            Formula::Fixpoint(Box::new(fp))
        }
    }
}

fn range_vars(map: &BTreeMap<String, Term>) -> BTreeSet<String> {
    map.values()
        .filter_map(|t| match t {
            Term::Var(v) => Some(v.clone()),
            Term::Const(_) => None,
        })
        .collect()
}

/// Renames free occurrences of the individual variable `old` to `new`.
pub fn rename_var(f: &Formula, old: &str, new: &str, supply: &mut NameSupply) -> Formula {
    supply.reserve(new);
    let map = BTreeMap::from([(old.to_string(), Term::var(new))]);
    subst_terms(f, &map, supply)
}

/// Renames free occurrences of a propositional variable or relation symbol.
/// `new` must not occur in `f`.
pub fn rename_symbol(f: &Formula, old: &str, new: &str) -> Formula {
    let rec = |g: &Formula| rename_symbol(g, old, new);
    match f {
        Formula::Prop(p) if p == old => Formula::Prop(new.to_string()),
        Formula::Atom(r, args) if r == old => Formula::Atom(new.to_string(), args.clone()),
        Formula::Top | Formula::Bottom | Formula::Prop(_) | Formula::Atom(..) | Formula::Eq(..) => f.clone(),
        Formula::Not(g) => Formula::not(rec(g)),
        Formula::And(items) => Formula::and(items.iter().map(rec).collect::<Vec<_>>()),
        Formula::Or(items) => Formula::or(items.iter().map(rec).collect::<Vec<_>>()),
        Formula::Implies(a, b) => Formula::implies(rec(a), rec(b)),
        Formula::Iff(a, b) => Formula::iff(rec(a), rec(b)),
        Formula::Forall(v, g) => Formula::forall(v.clone(), rec(g)),
        Formula::Exists(v, g) => Formula::exists(v.clone(), rec(g)),
        Formula::Forall2(s, _) | Formula::Exists2(s, _) if s == old => f.clone(),
        Formula::Forall2(s, g) => Formula::forall2(s.clone(), rec(g)),
        Formula::Exists2(s, g) => Formula::exists2(s.clone(), rec(g)),
        Formula::Fixpoint(fp) => {
            if fp.relation == old {
                return f.clone();
            }
            let mut fp = (**fp).clone();
            fp.body = rec(&fp.body);
            Formula::Fixpoint(Box::new(fp))
        }
    }
}

/// Is `symbol` bound by a second-order quantifier somewhere inside `f`?
pub fn binds_symbol(f: &Formula, symbol: &str) -> bool {
    let mut found = false;
    f.visit(&mut |g| {
        if let Formula::Forall2(s, _) | Formula::Exists2(s, _) = g {
            if s == symbol {
                found = true;
            }
        }
    });
    found
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: &str) -> Formula {
        Formula::prop(n)
    }
    fn v(n: &str) -> Term {
        Term::var(n)
    }
    fn c(n: &str) -> Term {
        Term::constant(n)
    }

    #[test]
    fn prop_substitution_examples() {
        let f = Formula::or([p("lt"), p("lp")]);
        assert_eq!(
            substitute_prop(&f, "lt", &Formula::Bottom).unwrap(),
            Formula::or([Formula::Bottom, p("lp")])
        );
        assert_eq!(substitute_prop(&p("q"), "p", &Formula::Top).unwrap(), p("q"));
        let f = Formula::and([p("p"), Formula::not(p("p"))]);
        let e = Formula::or([p("r"), p("s")]);
        assert_eq!(
            substitute_prop(&f, "p", &e).unwrap(),
            Formula::and([e.clone(), Formula::not(e)])
        );
    }

    #[test]
    fn prop_substitution_rejects_bound_target() {
        let f = Formula::exists2("p", p("p"));
        assert_eq!(
            substitute_prop(&f, "p", &p("q")),
            Err(SubstError::Capture("p".into()))
        );
    }

    #[test]
    fn prop_substitution_renames_capturing_binder() {
        let f = Formula::exists2("q", Formula::and([p("p"), p("q")]));
        let out = substitute_prop(&f, "p", &p("q")).unwrap();
        assert_eq!(
            out,
            Formula::exists2("q_1", Formula::and([p("q"), p("q_1")]))
        );
    }

    #[test]
    fn relation_substitution_worked_example() {
        // s(x1,a) | r(a,b) | r(b,c) with r(x1,x2) := s(x1,x2) & t(x2,d)
        let f = Formula::or([
            Formula::atom("s", vec![v("x1"), c("a")]),
            Formula::atom("r", vec![c("a"), c("b")]),
            Formula::atom("r", vec![c("b"), c("c")]),
        ]);
        let e = Formula::and([
            Formula::atom("s", vec![v("x1"), v("x2")]),
            Formula::atom("t", vec![v("x2"), c("d")]),
        ]);
        let out = substitute_rel(&f, "r", &["x1".into(), "x2".into()], &e).unwrap();
        let expected = Formula::or([
            Formula::atom("s", vec![v("x1"), c("a")]),
            Formula::and([
                Formula::atom("s", vec![c("a"), c("b")]),
                Formula::atom("t", vec![c("b"), c("d")]),
            ]),
            Formula::and([
                Formula::atom("s", vec![c("b"), c("c")]),
                Formula::atom("t", vec![c("c"), c("d")]),
            ]),
        ]);
        assert_eq!(out, expected);
    }

    #[test]
    fn relation_substitution_trivial_cases() {
        let q = Formula::atom("q", vec![c("a")]);
        assert_eq!(substitute_rel(&q, "r", &["x".into()], &Formula::Top).unwrap(), q);
        let r = Formula::atom("r", vec![c("a"), c("b")]);
        let e = Formula::eq(v("x"), v("y"));
        assert_eq!(
            substitute_rel(&r, "r", &["x".into(), "y".into()], &e).unwrap(),
            Formula::eq(c("a"), c("b"))
        );
    }

    #[test]
    fn relation_substitution_arity_error() {
        let r = Formula::atom("r", vec![c("a")]);
        assert!(matches!(
            substitute_rel(&r, "r", &["x".into(), "y".into()], &Formula::Top),
            Err(SubstError::Arity { .. })
        ));
        assert!(matches!(
            substitute_rel(&r, "r", &["x".into(), "x".into()], &Formula::Top),
            Err(SubstError::DuplicateParams(_))
        ));
    }

    #[test]
    fn relation_substitution_avoids_capture() {
        // all y. r(y)   with  r(u) := q(u, y)   (y free in the replacement)
        let f = Formula::forall("y", Formula::atom("r", vec![v("y")]));
        let e = Formula::atom("q", vec![v("u"), v("y")]);
        let out = substitute_rel(&f, "r", &["u".into()], &e).unwrap();
        assert_eq!(
            out,
            Formula::forall("y_1", Formula::atom("q", vec![v("y_1"), v("y")]))
        );

        // r(z)  with  r(u) := ex z. q(u, z)
        let f = Formula::atom("r", vec![v("z")]);
        let e = Formula::exists("z", Formula::atom("q", vec![v("u"), v("z")]));
        let out = substitute_rel(&f, "r", &["u".into()], &e).unwrap();
        assert_eq!(
            out,
            Formula::exists("z_1", Formula::atom("q", vec![v("z"), v("z_1")]))
        );
    }
}
