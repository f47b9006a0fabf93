//! The formula and term data model shared by every engine.
//!
//! One inductive type covers propositional, first-order, second-order and
//! fixpoint formulas. `And`/`Or` are n-ary; the smart constructors flatten
//! nested connectives of the same kind and collapse lists of length 0 and 1,
//! so a well-formed `And`/`Or` always has at least two members.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

/// An individual term. There are no function symbols.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Term {
        Term::Const(name.into())
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Var(n) | Term::Const(n) => n,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FixKind {
    Least,
    Greatest,
}

/// An applied fixpoint literal `lfp r(params). body @(args)`.
///
/// `relation` and `params` are bound inside `body`; `args` live in the
/// enclosing scope.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fixpoint {
    pub kind: FixKind,
    pub relation: String,
    pub params: Vec<String>,
    pub body: Formula,
    pub args: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Top,
    Bottom,
    Prop(String),
    Atom(String, Vec<Term>),
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall2(String, Box<Formula>),
    Exists2(String, Box<Formula>),
    Fixpoint(Box<Fixpoint>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("fixpoint body is not positive in `{0}`")]
    NotPositive(String),
    #[error("fixpoint parameters of `{0}` are not pairwise distinct")]
    DuplicateParams(String),
    #[error("fixpoint `{relation}` has {params} parameters but is applied to {args} arguments")]
    ArityMismatch {
        relation: String,
        params: usize,
        args: usize,
    },
}

/// Occurrence classification of a symbol, after expanding `->` and `<->`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarity {
    Absent,
    Positive,
    Negative,
    Both,
}

impl Polarity {
    fn join(self, other: Polarity) -> Polarity {
        use Polarity::*;
        match (self, other) {
            (Absent, p) | (p, Absent) => p,
            (Positive, Positive) => Positive,
            (Negative, Negative) => Negative,
            _ => Both,
        }
    }

    fn flip(self) -> Polarity {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
            p => p,
        }
    }

    /// True when every occurrence is positive (vacuously so when absent).
    pub fn is_positive(self) -> bool {
        matches!(self, Polarity::Absent | Polarity::Positive)
    }

    pub fn is_negative(self) -> bool {
        matches!(self, Polarity::Absent | Polarity::Negative)
    }
}

impl Formula {
    pub fn prop(name: impl Into<String>) -> Formula {
        Formula::Prop(name.into())
    }

    pub fn atom(relation: impl Into<String>, args: Vec<Term>) -> Formula {
        Formula::Atom(relation.into(), args)
    }

    pub fn eq(left: Term, right: Term) -> Formula {
        Formula::Eq(left, right)
    }

    pub fn neq(left: Term, right: Term) -> Formula {
        Formula::not(Formula::Eq(left, right))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    /// Conjunction with flattening; the empty conjunction is `Top`.
    pub fn and(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for f in items {
            match f {
                Formula::And(inner) => out.extend(inner),
                f => out.push(f),
            }
        }
        match out.len() {
            0 => Formula::Top,
            1 => out.pop().unwrap(),
            _ => Formula::And(out),
        }
    }

    /// Disjunction with flattening; the empty disjunction is `Bottom`.
    pub fn or(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for f in items {
            match f {
                Formula::Or(inner) => out.extend(inner),
                f => out.push(f),
            }
        }
        match out.len() {
            0 => Formula::Bottom,
            1 => out.pop().unwrap(),
            _ => Formula::Or(out),
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(var: impl Into<String>, body: Formula) -> Formula {
        Formula::Forall(var.into(), Box::new(body))
    }

    pub fn exists(var: impl Into<String>, body: Formula) -> Formula {
        Formula::Exists(var.into(), Box::new(body))
    }

    /// `all v1. all v2. ... body`
    pub fn forall_many<S: Into<String>>(vars: impl IntoIterator<Item = S>, body: Formula) -> Formula {
        let vars: Vec<String> = vars.into_iter().map(Into::into).collect();
        vars.into_iter().rev().fold(body, |acc, v| Formula::forall(v, acc))
    }

    pub fn exists_many<S: Into<String>>(vars: impl IntoIterator<Item = S>, body: Formula) -> Formula {
        let vars: Vec<String> = vars.into_iter().map(Into::into).collect();
        vars.into_iter().rev().fold(body, |acc, v| Formula::exists(v, acc))
    }

    pub fn forall2(symbol: impl Into<String>, body: Formula) -> Formula {
        Formula::Forall2(symbol.into(), Box::new(body))
    }

    pub fn exists2(symbol: impl Into<String>, body: Formula) -> Formula {
        Formula::Exists2(symbol.into(), Box::new(body))
    }

    pub fn forall2_many<S: Into<String>>(symbols: impl IntoIterator<Item = S>, body: Formula) -> Formula {
        let syms: Vec<String> = symbols.into_iter().map(Into::into).collect();
        syms.into_iter().rev().fold(body, |acc, s| Formula::forall2(s, acc))
    }

    pub fn exists2_many<S: Into<String>>(symbols: impl IntoIterator<Item = S>, body: Formula) -> Formula {
        let syms: Vec<String> = symbols.into_iter().map(Into::into).collect();
        syms.into_iter().rev().fold(body, |acc, s| Formula::exists2(s, acc))
    }

    /// Builds a checked fixpoint literal: parameters distinct, matching the
    /// number of arguments, and the body positive in the bound relation.
    pub fn fixpoint(
        kind: FixKind,
        relation: impl Into<String>,
        params: Vec<String>,
        body: Formula,
        args: Vec<Term>,
    ) -> Result<Formula, FormulaError> {
        let relation = relation.into();
        if params.len() != args.len() {
            return Err(FormulaError::ArityMismatch {
                relation,
                params: params.len(),
                args: args.len(),
            });
        }
        let distinct: BTreeSet<&String> = params.iter().collect();
        if distinct.len() != params.len() {
            return Err(FormulaError::DuplicateParams(relation));
        }
        if !body.polarity(&relation).is_positive() {
            return Err(FormulaError::NotPositive(relation));
        }
        Ok(Formula::Fixpoint(Box::new(Fixpoint {
            kind,
            relation,
            params,
            body,
            args,
        })))
    }

    pub fn lfp(
        relation: impl Into<String>,
        params: Vec<String>,
        body: Formula,
        args: Vec<Term>,
    ) -> Result<Formula, FormulaError> {
        Formula::fixpoint(FixKind::Least, relation, params, body, args)
    }

    pub fn gfp(
        relation: impl Into<String>,
        params: Vec<String>,
        body: Formula,
        args: Vec<Term>,
    ) -> Result<Formula, FormulaError> {
        Formula::fixpoint(FixKind::Greatest, relation, params, body, args)
    }

    /// Top-level conjuncts (the formula itself when it is not a conjunction).
    pub fn conjuncts(&self) -> Vec<Formula> {
        match self {
            Formula::And(items) => items.clone(),
            Formula::Top => Vec::new(),
            f => vec![f.clone()],
        }
    }

    pub fn disjuncts(&self) -> Vec<Formula> {
        match self {
            Formula::Or(items) => items.clone(),
            Formula::Bottom => Vec::new(),
            f => vec![f.clone()],
        }
    }

    /// Free individual variables.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free_vars(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free_vars(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let term = |t: &Term, bound: &Vec<String>, out: &mut BTreeSet<String>| {
            if let Term::Var(v) = t {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
        };
        match self {
            Formula::Top | Formula::Bottom | Formula::Prop(_) => {}
            Formula::Atom(_, args) => args.iter().for_each(|t| term(t, bound, out)),
            Formula::Eq(a, b) => {
                term(a, bound, out);
                term(b, bound, out);
            }
            Formula::Not(g) | Formula::Forall2(_, g) | Formula::Exists2(_, g) => {
                g.collect_free_vars(bound, out)
            }
            Formula::And(items) | Formula::Or(items) => {
                items.iter().for_each(|g| g.collect_free_vars(bound, out))
            }
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free_vars(bound, out);
                b.collect_free_vars(bound, out);
            }
            Formula::Forall(v, g) | Formula::Exists(v, g) => {
                bound.push(v.clone());
                g.collect_free_vars(bound, out);
                bound.pop();
            }
            Formula::Fixpoint(fp) => {
                fp.args.iter().for_each(|t| term(t, bound, out));
                let depth = bound.len();
                bound.extend(fp.params.iter().cloned());
                fp.body.collect_free_vars(bound, out);
                bound.truncate(depth);
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Free second-order symbols with their arities (0 for propositional
    /// variables). Symbols bound by `All2`/`Ex2` or by a fixpoint are excluded.
    pub fn free_symbols(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        self.collect_symbols(&mut Vec::new(), &mut out);
        out
    }

    fn collect_symbols(&self, bound: &mut Vec<String>, out: &mut BTreeMap<String, usize>) {
        match self {
            Formula::Top | Formula::Bottom | Formula::Eq(..) => {}
            Formula::Prop(p) => {
                if !bound.contains(p) {
                    out.entry(p.clone()).or_insert(0);
                }
            }
            Formula::Atom(r, args) => {
                if !bound.contains(r) {
                    out.entry(r.clone()).or_insert(args.len());
                }
            }
            Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => {
                g.collect_symbols(bound, out)
            }
            Formula::And(items) | Formula::Or(items) => {
                items.iter().for_each(|g| g.collect_symbols(bound, out))
            }
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_symbols(bound, out);
                b.collect_symbols(bound, out);
            }
            Formula::Forall2(s, g) | Formula::Exists2(s, g) => {
                bound.push(s.clone());
                g.collect_symbols(bound, out);
                bound.pop();
            }
            Formula::Fixpoint(fp) => {
                bound.push(fp.relation.clone());
                fp.body.collect_symbols(bound, out);
                bound.pop();
            }
        }
    }

    /// Does `symbol` occur free (as a propositional variable or relation)?
    pub fn mentions(&self, symbol: &str) -> bool {
        self.polarity(symbol) != Polarity::Absent
    }

    /// Constants occurring anywhere in the formula.
    pub fn constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            let mut add = |t: &Term| {
                if let Term::Const(c) = t {
                    out.insert(c.clone());
                }
            };
            match f {
                Formula::Atom(_, args) => args.iter().for_each(&mut add),
                Formula::Eq(a, b) => {
                    add(a);
                    add(b);
                }
                Formula::Fixpoint(fp) => fp.args.iter().for_each(&mut add),
                _ => {}
            }
        });
        out
    }

    /// Every identifier used anywhere, bound or free. Seeds fresh-name supplies.
    pub fn names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            let add_term = |t: &Term, out: &mut BTreeSet<String>| {
                out.insert(t.name().to_string());
            };
            match f {
                Formula::Prop(p) => {
                    out.insert(p.clone());
                }
                Formula::Atom(r, args) => {
                    out.insert(r.clone());
                    args.iter().for_each(|t| add_term(t, &mut out));
                }
                Formula::Eq(a, b) => {
                    add_term(a, &mut out);
                    add_term(b, &mut out);
                }
                Formula::Forall(v, _)
                | Formula::Exists(v, _)
                | Formula::Forall2(v, _)
                | Formula::Exists2(v, _) => {
                    out.insert(v.clone());
                }
                Formula::Fixpoint(fp) => {
                    out.insert(fp.relation.clone());
                    out.extend(fp.params.iter().cloned());
                    fp.args.iter().for_each(|t| add_term(t, &mut out));
                }
                _ => {}
            }
        });
        out
    }

    /// Pre-order traversal over every subformula, including fixpoint bodies.
    pub fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        match self {
            Formula::Not(g)
            | Formula::Forall(_, g)
            | Formula::Exists(_, g)
            | Formula::Forall2(_, g)
            | Formula::Exists2(_, g) => g.visit(f),
            Formula::And(items) | Formula::Or(items) => items.iter().for_each(|g| g.visit(f)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Formula::Fixpoint(fp) => fp.body.visit(f),
            _ => {}
        }
    }

    /// Polarity of the free occurrences of `symbol`. `B -> C` is read as
    /// `~B | C`; every occurrence under `<->` counts as both.
    pub fn polarity(&self, symbol: &str) -> Polarity {
        match self {
            Formula::Top | Formula::Bottom | Formula::Eq(..) => Polarity::Absent,
            Formula::Prop(p) | Formula::Atom(p, _) => {
                if p == symbol {
                    Polarity::Positive
                } else {
                    Polarity::Absent
                }
            }
            Formula::Not(g) => g.polarity(symbol).flip(),
            Formula::And(items) | Formula::Or(items) => items
                .iter()
                .fold(Polarity::Absent, |acc, g| acc.join(g.polarity(symbol))),
            Formula::Implies(a, b) => a.polarity(symbol).flip().join(b.polarity(symbol)),
            Formula::Iff(a, b) => match a.polarity(symbol).join(b.polarity(symbol)) {
                Polarity::Absent => Polarity::Absent,
                _ => Polarity::Both,
            },
            Formula::Forall(_, g) | Formula::Exists(_, g) => g.polarity(symbol),
            Formula::Forall2(s, g) | Formula::Exists2(s, g) => {
                if s == symbol {
                    Polarity::Absent
                } else {
                    g.polarity(symbol)
                }
            }
            Formula::Fixpoint(fp) => {
                if fp.relation == symbol {
                    Polarity::Absent
                } else {
                    fp.body.polarity(symbol)
                }
            }
        }
    }

    /// No first-order or fixpoint constructs (second-order quantifiers over
    /// propositional variables are allowed).
    pub fn is_propositional(&self) -> bool {
        let mut ok = true;
        self.visit(&mut |f| {
            if matches!(
                f,
                Formula::Atom(..)
                    | Formula::Eq(..)
                    | Formula::Forall(..)
                    | Formula::Exists(..)
                    | Formula::Fixpoint(..)
            ) {
                ok = false;
            }
        });
        ok
    }

    pub fn has_second_order_quantifier(&self) -> bool {
        let mut found = false;
        self.visit(&mut |f| {
            if matches!(f, Formula::Forall2(..) | Formula::Exists2(..)) {
                found = true;
            }
        });
        found
    }

    pub fn has_fixpoint(&self) -> bool {
        let mut found = false;
        self.visit(&mut |f| {
            if matches!(f, Formula::Fixpoint(..)) {
                found = true;
            }
        });
        found
    }

    /// Symbols occurring free inside the body of some fixpoint literal.
    pub fn symbols_in_fixpoints(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Fixpoint(fp) = f {
                let inner = Formula::Fixpoint(fp.clone()).free_symbols();
                out.extend(inner.into_keys());
            }
        });
        out
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Is this a literal: an atomic formula or a negated one?
    pub fn is_literal(&self) -> bool {
        match self {
            Formula::Not(g) => g.is_atomic(),
            f => f.is_atomic(),
        }
    }

    /// Atomic formulas: propositional variables, atoms, equalities and
    /// applied fixpoints.
    pub fn is_atomic(&self) -> bool {
        matches!(
            self,
            Formula::Prop(_) | Formula::Atom(..) | Formula::Eq(..) | Formula::Fixpoint(_)
        )
    }

    /// For an occurrence of `symbol` (as `Prop` or `Atom`), its argument list.
    pub fn occurrence_args(&self, symbol: &str) -> Option<&[Term]> {
        match self {
            Formula::Prop(p) if p == symbol => Some(&[]),
            Formula::Atom(r, args) if r == symbol => Some(args),
            _ => None,
        }
    }
}

impl From<bool> for Formula {
    fn from(b: bool) -> Formula {
        if b {
            Formula::Top
        } else {
            Formula::Bottom
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: &str) -> Formula {
        Formula::prop(n)
    }

    #[test]
    fn and_or_flatten_and_collapse() {
        let f = Formula::and([p("a"), Formula::and([p("b"), p("c")])]);
        assert_eq!(f, Formula::And(vec![p("a"), p("b"), p("c")]));
        assert_eq!(Formula::and(Vec::new()), Formula::Top);
        assert_eq!(Formula::or(Vec::new()), Formula::Bottom);
        assert_eq!(Formula::or([p("a")]), p("a"));
    }

    #[test]
    fn polarity_examples() {
        // fdd -> (~ld | pa) is positive in pa
        let f = Formula::implies(
            p("fdd"),
            Formula::or([Formula::not(p("ld")), p("pa")]),
        );
        assert_eq!(f.polarity("pa"), Polarity::Positive);
        assert_eq!(f.polarity("fdd"), Polarity::Negative);
        assert_eq!(p("p").polarity("p"), Polarity::Positive);
        assert_eq!(Formula::iff(p("p"), p("q")).polarity("p"), Polarity::Both);
        assert_eq!(p("q").polarity("p"), Polarity::Absent);
        let bound = Formula::exists2("p", Formula::not(p("p")));
        assert_eq!(bound.polarity("p"), Polarity::Absent);
    }

    #[test]
    fn free_vars_examples() {
        let x = || Term::var("x");
        let f = Formula::forall(
            "x",
            Formula::implies(
                Formula::atom("ms", vec![x()]),
                Formula::atom("h", vec![x()]),
            ),
        );
        assert!(f.free_vars().is_empty());
        assert!(f.is_closed());

        let r = Formula::atom("r", vec![Term::var("x"), Term::var("y")]);
        assert_eq!(
            r.free_vars(),
            ["x", "y"].iter().map(|s| s.to_string()).collect()
        );

        let so = Formula::exists2("r", Formula::atom("r", vec![x()]));
        assert_eq!(so.free_vars(), ["x".to_string()].into_iter().collect());
        assert!(so.free_symbols().is_empty());
    }

    #[test]
    fn fixpoint_construction_checks() {
        let x = Term::var("x");
        let neg_body = Formula::not(Formula::atom("r", vec![x.clone()]));
        assert_eq!(
            Formula::lfp("r", vec!["x".into()], neg_body, vec![Term::constant("a")]),
            Err(FormulaError::NotPositive("r".into()))
        );
        let body = Formula::atom("q", vec![x]);
        assert!(matches!(
            Formula::lfp("r", vec!["x".into(), "x".into()], body.clone(), vec![]),
            Err(FormulaError::ArityMismatch { .. })
        ));
        assert!(matches!(
            Formula::lfp(
                "r",
                vec!["x".into(), "x".into()],
                body,
                vec![Term::constant("a"), Term::constant("b")]
            ),
            Err(FormulaError::DuplicateParams(_))
        ));
    }
}
