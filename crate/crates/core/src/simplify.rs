//! A small, terminating simplifier.
//!
//! Rules, applied bottom-up and repeated until nothing changes:
//!
//! * truth constants: `T & A -> A`, `F & A -> F`, `F | A -> A`, `T | A -> T`,
//!   `~T -> F`, `~F -> T`, and the matching cases of `->` and `<->`;
//! * double negation `~~A -> A`;
//! * flattening and idempotence (`A & A -> A`, `A | A -> A`);
//! * complements inside one conjunction or disjunction (`A & ~A -> F`,
//!   `A | ~A -> T`);
//! * absorption (`A & (A | B) -> A`, `A | (A & B) -> A`), including the case
//!   where a whole conjunct (disjunct) is contained in another;
//! * `A -> A` and `A <-> A` become `T`;
//! * trivial equality `t = t -> T`;
//! * vacuous quantifiers (first- and second-order) are dropped, and a
//!   fixpoint whose body no longer mentions its relation is replaced by the
//!   instantiated body.
//!
//! Every rule is a local syntactic rewrite; there is no tautology checking.

use std::collections::BTreeMap;

use crate::formula::{Formula, Term};
use crate::names::NameSupply;
use crate::subst::subst_terms;

pub fn simplify(f: &Formula) -> Formula {
    let mut current = f.clone();
    loop {
        let next = step(&current);
        if next == current {
            return current;
        }
        current = next;
    }
}

fn step(f: &Formula) -> Formula {
    match f {
        Formula::Top | Formula::Bottom | Formula::Prop(_) | Formula::Atom(..) => f.clone(),
        Formula::Eq(a, b) => {
            if a == b {
                Formula::Top
            } else {
                f.clone()
            }
        }
        Formula::Not(g) => negate(step(g)),
        Formula::And(items) => conjunction(items.iter().map(step).collect()),
        Formula::Or(items) => disjunction(items.iter().map(step).collect()),
        Formula::Implies(a, b) => {
            let (a, b) = (step(a), step(b));
            match (&a, &b) {
                (Formula::Top, _) => b,
                (Formula::Bottom, _) | (_, Formula::Top) => Formula::Top,
                (_, Formula::Bottom) => negate(a),
                _ if a == b => Formula::Top,
                _ => Formula::implies(a, b),
            }
        }
        Formula::Iff(a, b) => {
            let (a, b) = (step(a), step(b));
            match (&a, &b) {
                (Formula::Top, _) => b,
                (_, Formula::Top) => a,
                (Formula::Bottom, _) => negate(b),
                (_, Formula::Bottom) => negate(a),
                _ if a == b => Formula::Top,
                _ => Formula::iff(a, b),
            }
        }
        Formula::Forall(v, g) | Formula::Exists(v, g) => {
            let body = step(g);
            if !body.free_vars().contains(v) {
                body
            } else if matches!(f, Formula::Forall(..)) {
                Formula::forall(v.clone(), body)
            } else {
                Formula::exists(v.clone(), body)
            }
        }
        Formula::Forall2(s, g) | Formula::Exists2(s, g) => {
            let body = step(g);
            if !body.mentions(s) {
                body
            } else if matches!(f, Formula::Forall2(..)) {
                Formula::forall2(s.clone(), body)
            } else {
                Formula::exists2(s.clone(), body)
            }
        }
        Formula::Fixpoint(fp) => {
            let body = step(&fp.body);
            if body.mentions(&fp.relation) {
                let mut fp = (**fp).clone();
                fp.body = body;
                Formula::Fixpoint(Box::new(fp))
            } else {
                let map: BTreeMap<String, Term> = fp
                    .params
                    .iter()
                    .cloned()
                    .zip(fp.args.iter().cloned())
                    .collect();
                let mut supply = NameSupply::from_formulas([&body]);
                for t in &fp.args {
                    supply.reserve(t.name());
                }
                subst_terms(&body, &map, &mut supply)
            }
        }
    }
}

fn negate(f: Formula) -> Formula {
    match f {
        Formula::Top => Formula::Bottom,
        Formula::Bottom => Formula::Top,
        Formula::Not(g) => *g,
        g => Formula::not(g),
    }
}

fn is_complement(a: &Formula, b: &Formula) -> bool {
    matches!(a, Formula::Not(g) if **g == *b) || matches!(b, Formula::Not(g) if **g == *a)
}

/// Shared logic for both n-ary connectives. `absorbing` is the constant that
/// swallows the whole list (`F` for `&`), `neutral` the one that disappears.
fn nary(items: Vec<Formula>, conj: bool) -> Formula {
    let (absorbing, neutral) = if conj {
        (Formula::Bottom, Formula::Top)
    } else {
        (Formula::Top, Formula::Bottom)
    };
    let mut flat: Vec<Formula> = Vec::new();
    for f in items {
        let inner = match (conj, f) {
            (true, Formula::And(xs)) | (false, Formula::Or(xs)) => xs,
            (_, f) => vec![f],
        };
        for g in inner {
            if g == neutral {
                continue;
            }
            if g == absorbing {
                return absorbing;
            }
            if !flat.contains(&g) {
                flat.push(g);
            }
        }
    }
    for i in 0..flat.len() {
        for j in (i + 1)..flat.len() {
            if is_complement(&flat[i], &flat[j]) {
                return absorbing;
            }
        }
    }
    // absorption: in a conjunction drop any disjunction that contains
    // another conjunct (or whose disjuncts include all of another
    // disjunction's); dually for disjunctions.
    let members = |f: &Formula| -> Option<Vec<Formula>> {
        match (conj, f) {
            (true, Formula::Or(xs)) | (false, Formula::And(xs)) => Some(xs.clone()),
            _ => None,
        }
    };
    let mut keep = vec![true; flat.len()];
    for i in 0..flat.len() {
        let Some(big) = members(&flat[i]) else { continue };
        for j in 0..flat.len() {
            if i == j || !keep[j] {
                continue;
            }
            let absorbed = match members(&flat[j]) {
                Some(small) => {
                    small.iter().all(|x| big.contains(x))
                        && (small.len() < big.len() || j < i)
                }
                None => big.contains(&flat[j]),
            };
            if absorbed {
                keep[i] = false;
                break;
            }
        }
    }
    let kept: Vec<Formula> = flat
        .into_iter()
        .zip(keep)
        .filter_map(|(f, k)| k.then_some(f))
        .collect();
    if conj {
        Formula::and(kept)
    } else {
        Formula::or(kept)
    }
}

fn conjunction(items: Vec<Formula>) -> Formula {
    nary(items, true)
}

fn disjunction(items: Vec<Formula>) -> Formula {
    nary(items, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: &str) -> Formula {
        Formula::prop(n)
    }

    #[test]
    fn constants_and_idempotence() {
        let f = Formula::Or(vec![Formula::Bottom, p("lp"), Formula::Top, p("lp")]);
        assert_eq!(simplify(&f), Formula::Top);
        let f = Formula::And(vec![p("a"), p("a"), Formula::Top]);
        assert_eq!(simplify(&f), p("a"));
    }

    #[test]
    fn absorption() {
        let f = Formula::and([Formula::or([p("lp"), p("mp")]), p("lp")]);
        assert_eq!(simplify(&f), p("lp"));
        let f = Formula::or([p("a"), Formula::and([p("b"), p("a")])]);
        assert_eq!(simplify(&f), p("a"));
        let f = Formula::and([
            Formula::or([p("a"), p("b"), p("c")]),
            Formula::or([p("b"), p("a")]),
        ]);
        assert_eq!(simplify(&f), Formula::or([p("b"), p("a")]));
    }

    #[test]
    fn complements() {
        let f = Formula::or([p("a"), p("b"), Formula::not(p("a"))]);
        assert_eq!(simplify(&f), Formula::Top);
        let f = Formula::and([Formula::not(p("a")), p("a")]);
        assert_eq!(simplify(&f), Formula::Bottom);
    }

    #[test]
    fn trivial_equality_and_vacuous_quantifier() {
        let a = Term::constant("a");
        let f = Formula::forall("x", Formula::eq(a.clone(), a));
        assert_eq!(simplify(&f), Formula::Top);
        let f = Formula::exists2("r", p("q"));
        assert_eq!(simplify(&f), p("q"));
    }

    #[test]
    fn double_negation_and_implication_constants() {
        let f = Formula::not(Formula::not(p("a")));
        assert_eq!(simplify(&f), p("a"));
        let f = Formula::implies(p("a"), Formula::Bottom);
        assert_eq!(simplify(&f), Formula::not(p("a")));
        let f = Formula::not(Formula::implies(
            p("fdd"),
            Formula::or([Formula::not(p("ld")), Formula::Bottom]),
        ));
        assert_eq!(
            simplify(&f),
            Formula::not(Formula::implies(p("fdd"), Formula::not(p("ld"))))
        );
    }

    #[test]
    fn degenerate_fixpoint_is_instantiated() {
        let x = Term::var("x");
        let f = Formula::lfp(
            "r",
            vec!["x".into()],
            Formula::atom("q", vec![x]),
            vec![Term::constant("a")],
        )
        .unwrap();
        assert_eq!(simplify(&f), Formula::atom("q", vec![Term::constant("a")]));
    }
}
