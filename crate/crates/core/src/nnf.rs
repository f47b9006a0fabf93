use crate::formula::Formula;

/// Negation normal form.
///
/// Implications and biconditionals are expanded (`A <-> B` becomes
/// `(~A | B) & (A | ~B)`, its negation `(A | B) & (~A | ~B)`), negations are
/// pushed through connectives and both kinds of quantifier, and double
/// negations disappear. Applied fixpoints are treated as atoms, so a negated
/// fixpoint stays a negative literal.
pub fn nnf(f: &Formula) -> Formula {
    to_nnf(f, false)
}

/// `nnf(~f)` without building the negation first.
pub fn nnf_negated(f: &Formula) -> Formula {
    to_nnf(f, true)
}

fn to_nnf(f: &Formula, negate: bool) -> Formula {
    match f {
        Formula::Top => (!negate).into(),
        Formula::Bottom => negate.into(),
        Formula::Prop(_) | Formula::Atom(..) | Formula::Eq(..) | Formula::Fixpoint(_) => {
            if negate {
                Formula::not(f.clone())
            } else {
                f.clone()
            }
        }
        Formula::Not(g) => to_nnf(g, !negate),
        Formula::And(items) => {
            let items = items.iter().map(|g| to_nnf(g, negate));
            if negate {
                Formula::or(items)
            } else {
                Formula::and(items)
            }
        }
        Formula::Or(items) => {
            let items = items.iter().map(|g| to_nnf(g, negate));
            if negate {
                Formula::and(items)
            } else {
                Formula::or(items)
            }
        }
        Formula::Implies(a, b) => {
            if negate {
                Formula::and([to_nnf(a, false), to_nnf(b, true)])
            } else {
                Formula::or([to_nnf(a, true), to_nnf(b, false)])
            }
        }
        Formula::Iff(a, b) => {
            if negate {
                Formula::and([
                    Formula::or([to_nnf(a, false), to_nnf(b, false)]),
                    Formula::or([to_nnf(a, true), to_nnf(b, true)]),
                ])
            } else {
                Formula::and([
                    Formula::or([to_nnf(a, true), to_nnf(b, false)]),
                    Formula::or([to_nnf(a, false), to_nnf(b, true)]),
                ])
            }
        }
        Formula::Forall(v, g) => {
            let body = to_nnf(g, negate);
            if negate {
                Formula::exists(v.clone(), body)
            } else {
                Formula::forall(v.clone(), body)
            }
        }
        Formula::Exists(v, g) => {
            let body = to_nnf(g, negate);
            if negate {
                Formula::forall(v.clone(), body)
            } else {
                Formula::exists(v.clone(), body)
            }
        }
        Formula::Forall2(s, g) => {
            let body = to_nnf(g, negate);
            if negate {
                Formula::exists2(s.clone(), body)
            } else {
                Formula::forall2(s.clone(), body)
            }
        }
        Formula::Exists2(s, g) => {
            let body = to_nnf(g, negate);
            if negate {
                Formula::forall2(s.clone(), body)
            } else {
                Formula::exists2(s.clone(), body)
            }
        }
    }
}

/// Conjunctive normal form of an NNF formula by distribution, as a list of
/// clauses (each a list of disjuncts). Anything other than `&` and `|` is
/// kept as an opaque disjunct. `None` once more than `cap` clauses would be
/// produced.
pub fn cnf_clauses(f: &Formula, cap: usize) -> Option<Vec<Vec<Formula>>> {
    match f {
        Formula::Top => Some(Vec::new()),
        Formula::Bottom => Some(vec![Vec::new()]),
        Formula::And(items) => {
            let mut out = Vec::new();
            for g in items {
                out.extend(cnf_clauses(g, cap)?);
                if out.len() > cap {
                    return None;
                }
            }
            Some(out)
        }
        Formula::Or(items) => {
            let mut acc: Vec<Vec<Formula>> = vec![Vec::new()];
            for g in items {
                let part = cnf_clauses(g, cap)?;
                if acc.len() * part.len() > cap {
                    return None;
                }
                let mut next = Vec::with_capacity(acc.len() * part.len());
                for a in &acc {
                    for b in &part {
                        let mut clause = a.clone();
                        clause.extend(b.iter().cloned());
                        next.push(clause);
                    }
                }
                acc = next;
            }
            Some(acc)
        }
        other => Some(vec![vec![other.clone()]]),
    }
}

/// Is the formula already in negation normal form?
pub fn is_nnf(f: &Formula) -> bool {
    match f {
        Formula::Top | Formula::Bottom => true,
        Formula::Not(g) => g.is_atomic(),
        Formula::Prop(_) | Formula::Atom(..) | Formula::Eq(..) | Formula::Fixpoint(_) => true,
        Formula::And(items) | Formula::Or(items) => items.iter().all(is_nnf),
        Formula::Implies(..) | Formula::Iff(..) => false,
        Formula::Forall(_, g) | Formula::Exists(_, g) | Formula::Forall2(_, g) | Formula::Exists2(_, g) => {
            is_nnf(g)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Term;

    fn p(n: &str) -> Formula {
        Formula::prop(n)
    }

    #[test]
    fn de_morgan() {
        let f = Formula::not(Formula::and([p("p"), p("q")]));
        assert_eq!(
            nnf(&f),
            Formula::or([Formula::not(p("p")), Formula::not(p("q"))])
        );
    }

    #[test]
    fn double_negation_removed() {
        let f = Formula::or([
            Formula::not(Formula::not(p("q"))),
            Formula::not(p("r")),
        ]);
        assert_eq!(nnf(&f), Formula::or([p("q"), Formula::not(p("r"))]));
    }

    #[test]
    fn quantifier_dual() {
        let ms = Formula::atom("ms", vec![Term::var("x")]);
        let f = Formula::not(Formula::forall("x", ms.clone()));
        assert_eq!(nnf(&f), Formula::exists("x", Formula::not(ms)));
    }

    #[test]
    fn clauses_by_distribution() {
        let f = Formula::or([p("a"), Formula::and([p("b"), p("c")])]);
        let cs = cnf_clauses(&f, 10).unwrap();
        assert_eq!(cs, vec![vec![p("a"), p("b")], vec![p("a"), p("c")]]);
        let wide = Formula::or((0..6).map(|i| Formula::and([p(&format!("x{i}")), p(&format!("y{i}"))])));
        assert!(cnf_clauses(&wide, 63).is_none());
        assert_eq!(cnf_clauses(&wide, 64).unwrap().len(), 64);
    }

    #[test]
    fn implications_expand() {
        let f = Formula::implies(p("a"), Formula::iff(p("b"), p("c")));
        let out = nnf(&f);
        assert!(is_nnf(&out));
        assert!(!is_nnf(&f));
    }
}
