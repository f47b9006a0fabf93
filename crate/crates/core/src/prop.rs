//! Propositional elimination: Shannon expansion, the propositional Ackermann
//! lemma, the clause rule for universally quantified clauses, and the four
//! operators built on them.

use crate::formula::Formula;
use crate::nnf::{cnf_clauses, nnf, nnf_negated};
use crate::signature::{ordered_symbols, Theory};
use crate::simplify::simplify;
use crate::subst::substitute_prop;
use crate::trace::{EngineError, Outcome, Rule, Status, Trace};

/// Clause budget when normalising a conjunct to CNF.
const CNF_CAP: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantifier {
    Exists,
    Forall,
}

/// `A[p:=F] | A[p:=T]` (or `&` for `Forall`), simplified.
pub fn shannon_eliminate(kind: Quantifier, p: &str, f: &Formula) -> Formula {
    simplify(&shannon_raw(kind, p, f))
}

fn shannon_raw(kind: Quantifier, p: &str, f: &Formula) -> Formula {
    let lo = substitute_prop(f, p, &Formula::Bottom).expect("engine inputs bind no symbols");
    let hi = substitute_prop(f, p, &Formula::Top).expect("engine inputs bind no symbols");
    match kind {
        Quantifier::Exists => Formula::or([lo, hi]),
        Quantifier::Forall => Formula::and([lo, hi]),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Case {
    Pos,
    Neg,
}

/// Eliminates `Ex2 p` from `f` with the Ackermann lemma, returning `None`
/// when no grouping of the clauses fits either form.
///
/// The formula is put in NNF and every conjunct mentioning `p` is turned into
/// clauses. In the positive case the clauses `~p | R` with `R` free of `p`
/// form the definition `p -> A`, `A` the conjunction of the `R`s, and the
/// remaining conjuncts must be positive in `p`. The negative case is dual.
/// Without any defining clause the tautology `p -> T` (resp. `F -> p`) is
/// added. The positive case is tried first.
pub fn ackermann_prop(p: &str, f: &Formula) -> Option<(Formula, Trace)> {
    let mut trace = Trace::new();
    ackermann_traced(p, f, &mut trace).map(|r| (r, trace))
}

fn ackermann_traced(p: &str, f: &Formula, trace: &mut Trace) -> Option<Formula> {
    let g = nnf(f);
    trace.push(
        Rule::Nnf,
        Formula::exists2(p, f.clone()),
        Formula::exists2(p, g.clone()),
    );
    let mut others = Vec::new();
    let mut clauses: Vec<Vec<Formula>> = Vec::new();
    for c in g.conjuncts() {
        if !c.mentions(p) {
            others.push(c);
            continue;
        }
        match cnf_clauses(&c, CNF_CAP) {
            Some(cs) => clauses.extend(cs),
            None => clauses.push(vec![c]),
        }
    }
    let target_pos = Formula::not(Formula::prop(p));
    let target_neg = Formula::prop(p);
    for case in [Case::Pos, Case::Neg] {
        let target = match case {
            Case::Pos => &target_pos,
            Case::Neg => &target_neg,
        };
        let mut defs = Vec::new();
        let mut rest = others.clone();
        for clause in &clauses {
            let hits = clause.iter().filter(|l| *l == target).count();
            let residue: Vec<Formula> = clause.iter().filter(|l| *l != target).cloned().collect();
            if hits > 0 && residue.iter().all(|l| !l.mentions(p)) {
                defs.push(Formula::or(residue));
            } else {
                rest.push(Formula::or(clause.iter().cloned()));
            }
        }
        let b = Formula::and(rest);
        let fits = match case {
            Case::Pos => b.polarity(p).is_positive(),
            Case::Neg => b.polarity(p).is_negative(),
        };
        if !fits {
            continue;
        }
        let pv = Formula::prop(p);
        let (a, definition) = match case {
            Case::Pos => {
                let a = if defs.is_empty() { Formula::Top } else { Formula::and(defs.clone()) };
                (a.clone(), Formula::implies(pv, a))
            }
            Case::Neg => {
                let a = if defs.is_empty() {
                    Formula::Bottom
                } else {
                    Formula::or(defs.iter().map(nnf_negated))
                };
                (a.clone(), Formula::implies(a, pv))
            }
        };
        if defs.is_empty() {
            trace.push(Rule::AckermannForm, Formula::exists2(p, g.clone()), Formula::exists2(p, b.clone()));
            trace.push(
                Rule::ArtificialConjunct,
                Formula::exists2(p, b.clone()),
                Formula::exists2(p, Formula::and([definition.clone(), b.clone()])),
            );
        } else {
            trace.push(
                Rule::AckermannForm,
                Formula::exists2(p, g.clone()),
                Formula::exists2(p, Formula::and([definition.clone(), b.clone()])),
            );
        }
        let result = substitute_prop(&b, p, &a).expect("engine inputs bind no symbols");
        let rule = match case {
            Case::Pos => Rule::AckermannPos,
            Case::Neg => Rule::AckermannNeg,
        };
        trace.push(rule, Formula::exists2(p, Formula::and([definition, b])), result.clone());
        return Some(result);
    }
    None
}

/// The clause rule for `All2 v1 ... vk. (l1 | ... | ln)`: after removing
/// double negations, a complementary pair of literals makes the result `T`;
/// otherwise the literals over `v1..vk` are deleted (leaving `F` if nothing
/// remains) and the quantifiers dropped.
///
/// `clause` may carry its `All2` prefix; those symbols join `vars`. Returns
/// `None` when the body is not a disjunction of literals.
pub fn clause_forall_eliminate(vars: &[String], clause: &Formula) -> Option<Formula> {
    let mut vars = vars.to_vec();
    let mut body = clause;
    while let Formula::Forall2(s, g) = body {
        vars.push(s.clone());
        body = g;
    }
    let mut literals = Vec::new();
    for d in body.disjuncts() {
        let mut d = d;
        while let Formula::Not(g) = &d {
            match &**g {
                Formula::Not(inner) => d = (**inner).clone(),
                _ => break,
            }
        }
        match &d {
            Formula::Top => return Some(Formula::Top),
            Formula::Bottom => continue,
            Formula::Prop(_) => {}
            Formula::Not(g) if matches!(**g, Formula::Prop(_)) => {}
            _ => return None,
        }
        literals.push(d);
    }
    for (i, a) in literals.iter().enumerate() {
        for b in &literals[i + 1..] {
            if matches!(a, Formula::Not(g) if **g == *b) || matches!(b, Formula::Not(g) if **g == *a) {
                return Some(Formula::Top);
            }
        }
    }
    let over_vars = |l: &Formula| match l {
        Formula::Prop(q) => vars.contains(q),
        Formula::Not(g) => matches!(&**g, Formula::Prop(q) if vars.contains(q)),
        _ => false,
    };
    let mut kept: Vec<Formula> = Vec::new();
    for l in literals {
        if !over_vars(&l) && !kept.contains(&l) {
            kept.push(l);
        }
    }
    Some(Formula::or(kept))
}

fn check_propositional(th: &Theory) -> Result<(), EngineError> {
    if !th.is_propositional() {
        return Err(EngineError::NotPropositional);
    }
    if th.formulas.iter().any(|f| f.has_second_order_quantifier()) {
        return Err(EngineError::UnsupportedInput);
    }
    Ok(())
}

fn simplified(f: Formula, trace: &mut Trace) -> Formula {
    let s = simplify(&f);
    trace.push(Rule::Simplify, f, s.clone());
    s
}

/// Strong (standard) forgetting: a formula equivalent to `Ex2 p1..pn. Th`.
/// Symbols are eliminated left to right, each by the Ackermann lemma when it
/// applies and by Shannon expansion otherwise.
pub fn forget_strong_prop(th: &Theory, forget: &[String]) -> Result<Outcome, EngineError> {
    check_propositional(th)?;
    let mut trace = Trace::new();
    let mut current = simplified(th.conjunction(), &mut trace);
    for p in forget {
        if !current.mentions(p) {
            continue;
        }
        let next = match ackermann_traced(p, &current, &mut trace) {
            Some(r) => r,
            None => {
                let r = shannon_raw(Quantifier::Exists, p, &current);
                trace.push(Rule::ShannonExists, Formula::exists2(p, current.clone()), r.clone());
                r
            }
        };
        current = simplified(next, &mut trace);
    }
    Ok(Outcome::done(Status::Propositional, current, trace))
}

/// Weak forgetting: a formula equivalent to `All2 p1..pn. Th`. The
/// quantifier is distributed over the conjuncts and each conjunct is handled
/// by the clause rule (after conversion to CNF when that stays small), then
/// by Ackermann on `~Ex2 p. ~C`, then by Shannon expansion.
pub fn forget_weak_prop(th: &Theory, forget: &[String]) -> Result<Outcome, EngineError> {
    check_propositional(th)?;
    let mut trace = Trace::new();
    let mut current = simplified(th.conjunction(), &mut trace);
    for p in forget {
        if !current.mentions(p) {
            continue;
        }
        let conjuncts = current.conjuncts();
        let distributed = Formula::and(conjuncts.iter().map(|c| {
            if c.mentions(p) {
                Formula::forall2(p, c.clone())
            } else {
                c.clone()
            }
        }));
        if conjuncts.len() > 1 {
            trace.push(
                Rule::DistributeForall,
                Formula::forall2(p, current.clone()),
                distributed,
            );
        }
        let parts: Vec<Formula> = conjuncts
            .iter()
            .map(|c| {
                if c.mentions(p) {
                    weak_conjunct(p, c, &mut trace)
                } else {
                    c.clone()
                }
            })
            .collect();
        current = simplified(Formula::and(parts), &mut trace);
    }
    Ok(Outcome::done(Status::Propositional, current, trace))
}

fn weak_conjunct(p: &str, c: &Formula, trace: &mut Trace) -> Formula {
    let vars = [p.to_string()];
    let quantified = Formula::forall2(p, c.clone());
    if let Some(r) = clause_forall_eliminate(&vars, c) {
        trace.push(Rule::ClauseRule, quantified, r.clone());
        return r;
    }
    let g = nnf(c);
    if let Some(clauses) = cnf_clauses(&g, CNF_CAP) {
        let clauses: Vec<Formula> = clauses.into_iter().map(Formula::or).collect();
        trace.push(Rule::Nnf, quantified.clone(), Formula::forall2(p, Formula::and(clauses.clone())));
        if clauses.len() > 1 {
            trace.push(
                Rule::DistributeForall,
                Formula::forall2(p, Formula::and(clauses.clone())),
                Formula::and(clauses.iter().map(|k| Formula::forall2(p, k.clone()))),
            );
        }
        let mut out = Vec::new();
        for k in &clauses {
            let r = clause_forall_eliminate(&vars, k).expect("CNF clauses are clauses");
            trace.push(Rule::ClauseRule, Formula::forall2(p, k.clone()), r.clone());
            out.push(r);
        }
        return Formula::and(out);
    }
    let negated = nnf_negated(c);
    trace.push(
        Rule::Dualize,
        quantified.clone(),
        Formula::not(Formula::exists2(p, negated.clone())),
    );
    if let Some(r) = ackermann_traced(p, &negated, trace) {
        return nnf_negated(&r);
    }
    let r = shannon_raw(Quantifier::Forall, p, c);
    trace.push(Rule::ShannonForall, quantified, r.clone());
    r
}

/// Symbols of `Th & A` outside `keep`, in order of first occurrence.
fn complement_of(th: &Theory, a: &Formula, keep: &[String]) -> Vec<String> {
    let all = Formula::and([th.conjunction(), a.clone()]);
    ordered_symbols(&all)
        .into_iter()
        .filter(|s| !keep.contains(s))
        .collect()
}

/// Strongest necessary condition of `a` over `keep` relative to `th`:
/// strong forgetting of everything else in `Th & A`.
pub fn snc(th: &Theory, a: &Formula, keep: &[String]) -> Result<Outcome, EngineError> {
    let forget = complement_of(th, a, keep);
    let mut formulas = th.formulas.clone();
    formulas.push(a.clone());
    forget_strong_prop(&Theory::new(th.name.clone(), formulas), &forget)
}

/// Weakest sufficient condition of `a` over `keep` relative to `th`: weak
/// forgetting of everything else in `Th -> A`.
pub fn wsc(th: &Theory, a: &Formula, keep: &[String]) -> Result<Outcome, EngineError> {
    let forget = complement_of(th, a, keep);
    let target = Formula::implies(th.conjunction(), a.clone());
    forget_weak_prop(&Theory::new(th.name.clone(), vec![target]), &forget)
}
