//! First-order elimination: Ackermann and fixpoint lemmas for `Ex2 r`, the
//! clause rule with equalities for `All2 r`, and strong and weak forgetting
//! built on them.
//!
//! Propositional symbols inside first-order theories are handled as
//! relations of arity 0, with Shannon expansion as the last resort.

use std::collections::BTreeMap;

use crate::formula::{FixKind, Formula, Term};
use crate::names::NameSupply;
use crate::nnf::{nnf, nnf_negated};
use crate::prop::Quantifier;
use crate::signature::Theory;
use crate::simplify::simplify;
use crate::subst::{rename_var, subst_terms, substitute_prop, substitute_rel_with};
use crate::trace::{EngineError, Outcome, Rule, Status, Trace};

/// Budget on clauses produced when distributing `|` over `&`.
const CLAUSE_CAP: usize = 64;

/// Which half of the Ackermann lemma a form fits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Case {
    /// `all x. (r(x) -> A(x)) & B`, `B` positive in `r`.
    Pos,
    /// `all x. (A(x) -> r(x)) & B`, `B` negative in `r`.
    Neg,
}

/// `Ex2 r. F` rearranged as `ex P. Ex2 r. (definition & residual)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AckermannForm {
    pub case: Case,
    /// Existential variables moved in front of the second-order quantifier.
    pub prefix: Vec<String>,
    pub params: Vec<String>,
    /// `A(params)`; mentions `r` only when a fixpoint is needed.
    pub definition: Formula,
    pub residual: Formula,
    /// No clause defined `r`; the definition is the tautology `r -> T` or
    /// `F -> r`.
    pub artificial: bool,
}

impl AckermannForm {
    /// The grouped formula `ex P. (def & B)` under `Ex2 r`.
    pub fn grouped(&self, r: &str) -> Formula {
        let vars: Vec<Term> = self.params.iter().map(Term::var).collect();
        let atom = if vars.is_empty() {
            Formula::prop(r)
        } else {
            Formula::atom(r, vars)
        };
        let def = match self.case {
            Case::Pos => Formula::implies(atom, self.definition.clone()),
            Case::Neg => Formula::implies(self.definition.clone(), atom),
        };
        let def = Formula::forall_many(self.params.clone(), def);
        Formula::exists_many(
            self.prefix.clone(),
            Formula::exists2(r, Formula::and([def, self.residual.clone()])),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FoError {
    #[error("definition of `{0}` mentions `{0}`; a fixpoint is needed")]
    DefinitionMentionsSymbol(String),
    #[error("{0}")]
    Substitution(#[from] crate::subst::SubstError),
}

/// Arity of `symbol` at its first occurrence in `f`.
fn arity_of(f: &Formula, symbol: &str) -> Option<usize> {
    let mut found = None;
    f.visit(&mut |g| {
        if found.is_none() {
            found = g.occurrence_args(symbol).map(<[Term]>::len);
        }
    });
    found
}

/// Splits top-level conjunctions and distributes `all` over `&`.
fn split_conjuncts(f: &Formula) -> Vec<Formula> {
    match f {
        Formula::And(items) => items.iter().flat_map(split_conjuncts).collect(),
        Formula::Forall(v, g) => {
            let parts = split_conjuncts(g);
            if parts.len() < 2 {
                return vec![f.clone()];
            }
            parts
                .into_iter()
                .map(|p| {
                    if p.free_vars().contains(v) {
                        Formula::forall(v.clone(), p)
                    } else {
                        p
                    }
                })
                .collect()
        }
        Formula::Top => Vec::new(),
        _ => vec![f.clone()],
    }
}

/// Clauses `all xs. (d1 | ... | dn)` equivalent to the NNF formula `f`,
/// obtained by pulling universal quantifiers out of disjunctions (renaming
/// when needed) and distributing `|` over `&`. Subformulas without `r` and
/// existential subformulas are kept whole.
fn clausify(f: &Formula, r: &str, supply: &mut NameSupply) -> Option<Vec<Formula>> {
    let mut claimed: Vec<String> = f.free_vars().into_iter().collect();
    let raw = clauses_of(f, r, supply, &mut claimed)?;
    Some(
        raw.into_iter()
            .map(|(vars, disjuncts)| {
                let body = Formula::or(disjuncts);
                let free = body.free_vars();
                let vars: Vec<String> = vars.into_iter().filter(|v| free.contains(v)).collect();
                Formula::forall_many(vars, body)
            })
            .collect(),
    )
}

type RawClause = (Vec<String>, Vec<Formula>);

fn clauses_of(
    f: &Formula,
    r: &str,
    supply: &mut NameSupply,
    claimed: &mut Vec<String>,
) -> Option<Vec<RawClause>> {
    if !f.mentions(r) {
        return Some(vec![(Vec::new(), vec![f.clone()])]);
    }
    match f {
        Formula::And(items) => {
            let mut out = Vec::new();
            for g in items {
                out.extend(clauses_of(g, r, supply, claimed)?);
                if out.len() > CLAUSE_CAP {
                    return None;
                }
            }
            Some(out)
        }
        Formula::Or(items) => {
            let mut acc: Vec<RawClause> = vec![(Vec::new(), Vec::new())];
            for g in items {
                let part = clauses_of(g, r, supply, claimed)?;
                if acc.len() * part.len() > CLAUSE_CAP {
                    return None;
                }
                let mut next = Vec::new();
                for (av, ad) in &acc {
                    for (bv, bd) in &part {
                        let mut vars = av.clone();
                        vars.extend(bv.iter().cloned());
                        let mut ds = ad.clone();
                        ds.extend(bd.iter().cloned());
                        next.push((vars, ds));
                    }
                }
                acc = next;
            }
            Some(acc)
        }
        Formula::Forall(v, g) => {
            let (v, g) = if claimed.contains(v) {
                let fresh = supply.fresh(v);
                let renamed = rename_var(g, v, &fresh, supply);
                (fresh, renamed)
            } else {
                (v.clone(), (**g).clone())
            };
            claimed.push(v.clone());
            let mut inner = clauses_of(&g, r, supply, claimed)?;
            for (vars, _) in inner.iter_mut() {
                vars.insert(0, v.clone());
            }
            Some(inner)
        }
        _ => Some(vec![(Vec::new(), vec![f.clone()])]),
    }
}

/// Moves existential quantifiers of conjuncts mentioning `r` in front of
/// `Ex2 r`, returning the prefix and the remaining conjuncts.
fn pull_prefix(r: &str, f: &Formula, supply: &mut NameSupply) -> (Vec<String>, Vec<Formula>) {
    let mut prefix: Vec<String> = Vec::new();
    let mut out: Vec<Formula> = split_conjuncts(f);
    let mut i = 0;
    while i < out.len() {
        let Formula::Exists(v, body) = &out[i] else {
            i += 1;
            continue;
        };
        if !out[i].mentions(r) {
            i += 1;
            continue;
        }
        let clash = prefix.contains(v)
            || out
                .iter()
                .enumerate()
                .any(|(j, c)| j != i && c.free_vars().contains(v));
        let (v, body) = if clash {
            let fresh = supply.fresh(v);
            let renamed = rename_var(body, v, &fresh, supply);
            (fresh, renamed)
        } else {
            (v.clone(), (**body).clone())
        };
        prefix.push(v);
        let parts = split_conjuncts(&body);
        out.splice(i..=i, parts);
    }
    (prefix, out)
}

struct Def {
    vars: Vec<String>,
    args: Vec<Term>,
    rest: Formula,
    clause: Formula,
}

/// Reads `all xs. (r(t) | R)` (Neg) or `all xs. (~r(t) | R)` (Pos) where
/// `R` has the polarity the case requires.
fn definitional(c: &Formula, r: &str, case: Case) -> Option<Def> {
    let mut vars = Vec::new();
    let mut body = c;
    while let Formula::Forall(v, g) = body {
        vars.push(v.clone());
        body = g;
    }
    let disjuncts = body.disjuncts();
    let target = |d: &Formula| -> Option<Vec<Term>> {
        let atom = match (case, d) {
            (Case::Neg, d) => d,
            (Case::Pos, Formula::Not(g)) => g,
            _ => return None,
        };
        atom.occurrence_args(r).map(<[Term]>::to_vec)
    };
    let idx = disjuncts.iter().position(|d| target(d).is_some())?;
    let args = target(&disjuncts[idx]).unwrap();
    let rest = Formula::or(
        disjuncts
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != idx)
            .map(|(_, d)| d.clone()),
    );
    let fits = match case {
        Case::Neg => rest.polarity(r).is_negative(),
        Case::Pos => rest.polarity(r).is_positive(),
    };
    fits.then(|| Def {
        vars,
        args,
        rest,
        clause: c.clone(),
    })
}

/// Builds `A(params)` from the defining clauses. Argument positions holding
/// distinct clause variables are renamed to parameters; anything else is
/// tied to its parameter by an equality `param = term`.
fn definition_from(defs: &[Def], case: Case, arity: usize, supply: &mut NameSupply) -> (Vec<String>, Formula) {
    let outer: Vec<String> = defs.iter().flat_map(|d| d.clause.free_vars()).collect();
    let first = &defs[0];
    let reusable = first.args.iter().enumerate().all(|(j, t)| match t {
        Term::Var(v) => {
            first.vars.contains(v)
                && !outer.contains(v)
                && !first.args[..j].contains(t)
        }
        Term::Const(_) => false,
    });
    let params: Vec<String> = if reusable {
        first.args.iter().map(|t| t.name().to_string()).collect()
    } else {
        (0..arity)
            .map(|j| match &first.args[j] {
                Term::Var(v) => supply.fresh(v),
                Term::Const(_) => supply.fresh("u"),
            })
            .collect()
    };
    let mut parts = Vec::new();
    for d in defs {
        let mut map: BTreeMap<String, Term> = BTreeMap::new();
        let mut guards = Vec::new();
        for (j, t) in d.args.iter().enumerate() {
            match t {
                Term::Var(v) if d.vars.contains(v) && !map.contains_key(v) => {
                    map.insert(v.clone(), Term::var(&params[j]));
                }
                _ => guards.push((j, t.clone())),
            }
        }
        let mut remaining = Vec::new();
        for v in &d.vars {
            if map.contains_key(v) || remaining.contains(v) {
                continue;
            }
            if params.contains(v) {
                let fresh = supply.fresh(v);
                map.insert(v.clone(), Term::var(&fresh));
                remaining.push(fresh);
            } else {
                remaining.push(v.clone());
            }
        }
        // the parameters themselves must not be renamed, so only the clause
        // side (residue and guard terms) goes through the map
        let rest = subst_terms(&d.rest, &map, supply);
        let renamed = |t: &Term| match t {
            Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::Const(_) => t.clone(),
        };
        let body = match case {
            Case::Neg => Formula::and(
                guards
                    .iter()
                    .map(|(j, t)| Formula::eq(Term::var(&params[*j]), renamed(t)))
                    .chain([nnf_negated(&rest)]),
            ),
            Case::Pos => Formula::or(
                guards
                    .iter()
                    .map(|(j, t)| Formula::neq(Term::var(&params[*j]), renamed(t)))
                    .chain([rest]),
            ),
        };
        let free = body.free_vars();
        let remaining: Vec<String> = remaining.into_iter().filter(|v| free.contains(v)).collect();
        parts.push(match case {
            Case::Neg => Formula::exists_many(remaining, body),
            Case::Pos => Formula::forall_many(remaining, body),
        });
    }
    let a = match case {
        Case::Neg => Formula::or(parts),
        Case::Pos => Formula::and(parts),
    };
    (params, a)
}

fn try_case(r: &str, conjuncts: &[Formula], case: Case, arity: usize, supply: &mut NameSupply) -> Option<(Vec<String>, Formula, Formula, bool)> {
    let mut defs = Vec::new();
    let mut rest = Vec::new();
    for c in conjuncts {
        let fits = match case {
            Case::Neg => c.polarity(r).is_negative(),
            Case::Pos => c.polarity(r).is_positive(),
        };
        if fits {
            rest.push(c.clone());
        } else {
            defs.push(definitional(c, r, case)?);
        }
    }
    let residual = Formula::and(rest);
    if defs.is_empty() {
        let params: Vec<String> = (0..arity).map(|_| supply.fresh("u")).collect();
        let a = match case {
            Case::Neg => Formula::Bottom,
            Case::Pos => Formula::Top,
        };
        return Some((params, a, residual, true));
    }
    let (params, a) = definition_from(&defs, case, arity, supply);
    if arity == 0 && a.mentions(r) {
        return None;
    }
    Some((params, a, residual, false))
}

fn find_form(r: &str, g: &Formula, supply: &mut NameSupply) -> Option<AckermannForm> {
    let arity = arity_of(g, r).unwrap_or(0);
    let (prefix, conjuncts) = pull_prefix(r, g, supply);
    let mut attempts = vec![conjuncts.clone()];
    let mut full = Vec::new();
    let mut changed = false;
    for c in &conjuncts {
        match c.mentions(r).then(|| clausify(c, r, supply)).flatten() {
            Some(cs) => {
                changed |= cs.len() != 1 || cs[0] != *c;
                full.extend(cs);
            }
            None => full.push(c.clone()),
        }
    }
    if changed {
        attempts.push(full);
    }
    for conjuncts in &attempts {
        for case in [Case::Neg, Case::Pos] {
            if let Some((params, definition, residual, artificial)) = try_case(r, conjuncts, case, arity, supply) {
                return Some(AckermannForm {
                    case,
                    prefix,
                    params,
                    definition,
                    residual,
                    artificial,
                });
            }
        }
    }
    None
}

/// Rewrites `Ex2 r. f` into a form the Ackermann or fixpoint lemma applies
/// to, trying the negative case before the positive one, first on the
/// conjuncts as they stand and then after conversion to clauses.
pub fn to_ackermann_form(r: &str, f: &Formula) -> Option<AckermannForm> {
    let mut supply = NameSupply::from_formulas([f]);
    find_form(r, &nnf(f), &mut supply)
}

/// `B(r(params) = A(params))` under the existential prefix.
pub fn ackermann_fo(r: &str, form: &AckermannForm) -> Result<Formula, FoError> {
    if form.definition.mentions(r) {
        return Err(FoError::DefinitionMentionsSymbol(r.to_string()));
    }
    let mut supply = NameSupply::from_formulas([&form.definition, &form.residual]);
    apply_form(r, form, &mut supply)
}

fn apply_form(r: &str, form: &AckermannForm, supply: &mut NameSupply) -> Result<Formula, FoError> {
    let replacement = if form.definition.mentions(r) {
        let kind = match form.case {
            Case::Neg => FixKind::Least,
            Case::Pos => FixKind::Greatest,
        };
        let args = form.params.iter().map(Term::var).collect();
        Formula::fixpoint(kind, r, form.params.clone(), form.definition.clone(), args)
            .map_err(|_| FoError::DefinitionMentionsSymbol(r.to_string()))?
    } else {
        form.definition.clone()
    };
    let out = if form.params.is_empty() {
        substitute_prop(&form.residual, r, &replacement)?
    } else {
        substitute_rel_with(&form.residual, r, &form.params, &replacement, supply)?
    };
    Ok(Formula::exists_many(form.prefix.clone(), out))
}

/// The fixpoint lemma: like [`ackermann_fo`] but the definition may mention
/// `r` positively, giving `lfp` in the negative case and `gfp` in the
/// positive one.
pub fn fixpoint_eliminate(r: &str, f: &Formula) -> Outcome {
    let mut trace = Trace::new();
    let mut supply = NameSupply::from_formulas([f]);
    match eliminate_exists(r, f, &mut trace, &mut supply) {
        Ok(out) => {
            let status = if out.has_fixpoint() {
                Status::Fixpoint
            } else {
                Status::FirstOrder
            };
            Outcome::done(status, out, trace)
        }
        Err(reason) => Outcome::failed(reason, Formula::exists2(r, f.clone()), trace),
    }
}

/// Strong elimination of one symbol: a formula equivalent to `Ex2 r. f`.
fn eliminate_exists(r: &str, f: &Formula, trace: &mut Trace, supply: &mut NameSupply) -> Result<Formula, String> {
    if !f.mentions(r) {
        return Ok(f.clone());
    }
    if f.symbols_in_fixpoints().contains(r) {
        return Err(format!("`{r}` occurs inside a fixpoint"));
    }
    let g = nnf(f);
    trace.push(Rule::Nnf, Formula::exists2(r, f.clone()), Formula::exists2(r, g.clone()));
    supply.reserve_formula(&g);
    if let Some(form) = find_form(r, &g, supply) {
        if form.artificial {
            let plain = Formula::exists_many(
                form.prefix.clone(),
                Formula::exists2(r, form.residual.clone()),
            );
            trace.push(Rule::AckermannForm, Formula::exists2(r, g.clone()), plain.clone());
            trace.push(Rule::ArtificialConjunct, plain, form.grouped(r));
        } else {
            trace.push(Rule::AckermannForm, Formula::exists2(r, g.clone()), form.grouped(r));
        }
        let rule = match (form.case, form.definition.mentions(r)) {
            (Case::Pos, false) => Rule::AckermannPos,
            (Case::Neg, false) => Rule::AckermannNeg,
            (Case::Pos, true) => Rule::FixpointGfp,
            (Case::Neg, true) => Rule::FixpointLfp,
        };
        let out = apply_form(r, &form, supply).map_err(|e| e.to_string())?;
        trace.push(rule, form.grouped(r), out.clone());
        return Ok(out);
    }
    if arity_of(&g, r) == Some(0) {
        let lo = substitute_prop(&g, r, &Formula::Bottom).map_err(|e| e.to_string())?;
        let hi = substitute_prop(&g, r, &Formula::Top).map_err(|e| e.to_string())?;
        let out = Formula::or([lo, hi]);
        trace.push(Rule::ShannonExists, Formula::exists2(r, g), out.clone());
        return Ok(out);
    }
    Err(format!(
        "occurrences of `{r}` cannot be separated into a definition and a remainder of one polarity"
    ))
}

/// The clause rule with equalities:
/// `All2 r. all xs. (r(s1) | ... | r(sm) | ~r(t1) | ... | ~r(tk) | A)`
/// becomes `all xs. (OR_{i,j} ti = sj | A)`, where a tuple equality is the
/// conjunction of its component equalities. `f` may carry the `All2 r`
/// binder. Returns `None` when `f` is not of this shape.
pub fn clause_form_eliminate_fo(r: &str, f: &Formula) -> Option<Formula> {
    let mut body = f;
    while let Formula::Forall2(s, g) = body {
        if s != r {
            return None;
        }
        body = g;
    }
    let mut vars = Vec::new();
    while let Formula::Forall(v, g) = body {
        vars.push(v.clone());
        body = g;
    }
    let mut pos: Vec<&[Term]> = Vec::new();
    let mut neg: Vec<&[Term]> = Vec::new();
    let mut others = Vec::new();
    let disjuncts = match body {
        Formula::Or(items) => items.as_slice(),
        other => std::slice::from_ref(other),
    };
    for d in disjuncts {
        if let Some(args) = d.occurrence_args(r) {
            pos.push(args);
        } else if let Some(args) = match d {
            Formula::Not(g) => g.occurrence_args(r),
            _ => None,
        } {
            neg.push(args);
        } else if d.mentions(r) {
            return None;
        } else {
            others.push(d.clone());
        }
    }
    let mut out = Vec::new();
    for t in &neg {
        for s in &pos {
            out.push(Formula::and(
                t.iter()
                    .zip(s.iter())
                    .map(|(a, b)| Formula::eq(a.clone(), b.clone())),
            ));
        }
    }
    out.extend(others);
    let body = Formula::or(out);
    let free = body.free_vars();
    let vars: Vec<String> = vars.into_iter().filter(|v| free.contains(v)).collect();
    Some(Formula::forall_many(vars, body))
}

/// Weak elimination of one symbol: a formula equivalent to `All2 r. f`.
fn eliminate_forall(r: &str, f: &Formula, trace: &mut Trace, supply: &mut NameSupply) -> Result<Formula, String> {
    if !f.mentions(r) {
        return Ok(f.clone());
    }
    if f.symbols_in_fixpoints().contains(r) {
        return Err(format!("`{r}` occurs inside a fixpoint"));
    }
    let g = nnf(f);
    trace.push(Rule::Nnf, Formula::forall2(r, f.clone()), Formula::forall2(r, g.clone()));
    supply.reserve_formula(&g);
    let conjuncts = split_conjuncts(&g);
    let quantify = |cs: &[Formula]| {
        Formula::and(cs.iter().map(|c| {
            if c.mentions(r) {
                Formula::forall2(r, c.clone())
            } else {
                c.clone()
            }
        }))
    };
    if conjuncts.len() > 1 {
        trace.push(Rule::DistributeForall, Formula::forall2(r, g.clone()), quantify(&conjuncts));
    }
    let mut out = Vec::new();
    for c in &conjuncts {
        if !c.mentions(r) {
            out.push(c.clone());
            continue;
        }
        out.push(weak_conjunct(r, c, trace, supply)?);
    }
    Ok(Formula::and(out))
}

fn weak_conjunct(r: &str, c: &Formula, trace: &mut Trace, supply: &mut NameSupply) -> Result<Formula, String> {
    let quantified = Formula::forall2(r, c.clone());
    if let Some(out) = clause_form_eliminate_fo(r, c) {
        trace.push(Rule::ClauseRule, quantified, out.clone());
        return Ok(out);
    }
    if let Some(clauses) = clausify(c, r, supply) {
        let rules: Option<Vec<Formula>> = clauses.iter().map(|k| clause_form_eliminate_fo(r, k)).collect();
        if let Some(results) = rules {
            let split = Formula::and(clauses.iter().map(|k| Formula::forall2(r, k.clone())));
            trace.push(Rule::DistributeForall, quantified.clone(), split);
            for (k, res) in clauses.iter().zip(&results) {
                trace.push(Rule::ClauseRule, Formula::forall2(r, k.clone()), res.clone());
            }
            return Ok(Formula::and(results));
        }
    }
    let negated = nnf_negated(c);
    trace.push(
        Rule::Dualize,
        quantified.clone(),
        Formula::not(Formula::exists2(r, negated.clone())),
    );
    match eliminate_exists(r, &negated, trace, supply) {
        Ok(out) => Ok(nnf_negated(&out)),
        Err(reason) => {
            if arity_of(c, r) == Some(0) {
                let lo = substitute_prop(c, r, &Formula::Bottom).map_err(|e| e.to_string())?;
                let hi = substitute_prop(c, r, &Formula::Top).map_err(|e| e.to_string())?;
                let out = Formula::and([lo, hi]);
                trace.push(Rule::ShannonForall, quantified, out.clone());
                return Ok(out);
            }
            Err(format!("{reason} (in conjunct `{c}`)"))
        }
    }
}

fn check_theory(th: &Theory) -> Result<(), EngineError> {
    let free: Vec<String> = th.formulas.iter().flat_map(|f| f.free_vars()).collect();
    if !free.is_empty() {
        return Err(EngineError::NotClosed(free.join(", ")));
    }
    if th
        .formulas
        .iter()
        .any(|f| f.has_second_order_quantifier() || f.has_fixpoint())
    {
        return Err(EngineError::UnsupportedInput);
    }
    Ok(())
}

fn finish(formula: Formula, trace: Trace) -> Outcome {
    let status = if formula.has_fixpoint() {
        Status::Fixpoint
    } else {
        Status::FirstOrder
    };
    Outcome::done(status, formula, trace)
}

fn run(th: &Theory, forget: &[String], kind: Quantifier) -> Result<Outcome, EngineError> {
    check_theory(th)?;
    let mut trace = Trace::new();
    let start = th.conjunction();
    let mut current = simplify(&start);
    trace.push(Rule::Simplify, start, current.clone());
    let mut supply = NameSupply::from_formulas(th.formulas.iter());
    for (k, r) in forget.iter().enumerate() {
        if !current.mentions(r) {
            continue;
        }
        let step = match kind {
            Quantifier::Exists => eliminate_exists(r, &current, &mut trace, &mut supply),
            Quantifier::Forall => eliminate_forall(r, &current, &mut trace, &mut supply),
        };
        match step {
            Ok(next) => {
                let s = simplify(&next);
                trace.push(Rule::Simplify, next, s.clone());
                current = s;
            }
            Err(reason) => {
                let pending: Vec<&String> = forget[k..].iter().filter(|s| current.mentions(s)).collect();
                let residual = match kind {
                    Quantifier::Exists => Formula::exists2_many(pending, current),
                    Quantifier::Forall => Formula::forall2_many(pending, current),
                };
                return Ok(Outcome::failed(reason, residual, trace));
            }
        }
    }
    Ok(finish(current, trace))
}

/// Strong forgetting: a first-order or fixpoint formula equivalent to
/// `Ex2 r1..rn. Th`, eliminating symbols left to right.
pub fn forget_strong_fo(th: &Theory, forget: &[String]) -> Result<Outcome, EngineError> {
    run(th, forget, Quantifier::Exists)
}

/// Weak forgetting: a formula equivalent to `All2 r1..rn. Th`. The
/// quantifier is distributed over conjuncts; each conjunct goes through the
/// clause rule, then Ackermann or the fixpoint lemma on `~Ex2 r. ~C`.
pub fn forget_weak_fo(th: &Theory, forget: &[String]) -> Result<Outcome, EngineError> {
    run(th, forget, Quantifier::Forall)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::equiv_fo_finite;
    use crate::signature::Signature;
    use crate::syntax::{parse_formula, parse_theory};

    fn parse(s: &str) -> Formula {
        parse_formula(s, &Signature::new()).unwrap()
    }

    fn names(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn same(f: &Formula, g: &Formula, d: usize) {
        let v = equiv_fo_finite(f, g, &Signature::new(), d).unwrap();
        assert!(v.is_equivalent(), "{f}\n  vs\n{g}\n{v:?}");
    }

    const TEST: &str = "all x. (ms(x) -> h(x) & t(x))\nall x. (ss(x) | t(x) -> ich(x))";
    const NETWORK: &str = "all x. all y. (con(x,y) | (ex z. (con(x,z) & r(z,y))) -> r(x,y))\n\
                           all y. ((ex x. (ex(x) & r(x,y))) -> in(y) -> sec(y))";

    #[test]
    fn clause_rule_shapes() {
        let f = parse("All2 r. all x. all y. all z. (r(x) | ~r(y) | ~r(z) | a(x))");
        let out = clause_form_eliminate_fo("r", &f).unwrap();
        assert_eq!(out, parse("all x. all y. all z. (y = x | z = x | a(x))"));
        let f = parse("All2 r. all x. (~r(x) | a(x))");
        assert_eq!(clause_form_eliminate_fo("r", &f).unwrap(), parse("all x. a(x)"));
        let f = parse("All2 r. all x. (r(x) | a(x))");
        assert_eq!(clause_form_eliminate_fo("r", &f).unwrap(), parse("all x. a(x)"));
        assert!(clause_form_eliminate_fo("r", &parse("all x. (r(x) & a(x))")).is_none());
        let f = parse("All2 r. all x. all y. all z. (r(x) | ~r(y) | ~r(z) | a(x))");
        same(&f, &clause_form_eliminate_fo("r", &f).unwrap(), 3);
    }

    #[test]
    fn ackermann_form_of_tests_example() {
        let (_, th) = parse_theory(TEST).unwrap();
        let form = to_ackermann_form("t", &th.conjunction()).unwrap();
        assert_eq!(form.case, Case::Neg);
        assert_eq!(form.definition, Formula::atom("ms", vec![Term::var("x")]));
        let out = ackermann_fo("t", &form).unwrap();
        same(&out, &parse("(all x. (ms(x) -> h(x))) & all x. (ss(x) | ms(x) -> ich(x))"), 2);
    }

    #[test]
    fn isolating_a_negative_literal() {
        let f = parse("(con(x,y) | ex z. (con(x,z) & r(z,y))) & ~r(x,y)");
        let f = subst_free_as_vars(&f);
        let form = to_ackermann_form("r", &f).unwrap();
        assert_eq!(form.case, Case::Pos);
        let out = ackermann_fo("r", &form).unwrap();
        let expected = parse("con(x,y) | ex z. (con(x,z) & (z != x | y != y))");
        same(
            &Formula::forall_many(["x", "y"], Formula::exists2("r", f)),
            &Formula::forall_many(["x", "y"], out),
            2,
        );
        same(
            &Formula::forall_many(["x", "y"], subst_free_as_vars(&expected)),
            &Formula::forall_many(["x", "y"], ackermann_fo("r", &form).unwrap()),
            2,
        );
    }

    // parse_formula reads unbound names as constants; turn x and y into
    // free variables
    fn subst_free_as_vars(f: &Formula) -> Formula {
        let wrapped = Formula::forall_many(["x", "y"], f.clone());
        let text = wrapped.to_string().replacen("all x. all y. ", "", 1);
        let opts = crate::syntax::ParseOptions {
            free_vars: ["x".to_string(), "y".to_string()].into(),
            ..Default::default()
        };
        crate::syntax::parse_formula_with(&text, &Signature::new(), &opts)
            .unwrap()
            .formula
    }

    #[test]
    fn mixed_biconditional_is_not_separable() {
        assert!(to_ackermann_form("r", &parse("all x. all y. (r(x) <-> ~r(y))")).is_none());
        let f = parse("all x. (r(x) | (r(a) <-> q(x)))");
        let out = fixpoint_eliminate("r", &f);
        assert_eq!(out.status, Status::Fixpoint);
        same(&out.formula, &Formula::exists2("r", f), 2);
    }

    #[test]
    fn strong_forgetting_with_definition() {
        let (_, th) = parse_theory(TEST).unwrap();
        let out = forget_strong_fo(&th, &names(&["t"])).unwrap();
        assert_eq!(out.status, Status::FirstOrder);
        assert!(!out.formula.mentions("t"));
        same(&out.formula, &Formula::exists2("t", th.conjunction()), 2);
    }

    #[test]
    fn weak_forgetting_by_clauses() {
        let (_, th) = parse_theory(TEST).unwrap();
        let out = forget_weak_fo(&th, &names(&["t"])).unwrap();
        assert_eq!(out.status, Status::FirstOrder);
        same(&out.formula, &Formula::forall2("t", th.conjunction()), 2);
        same(&out.formula, &parse("(all x. ~ms(x)) & all x. ich(x)"), 2);
    }

    #[test]
    fn strong_forgetting_needs_a_fixpoint() {
        let (_, th) = parse_theory(NETWORK).unwrap();
        let out = forget_strong_fo(&th, &names(&["r"])).unwrap();
        assert_eq!(out.status, Status::Fixpoint, "{}", out.formula);
        assert!(out.trace.rules().contains(&Rule::FixpointLfp));
        same(&out.formula, &Formula::exists2("r", th.conjunction()), 2);
    }

    #[test]
    fn weak_forgetting_network() {
        let (_, th) = parse_theory(NETWORK).unwrap();
        let out = forget_weak_fo(&th, &names(&["r"])).unwrap();
        assert_eq!(out.status, Status::FirstOrder);
        same(&out.formula, &Formula::forall2("r", th.conjunction()), 2);
    }

    #[test]
    fn failure_reports_residual() {
        let th = Theory::new("t", vec![parse("all x. (r(x) <-> ~r(f0) & q(x))")]);
        let strong = forget_strong_fo(&th, &names(&["r"])).unwrap();
        if strong.is_failed() {
            assert!(strong.formula.has_second_order_quantifier());
            assert!(strong.reason.is_some());
        } else {
            same(&strong.formula, &Formula::exists2("r", th.conjunction()), 2);
        }
    }

    #[test]
    fn absent_symbol_is_identity() {
        let (_, th) = parse_theory(TEST).unwrap();
        let out = forget_strong_fo(&th, &names(&["zz"])).unwrap();
        assert_eq!(out.formula, simplify(&th.conjunction()));
        let out = forget_weak_fo(&Theory::empty(), &names(&["r"])).unwrap();
        assert_eq!(out.formula, Formula::Top);
    }

    #[test]
    fn open_theories_are_rejected() {
        let th = Theory::new("t", vec![parse_theory_open("r(x)")]);
        assert!(matches!(forget_strong_fo(&th, &names(&["r"])), Err(EngineError::NotClosed(_))));
    }

    fn parse_theory_open(s: &str) -> Formula {
        let opts = crate::syntax::ParseOptions {
            free_vars: ["x".to_string()].into(),
            ..Default::default()
        };
        crate::syntax::parse_formula_with(s, &Signature::new(), &opts)
            .unwrap()
            .formula
    }
}
