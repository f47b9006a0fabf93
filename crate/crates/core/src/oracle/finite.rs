use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::OracleError;
use crate::formula::{FixKind, Formula, Term};
use crate::signature::Signature;

/// Largest domain over which relations may be enumerated.
pub const MAX_SO_DOMAIN: usize = 3;
/// Largest arity of an enumerated relation.
pub const MAX_SO_ARITY: usize = 2;
/// Upper bound on interpretations visited per domain size by
/// [`equiv_fo_finite`].
const MAX_MODELS: u128 = 1 << 24;

pub type Env = BTreeMap<String, usize>;

/// Extension of a relation over the domain `0..domain`. Tuples are indexed
/// in base `domain`, first argument most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    arity: usize,
    domain: usize,
    bits: Vec<bool>,
}

impl Relation {
    pub fn empty(arity: usize, domain: usize) -> Relation {
        Relation {
            arity,
            domain,
            bits: vec![false; domain.pow(arity as u32)],
        }
    }

    pub fn full(arity: usize, domain: usize) -> Relation {
        Relation {
            arity,
            domain,
            bits: vec![true; domain.pow(arity as u32)],
        }
    }

    /// The relation whose tuple `i` is present iff bit `i` of `mask` is set.
    pub fn from_mask(arity: usize, domain: usize, mask: u64) -> Relation {
        let mut r = Relation::empty(arity, domain);
        for (i, b) in r.bits.iter_mut().enumerate() {
            *b = mask >> i & 1 == 1;
        }
        r
    }

    pub fn from_tuples<'a>(arity: usize, domain: usize, tuples: impl IntoIterator<Item = &'a [usize]>) -> Relation {
        let mut r = Relation::empty(arity, domain);
        for t in tuples {
            r.insert(t);
        }
        r
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    fn index(&self, tuple: &[usize]) -> usize {
        tuple.iter().fold(0, |acc, &e| acc * self.domain + e)
    }

    pub fn contains(&self, tuple: &[usize]) -> bool {
        self.bits[self.index(tuple)]
    }

    pub fn insert(&mut self, tuple: &[usize]) {
        let i = self.index(tuple);
        self.bits[i] = true;
    }

    pub fn len(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn tuples(&self) -> Vec<Vec<usize>> {
        (0..self.bits.len())
            .filter(|&i| self.bits[i])
            .map(|i| decode(i, self.arity, self.domain))
            .collect()
    }
}

fn decode(mut index: usize, arity: usize, domain: usize) -> Vec<usize> {
    let mut out = vec![0; arity];
    for slot in out.iter_mut().rev() {
        *slot = index % domain;
        index /= domain;
    }
    out
}

/// A finite structure with domain `0..domain`. Propositional variables are
/// relations of arity 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interpretation {
    pub domain: usize,
    pub constants: BTreeMap<String, usize>,
    pub relations: BTreeMap<String, Relation>,
}

impl Interpretation {
    pub fn new(domain: usize) -> Interpretation {
        assert!(domain > 0, "domains are non-empty");
        Interpretation {
            domain,
            constants: BTreeMap::new(),
            relations: BTreeMap::new(),
        }
    }

    pub fn with_constant(mut self, name: &str, element: usize) -> Interpretation {
        self.constants.insert(name.to_string(), element);
        self
    }

    pub fn with_relation(mut self, name: &str, arity: usize, tuples: &[&[usize]]) -> Interpretation {
        let r = Relation::from_tuples(arity, self.domain, tuples.iter().copied());
        self.relations.insert(name.to_string(), r);
        self
    }

    pub fn with_prop(mut self, name: &str, value: bool) -> Interpretation {
        let r = if value {
            Relation::full(0, self.domain)
        } else {
            Relation::empty(0, self.domain)
        };
        self.relations.insert(name.to_string(), r);
        self
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "domain {{0..{}}}", self.domain - 1)?;
        for (c, e) in &self.constants {
            write!(f, "; {c} = {e}")?;
        }
        for (name, r) in &self.relations {
            if r.arity == 0 {
                write!(f, "; {name} = {}", if r.is_empty() { "F" } else { "T" })?;
                continue;
            }
            let tuples: Vec<String> = r
                .tuples()
                .iter()
                .map(|t| {
                    let parts: Vec<String> = t.iter().map(|e| e.to_string()).collect();
                    format!("({})", parts.join(","))
                })
                .collect();
            write!(f, "; {name} = {{{}}}", tuples.join(", "))?;
        }
        Ok(())
    }
}

/// Evaluates a formula with no free individual variables.
pub fn eval_fo(f: &Formula, m: &Interpretation) -> Result<bool, OracleError> {
    eval_fo_with(f, m, &Env::new())
}

/// Tarskian evaluation. Second-order quantifiers enumerate every extension
/// (subject to the domain and arity guards); fixpoints are computed by
/// iterating the body from the empty (least) or full (greatest) relation.
pub fn eval_fo_with(f: &Formula, m: &Interpretation, env: &Env) -> Result<bool, OracleError> {
    let missing = f
        .free_vars()
        .into_iter()
        .find(|v| !env.contains_key(v))
        .or_else(|| f.constants().into_iter().find(|c| !m.constants.contains_key(c)))
        .or_else(|| {
            f.free_symbols()
                .into_keys()
                .find(|r| !m.relations.contains_key(r))
        });
    if let Some(name) = missing {
        return Err(OracleError::Unmapped(name));
    }
    eval_unchecked(f, m, env)
}

fn eval_unchecked(f: &Formula, m: &Interpretation, env: &Env) -> Result<bool, OracleError> {
    let mut ev = Evaluator {
        m,
        vars: env.iter().map(|(k, v)| (k.clone(), *v)).collect(),
        rels: Vec::new(),
    };
    ev.holds(f)
}

struct Evaluator<'a> {
    m: &'a Interpretation,
    vars: Vec<(String, usize)>,
    rels: Vec<(String, Relation)>,
}

impl Evaluator<'_> {
    fn term(&self, t: &Term) -> Result<usize, OracleError> {
        match t {
            Term::Var(v) => self
                .vars
                .iter()
                .rev()
                .find(|(n, _)| n == v)
                .map(|(_, e)| *e)
                .ok_or_else(|| OracleError::Unmapped(v.clone())),
            Term::Const(c) => self
                .m
                .constants
                .get(c)
                .copied()
                .ok_or_else(|| OracleError::Unmapped(c.clone())),
        }
    }

    fn relation(&self, name: &str) -> Result<&Relation, OracleError> {
        match self.rels.iter().rev().find(|(n, _)| n == name) {
            Some((_, r)) => Ok(r),
            None => self
                .m
                .relations
                .get(name)
                .ok_or_else(|| OracleError::Unmapped(name.to_string())),
        }
    }

    fn lookup(&self, name: &str, args: &[Term]) -> Result<bool, OracleError> {
        let tuple = args.iter().map(|t| self.term(t)).collect::<Result<Vec<_>, _>>()?;
        let r = self.relation(name)?;
        if r.arity != tuple.len() {
            return Err(OracleError::Arity {
                symbol: name.to_string(),
                expected: r.arity,
                found: tuple.len(),
            });
        }
        Ok(r.contains(&tuple))
    }

    fn holds(&mut self, f: &Formula) -> Result<bool, OracleError> {
        Ok(match f {
            Formula::Top => true,
            Formula::Bottom => false,
            Formula::Prop(p) => self.lookup(p, &[])?,
            Formula::Atom(r, args) => self.lookup(r, args)?,
            Formula::Eq(a, b) => self.term(a)? == self.term(b)?,
            Formula::Not(g) => !self.holds(g)?,
            Formula::And(items) => {
                for g in items {
                    if !self.holds(g)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(items) => {
                for g in items {
                    if self.holds(g)? {
                        return Ok(true);
                    }
                }
                false
            }
            Formula::Implies(a, b) => !self.holds(a)? || self.holds(b)?,
            Formula::Iff(a, b) => self.holds(a)? == self.holds(b)?,
            Formula::Forall(v, g) | Formula::Exists(v, g) => {
                let universal = matches!(f, Formula::Forall(..));
                for e in 0..self.m.domain {
                    self.vars.push((v.clone(), e));
                    let r = self.holds(g);
                    self.vars.pop();
                    if r? != universal {
                        return Ok(!universal);
                    }
                }
                universal
            }
            Formula::Forall2(s, g) | Formula::Exists2(s, g) => {
                let universal = matches!(f, Formula::Forall2(..));
                let Some(arity) = arity_in(g, s) else {
                    return self.holds(g);
                };
                if self.m.domain > MAX_SO_DOMAIN || arity > MAX_SO_ARITY {
                    return Err(OracleError::SecondOrderGuard {
                        symbol: s.clone(),
                        domain: self.m.domain,
                        arity,
                    });
                }
                let size = self.m.domain.pow(arity as u32);
                for mask in 0..(1u64 << size) {
                    self.rels
                        .push((s.clone(), Relation::from_mask(arity, self.m.domain, mask)));
                    let r = self.holds(g);
                    self.rels.pop();
                    if r? != universal {
                        return Ok(!universal);
                    }
                }
                universal
            }
            Formula::Fixpoint(fp) => {
                let arity = fp.params.len();
                let mut current = match fp.kind {
                    FixKind::Least => Relation::empty(arity, self.m.domain),
                    FixKind::Greatest => Relation::full(arity, self.m.domain),
                };
                let count = current.bits.len();
                // monotone, so at most `count` strict steps before it settles
                for _ in 0..=count {
                    let mut next = Relation::empty(arity, self.m.domain);
                    for i in 0..count {
                        let tuple = decode(i, arity, self.m.domain);
                        let depth = self.vars.len();
                        self.vars
                            .extend(fp.params.iter().cloned().zip(tuple.iter().copied()));
                        self.rels.push((fp.relation.clone(), current.clone()));
                        let r = self.holds(&fp.body);
                        self.rels.pop();
                        self.vars.truncate(depth);
                        next.bits[i] = r?;
                    }
                    if next == current {
                        break;
                    }
                    current = next;
                }
                let tuple = fp
                    .args
                    .iter()
                    .map(|t| self.term(t))
                    .collect::<Result<Vec<_>, _>>()?;
                current.contains(&tuple)
            }
        })
    }
}

/// Arity of the first occurrence of `symbol` in `f`, if any.
fn arity_in(f: &Formula, symbol: &str) -> Option<usize> {
    let mut found = None;
    f.visit(&mut |g| {
        if found.is_none() {
            found = g.occurrence_args(symbol).map(<[Term]>::len);
        }
    });
    found
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FoVerdict {
    Equivalent,
    Counterexample { model: Interpretation, env: Env },
}

impl FoVerdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, FoVerdict::Equivalent)
    }
}

/// Compares `f` and `g` on every interpretation of their free vocabulary
/// (together with `sig`) over domains of size `1..=max_domain`, including
/// every assignment to free individual variables.
///
/// Interpretations are visited in a fixed order: smaller domains first, then
/// as a counter whose least significant digit is the first constant, then
/// the free variables, then the relations, each group in name order.
pub fn equiv_fo_finite(f: &Formula, g: &Formula, sig: &Signature, max_domain: usize) -> Result<FoVerdict, OracleError> {
    let mut relations: BTreeMap<String, usize> = BTreeMap::new();
    for p in &sig.props {
        relations.insert(p.clone(), 0);
    }
    relations.extend(sig.relations.iter().map(|(k, v)| (k.clone(), *v)));
    for h in [f, g] {
        for (name, arity) in h.free_symbols() {
            relations.entry(name).or_insert(arity);
        }
    }
    let constants: BTreeSet<String> = sig
        .constants
        .iter()
        .cloned()
        .chain(f.constants())
        .chain(g.constants())
        .collect();
    let free: BTreeSet<String> = f.free_vars().into_iter().chain(g.free_vars()).collect();
    let individuals: Vec<(String, bool)> = constants
        .into_iter()
        .map(|c| (c, true))
        .chain(free.into_iter().map(|v| (v, false)))
        .collect();
    let rels: Vec<(String, usize)> = relations.into_iter().collect();

    for d in 1..=max_domain {
        let mut total: u128 = (d as u128).saturating_pow(individuals.len() as u32);
        let mut widths = Vec::new();
        for (name, arity) in &rels {
            let width = d.checked_pow(*arity as u32).unwrap_or(usize::MAX);
            if width >= 64 {
                return Err(OracleError::SecondOrderGuard {
                    symbol: name.clone(),
                    domain: d,
                    arity: *arity,
                });
            }
            total = total.saturating_mul(1u128 << width);
            widths.push(width);
        }
        if total > MAX_MODELS {
            return Err(OracleError::SearchTooLarge(total));
        }
        for n in 0..total {
            let mut rest = n;
            let mut model = Interpretation::new(d);
            let mut env = Env::new();
            for (name, is_const) in &individuals {
                let e = (rest % d as u128) as usize;
                rest /= d as u128;
                if *is_const {
                    model.constants.insert(name.clone(), e);
                } else {
                    env.insert(name.clone(), e);
                }
            }
            for ((name, arity), width) in rels.iter().zip(&widths) {
                let mask = (rest % (1u128 << width)) as u64;
                rest >>= width;
                model
                    .relations
                    .insert(name.clone(), Relation::from_mask(*arity, d, mask));
            }
            if eval_unchecked(f, &model, &env)? != eval_unchecked(g, &model, &env)? {
                return Ok(FoVerdict::Counterexample { model, env });
            }
        }
    }
    Ok(FoVerdict::Equivalent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn parse(s: &str) -> Formula {
        parse_formula(s, &Signature::new()).unwrap()
    }

    fn graph() -> Interpretation {
        Interpretation::new(3).with_relation("con", 2, &[&[0, 1], &[1, 2]])
    }

    #[test]
    fn transitive_closure() {
        let tc = "lfp r(x,y). (con(x,y) | ex z. (con(x,z) & r(z,y)))";
        let m = graph().with_constant("a", 0).with_constant("b", 1).with_constant("c", 2);
        let holds = |s: &str, t: &str| eval_fo(&parse(&format!("{tc} @({s},{t})")), &m).unwrap();
        // brute-force reachability for comparison
        let con = &m.relations["con"];
        let mut reach = [[false; 3]; 3];
        for (i, row) in reach.iter_mut().enumerate() {
            let mut frontier = vec![i];
            while let Some(u) = frontier.pop() {
                for (v, seen) in row.iter_mut().enumerate() {
                    if con.contains(&[u, v]) && !*seen {
                        *seen = true;
                        frontier.push(v);
                    }
                }
            }
        }
        let names = ["a", "b", "c"];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(holds(names[i], names[j]), reach[i][j], "{i} {j}");
            }
        }
        assert!(holds("a", "c"));
    }

    #[test]
    fn greatest_fixpoint() {
        // the greatest s with s(x) -> ex y. (con(x,y) & s(y)) is the set of
        // points with an infinite path; in this acyclic graph there are none
        let f = parse("ex w. gfp s(x). ex y. (con(x,y) & s(y)) @(w)");
        assert!(!eval_fo(&f, &graph()).unwrap());
        let cyclic = graph().with_relation("con", 2, &[&[0, 1], &[1, 0]]);
        assert!(eval_fo(&f, &cyclic).unwrap());
    }

    #[test]
    fn trivial_first_order() {
        let m = Interpretation::new(2);
        assert!(eval_fo(&parse("all x. x = x"), &m).unwrap());
        let f = parse("all y. ((ex x. ex(x)) -> in(y) -> sec(y))");
        let m = Interpretation::new(2)
            .with_relation("ex", 1, &[])
            .with_relation("in", 1, &[&[0]])
            .with_relation("sec", 1, &[]);
        assert!(eval_fo(&f, &m).unwrap());
        let f = parse("(ex x. ex(x)) -> in(y)");
        assert!(matches!(eval_fo(&f, &m), Err(OracleError::Unmapped(_))));
    }

    #[test]
    fn second_order() {
        let m = Interpretation::new(2).with_constant("a", 1);
        assert!(eval_fo(&parse("Ex2 r. r(a)"), &m).unwrap());
        assert!(!eval_fo(&parse("All2 r. r(a)"), &m).unwrap());
        // arity-1, domain-2: exactly one of the four extensions is {a}
        let unique = parse("Ex2 r. (r(a) & all x. (r(x) -> x = a))");
        assert!(eval_fo(&unique, &m).unwrap());
        let big = Interpretation::new(4).with_constant("a", 0);
        assert!(matches!(
            eval_fo(&parse("Ex2 r. r(a)"), &big),
            Err(OracleError::SecondOrderGuard { .. })
        ));
    }

    #[test]
    fn finite_equivalence() {
        let sig = Signature::new();
        let v = equiv_fo_finite(&parse("all x. r(x)"), &parse("ex x. r(x)"), &sig, 2).unwrap();
        match v {
            FoVerdict::Counterexample { model, .. } => {
                assert_eq!(model.domain, 2);
                assert_eq!(model.relations["r"].len(), 1);
            }
            FoVerdict::Equivalent => panic!("should differ"),
        }
        let f = parse("all x. (p(x) -> ex y. q(x,y))");
        assert!(equiv_fo_finite(&f, &f, &sig, 3).unwrap().is_equivalent());
        // free variables are enumerated too
        let open = equiv_fo_finite(&parse("all x. x = y"), &parse("all x. x = x"), &sig, 2).unwrap();
        assert!(!open.is_equivalent());
    }

    #[test]
    fn display() {
        let m = graph().with_constant("a", 0).with_prop("p", true);
        assert_eq!(m.to_string(), "domain {0..2}; a = 0; con = {(0,1), (1,2)}; p = T");
    }
}
