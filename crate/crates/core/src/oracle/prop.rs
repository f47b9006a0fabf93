use std::collections::BTreeMap;

use super::OracleError;
use crate::formula::Formula;
use crate::signature::ordered_symbols;

pub const MAX_PROP_VARS: usize = 22;

pub type Valuation = BTreeMap<String, bool>;

/// Evaluates a propositional formula. Second-order quantifiers over
/// propositional variables are expanded: `Ex2 p. A` is `A[p:=F] | A[p:=T]`.
pub fn eval_prop(f: &Formula, v: &Valuation) -> Result<bool, OracleError> {
    if let Some(missing) = f.free_symbols().into_keys().find(|p| !v.contains_key(p)) {
        return Err(OracleError::Unmapped(missing));
    }
    let mut bound: Vec<(String, bool)> = Vec::new();
    eval_named(f, v, &mut bound)
}

fn eval_named(f: &Formula, v: &Valuation, bound: &mut Vec<(String, bool)>) -> Result<bool, OracleError> {
    Ok(match f {
        Formula::Top => true,
        Formula::Bottom => false,
        Formula::Prop(p) => match bound.iter().rev().find(|(n, _)| n == p) {
            Some((_, b)) => *b,
            None => *v.get(p).ok_or_else(|| OracleError::Unmapped(p.clone()))?,
        },
        Formula::Not(g) => !eval_named(g, v, bound)?,
        Formula::And(items) => {
            for g in items {
                if !eval_named(g, v, bound)? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::Or(items) => {
            for g in items {
                if eval_named(g, v, bound)? {
                    return Ok(true);
                }
            }
            false
        }
        Formula::Implies(a, b) => !eval_named(a, v, bound)? || eval_named(b, v, bound)?,
        Formula::Iff(a, b) => eval_named(a, v, bound)? == eval_named(b, v, bound)?,
        Formula::Forall2(p, g) | Formula::Exists2(p, g) => {
            let universal = matches!(f, Formula::Forall2(..));
            let mut result = universal;
            for value in [false, true] {
                bound.push((p.clone(), value));
                let r = eval_named(g, v, bound);
                bound.pop();
                if r? != universal {
                    result = !universal;
                    break;
                }
            }
            result
        }
        _ => return Err(OracleError::NotPropositional),
    })
}

// Formulas compiled to variable indices for fast truth tables.
enum Compiled {
    Const(bool),
    Var(usize),
    Not(Box<Compiled>),
    And(Vec<Compiled>),
    Or(Vec<Compiled>),
    Implies(Box<Compiled>, Box<Compiled>),
    Iff(Box<Compiled>, Box<Compiled>),
    Quant { universal: bool, var: usize, body: Box<Compiled> },
}

impl Compiled {
    fn eval(&self, bits: u64) -> bool {
        match self {
            Compiled::Const(b) => *b,
            Compiled::Var(i) => bits >> i & 1 == 1,
            Compiled::Not(g) => !g.eval(bits),
            Compiled::And(items) => items.iter().all(|g| g.eval(bits)),
            Compiled::Or(items) => items.iter().any(|g| g.eval(bits)),
            Compiled::Implies(a, b) => !a.eval(bits) || b.eval(bits),
            Compiled::Iff(a, b) => a.eval(bits) == b.eval(bits),
            Compiled::Quant { universal, var, body } => {
                let lo = body.eval(bits & !(1 << var));
                let hi = body.eval(bits | 1 << var);
                if *universal {
                    lo && hi
                } else {
                    lo || hi
                }
            }
        }
    }
}

struct Compiler {
    slots: Vec<String>,
    // free variables in first-occurrence order
    free: Vec<usize>,
}

impl Compiler {
    fn compile(&mut self, f: &Formula, scope: &mut Vec<(String, usize)>) -> Result<Compiled, OracleError> {
        Ok(match f {
            Formula::Top => Compiled::Const(true),
            Formula::Bottom => Compiled::Const(false),
            Formula::Prop(p) => match scope.iter().rev().find(|(n, _)| n == p) {
                Some((_, i)) => Compiled::Var(*i),
                None => {
                    let i = self.slots.iter().position(|s| s == p).expect("free variables are assigned first");
                    Compiled::Var(i)
                }
            },
            Formula::Not(g) => Compiled::Not(Box::new(self.compile(g, scope)?)),
            Formula::And(items) => Compiled::And(
                items
                    .iter()
                    .map(|g| self.compile(g, scope))
                    .collect::<Result<_, _>>()?,
            ),
            Formula::Or(items) => Compiled::Or(
                items
                    .iter()
                    .map(|g| self.compile(g, scope))
                    .collect::<Result<_, _>>()?,
            ),
            Formula::Implies(a, b) => Compiled::Implies(
                Box::new(self.compile(a, scope)?),
                Box::new(self.compile(b, scope)?),
            ),
            Formula::Iff(a, b) => Compiled::Iff(
                Box::new(self.compile(a, scope)?),
                Box::new(self.compile(b, scope)?),
            ),
            Formula::Forall2(p, g) | Formula::Exists2(p, g) => {
                // bound variables live above the free ones, one slot per
                // nesting level; siblings at the same level share a slot
                let var = self.free.len() + scope.len();
                if var >= 64 {
                    return Err(OracleError::TooManyVariables(var + 1));
                }
                scope.push((p.clone(), var));
                let body = self.compile(g, scope);
                scope.pop();
                Compiled::Quant {
                    universal: matches!(f, Formula::Forall2(..)),
                    var,
                    body: Box::new(body?),
                }
            }
            _ => return Err(OracleError::NotPropositional),
        })
    }
}

fn compile_all(fs: &[&Formula]) -> Result<(Vec<Compiled>, Compiler), OracleError> {
    let mut slots: Vec<String> = Vec::new();
    for f in fs {
        if !f.is_propositional() {
            return Err(OracleError::NotPropositional);
        }
        for s in ordered_symbols(f) {
            if !slots.contains(&s) {
                slots.push(s);
            }
        }
    }
    if slots.len() > MAX_PROP_VARS {
        return Err(OracleError::TooManyVariables(slots.len()));
    }
    let mut c = Compiler {
        free: (0..slots.len()).collect(),
        slots,
    };
    let mut out = Vec::new();
    for f in fs {
        out.push(c.compile(f, &mut Vec::new())?);
    }
    Ok((out, c))
}

/// Runs `visit` on every assignment to the free variables, stopping at the
/// first one for which it returns false. Assignments are enumerated as binary
/// counters over the free variables in first-occurrence order.
fn all_assignments(c: &Compiler, mut visit: impl FnMut(u64) -> bool) -> Option<u64> {
    let n = c.free.len();
    for counter in 0u64..(1u64 << n) {
        let mut bits = 0u64;
        for (k, slot) in c.free.iter().enumerate() {
            if counter >> k & 1 == 1 {
                bits |= 1 << slot;
            }
        }
        if !visit(bits) {
            return Some(bits);
        }
    }
    None
}

pub fn taut_prop(f: &Formula) -> Result<bool, OracleError> {
    let (compiled, c) = compile_all(&[f])?;
    Ok(all_assignments(&c, |bits| compiled[0].eval(bits)).is_none())
}

pub fn equiv_prop(f: &Formula, g: &Formula) -> Result<bool, OracleError> {
    counterexample_prop(f, g).map(|c| c.is_none())
}

/// A valuation of the free variables on which `f` and `g` differ, if any.
pub fn counterexample_prop(f: &Formula, g: &Formula) -> Result<Option<Valuation>, OracleError> {
    let (compiled, c) = compile_all(&[f, g])?;
    let found = all_assignments(&c, |bits| compiled[0].eval(bits) == compiled[1].eval(bits));
    Ok(found.map(|bits| {
        c.free
            .iter()
            .map(|&slot| (c.slots[slot].clone(), bits >> slot & 1 == 1))
            .collect()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Term;

    fn p(n: &str) -> Formula {
        Formula::prop(n)
    }

    fn val(pairs: &[(&str, bool)]) -> Valuation {
        pairs.iter().map(|(n, b)| (n.to_string(), *b)).collect()
    }

    #[test]
    fn evaluation() {
        let f = Formula::or([p("lt"), p("lp")]);
        assert!(eval_prop(&f, &val(&[("lt", false), ("lp", true)])).unwrap());
        let ex = Formula::exists2("lt", f.clone());
        assert!(eval_prop(&ex, &val(&[("lp", false)])).unwrap());
        let all = Formula::forall2("lt", f.clone());
        assert!(!eval_prop(&all, &val(&[("lp", false)])).unwrap());
        assert_eq!(
            eval_prop(&f, &val(&[("lt", true)])),
            Err(OracleError::Unmapped("lp".into()))
        );
    }

    #[test]
    fn tautologies_and_equivalence() {
        assert!(taut_prop(&Formula::or([p("p"), Formula::not(p("p"))])).unwrap());
        assert!(!taut_prop(&p("p")).unwrap());
        assert!(equiv_prop(
            &Formula::implies(p("p"), p("q")),
            &Formula::implies(Formula::not(p("q")), Formula::not(p("p")))
        )
        .unwrap());
        let cex = counterexample_prop(&p("a"), &p("b")).unwrap().unwrap();
        assert_ne!(cex["a"], cex["b"]);
    }

    #[test]
    fn example_two_weak() {
        let th = Formula::and([
            Formula::implies(p("mt"), Formula::or([p("lp"), p("mp")])),
            Formula::implies(p("ht"), p("lp")),
        ]);
        let weak = Formula::forall2_many(["mt", "ht"], th.clone());
        assert!(equiv_prop(&weak, &p("lp")).unwrap());
        assert!(taut_prop(&Formula::exists2_many(["mt", "ht"], th)).unwrap());
    }

    #[test]
    fn shadowed_binder() {
        // Ex2 p. (p & All2 p. (p | ~p)) is T; inner p is a different variable
        let inner = Formula::forall2("p", Formula::or([p("p"), Formula::not(p("p"))]));
        let f = Formula::exists2("p", Formula::and([p("p"), inner]));
        assert!(taut_prop(&f).unwrap());
    }

    #[test]
    fn guard() {
        let big = Formula::and((0..23).map(|i| p(&format!("v{i}"))));
        assert_eq!(taut_prop(&big), Err(OracleError::TooManyVariables(23)));
        assert_eq!(
            taut_prop(&Formula::atom("r", vec![Term::constant("a")])),
            Err(OracleError::NotPropositional)
        );
    }
}
