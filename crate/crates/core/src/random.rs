//! Seeded generators for property tests, the acceptance suite and fuzzing.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::formula::{FixKind, Formula, Term};
use crate::signature::Theory;

/// Random propositional formula over `vars` with depth at most `depth`.
pub fn prop_formula<R: Rng>(rng: &mut R, vars: &[String], depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..20) {
            0 => Formula::Top,
            1 => Formula::Bottom,
            _ => Formula::prop(vars.choose(rng).unwrap().clone()),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..6) {
        0 => Formula::not(prop_formula(rng, vars, d)),
        1 => {
            let n = rng.gen_range(2..=3);
            Formula::and((0..n).map(|_| prop_formula(rng, vars, d)).collect::<Vec<_>>())
        }
        2 => {
            let n = rng.gen_range(2..=3);
            Formula::or((0..n).map(|_| prop_formula(rng, vars, d)).collect::<Vec<_>>())
        }
        3 => Formula::implies(prop_formula(rng, vars, d), prop_formula(rng, vars, d)),
        4 => Formula::iff(prop_formula(rng, vars, d), prop_formula(rng, vars, d)),
        _ => {
            let a = prop_formula(rng, vars, d);
            let b = prop_formula(rng, vars, d);
            Formula::or([Formula::and([a.clone(), b.clone()]), Formula::not(a)])
        }
    }
}

/// Variable names `p0 .. p{n-1}`.
pub fn prop_vars(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("p{i}")).collect()
}

/// Random theory of 1 to `max_conjuncts` formulas over `vars`.
pub fn prop_theory<R: Rng>(rng: &mut R, vars: &[String], max_conjuncts: usize, depth: usize) -> Theory {
    let n = rng.gen_range(1..=max_conjuncts);
    Theory::new("random", (0..n).map(|_| prop_formula(rng, vars, depth)).collect())
}

/// A random nonempty subset of `vars`, in the order of `vars`.
pub fn subset<R: Rng>(rng: &mut R, vars: &[String]) -> Vec<String> {
    loop {
        let out: Vec<String> = vars.iter().filter(|_| rng.gen_bool(0.4)).cloned().collect();
        if !out.is_empty() {
            return out;
        }
    }
}

/// A theory of universally closed clauses in which `r` occurs only as
/// literals: `all xs. (r(..) | ~r(..) | A)` with `A` built from `q/1`,
/// `e/2` and equality. Returns the theory and the arity of `r`.
pub fn clause_theory<R: Rng>(rng: &mut R) -> (Theory, usize) {
    let arity = rng.gen_range(1..=2);
    let n = rng.gen_range(1..=3);
    let clauses = (0..n).map(|_| fo_clause(rng, arity)).collect();
    (Theory::new("clauses", clauses), arity)
}

fn fo_clause<R: Rng>(rng: &mut R, arity: usize) -> Formula {
    let vars = ["x", "y", "z"];
    let nvars = rng.gen_range(1..=3);
    let scope: Vec<&str> = vars[..nvars].to_vec();
    let term = |rng: &mut R| -> Term {
        if rng.gen_bool(0.15) {
            Term::constant("a")
        } else {
            Term::var(*scope.choose(rng).unwrap())
        }
    };
    let mut disjuncts = Vec::new();
    let lits = rng.gen_range(1..=3);
    for _ in 0..lits {
        let atom = Formula::atom("r", (0..arity).map(|_| term(rng)).collect());
        disjuncts.push(if rng.gen_bool(0.5) { atom } else { Formula::not(atom) });
    }
    let side = rng.gen_range(0..=2);
    for _ in 0..side {
        let atom = match rng.gen_range(0..3) {
            0 => Formula::atom("q", vec![term(rng)]),
            1 => Formula::atom("e", vec![term(rng), term(rng)]),
            _ => Formula::eq(term(rng), term(rng)),
        };
        disjuncts.push(if rng.gen_bool(0.5) { atom } else { Formula::not(atom) });
    }
    disjuncts.shuffle(rng);
    let body = Formula::or(disjuncts);
    let free = body.free_vars();
    Formula::forall_many(scope.into_iter().filter(|v| free.contains(*v)), body)
}

/// Random formula over the whole syntax: truth constants, `p`, `q`, `r/1`,
/// `e/2`, equality, all connectives, both kinds of quantifier and fixpoints.
/// Names are variables exactly when bound, so printing and parsing the
/// result gives it back.
pub fn any_formula<R: Rng>(rng: &mut R, depth: usize) -> Formula {
    Gen { bound: Vec::new() }.formula(rng, depth)
}

struct Gen {
    bound: Vec<String>,
}

const VAR_NAMES: [&str; 3] = ["x", "y", "z"];
const CONST_NAMES: [&str; 2] = ["a", "b"];

impl Gen {
    fn term<R: Rng>(&self, rng: &mut R) -> Term {
        if !self.bound.is_empty() && rng.gen_bool(0.7) {
            Term::var(self.bound.choose(rng).unwrap().clone())
        } else {
            Term::constant(*CONST_NAMES.choose(rng).unwrap())
        }
    }

    fn leaf<R: Rng>(&self, rng: &mut R) -> Formula {
        match rng.gen_range(0..8) {
            0 => Formula::Top,
            1 => Formula::Bottom,
            2 => Formula::prop("p"),
            3 => Formula::prop("q"),
            4 => Formula::atom("r", vec![self.term(rng)]),
            5 => Formula::atom("e", vec![self.term(rng), self.term(rng)]),
            6 => Formula::eq(self.term(rng), self.term(rng)),
            _ => Formula::neq(self.term(rng), self.term(rng)),
        }
    }

    fn formula<R: Rng>(&mut self, rng: &mut R, depth: usize) -> Formula {
        if depth == 0 || rng.gen_bool(0.2) {
            return self.leaf(rng);
        }
        let d = depth - 1;
        match rng.gen_range(0..12) {
            0 | 1 => Formula::not(self.formula(rng, d)),
            2 => {
                let n = rng.gen_range(2..=3);
                Formula::and((0..n).map(|_| self.formula(rng, d)).collect::<Vec<_>>())
            }
            3 => {
                let n = rng.gen_range(2..=3);
                Formula::or((0..n).map(|_| self.formula(rng, d)).collect::<Vec<_>>())
            }
            4 => Formula::implies(self.formula(rng, d), self.formula(rng, d)),
            5 => Formula::iff(self.formula(rng, d), self.formula(rng, d)),
            6 | 7 => {
                let v = VAR_NAMES.choose(rng).unwrap().to_string();
                self.bound.push(v.clone());
                let body = self.formula(rng, d);
                self.bound.pop();
                if rng.gen_bool(0.5) {
                    Formula::forall(v, body)
                } else {
                    Formula::exists(v, body)
                }
            }
            8 => {
                let s = *["p", "r"].choose(rng).unwrap();
                let body = self.formula(rng, d);
                if rng.gen_bool(0.5) {
                    Formula::forall2(s, body)
                } else {
                    Formula::exists2(s, body)
                }
            }
            _ => self.fixpoint(rng, d),
        }
    }

    fn fixpoint<R: Rng>(&mut self, rng: &mut R, depth: usize) -> Formula {
        let kind = if rng.gen_bool(0.5) {
            FixKind::Least
        } else {
            FixKind::Greatest
        };
        // `r/1` and `e/2` double as fixpoint relations so arities stay fixed
        let (rel, params): (&str, Vec<String>) = if rng.gen_bool(0.5) {
            ("r", vec![VAR_NAMES.choose(rng).unwrap().to_string()])
        } else {
            ("e", vec!["x".to_string(), "y".to_string()])
        };
        let args: Vec<Term> = params.iter().map(|_| self.term(rng)).collect();
        let saved = std::mem::replace(&mut self.bound, params.clone());
        let body = self.formula(rng, depth);
        self.bound = saved;
        Formula::fixpoint(kind, rel, params, body, args).unwrap_or_else(|_| self.leaf(rng))
    }
}

/// Random byte strings biased toward the concrete syntax.
pub fn fuzz_bytes<R: Rng>(rng: &mut R, max_len: usize) -> Vec<u8> {
    const PIECES: [&[u8]; 24] = [
        b"all ", b"ex ", b"All2 ", b"Ex2 ", b"lfp ", b"gfp ", b"T", b"F", b"~", b" & ", b" | ",
        b" -> ", b" <-> ", b"(", b")", b",", b". ", b"@(", b" = ", b" != ", b"p", b"r(x)",
        b"#sig rel r/2\n", b"\n",
    ];
    let len = rng.gen_range(0..=max_len);
    let mut out = Vec::with_capacity(len);
    while out.len() < len {
        if rng.gen_bool(0.5) {
            out.push(rng.gen());
        } else {
            out.extend_from_slice(PIECES.choose(rng).unwrap());
        }
    }
    out
}
