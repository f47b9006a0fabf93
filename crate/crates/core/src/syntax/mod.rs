//! Concrete ASCII syntax: parsing of formulas and theory files, and the
//! printer that inverts it.
//!
//! ```text
//! T  F  ~A  A & B  A | B  A -> B  A <-> B
//! all x. A   ex x. A   All2 p. A   Ex2 r. A
//! r(x, a)   x = y   x != y
//! lfp r(x, y). A @(s, t)      gfp r(x). A @(a)
//! ```
//!
//! Precedence from tightest: `~`, `&`, `|`, `->` (right associative),
//! `<->` (right associative). Quantifier and fixpoint bodies extend as far to
//! the right as possible.

mod lexer;
mod printer;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::formula::{FixKind, Formula, FormulaError, Term};
use crate::signature::{Signature, Theory};
use lexer::{tokenize, Tok, Token};

pub use printer::print_formula;

/// Nesting bound for the recursive-descent parser.
const MAX_DEPTH: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl Position {
    pub const START: Position = Position { line: 1, column: 1 };
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{pos}: syntax error: {message}")]
    Syntax { pos: Position, message: String },
    #[error("{pos}: `{symbol}` used with {found} argument(s), expected {expected}")]
    Arity {
        pos: Position,
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("{pos}: undeclared symbol `{symbol}`")]
    Undeclared { pos: Position, symbol: String },
    #[error("{pos}: formula is not closed (free variables: {vars}); add `#closure auto` to close it universally")]
    NotClosed { pos: Position, vars: String },
    #[error("{pos}: {source}")]
    Fixpoint { pos: Position, source: FormulaError },
    #[error("{pos}: bad directive: {message}")]
    Directive { pos: Position, message: String },
}

impl ParseError {
    fn syntax(pos: Position, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            pos,
            message: message.into(),
        }
    }

    pub fn position(&self) -> Position {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::Arity { pos, .. }
            | ParseError::Undeclared { pos, .. }
            | ParseError::NotClosed { pos, .. }
            | ParseError::Fixpoint { pos, .. }
            | ParseError::Directive { pos, .. } => *pos,
        }
    }
}

/// How an argument name that is neither bound nor declared is read.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum UndeclaredTerms {
    /// As an individual constant.
    #[default]
    Constant,
    /// As a free individual variable.
    FreeVariable,
}

#[derive(Clone, Debug, Default)]
pub struct ParseOptions {
    /// Reject symbols and constants missing from the signature.
    pub strict: bool,
    pub undeclared_terms: UndeclaredTerms,
    /// Names always read as free variables.
    pub free_vars: BTreeSet<String>,
}

/// Parses one formula. Symbols missing from `sig` are inferred; arities are
/// checked against `sig` and across the formula. Unbound argument names are
/// constants.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    parse_formula_with(text, sig, &ParseOptions::default()).map(|parsed| parsed.formula)
}

#[derive(Clone, Debug)]
pub struct Parsed {
    pub formula: Formula,
    /// The input signature extended with every inferred symbol.
    pub signature: Signature,
    /// Free variables in order of first occurrence.
    pub free_vars: Vec<String>,
}

pub fn parse_formula_with(text: &str, sig: &Signature, opts: &ParseOptions) -> Result<Parsed, ParseError> {
    parse_at(text, sig, opts, Position::START)
}

fn parse_at(text: &str, sig: &Signature, opts: &ParseOptions, origin: Position) -> Result<Parsed, ParseError> {
    let toks = tokenize(text, origin)?;
    let mut parser = Parser {
        toks,
        i: 0,
        sig: sig.clone(),
        opts,
        vars: Vec::new(),
        bound_syms: Vec::new(),
        free_seen: Vec::new(),
        depth: 0,
    };
    let formula = parser.formula()?;
    parser.expect(Tok::Eof)?;
    Ok(Parsed {
        formula,
        signature: parser.sig,
        free_vars: parser.free_seen,
    })
}

/// Parses a theory file: `#sig` / `#closure` / `#theory` directives, one
/// formula per line, `#` comments and blank lines.
///
/// Argument names that are neither bound nor declared with `#sig const` are
/// free variables. Open formulas are rejected unless the file contains
/// `#closure auto`, which closes them universally.
pub fn parse_theory(text: &str) -> Result<(Signature, Theory), ParseError> {
    let mut sig = Signature::new();
    let mut closure = false;
    let mut name = String::from("theory");
    let mut lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = raw.trim_start();
        let indent = raw.len() - trimmed.len();
        let pos = Position {
            line: line_no,
            column: indent + 1,
        };
        if let Some(rest) = directive(trimmed) {
            apply_directive(rest, pos, &mut sig, &mut closure, &mut name)?;
            continue;
        }
        let body = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        if body.trim().is_empty() {
            continue;
        }
        lines.push((line_no, body.to_string()));
    }

    let opts = ParseOptions {
        strict: false,
        undeclared_terms: UndeclaredTerms::FreeVariable,
        free_vars: BTreeSet::new(),
    };
    let mut formulas = Vec::new();
    for (line_no, body) in lines {
        let origin = Position {
            line: line_no,
            column: 1,
        };
        let parsed = parse_at(&body, &sig, &opts, origin)?;
        sig = parsed.signature;
        let mut f = parsed.formula;
        if !parsed.free_vars.is_empty() {
            if closure {
                f = Formula::forall_many(parsed.free_vars, f);
            } else {
                return Err(ParseError::NotClosed {
                    pos: origin,
                    vars: parsed.free_vars.join(", "),
                });
            }
        }
        formulas.push(f);
    }
    Ok((sig, Theory::new(name, formulas)))
}

fn directive(line: &str) -> Option<&str> {
    ["#sig", "#closure", "#theory"]
        .iter()
        .find(|d| {
            line.strip_prefix(**d)
                .is_some_and(|rest| rest.is_empty() || rest.starts_with(char::is_whitespace))
        })
        .map(|_| line)
}

fn apply_directive(
    line: &str,
    pos: Position,
    sig: &mut Signature,
    closure: &mut bool,
    name: &mut String,
) -> Result<(), ParseError> {
    let bad = |message: String| ParseError::Directive { pos, message };
    let line = match line.find('#').and_then(|first| line[first + 1..].find('#').map(|i| i + first + 1)) {
        Some(comment) => &line[..comment],
        None => line,
    };
    let words: Vec<&str> = line
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|w| !w.is_empty())
        .collect();
    match words.as_slice() {
        ["#closure", "auto"] => *closure = true,
        ["#closure", ..] => return Err(bad("expected `#closure auto`".into())),
        ["#theory", n] if is_ident(n) => *name = n.to_string(),
        ["#theory", ..] => return Err(bad("expected `#theory <name>`".into())),
        ["#sig", kind, items @ ..] if !items.is_empty() => {
            for item in items {
                match *kind {
                    "prop" if is_ident(item) => declare(sig, item, 0, pos)?,
                    "const" if is_ident(item) => {
                        sig.constants.insert(item.to_string());
                    }
                    "rel" => {
                        let (n, a) = item
                            .split_once('/')
                            .ok_or_else(|| bad(format!("expected `name/arity`, found `{item}`")))?;
                        let arity: usize = a
                            .parse()
                            .map_err(|_| bad(format!("bad arity in `{item}`")))?;
                        if !is_ident(n) || arity == 0 {
                            return Err(bad(format!("bad relation declaration `{item}`")));
                        }
                        declare(sig, n, arity, pos)?;
                    }
                    _ => return Err(bad(format!("cannot declare `{item}` as `{kind}`"))),
                }
            }
        }
        _ => return Err(bad("expected `#sig prop|rel|const <items>`".into())),
    }
    Ok(())
}

fn declare(sig: &mut Signature, name: &str, arity: usize, pos: Position) -> Result<(), ParseError> {
    sig.declare(name, arity).map_err(|_| ParseError::Arity {
        pos,
        symbol: name.to_string(),
        expected: sig.arity(name).unwrap_or(arity),
        found: arity,
    })
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct Parser<'a> {
    toks: Vec<Token>,
    i: usize,
    sig: Signature,
    opts: &'a ParseOptions,
    /// Individual variables in scope.
    vars: Vec<String>,
    /// Second-order symbols in scope with their arity once known.
    bound_syms: Vec<(String, Option<usize>)>,
    free_seen: Vec<String>,
    depth: usize,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let idx = (self.i + k).min(self.toks.len() - 1);
        &self.toks[idx].tok
    }

    fn pos(&self) -> Position {
        self.toks[self.i].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.peek() == &tok {
            self.bump();
            Ok(())
        } else {
            Err(ParseError::syntax(
                self.pos(),
                format!("expected {}, found {}", tok.describe(), self.peek().describe()),
            ))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(name)
            }
            other => Err(ParseError::syntax(
                self.pos(),
                format!("expected identifier, found {}", other.describe()),
            )),
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            Err(ParseError::syntax(self.pos(), "formula nested too deeply"))
        } else {
            Ok(())
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        self.enter()?;
        let lhs = self.implication()?;
        let out = if self.eat(&Tok::Iff) {
            Formula::iff(lhs, self.formula()?)
        } else {
            lhs
        };
        self.depth -= 1;
        Ok(out)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        self.enter()?;
        let lhs = self.disjunction()?;
        let out = if self.eat(&Tok::Implies) {
            Formula::implies(lhs, self.implication()?)
        } else {
            lhs
        };
        self.depth -= 1;
        Ok(out)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut items = vec![self.conjunction()?];
        while self.eat(&Tok::Or) {
            items.push(self.conjunction()?);
        }
        Ok(Formula::or(items))
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut items = vec![self.unary()?];
        while self.eat(&Tok::And) {
            items.push(self.unary()?);
        }
        Ok(Formula::and(items))
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        self.enter()?;
        let out = match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Formula::not(self.unary()?)
            }
            Tok::All2 | Tok::Ex2 => {
                let universal = self.bump().tok == Tok::All2;
                let sym = self.ident()?;
                self.expect(Tok::Dot)?;
                self.bound_syms.push((sym.clone(), None));
                let body = self.formula();
                self.bound_syms.pop();
                let body = body?;
                if universal {
                    Formula::forall2(sym, body)
                } else {
                    Formula::exists2(sym, body)
                }
            }
            Tok::Ident(kw) if matches!(self.peek_at(1), Tok::Ident(_)) => match kw.as_str() {
                "all" | "ex" => {
                    self.bump();
                    let var = self.ident()?;
                    self.expect(Tok::Dot)?;
                    self.vars.push(var.clone());
                    let body = self.formula();
                    self.vars.pop();
                    let body = body?;
                    if kw == "all" {
                        Formula::forall(var, body)
                    } else {
                        Formula::exists(var, body)
                    }
                }
                "lfp" | "gfp" => self.fixpoint()?,
                _ => {
                    return Err(ParseError::syntax(
                        self.toks[self.i + 1].pos,
                        format!("unexpected identifier after `{kw}`"),
                    ))
                }
            },
            _ => self.primary()?,
        };
        self.depth -= 1;
        Ok(out)
    }

    fn fixpoint(&mut self) -> Result<Formula, ParseError> {
        let start = self.pos();
        let kind = match self.bump().tok {
            Tok::Ident(k) if k == "lfp" => FixKind::Least,
            _ => FixKind::Greatest,
        };
        let relation = self.ident()?;
        self.expect(Tok::LParen)?;
        let mut params = vec![self.ident()?];
        while self.eat(&Tok::Comma) {
            params.push(self.ident()?);
        }
        self.expect(Tok::RParen)?;
        self.expect(Tok::Dot)?;
        self.bound_syms.push((relation.clone(), Some(params.len())));
        let depth = self.vars.len();
        self.vars.extend(params.iter().cloned());
        let body = self.formula();
        self.vars.truncate(depth);
        self.bound_syms.pop();
        let body = body?;
        self.expect(Tok::At)?;
        self.expect(Tok::LParen)?;
        let args = self.terms()?;
        self.expect(Tok::RParen)?;
        Formula::fixpoint(kind, relation, params, body, args)
            .map_err(|source| ParseError::Fixpoint { pos: start, source })
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Top => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::Bottom => {
                self.bump();
                Ok(Formula::Bottom)
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(name) => match self.peek_at(1) {
                Tok::LParen => {
                    self.bump();
                    self.bump();
                    let args = self.terms()?;
                    self.expect(Tok::RParen)?;
                    self.use_symbol(&name, args.len(), pos)?;
                    Ok(Formula::Atom(name, args))
                }
                Tok::Eq | Tok::Neq => {
                    let left = self.term()?;
                    let negated = self.bump().tok == Tok::Neq;
                    let right = self.term()?;
                    let eq = Formula::eq(left, right);
                    Ok(if negated { Formula::not(eq) } else { eq })
                }
                _ => {
                    self.bump();
                    self.use_symbol(&name, 0, pos)?;
                    Ok(Formula::Prop(name))
                }
            },
            other => Err(ParseError::syntax(
                pos,
                format!("expected a formula, found {}", other.describe()),
            )),
        }
    }

    fn terms(&mut self) -> Result<Vec<Term>, ParseError> {
        let mut out = vec![self.term()?];
        while self.eat(&Tok::Comma) {
            out.push(self.term()?);
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let pos = self.pos();
        let name = self.ident()?;
        if self.vars.contains(&name) || self.opts.free_vars.contains(&name) {
            if !self.vars.contains(&name) && !self.free_seen.contains(&name) {
                self.free_seen.push(name.clone());
            }
            return Ok(Term::Var(name));
        }
        if self.sig.constants.contains(&name) {
            return Ok(Term::Const(name));
        }
        if self.opts.strict {
            return Err(ParseError::Undeclared { pos, symbol: name });
        }
        match self.opts.undeclared_terms {
            UndeclaredTerms::Constant => Ok(Term::Const(name)),
            UndeclaredTerms::FreeVariable => {
                if !self.free_seen.contains(&name) {
                    self.free_seen.push(name.clone());
                }
                Ok(Term::Var(name))
            }
        }
    }

    fn use_symbol(&mut self, name: &str, arity: usize, pos: Position) -> Result<(), ParseError> {
        if let Some(entry) = self.bound_syms.iter_mut().rev().find(|(s, _)| s == name) {
            return match entry.1 {
                Some(expected) if expected != arity => Err(ParseError::Arity {
                    pos,
                    symbol: name.to_string(),
                    expected,
                    found: arity,
                }),
                Some(_) => Ok(()),
                None => {
                    entry.1 = Some(arity);
                    Ok(())
                }
            };
        }
        match self.sig.arity(name) {
            Some(expected) if expected != arity => Err(ParseError::Arity {
                pos,
                symbol: name.to_string(),
                expected,
                found: arity,
            }),
            Some(_) => Ok(()),
            None if self.opts.strict => Err(ParseError::Undeclared {
                pos,
                symbol: name.to_string(),
            }),
            None => {
                self.sig
                    .declare(name, arity)
                    .expect("fresh symbol cannot clash");
                Ok(())
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Formula {
        parse_formula(s, &Signature::new()).unwrap()
    }

    #[test]
    fn parses_disjunction() {
        assert_eq!(
            parse("lt | lp"),
            Formula::or([Formula::prop("lt"), Formula::prop("lp")])
        );
    }

    #[test]
    fn implication_is_right_associative() {
        let p = |n: &str| Formula::prop(n);
        assert_eq!(
            parse("p -> q -> r"),
            Formula::implies(p("p"), Formula::implies(p("q"), p("r")))
        );
    }

    #[test]
    fn quantified_formula() {
        let x = || Term::var("x");
        let f = parse("all x. (ms(x) -> (h(x) & t(x)))");
        let expected = Formula::forall(
            "x",
            Formula::implies(
                Formula::atom("ms", vec![x()]),
                Formula::and([Formula::atom("h", vec![x()]), Formula::atom("t", vec![x()])]),
            ),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn keyword_names_as_relations() {
        // `ex` is a relation here, a quantifier only when followed by a name
        let f = parse("ex x. (ex(x) & all(x))");
        let x = || Term::var("x");
        assert_eq!(
            f,
            Formula::exists(
                "x",
                Formula::and([Formula::atom("ex", vec![x()]), Formula::atom("all", vec![x()])])
            )
        );
    }

    #[test]
    fn unbound_arguments_are_constants() {
        let f = parse("r(x, a)");
        assert_eq!(
            f,
            Formula::atom("r", vec![Term::constant("x"), Term::constant("a")])
        );
    }

    #[test]
    fn equality_and_inequality() {
        let f = parse("all x. all y. (x = y | x != y)");
        let (x, y) = (Term::var("x"), Term::var("y"));
        assert_eq!(
            f,
            Formula::forall(
                "x",
                Formula::forall(
                    "y",
                    Formula::or([Formula::eq(x.clone(), y.clone()), Formula::neq(x, y)])
                )
            )
        );
    }

    #[test]
    fn fixpoint_literal() {
        let f = parse("lfp r(x,y). (con(x,y) | ex z. (con(x,z) & r(z,y))) @(a,b)");
        match f {
            Formula::Fixpoint(fp) => {
                assert_eq!(fp.kind, FixKind::Least);
                assert_eq!(fp.params, vec!["x", "y"]);
                assert_eq!(fp.args, vec![Term::constant("a"), Term::constant("b")]);
            }
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_formula("lfp r(x). ~r(x) @(a)", &Signature::new()).unwrap_err();
        assert!(matches!(err, ParseError::Fixpoint { .. }));
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_formula("p &\n  & q", &Signature::new()).unwrap_err();
        assert_eq!(err.position(), Position { line: 2, column: 3 });
        let err = parse_formula("r(a) | r(a,b)", &Signature::new()).unwrap_err();
        assert!(matches!(err, ParseError::Arity { .. }));
        let sig = Signature::new().with_relation("r", 2);
        assert!(parse_formula("r(a)", &sig).is_err());
        let strict = ParseOptions {
            strict: true,
            ..ParseOptions::default()
        };
        assert!(matches!(
            parse_formula_with("q", &Signature::new(), &strict),
            Err(ParseError::Undeclared { .. })
        ));
    }

    #[test]
    fn deep_nesting_is_an_error_not_a_crash() {
        let text = "(".repeat(10_000) + "p" + &")".repeat(10_000);
        assert!(parse_formula(&text, &Signature::new()).is_err());
        let text = "~".repeat(10_000) + "p";
        assert!(parse_formula(&text, &Signature::new()).is_err());
    }

    #[test]
    fn theory_file() {
        let text = "# toy system\n#sig prop mt ht lp mp\nmt -> lp | mp\nht -> lp   # rule two\n\n";
        let (sig, th) = parse_theory(text).unwrap();
        assert_eq!(th.formulas.len(), 2);
        assert!(sig.props.contains("mp"));

        let (_, th) = parse_theory("").unwrap();
        assert!(th.formulas.is_empty());
        assert_eq!(th.conjunction(), Formula::Top);
    }

    #[test]
    fn theory_closedness() {
        let err = parse_theory("r(x) -> q(x)").unwrap_err();
        assert!(matches!(err, ParseError::NotClosed { .. }));

        let (_, th) = parse_theory("#closure auto\nr(x, y) -> q(y)").unwrap();
        let f = &th.formulas[0];
        assert!(f.is_closed());
        assert!(matches!(f, Formula::Forall(v, _) if v == "x"));

        let (_, th) = parse_theory("#sig const a\nr(a)").unwrap();
        assert_eq!(th.formulas[0], Formula::atom("r", vec![Term::constant("a")]));
    }

    #[test]
    fn theory_directive_errors() {
        assert!(matches!(
            parse_theory("#sig rel r"),
            Err(ParseError::Directive { .. })
        ));
        assert!(matches!(
            parse_theory("#sig rel r/2\nr(a)"),
            Err(ParseError::Arity { .. })
        ));
    }
}
