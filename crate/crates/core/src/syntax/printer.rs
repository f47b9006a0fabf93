use crate::formula::{FixKind, Formula, Term};

// Binding strength; higher binds tighter.
const IFF: u8 = 1;
const IMPLIES: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const UNARY: u8 = 5;
const ATOM: u8 = 6;

/// Prints a formula in the concrete syntax with as few parentheses as the
/// grammar allows. Parsing the result gives back the same (flattened)
/// formula.
pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    write(f, &mut out, 0, true);
    out
}

fn strength(f: &Formula) -> u8 {
    match f {
        Formula::Iff(..) => IFF,
        Formula::Implies(..) => IMPLIES,
        Formula::Or(items) if items.len() > 1 => OR,
        Formula::And(items) if items.len() > 1 => AND,
        Formula::Or(_) | Formula::And(_) => ATOM,
        Formula::Not(g) if matches!(**g, Formula::Eq(..)) => ATOM,
        Formula::Not(_)
        | Formula::Forall(..)
        | Formula::Exists(..)
        | Formula::Forall2(..)
        | Formula::Exists2(..) => UNARY,
        _ => ATOM,
    }
}

fn is_binder(f: &Formula) -> bool {
    matches!(
        f,
        Formula::Forall(..) | Formula::Exists(..) | Formula::Forall2(..) | Formula::Exists2(..)
    )
}

/// `rightmost` is true when nothing follows `f` before the enclosing
/// parenthesis or end of input, so a binder may be printed bare.
fn write(f: &Formula, out: &mut String, context: u8, rightmost: bool) {
    if strength(f) < context || (is_binder(f) && !rightmost) {
        out.push('(');
        write_bare(f, out, true);
        out.push(')');
    } else {
        write_bare(f, out, rightmost);
    }
}

fn write_bare(f: &Formula, out: &mut String, rightmost: bool) {
    match f {
        Formula::Top => out.push('T'),
        Formula::Bottom => out.push('F'),
        Formula::Prop(p) => out.push_str(p),
        Formula::Atom(r, args) => {
            out.push_str(r);
            out.push('(');
            terms(args, out);
            out.push(')');
        }
        Formula::Eq(a, b) => {
            out.push_str(a.name());
            out.push_str(" = ");
            out.push_str(b.name());
        }
        Formula::Not(g) => match &**g {
            Formula::Eq(a, b) => {
                out.push_str(a.name());
                out.push_str(" != ");
                out.push_str(b.name());
            }
            g => {
                out.push('~');
                write(g, out, UNARY, rightmost);
            }
        },
        // the empty and singleton cases only arise from hand-built values
        Formula::And(items) if items.is_empty() => out.push('T'),
        Formula::Or(items) if items.is_empty() => out.push('F'),
        Formula::And(items) if items.len() == 1 => write(&items[0], out, 0, true),
        Formula::Or(items) if items.len() == 1 => write(&items[0], out, 0, true),
        Formula::And(items) => nary(items, " & ", AND + 1, out, rightmost),
        Formula::Or(items) => nary(items, " | ", OR + 1, out, rightmost),
        Formula::Implies(a, b) => {
            write(a, out, IMPLIES + 1, false);
            out.push_str(" -> ");
            write(b, out, IMPLIES, rightmost);
        }
        Formula::Iff(a, b) => {
            write(a, out, IFF + 1, false);
            out.push_str(" <-> ");
            write(b, out, IFF, rightmost);
        }
        Formula::Forall(v, g) => binder("all ", v, g, out, rightmost),
        Formula::Exists(v, g) => binder("ex ", v, g, out, rightmost),
        Formula::Forall2(s, g) => binder("All2 ", s, g, out, rightmost),
        Formula::Exists2(s, g) => binder("Ex2 ", s, g, out, rightmost),
        Formula::Fixpoint(fp) => {
            out.push_str(match fp.kind {
                FixKind::Least => "lfp ",
                FixKind::Greatest => "gfp ",
            });
            out.push_str(&fp.relation);
            out.push('(');
            out.push_str(&fp.params.join(","));
            out.push_str("). ");
            body(&fp.body, out, true);
            out.push_str(" @(");
            terms(&fp.args, out);
            out.push(')');
        }
    }
}

fn nary(items: &[Formula], sep: &str, context: u8, out: &mut String, rightmost: bool) {
    let last = items.len() - 1;
    for (i, g) in items.iter().enumerate() {
        if i > 0 {
            out.push_str(sep);
        }
        write(g, out, context, rightmost && i == last);
    }
}

fn binder(keyword: &str, name: &str, g: &Formula, out: &mut String, rightmost: bool) {
    out.push_str(keyword);
    out.push_str(name);
    out.push_str(". ");
    body(g, out, rightmost);
}

// Binary bodies are always parenthesised even where the grammar would not
// need it; `all x. (p(x) -> q(x))` reads better than the bare form.
fn body(g: &Formula, out: &mut String, rightmost: bool) {
    if strength(g) < UNARY {
        out.push('(');
        write_bare(g, out, true);
        out.push(')');
    } else {
        write(g, out, UNARY, rightmost);
    }
}

fn terms(args: &[Term], out: &mut String) {
    for (i, t) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(t.name());
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse_formula;
    use super::*;
    use crate::signature::Signature;

    fn round_trip(text: &str) -> String {
        let f = parse_formula(text, &Signature::new()).unwrap();
        let printed = print_formula(&f);
        let again = parse_formula(&printed, &Signature::new()).unwrap();
        assert_eq!(f, again, "{text} printed as {printed}");
        printed
    }

    #[test]
    fn minimal_parentheses() {
        assert_eq!(round_trip("(p & q) | r"), "p & q | r");
        assert_eq!(round_trip("p & (q | r)"), "p & (q | r)");
        assert_eq!(round_trip("(p -> q) -> r"), "(p -> q) -> r");
        assert_eq!(round_trip("p -> (q -> r)"), "p -> q -> r");
        assert_eq!(round_trip("~(p & q)"), "~(p & q)");
        assert_eq!(round_trip("~~p"), "~~p");
    }

    #[test]
    fn binders_in_the_middle_get_parentheses() {
        assert_eq!(
            round_trip("(all x. r(x)) & q"),
            "(all x. r(x)) & q"
        );
        assert_eq!(round_trip("q & all x. r(x)"), "q & all x. r(x)");
        assert_eq!(round_trip("~(ex x. r(x)) | q"), "~(ex x. r(x)) | q");
        assert_eq!(
            round_trip("all x. (r(x) -> q(x))"),
            "all x. (r(x) -> q(x))"
        );
    }

    #[test]
    fn equality_and_fixpoints() {
        round_trip("all x. all y. (x = y | x != y | ~(x = a))");
        round_trip("all y. ((ex x. (ex(x) & lfp r(x,y). (con(x,y) | ex z. (con(x,z) & r(z,y))) @(x,y))) -> in(y) -> sec(y))");
        round_trip("gfp s(x). (p(x) & ex y. s(y)) @(c) & q");
        round_trip("Ex2 r. (r(a) & All2 p. (p | r(b)))");
    }
}
