use super::{ParseError, Position};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Top,
    Bottom,
    All2,
    Ex2,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Eq,
    Neq,
    LParen,
    RParen,
    Comma,
    Dot,
    At,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Top => "`T`".into(),
            Tok::Bottom => "`F`".into(),
            Tok::All2 => "`All2`".into(),
            Tok::Ex2 => "`Ex2`".into(),
            Tok::Not => "`~`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Implies => "`->`".into(),
            Tok::Iff => "`<->`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Neq => "`!=`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::At => "`@`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: Position,
}

pub fn tokenize(text: &str, origin: Position) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut line = origin.line;
    let mut col = origin.column;
    let mut chars = text.char_indices().peekable();
    while let Some(&(start, c)) = chars.peek() {
        let pos = Position { line, column: col };
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            col += 1;
            continue;
        }
        if c.is_ascii_alphabetic() {
            let mut end = start;
            while let Some(&(i, d)) = chars.peek() {
                if d.is_ascii_alphanumeric() || d == '_' {
                    end = i + d.len_utf8();
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            let word = &text[start..end];
            let tok = match word {
                "T" => Tok::Top,
                "F" => Tok::Bottom,
                "All2" => Tok::All2,
                "Ex2" => Tok::Ex2,
                w if w.starts_with(|ch: char| ch.is_ascii_lowercase()) => Tok::Ident(w.to_string()),
                w => {
                    return Err(ParseError::syntax(
                        pos,
                        format!("identifiers must start with a lowercase letter, found `{w}`"),
                    ))
                }
            };
            out.push(Token { tok, pos });
            continue;
        }
        chars.next();
        col += 1;
        let two =|second: char, tok: Tok, chars: &mut std::iter::Peekable<std::str::CharIndices>| {
            if let Some(&(_, d)) = chars.peek() {
                if d == second {
                    chars.next();
                    return Some(tok);
                }
            }
            None
        };
        let tok = match c {
            '~' => Tok::Not,
            '&' => Tok::And,
            '|' => Tok::Or,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '@' => Tok::At,
            '=' => Tok::Eq,
            '-' => match two('>', Tok::Implies, &mut chars) {
                Some(t) => {
                    col += 1;
                    t
                }
                None => return Err(ParseError::syntax(pos, "expected `->`")),
            },
            '!' => match two('=', Tok::Neq, &mut chars) {
                Some(t) => {
                    col += 1;
                    t
                }
                None => return Err(ParseError::syntax(pos, "expected `!=`")),
            },
            '<' => {
                let ok = two('-', Tok::Implies, &mut chars).is_some()
                    && two('>', Tok::Iff, &mut chars).is_some();
                if !ok {
                    return Err(ParseError::syntax(pos, "expected `<->`"));
                }
                col += 2;
                Tok::Iff
            }
            other => {
                return Err(ParseError::syntax(
                    pos,
                    format!("unexpected character `{}`", other.escape_debug()),
                ))
            }
        };
        out.push(Token { tok, pos });
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Position { line, column: col },
    });
    Ok(out)
}
