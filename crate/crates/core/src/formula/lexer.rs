use num_bigint::BigInt;

use super::parser::{ParseError, ParseErrorKind};

/// Words that cannot name hypotheses, observations or variables.
pub const RESERVED: &[&str] = &["true", "Pr0", "Pr", "we", "forall", "exists"];

pub fn is_reserved(name: &str) -> bool {
    RESERVED.contains(&name)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(super) enum Tok {
    Ident(String),
    Num(BigInt),
    LParen,
    RParen,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    And,
    Or,
    Not,
    Implies,
    Iff,
    Ge,
    Le,
    Gt,
    Lt,
    Eq,
}

impl Tok {
    pub(super) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier {s:?}"),
            Tok::Num(n) => format!("number {n}"),
            other => format!("{:?}", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Caret => "^",
            Tok::And => "&",
            Tok::Or => "|",
            Tok::Not => "~",
            Tok::Implies => "=>",
            Tok::Iff => "<=>",
            Tok::Ge => ">=",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Lt => "<",
            Tok::Eq => "=",
            Tok::Ident(_) | Tok::Num(_) => "",
        }
    }
}

#[derive(Debug, Clone)]
pub(super) struct Spanned {
    pub tok: Tok,
    pub pos: usize,
}

fn ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Length in bytes of the identifier at the start of `s`, if any.
/// Identifiers may carry bracketed numeric indices, as in `heads[100]`.
fn scan_ident(s: &str) -> usize {
    let mut chars = s.char_indices().peekable();
    match chars.peek() {
        Some((_, c)) if ident_start(*c) => {}
        _ => return 0,
    }
    let bytes = s.as_bytes();
    let mut end = 0;
    while end < bytes.len() {
        let c = bytes[end] as char;
        if ident_continue(c) {
            end += 1;
        } else if c == '[' {
            let digits = bytes[end + 1..]
                .iter()
                .take_while(|b| b.is_ascii_digit())
                .count();
            if digits > 0 && bytes.get(end + 1 + digits) == Some(&b']') {
                end += digits + 2;
            } else {
                break;
            }
        } else {
            break;
        }
    }
    end
}

pub(super) fn is_identifier(s: &str) -> bool {
    !s.is_empty() && scan_ident(s) == s.len()
}

pub(super) fn tokenize(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < text.len() {
        let rest = &text[i..];
        let c = rest.chars().next().unwrap_or(' ');
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        let n = scan_ident(rest);
        if n > 0 {
            out.push(Spanned {
                tok: Tok::Ident(rest[..n].to_string()),
                pos: i,
            });
            i += n;
            continue;
        }
        if c.is_ascii_digit() {
            let n = rest.bytes().take_while(u8::is_ascii_digit).count();
            let value: BigInt = rest[..n].parse().expect("digits");
            out.push(Spanned {
                tok: Tok::Num(value),
                pos: i,
            });
            i += n;
            continue;
        }
        let (tok, len) = if rest.starts_with("<=>") {
            (Tok::Iff, 3)
        } else if rest.starts_with("=>") {
            (Tok::Implies, 2)
        } else if rest.starts_with(">=") {
            (Tok::Ge, 2)
        } else if rest.starts_with("<=") {
            (Tok::Le, 2)
        } else {
            let t = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '/' => Tok::Slash,
                '^' => Tok::Caret,
                '&' | '∧' => Tok::And,
                '|' | '∨' => Tok::Or,
                '~' | '¬' => Tok::Not,
                '⇒' => Tok::Implies,
                '⇔' => Tok::Iff,
                '≥' => Tok::Ge,
                '≤' => Tok::Le,
                '>' => Tok::Gt,
                '<' => Tok::Lt,
                '=' => Tok::Eq,
                other => {
                    return Err(ParseError::new(
                        ParseErrorKind::Syntax(format!("unexpected character {other:?}")),
                        i,
                    ))
                }
            };
            (t, c.len_utf8())
        };
        out.push(Spanned { tok, pos: i });
        i += len;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identifiers() {
        assert!(is_identifier("h1"));
        assert!(is_identifier("heads[100]"));
        assert!(is_identifier("_x"));
        assert!(!is_identifier("1h"));
        assert!(!is_identifier("heads[]"));
        assert!(!is_identifier("a b"));
        assert!(!is_identifier(""));
    }

    #[test]
    fn tokens_and_positions() {
        let toks = tokenize("Pr0(h1) >= 2^100 => ~heads[3]").unwrap();
        let kinds: Vec<_> = toks.iter().map(|t| t.tok.clone()).collect();
        assert_eq!(
            kinds,
            vec![
                Tok::Ident("Pr0".into()),
                Tok::LParen,
                Tok::Ident("h1".into()),
                Tok::RParen,
                Tok::Ge,
                Tok::Num(2.into()),
                Tok::Caret,
                Tok::Num(100.into()),
                Tok::Implies,
                Tok::Not,
                Tok::Ident("heads[3]".into()),
            ]
        );
        assert_eq!(toks[4].pos, 8);
        let err = tokenize("h1 $ h2").unwrap_err();
        assert_eq!(err.pos, 3);
    }

    #[test]
    fn unicode_connectives() {
        let toks = tokenize("¬h1 ∧ h2 ⇒ Pr(h1) ≥ 0").unwrap();
        assert_eq!(toks[0].tok, Tok::Not);
        assert_eq!(toks[2].tok, Tok::And);
        assert_eq!(toks[4].tok, Tok::Implies);
        assert!(toks.iter().any(|t| t.tok == Tok::Ge));
    }
}
