//! Tokenizer for the knowledge-base and query concrete syntax.

use std::fmt;

/// Positioned syntax or semantic error. Positions are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: u32,
    pub column: u32,
    pub message: String,
    pub expected: Option<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)?;
        if let Some(e) = &self.expected {
            write!(f, " (expected {e})")?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    KwOntology,
    KwDatabase,
    KwPositive,
    KwNegative,
    KwTop,
    KwBot,
    KwNot,
    KwAnd,
    KwOr,
    KwExists,
    KwForall,
    KwInv,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Dot,
    Leq,
    Pipe,
    Turnstile,
    Eq,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::KwOntology => "`ontology`".into(),
            Tok::KwDatabase => "`database`".into(),
            Tok::KwPositive => "`positive`".into(),
            Tok::KwNegative => "`negative`".into(),
            Tok::KwTop => "`top`".into(),
            Tok::KwBot => "`bot`".into(),
            Tok::KwNot => "`not`".into(),
            Tok::KwAnd => "`and`".into(),
            Tok::KwOr => "`or`".into(),
            Tok::KwExists => "`exists`".into(),
            Tok::KwForall => "`forall`".into(),
            Tok::KwInv => "`inv`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Leq => "`<=`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Turnstile => "`:-`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub kind: Tok,
    pub line: u32,
    pub column: u32,
}

fn keyword(text: &str) -> Option<Tok> {
    Some(match text {
        "ontology" => Tok::KwOntology,
        "database" => Tok::KwDatabase,
        "positive" => Tok::KwPositive,
        "negative" => Tok::KwNegative,
        "top" => Tok::KwTop,
        "bot" => Tok::KwBot,
        "not" => Tok::KwNot,
        "and" => Tok::KwAnd,
        "or" => Tok::KwOr,
        "exists" => Tok::KwExists,
        "forall" => Tok::KwForall,
        "inv" => Tok::KwInv,
        _ => return None,
    })
}

pub(crate) fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut toks = Vec::new();
    let mut chars = text.chars().peekable();
    let mut line: u32 = 1;
    let mut column: u32 = 1;

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else if c.is_some() {
                column += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump!();
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump!();
                }
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                let kind = keyword(&s).unwrap_or(Tok::Ident(s));
                toks.push(Token { kind, line: l, column: col });
            }
            '{' | '}' | '(' | ')' | ',' | '.' | '|' | '=' | '\u{2227}' => {
                bump!();
                let kind = match c {
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ',' | '\u{2227}' => Tok::Comma,
                    '.' => Tok::Dot,
                    '|' => Tok::Pipe,
                    _ => Tok::Eq,
                };
                toks.push(Token { kind, line: l, column: col });
            }
            '<' => {
                bump!();
                if chars.peek() == Some(&'=') {
                    bump!();
                    toks.push(Token { kind: Tok::Leq, line: l, column: col });
                } else {
                    return Err(ParseError {
                        line: l,
                        column: col,
                        message: "stray `<`".into(),
                        expected: Some("`<=`".into()),
                    });
                }
            }
            ':' => {
                bump!();
                if chars.peek() == Some(&'-') {
                    bump!();
                    toks.push(Token { kind: Tok::Turnstile, line: l, column: col });
                } else {
                    return Err(ParseError {
                        line: l,
                        column: col,
                        message: "stray `:`".into(),
                        expected: Some("`:-`".into()),
                    });
                }
            }
            _ => {
                return Err(ParseError {
                    line: l,
                    column: col,
                    message: format!("unexpected character `{c}`"),
                    expected: None,
                });
            }
        }
    }
    toks.push(Token { kind: Tok::Eof, line, column });
    Ok(toks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_are_one_based() {
        let toks = lex("ab <=\n  cd").unwrap();
        assert_eq!(toks[0].kind, Tok::Ident("ab".into()));
        assert_eq!((toks[0].line, toks[0].column), (1, 1));
        assert_eq!(toks[1].kind, Tok::Leq);
        assert_eq!((toks[1].line, toks[1].column), (1, 4));
        assert_eq!((toks[2].line, toks[2].column), (2, 3));
        assert_eq!(toks[3].kind, Tok::Eof);
    }

    #[test]
    fn comments_run_to_end_of_line() {
        let toks = lex("a # everything here is skipped <= } (\nb").unwrap();
        let idents: Vec<_> = toks
            .iter()
            .filter_map(|t| match &t.kind {
                Tok::Ident(s) => Some(s.clone()),
                _ => None,
            })
            .collect();
        assert_eq!(idents, vec!["a", "b"]);
    }

    #[test]
    fn conjunction_sign_is_a_comma() {
        let toks = lex("x \u{2227} y").unwrap();
        assert_eq!(toks[1].kind, Tok::Comma);
    }

    #[test]
    fn bad_character_is_positioned() {
        let err = lex("ontology {\n  A <= @\n}").unwrap_err();
        assert_eq!((err.line, err.column), (2, 8));
        assert!(err.message.contains('@'));
    }

    #[test]
    fn keywords_are_reserved_but_case_sensitive() {
        let toks = lex("not Not").unwrap();
        assert_eq!(toks[0].kind, Tok::KwNot);
        assert_eq!(toks[1].kind, Tok::Ident("Not".into()));
    }
}
