//! Tokenizer shared by every surface syntax.

use std::collections::BTreeSet;

use super::error::{ErrorKind, ParseError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// Unsigned literal; the sign is handled by the parser.
    Int(u64),
    Question,
    LParen,
    RParen,
    Comma,
    Semi,
    Colon,
    Slash,
    Star,
    Plus,
    Minus,
    EqEq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Bang,
    Tilde,
    AndAnd,
    OrOr,
    Arrow,
    Iff,
    Turnstile,
    Wand,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::Question => "?",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Slash => "/",
            Tok::Star => "*",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::EqEq => "==",
            Tok::Ne => "!=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::Bang => "!",
            Tok::Tilde => "~",
            Tok::AndAnd => "&&",
            Tok::OrOr => "||",
            Tok::Arrow => "->",
            Tok::Iff => "<->",
            Tok::Turnstile => "|--",
            Tok::Wand => "-*",
            Tok::Ident(_) | Tok::Int(_) | Tok::Eof => "",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone)]
pub struct Lexed {
    /// Always terminated by a single `Eof` token.
    pub tokens: Vec<Token>,
    /// 1-based numbers of lines holding only whitespace.
    pub blank_lines: BTreeSet<usize>,
}

const SYMBOLS: &[(&str, Tok)] = &[
    ("<->", Tok::Iff),
    ("|--", Tok::Turnstile),
    ("==", Tok::EqEq),
    ("!=", Tok::Ne),
    ("<=", Tok::Le),
    (">=", Tok::Ge),
    ("&&", Tok::AndAnd),
    ("||", Tok::OrOr),
    ("->", Tok::Arrow),
    ("-*", Tok::Wand),
    ("?", Tok::Question),
    ("(", Tok::LParen),
    (")", Tok::RParen),
    (",", Tok::Comma),
    (";", Tok::Semi),
    (":", Tok::Colon),
    ("/", Tok::Slash),
    ("*", Tok::Star),
    ("+", Tok::Plus),
    ("-", Tok::Minus),
    ("<", Tok::Lt),
    (">", Tok::Gt),
    ("!", Tok::Bang),
    ("~", Tok::Tilde),
];

pub fn lex(text: &str) -> Result<Lexed, ParseError> {
    let mut tokens = Vec::new();
    let mut blank_lines = BTreeSet::new();
    let mut last_line = 1;
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        if raw_line.trim().is_empty() {
            blank_lines.insert(line);
            continue;
        }
        let chars: Vec<char> = raw_line.chars().collect();
        let mut i = 0;
        'scan: while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c == '/' && chars.get(i + 1) == Some(&'/') {
                break;
            }
            if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                tokens.push(Token {
                    tok: Tok::Ident(word),
                    line,
                    col,
                });
                continue;
            }
            if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                let value = digits.parse::<u64>().map_err(|_| {
                    ParseError::new(
                        ErrorKind::Syntax,
                        line,
                        col,
                        format!("integer literal `{digits}` is too large"),
                    )
                })?;
                tokens.push(Token {
                    tok: Tok::Int(value),
                    line,
                    col,
                });
                continue;
            }
            for (sym, tok) in SYMBOLS {
                let len = sym.chars().count();
                if chars.len() - i >= len && chars[i..i + len].iter().copied().eq(sym.chars()) {
                    tokens.push(Token {
                        tok: tok.clone(),
                        line,
                        col,
                    });
                    i += len;
                    continue 'scan;
                }
            }
            return Err(ParseError::new(
                ErrorKind::Syntax,
                line,
                col,
                format!("unexpected character `{c}`"),
            ));
        }
    }
    let eof_line = if text.ends_with('\n') { last_line + 1 } else { last_line };
    tokens.push(Token {
        tok: Tok::Eof,
        line: eof_line,
        col: 1,
    });
    Ok(Lexed { tokens, blank_lines })
}
