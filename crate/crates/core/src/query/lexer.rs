use std::fmt;

use super::QueryError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    /// A node type written `{Name}`.
    Braced(String),
    Int(i64),
    Str(String),
    Keyword(&'static str),
    Punct(&'static str),
    Eof,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Ident(s) => write!(f, "identifier {s}"),
            TokenKind::Braced(s) => write!(f, "{{{s}}}"),
            TokenKind::Int(n) => write!(f, "{n}"),
            TokenKind::Str(s) => write!(f, "{s:?}"),
            TokenKind::Keyword(k) => write!(f, "'{k}'"),
            TokenKind::Punct(p) => write!(f, "'{p}'"),
            TokenKind::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: u32,
    pub column: u32,
}

pub const KEYWORDS: &[&str] = &[
    "select", "outmost", "inmost", "in", "directly", "where", "if", "else", "while", "callquery",
    "print", "true", "false",
];

const PUNCT: &[&str] = &[
    "...", "++", "--", "+=", "-=", "==", "!=", "<=", ">=", "&&", "||", "(", ")", "{", "}", ";",
    ",", ".", ":", "*", "<", ">", "!", "+", "-", "=",
];

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Tokenizes query text. `//` comments run to end of line.
pub fn tokenize(text: &str) -> Result<Vec<Token>, QueryError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut line_start) = (0usize, 1u32, 0usize);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            line_start = i;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let column = (i - line_start) as u32 + 1;
        let start = i;
        let kind = if is_ident_start(c) {
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            match KEYWORDS.iter().find(|k| **k == word) {
                Some(k) => TokenKind::Keyword(k),
                None => TokenKind::Ident(word),
            }
        } else if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            let n = digits.parse::<i64>().map_err(|_| QueryError::Lex {
                line,
                column,
                message: format!("integer literal {digits} out of range"),
            })?;
            TokenKind::Int(n)
        } else if c == '"' {
            i += 1;
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None | Some('\n') => {
                        return Err(QueryError::Lex {
                            line,
                            column,
                            message: "unterminated string".to_string(),
                        })
                    }
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some('\\') => {
                        let esc = chars.get(i + 1).copied();
                        s.push(match esc {
                            Some('n') => '\n',
                            Some('t') => '\t',
                            Some('\\') => '\\',
                            Some('"') => '"',
                            _ => {
                                return Err(QueryError::Lex {
                                    line,
                                    column: (i - line_start) as u32 + 1,
                                    message: "invalid escape in string".to_string(),
                                })
                            }
                        });
                        i += 2;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            TokenKind::Str(s)
        } else if c == '{' && chars.get(i + 1).is_some_and(|&n| is_ident_start(n)) && {
            let mut j = i + 1;
            while j < chars.len() && is_ident_char(chars[j]) {
                j += 1;
            }
            chars.get(j) == Some(&'}')
        } {
            let mut j = i + 1;
            while is_ident_char(chars[j]) {
                j += 1;
            }
            let name: String = chars[i + 1..j].iter().collect();
            i = j + 1;
            TokenKind::Braced(name)
        } else if let Some(p) = PUNCT.iter().find(|p| {
            p.chars()
                .enumerate()
                .all(|(k, pc)| chars.get(i + k) == Some(&pc))
        }) {
            i += p.len();
            TokenKind::Punct(p)
        } else {
            return Err(QueryError::Lex {
                line,
                column,
                message: format!("stray character {c:?}"),
            });
        };
        out.push(Token { kind, line, column });
    }
    out.push(Token {
        kind: TokenKind::Eof,
        line,
        column: (chars.len() - line_start) as u32 + 1,
    });
    Ok(out)
}
