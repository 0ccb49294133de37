use super::{Diagnostic, Severity};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(String),
    Str(String),
    Keyword(&'static str),
    Punct(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    /// Character offsets, half-open.
    pub start: u32,
    pub end: u32,
    pub line: u32,
    pub column: u32,
}

const KEYWORDS: &[&str] = &[
    "class", "interface", "if", "else", "while", "for", "return", "break", "continue", "throw",
    "try", "catch", "new", "true", "false",
];

// longest first so two-character operators win
const PUNCT: &[&str] = &[
    "&&", "||", "==", "!=", "<=", ">=", "{", "}", "(", ")", ";", ",", ".", "=", "+", "-", "*",
    "/", "<", ">", "!",
];

/// Splits MiniLang source into tokens. Stray characters are reported and
/// skipped; an unterminated string or block comment is fatal.
pub fn tokenize(file: &str, text: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut diags = Vec::new();
    let mut i = 0usize;
    let mut line = 1u32;
    let mut line_start = 0usize;

    macro_rules! diag {
        ($sev:expr, $at:expr, $l:expr, $ls:expr, $($arg:tt)*) => {
            diags.push(Diagnostic {
                file: file.to_string(),
                line: $l,
                column: ($at - $ls) as u32 + 1,
                message: format!($($arg)*),
                severity: $sev,
            })
        };
    }

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
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            let (start, sl, sls) = (i, line, line_start);
            i += 2;
            loop {
                if i >= chars.len() {
                    diag!(Severity::Error, start, sl, sls, "unterminated block comment");
                    return (tokens, diags);
                }
                if chars[i] == '*' && chars.get(i + 1) == Some(&'/') {
                    i += 2;
                    break;
                }
                if chars[i] == '\n' {
                    line += 1;
                    line_start = i + 1;
                }
                i += 1;
            }
            continue;
        }

        let start = i;
        let column = (i - line_start) as u32 + 1;
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            match KEYWORDS.iter().find(|k| **k == word) {
                Some(k) => Tok::Keyword(k),
                None => Tok::Ident(word),
            }
        } else if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            Tok::Int(chars[start..i].iter().collect())
        } else if c == '"' {
            i += 1;
            loop {
                match chars.get(i) {
                    None | Some('\n') => {
                        diag!(Severity::Error, start, line, line_start, "unterminated string literal");
                        return (tokens, diags);
                    }
                    Some('\\') => i += 2,
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some(_) => i += 1,
                }
            }
            Tok::Str(chars[start..i].iter().collect())
        } else if let Some(p) = PUNCT.iter().find(|p| {
            p.chars()
                .enumerate()
                .all(|(k, pc)| chars.get(i + k) == Some(&pc))
        }) {
            i += p.chars().count();
            Tok::Punct(p)
        } else {
            diag!(Severity::Warning, i, line, line_start, "unexpected character {:?}", c);
            i += 1;
            continue;
        };
        tokens.push(Token {
            tok,
            start: start as u32,
            end: i as u32,
            line,
            column,
        });
    }
    tokens.push(Token {
        tok: Tok::Eof,
        start: chars.len() as u32,
        end: chars.len() as u32,
        line,
        column: (chars.len() - line_start) as u32 + 1,
    });
    (tokens, diags)
}
