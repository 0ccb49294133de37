//! CRAQL query documents: tokenizer, parser, pretty-printer and schema lint.

mod lexer;
mod parser;
mod syntax;
mod unparse;
mod validate;

pub use lexer::{tokenize, Token, TokenKind, KEYWORDS};
pub use parser::{parse_query_document, parse_tokens};
pub use syntax::*;
pub use unparse::{unparse, unparse_expr};
pub use validate::{validate_against_schema, QueryWarning};

/// Extension of query files.
pub const QUERY_EXTENSION: &str = "craql";

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum QueryError {
    #[error("line {line}, column {column}: {message}")]
    Lex {
        line: u32,
        column: u32,
        message: String,
    },
    #[error("line {line}, column {column}: expected {}, found {found}", .expected.join(" or "))]
    Syntax {
        line: u32,
        column: u32,
        expected: Vec<String>,
        found: String,
    },
    #[error("line {line}: duplicate query label {label}")]
    DuplicateLabel { label: String, line: u32 },
    #[error("line {line}: unresolved query label {label}")]
    UnresolvedLabel { label: String, line: u32 },
    #[error("line {line}: variable {var} is already bound by an enclosing query")]
    DuplicateVariable { var: String, line: u32 },
    #[error("line {line}: {message}")]
    Invalid { line: u32, message: String },
}
