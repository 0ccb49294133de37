//! MiniLang: a small Java-like target language with a recursive-descent
//! parser and a static binder.

mod binder;
mod lexer;
mod parser;
mod schema;

use std::fmt;

use rayon::prelude::*;

pub use binder::{bind_project, BUILTINS_FILE};
pub use lexer::{tokenize, Tok, Token};
pub use parser::{parse_minilang, ParsedFile, RawNode, RawProp};
pub use schema::{minilang_schema, SCHEMA_NAME};

use crate::ast::{AstError, ProjectAst, ProjectBuilder, SchemaRegistry};

/// Source of the surrogate declarations that literal and primitive types bind to.
pub const BUILTINS_SOURCE: &str = "class int {}\nclass boolean {}\nclass String {}\n";

pub const SOURCE_EXTENSION: &str = "mj";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub file: String,
    pub line: u32,
    pub column: u32,
    pub message: String,
    pub severity: Severity,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{}:{}:{}: {}: {}", self.file, self.line, self.column, sev, self.message)
    }
}

/// A parsed and bound MiniLang project.
#[derive(Debug)]
pub struct BuiltProject {
    pub project: ProjectAst,
    pub diagnostics: Vec<Diagnostic>,
    /// Source files handed to the parser, including any that were skipped.
    pub files_parsed: usize,
    pub files_skipped: Vec<String>,
}

/// Parses every `(file name, text)` pair, drops files with unrecoverable
/// errors, adds the built-ins tree, and binds the result.
pub fn build_project(name: &str, sources: &[(String, String)]) -> Result<BuiltProject, AstError> {
    let parsed: Vec<ParsedFile> = sources
        .par_iter()
        .map(|(file, text)| parse_minilang(file, text))
        .collect();

    let mut builder = ProjectBuilder::new(name, minilang_schema());
    let mut diagnostics = Vec::new();
    let mut skipped = Vec::new();
    for (pf, (_, text)) in parsed.into_iter().zip(sources) {
        diagnostics.extend(pf.diagnostics.iter().cloned());
        match &pf.unit {
            Some(unit) if !pf.has_errors() => {
                let fid = builder.add_file(pf.name.clone(), Some(text.clone()));
                let root = unit.emit(&mut builder, fid);
                builder.add_root(root);
            }
            _ => {
                log::warn!("{}: skipping {} (unrecoverable syntax error)", name, pf.name);
                skipped.push(pf.name);
            }
        }
    }

    let builtins = parse_minilang(BUILTINS_FILE, BUILTINS_SOURCE);
    let fid = builder.add_file(BUILTINS_FILE, Some(BUILTINS_SOURCE.to_string()));
    builtins
        .unit
        .expect("built-in declarations parse")
        .emit(&mut builder, fid);

    let mut project = builder.finish()?;
    let table = bind_project(&project);
    project.set_bindings(table)?;
    Ok(BuiltProject {
        project,
        diagnostics,
        files_parsed: sources.len(),
        files_skipped: skipped,
    })
}

/// Registry holding the MiniLang schema, for serialized-AST ingestion.
pub fn default_registry() -> SchemaRegistry {
    let mut r = SchemaRegistry::new();
    r.register(minilang_schema());
    r
}
