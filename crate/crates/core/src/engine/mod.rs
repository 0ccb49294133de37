//! The query evaluator: tree-set selection, expressions and builtins, and the
//! statement interpreter.

mod env;
mod eval;
mod exec;
mod select;
mod value;

use std::fmt;

pub use env::{Environment, TEMP_PREFIX};
pub use eval::{eval_accessor, eval_expr, to_number, values_equal, ExprContext, NODE_BUILTINS};
pub use exec::{execute_document, Output, RowRecord, SelectExecution, SelectObserver, Session};
pub use select::{select_rows, InputRoots, ResultSet, Row, RowFilter};
pub use value::{escape_line, Value};

pub const DEFAULT_RECURSION_LIMIT: usize = 512;

#[derive(Clone, Debug)]
pub struct EngineConfig {
    /// Maximum nesting of `callquery`.
    pub recursion_limit: usize,
    /// Iterations after which a single `while` loop is aborted.
    pub loop_limit: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            recursion_limit: DEFAULT_RECURSION_LIMIT,
            loop_limit: 10_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExecutionStats {
    pub nodes_visited: u64,
    pub rows_yielded: u64,
    pub files_parsed: u64,
}

impl ExecutionStats {
    pub fn add(&mut self, other: &ExecutionStats) {
        self.nodes_visited += other.nodes_visited;
        self.rows_yielded += other.rows_yielded;
        self.files_parsed += other.files_parsed;
    }
}

/// Failure inside expression evaluation or selection, before location is attached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalError(pub String);

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A runtime failure; aborts the run on the current project.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{query}:{line}: {message}{}", .node.as_ref().map(|n| format!(" (at {n})")).unwrap_or_default())]
pub struct RuntimeError {
    /// Query file name.
    pub query: String,
    /// Line in the query file.
    pub line: u32,
    pub message: String,
    /// `file:line` of the innermost bound node, if any.
    pub node: Option<String>,
}
