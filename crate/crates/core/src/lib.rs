//! CRAQL: a composable query language whose queries consume and produce sets
//! of abstract syntax subtrees.
//!
//! The crate is organized bottom-up:
//!
//! - [`ast`]: the language-agnostic tree model and its JSON interchange format.
//! - [`minilang`]: the bundled Java-like target language (parser and binder).
//! - [`query`]: lexer, parser, pretty-printer and schema lint for query documents.
//! - [`engine`]: selection with pruning modifiers, the builtin library and the
//!   imperative interpreter.
//! - [`oracle`]: a brute-force evaluator for the declarative subset, used to
//!   cross-check the engine.
//! - [`runner`]: batch execution over project and query lists, properties
//!   files and CSV collation.
//! - [`bundled`]: the shipped example queries and fixtures.

pub mod ast;
pub mod bundled;
pub mod engine;
pub mod minilang;
pub mod oracle;
pub mod query;
pub mod runner;
