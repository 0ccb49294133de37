//! Language-agnostic syntax tree model.
//!
//! A [`ProjectAst`] owns an arena of [`AstNode`]s for every file of one
//! project, with parent links materialized at construction and node types
//! drawn from a [`NodeTypeSchema`]. Trees are immutable once built.

mod schema;
mod serial;
mod tree;

pub use schema::{NodeTypeSchema, PropDecl, PropKind, SchemaBuilder, TypeId, VirtualMatch};
pub use serial::{deserialize_project, serialize_project, SchemaRegistry};
pub use tree::{
    Ancestors, AstNode, BindingTable, FileId, NodeId, Preorder, ProjectAst, ProjectBuilder,
    PropValue, SourceFile, SourceText, Span,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchemaError {
    #[error("unknown node type {0}")]
    UnknownType(String),
    #[error("node type {0} declared twice")]
    DuplicateType(String),
    #[error("property {prop} declared twice on {ty}")]
    DuplicateProperty { ty: String, prop: String },
    #[error("supertype cycle through {0}")]
    Cycle(String),
}

/// Errors raised while assembling or ingesting a project tree.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AstError {
    #[error("malformed document at line {line}, column {column}: {message}")]
    Malformed {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown schema {0}")]
    UnknownSchema(String),
    #[error("node record {record}: unknown node type {type_name}")]
    UnknownNodeType { record: usize, type_name: String },
    #[error("node record {record}: type {type_name} is not concrete")]
    NotConcrete { record: usize, type_name: String },
    #[error("node record {record}: dangling node id {id}")]
    DanglingNode { record: usize, id: u64 },
    #[error("node record {record}: id {id} out of sequence (ids must be dense from 0)")]
    IdOutOfSequence { record: usize, id: u64 },
    #[error("node record {record}: file index {file} out of range")]
    BadFile { record: usize, file: usize },
    #[error("node record {record}: {type_name} has no property {prop}")]
    UnknownProperty {
        record: usize,
        type_name: String,
        prop: String,
    },
    #[error("node record {record}: property {prop} has the wrong shape")]
    PropertyShape { record: usize, prop: String },
    #[error("node record {record}: node {child} has more than one parent")]
    MultipleParents { record: usize, child: u32 },
    #[error("node record {record}: span not contained in parent span")]
    SpanOutsideParent { record: usize },
    #[error("node record {record}: invalid span")]
    BadSpan { record: usize },
    #[error("root {id} has a parent")]
    RootHasParent { id: u32 },
    #[error("dangling root id {0}")]
    DanglingRoot(u64),
    #[error("parent links form a cycle")]
    Cycle,
    #[error("{kind} binding {from} -> {to}: binding target type mismatch")]
    BindingTypeMismatch {
        kind: &'static str,
        from: u64,
        to: u64,
    },
    #[error("{kind} binding {from} -> {to}: dangling node id")]
    DanglingBinding {
        kind: &'static str,
        from: u64,
        to: u64,
    },
}
