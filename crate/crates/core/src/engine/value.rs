use std::fmt;

use crate::ast::{NodeId, ProjectAst};

/// A runtime value. Numbers are 64-bit and arithmetic stays integral.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum Value {
    #[default]
    Undefined,
    Number(i64),
    Str(String),
    Bool(bool),
    Node(NodeId),
    /// Ordered node list, e.g. a block's `statements`.
    List(Vec<NodeId>),
}

impl Value {
    /// `0`, `""`, `false`, the empty list and undefined are falsy.
    pub fn truthy(&self) -> bool {
        match self {
            Value::Undefined => false,
            Value::Number(n) => *n != 0,
            Value::Str(s) => !s.is_empty(),
            Value::Bool(b) => *b,
            Value::Node(_) => true,
            Value::List(l) => !l.is_empty(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Value::Undefined => "undefined",
            Value::Number(_) => "number",
            Value::Str(_) => "string",
            Value::Bool(_) => "boolean",
            Value::Node(_) => "node",
            Value::List(_) => "node list",
        }
    }

    pub fn as_node(&self) -> Option<NodeId> {
        match self {
            Value::Node(n) => Some(*n),
            _ => None,
        }
    }

    /// Text used by `print` and string concatenation; nodes render as their
    /// source text.
    pub fn display<'a>(&'a self, project: &'a ProjectAst) -> DisplayValue<'a> {
        DisplayValue {
            value: self,
            project,
        }
    }

    /// Single-line rendering for `.vars` files: nodes become
    /// `Type@file:line`, and backslashes, tabs and newlines are escaped.
    pub fn export_text(&self, project: &ProjectAst) -> String {
        let node = |n: NodeId| {
            format!(
                "{}@{}:{}",
                project.type_name(n),
                project.file_name(n),
                project.node(n).span.line
            )
        };
        match self {
            Value::Undefined => String::new(),
            Value::Number(n) => n.to_string(),
            Value::Str(s) => escape_line(s),
            Value::Bool(b) => b.to_string(),
            Value::Node(n) => escape_line(&node(*n)),
            Value::List(l) => {
                let items: Vec<String> = l.iter().map(|&n| node(n)).collect();
                escape_line(&format!("[{}]", items.join(" ")))
            }
        }
    }
}

impl From<i64> for Value {
    fn from(n: i64) -> Self {
        Value::Number(n)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Str(s.to_string())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Str(s)
    }
}

pub struct DisplayValue<'a> {
    value: &'a Value,
    project: &'a ProjectAst,
}

impl fmt::Display for DisplayValue<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value {
            Value::Undefined => f.write_str("undefined"),
            Value::Number(n) => write!(f, "{n}"),
            Value::Str(s) => f.write_str(s),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Node(n) => f.write_str(&self.project.source_text(*n).text),
            Value::List(l) => {
                for (i, n) in l.iter().enumerate() {
                    if i > 0 {
                        f.write_str("\n")?;
                    }
                    f.write_str(&self.project.source_text(*n).text)?;
                }
                Ok(())
            }
        }
    }
}

/// Escapes `\`, tab, CR and newline so a value fits on one line.
pub fn escape_line(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}
