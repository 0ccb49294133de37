use std::collections::BTreeSet;
use std::fmt;

use super::syntax::*;
use crate::ast::NodeTypeSchema;

/// A lint finding; never fatal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct QueryWarning {
    pub line: u32,
    pub message: String,
}

impl fmt::Display for QueryWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: warning: {}", self.line, self.message)
    }
}

/// Checks node-type names and accessor names against a schema. Accessors stay
/// late-bound at run time, so this only reports likely typos. Each distinct
/// finding is reported once, at its first line.
pub fn validate_against_schema(doc: &QueryDocument, schema: &NodeTypeSchema) -> Vec<QueryWarning> {
    let mut lint = Lint {
        schema,
        seen: BTreeSet::new(),
        out: Vec::new(),
    };
    for q in &doc.queries {
        lint.select(&q.select);
    }
    lint.out
}

struct Lint<'a> {
    schema: &'a NodeTypeSchema,
    seen: BTreeSet<String>,
    out: Vec<QueryWarning>,
}

impl Lint<'_> {
    fn warn(&mut self, line: u32, message: String) {
        if self.seen.insert(message.clone()) {
            self.out.push(QueryWarning { line, message });
        }
    }

    fn node_type(&mut self, name: &str, line: u32) {
        if self.schema.type_id(name).is_none() {
            self.warn(line, format!("unknown node type {name}"));
        }
    }

    fn select(&mut self, q: &SelectQuery) {
        for v in q.pattern.vars() {
            self.node_type(&v.ty, q.line);
        }
        self.input(&q.input, q.line);
        if let Some(w) = &q.where_clause {
            self.expr(w, q.line);
        }
        self.stmts(&q.body);
    }

    fn input(&mut self, spec: &InputSpec, line: u32) {
        if let InputSpec::In(e) | InputSpec::DirectlyIn(e) = spec {
            self.expr(e, line);
        }
    }

    fn stmts(&mut self, body: &[Stmt]) {
        for s in body {
            let line = s.line;
            match &s.kind {
                StmtKind::Assign { expr, .. } | StmtKind::Print(expr) | StmtKind::Expr(expr) => {
                    self.expr(expr, line)
                }
                StmtKind::Step { .. } => {}
                StmtKind::If {
                    cond,
                    then,
                    otherwise,
                } => {
                    self.expr(cond, line);
                    self.stmts(then);
                    if let Some(o) = otherwise {
                        self.stmts(o);
                    }
                }
                StmtKind::While { cond, body } => {
                    self.expr(cond, line);
                    self.stmts(body);
                }
                StmtKind::Select(q) => self.select(q),
                StmtKind::CallQuery { input, .. } => {
                    if let Some(spec) = input {
                        self.input(spec, line);
                    }
                }
            }
        }
    }

    fn expr(&mut self, e: &Expr, line: u32) {
        match e {
            Expr::NodeType(t) => self.node_type(t, line),
            Expr::Prop { base, accessor } => {
                self.expr(base, line);
                let name = accessor.name();
                if !self.schema.declares_property(name) && self.schema.type_id(name).is_none() {
                    let message = match accessor {
                        Accessor::Dotted(_) => format!("no type declares property {name}"),
                        Accessor::Braced(_) => {
                            format!("{{{name}}} is neither a property nor a node type")
                        }
                    };
                    self.warn(line, message);
                }
            }
            Expr::Call { receiver, args, .. } => {
                if let Some(r) = receiver {
                    self.expr(r, line);
                }
                for a in args {
                    self.expr(a, line);
                }
            }
            Expr::Infix { lhs, rhs, .. } => {
                self.expr(lhs, line);
                self.expr(rhs, line);
            }
            Expr::Prefix { expr, .. } => self.expr(expr, line),
            Expr::Int(_) | Expr::Str(_) | Expr::Bool(_) | Expr::Var(_) | Expr::CountStar => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minilang::minilang_schema;
    use crate::query::parse_query_document;

    fn lint(text: &str) -> Vec<String> {
        let doc = parse_query_document("t", text).unwrap();
        validate_against_schema(&doc, &minilang_schema())
            .into_iter()
            .map(|w| w.message)
            .collect()
    }

    #[test]
    fn typos_are_reported() {
        assert_eq!(lint("select ({Blok} b) { }"), ["unknown node type Blok"]);
        assert_eq!(
            lint("select ({MethodDeclaration} m) where m.bodyy { }"),
            ["no type declares property bodyy"]
        );
    }

    #[test]
    fn registered_names_are_quiet() {
        assert!(lint(
            "select ({Statement} s) where s.isnodetype({ClassDeclaration}) && s.{Block} && s.Expression \
             && s.{expression} { }"
        )
        .is_empty());
    }
}
