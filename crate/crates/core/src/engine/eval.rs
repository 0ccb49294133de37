//! Expression evaluation, property accessors and the builtin library.

use std::cell::Cell;
use std::cmp::Ordering;

use super::env::Environment;
use super::value::Value;
use super::EvalError;
use crate::ast::{NodeId, ProjectAst, PropValue, TypeId};
use crate::query::{Accessor, Expr, InfixOp, PrefixOp};

type EvalResult<T> = Result<T, EvalError>;

fn err<T>(msg: impl Into<String>) -> EvalResult<T> {
    Err(EvalError(msg.into()))
}

/// Everything an expression can observe. Expressions never write variables,
/// so evaluation only needs shared access to the environment.
pub struct ExprContext<'a> {
    pub project: &'a ProjectAst,
    pub env: &'a Environment,
    /// Bindings that shadow the environment, e.g. the row under a where clause.
    pub overlay: &'a [(&'a str, NodeId)],
    /// What `count(*)` reports.
    pub count: usize,
    degraded: Cell<bool>,
}

impl<'a> ExprContext<'a> {
    pub fn new(project: &'a ProjectAst, env: &'a Environment) -> Self {
        ExprContext {
            project,
            env,
            overlay: &[],
            count: env.current_count(),
            degraded: Cell::new(false),
        }
    }

    pub fn with_overlay(mut self, overlay: &'a [(&'a str, NodeId)], count: usize) -> Self {
        self.overlay = overlay;
        self.count = count;
        self
    }

    /// Whether a node's text had to be replaced by a placeholder.
    pub fn degraded(&self) -> bool {
        self.degraded.get()
    }

    fn lookup(&self, name: &str) -> Option<Value> {
        if let Some((_, n)) = self.overlay.iter().rev().find(|(v, _)| *v == name) {
            return Some(Value::Node(*n));
        }
        self.env.get(name).cloned()
    }

    /// Renders a value as text, noting placeholder use.
    pub fn render(&self, v: &Value) -> String {
        let mark = |n: &NodeId| {
            if self.project.source_text(*n).degraded {
                self.degraded.set(true);
            }
        };
        match v {
            Value::Node(n) => mark(n),
            Value::List(l) => l.iter().for_each(mark),
            _ => {}
        }
        v.display(self.project).to_string()
    }
}

/// Evaluates an expression strictly left to right; `&&`/`||` short-circuit.
pub fn eval_expr(cx: &ExprContext<'_>, e: &Expr) -> EvalResult<Value> {
    match e {
        Expr::Int(n) => Ok(Value::Number(*n)),
        Expr::Str(s) => Ok(Value::Str(s.clone())),
        Expr::Bool(b) => Ok(Value::Bool(*b)),
        Expr::Var(v) => Ok(cx.lookup(v).unwrap_or_default()),
        // A node type in value position reads as its name.
        Expr::NodeType(t) => Ok(Value::Str(t.clone())),
        Expr::Prop { base, accessor } => {
            let b = eval_expr(cx, base)?;
            match b {
                Value::Node(n) => eval_accessor(cx.project, n, accessor),
                other => err(format!(
                    "cannot access .{} on {}",
                    accessor_text(accessor),
                    other.kind()
                )),
            }
        }
        Expr::Call {
            name,
            receiver,
            args,
        } => eval_call(cx, name, receiver.as_deref(), args),
        Expr::Infix { op, lhs, rhs } => eval_infix(cx, *op, lhs, rhs),
        Expr::Prefix { op, expr } => match op {
            PrefixOp::Not => Ok(Value::Bool(!eval_expr(cx, expr)?.truthy())),
            PrefixOp::Neg => {
                let v = numeric_operand(cx, expr)?;
                let n = to_number(cx.project, &v, "-")?;
                n.checked_neg()
                    .map(Value::Number)
                    .ok_or_else(|| EvalError("integer overflow".into()))
            }
        },
        Expr::CountStar => Ok(Value::Number(cx.count as i64)),
    }
}

fn accessor_text(a: &Accessor) -> String {
    match a {
        Accessor::Dotted(n) => n.clone(),
        Accessor::Braced(n) => format!("{{{n}}}"),
    }
}

/// Resolves `node.name` / `node.{Name}`: a property of the node's type if one
/// has that exact name, otherwise the unique direct child whose type is (a
/// subtype of) `name`. Absent results are undefined.
pub fn eval_accessor(project: &ProjectAst, node: NodeId, accessor: &Accessor) -> EvalResult<Value> {
    let name = accessor.name();
    let schema = project.schema();
    if schema.prop_index(project.type_of(node), name).is_some() {
        return Ok(match project.prop(node, name) {
            None => Value::Undefined,
            Some(PropValue::Child(c)) => Value::Node(*c),
            Some(PropValue::List(l)) => Value::List(l.clone()),
            Some(PropValue::Token(t)) => Value::Str(t.clone()),
        });
    }
    let Some(ty) = schema.type_id(name) else {
        return Ok(Value::Undefined);
    };
    let mut found = project
        .children(node)
        .iter()
        .copied()
        .filter(|&c| project.node_is(c, ty));
    match (found.next(), found.next()) {
        (None, _) => Ok(Value::Undefined),
        (Some(c), None) => Ok(Value::Node(c)),
        (Some(_), Some(_)) => err(format!(
            "ambiguous child access .{} on {}",
            accessor_text(accessor),
            project.type_name(node)
        )),
    }
}

/// In arithmetic and comparisons an unset variable reads as 0.
fn numeric_operand(cx: &ExprContext<'_>, e: &Expr) -> EvalResult<Value> {
    if let Expr::Var(v) = e {
        if cx.lookup(v).is_none() {
            return Ok(Value::Number(0));
        }
    }
    eval_expr(cx, e)
}

/// Numeric view of a value: lists count their elements, booleans are 0/1,
/// and a numeric-literal node reads as its value.
pub fn to_number(project: &ProjectAst, v: &Value, op: &str) -> EvalResult<i64> {
    match v {
        Value::Number(n) => Ok(*n),
        Value::List(l) => Ok(l.len() as i64),
        Value::Bool(b) => Ok(*b as i64),
        Value::Node(n) => project
            .token(*n, "token")
            .and_then(|t| t.parse::<i64>().ok())
            .ok_or_else(|| {
                EvalError(format!(
                    "operator {op} applied to a {} node",
                    project.type_name(*n)
                ))
            }),
        other => err(format!("operator {op} applied to {}", other.kind())),
    }
}

/// Equality: nodes by identity, a list against a number by length.
pub fn values_equal(a: &Value, b: &Value) -> bool {
    use Value::*;
    match (a, b) {
        (Number(x), Number(y)) => x == y,
        (List(l), Number(n)) | (Number(n), List(l)) => l.len() as i64 == *n,
        (Bool(x), Number(n)) | (Number(n), Bool(x)) => *x as i64 == *n,
        _ => a == b,
    }
}

/// `+` concatenates when either side is a string; otherwise adds.
pub fn add_values(cx: &ExprContext<'_>, a: &Value, b: &Value) -> EvalResult<Value> {
    if matches!(a, Value::Str(_)) || matches!(b, Value::Str(_)) {
        let mut s = cx.render(a);
        s.push_str(&cx.render(b));
        return Ok(Value::Str(s));
    }
    let (x, y) = (to_number(cx.project, a, "+")?, to_number(cx.project, b, "+")?);
    x.checked_add(y)
        .map(Value::Number)
        .ok_or_else(|| EvalError("integer overflow".into()))
}

fn eval_infix(cx: &ExprContext<'_>, op: InfixOp, lhs: &Expr, rhs: &Expr) -> EvalResult<Value> {
    match op {
        InfixOp::And => {
            let ok = eval_expr(cx, lhs)?.truthy() && eval_expr(cx, rhs)?.truthy();
            Ok(Value::Bool(ok))
        }
        InfixOp::Or => {
            let ok = eval_expr(cx, lhs)?.truthy() || eval_expr(cx, rhs)?.truthy();
            Ok(Value::Bool(ok))
        }
        InfixOp::Eq | InfixOp::Ne => {
            let (a, b) = (eval_expr(cx, lhs)?, eval_expr(cx, rhs)?);
            Ok(Value::Bool(values_equal(&a, &b) == (op == InfixOp::Eq)))
        }
        InfixOp::Lt | InfixOp::Le | InfixOp::Gt | InfixOp::Ge => {
            let (a, b) = (numeric_operand(cx, lhs)?, numeric_operand(cx, rhs)?);
            let ord = match (&a, &b) {
                (Value::Str(x), Value::Str(y)) => x.cmp(y),
                _ => to_number(cx.project, &a, op.symbol())?
                    .cmp(&to_number(cx.project, &b, op.symbol())?),
            };
            Ok(Value::Bool(match op {
                InfixOp::Lt => ord == Ordering::Less,
                InfixOp::Le => ord != Ordering::Greater,
                InfixOp::Gt => ord == Ordering::Greater,
                _ => ord != Ordering::Less,
            }))
        }
        InfixOp::Add => {
            let (a, b) = (numeric_operand(cx, lhs)?, numeric_operand(cx, rhs)?);
            add_values(cx, &a, &b)
        }
        InfixOp::Sub | InfixOp::Mul => {
            let (a, b) = (numeric_operand(cx, lhs)?, numeric_operand(cx, rhs)?);
            let sym = op.symbol();
            let (x, y) = (to_number(cx.project, &a, sym)?, to_number(cx.project, &b, sym)?);
            let r = if op == InfixOp::Sub {
                x.checked_sub(y)
            } else {
                x.checked_mul(y)
            };
            r.map(Value::Number)
                .ok_or_else(|| EvalError("integer overflow".into()))
        }
    }
}

/// A builtin argument naming a node type, or a node for the subtree forms.
enum TypeOrNode {
    Type(TypeId),
    Node(NodeId),
    Nothing,
}

fn type_or_node(cx: &ExprContext<'_>, e: &Expr, fname: &str) -> EvalResult<TypeOrNode> {
    let named = |name: &str| {
        cx.project
            .schema()
            .type_id(name)
            .map(TypeOrNode::Type)
            .ok_or_else(|| EvalError(format!("unknown node type {name}")))
    };
    if let Expr::NodeType(t) = e {
        return named(t);
    }
    match eval_expr(cx, e)? {
        Value::Node(n) => Ok(TypeOrNode::Node(n)),
        Value::Str(s) => named(&s),
        Value::Undefined => Ok(TypeOrNode::Nothing),
        other => err(format!(
            "{fname}() expects a node type or a node, got {}",
            other.kind()
        )),
    }
}

fn arity(name: &str, args: &[Expr], n: usize) -> EvalResult<()> {
    if args.len() != n {
        return err(format!(
            "{name}() takes {n} argument{}, got {}",
            if n == 1 { "" } else { "s" },
            args.len()
        ));
    }
    Ok(())
}

/// Builtins callable on a node receiver (or with the node as first argument).
pub const NODE_BUILTINS: &[&str] = &[
    "contains",
    "directly_contains",
    "isparent",
    "parent",
    "isnodetype",
    "position",
    "linenumber",
    "filename",
    "methodbinding",
    "typebinding",
    "depth",
    "nodetype",
];

/// Node predicates; on an undefined receiver they are simply false.
const PREDICATES: &[&str] = &["contains", "directly_contains", "isparent", "isnodetype"];

fn eval_call(
    cx: &ExprContext<'_>,
    name: &str,
    receiver: Option<&Expr>,
    args: &[Expr],
) -> EvalResult<Value> {
    let (recv, args) = match receiver {
        Some(r) => (Some(eval_expr(cx, r)?), args),
        None => match name {
            "max" | "min" => return eval_minmax(cx, name, args),
            // depth(node), nodetype(node), ...: function-call spelling.
            _ if NODE_BUILTINS.contains(&name) && !args.is_empty() => {
                (Some(eval_expr(cx, &args[0])?), &args[1..])
            }
            _ if NODE_BUILTINS.contains(&name) => {
                return err(format!("{name}() needs a node receiver"))
            }
            _ => return err(format!("unknown function {name}")),
        },
    };
    if !NODE_BUILTINS.contains(&name) {
        return err(format!("unknown method {name}"));
    }
    let node = match recv {
        Some(Value::Node(n)) => n,
        Some(Value::Undefined) if PREDICATES.contains(&name) => return Ok(Value::Bool(false)),
        Some(other) => return err(format!("{name}() called on {}", other.kind())),
        None => unreachable!(),
    };
    node_builtin(cx, node, name, args)
}

fn node_builtin(cx: &ExprContext<'_>, node: NodeId, name: &str, args: &[Expr]) -> EvalResult<Value> {
    let p = cx.project;
    let opt = |n: Option<NodeId>| n.map(Value::Node).unwrap_or_default();
    let unary_with = |expected: usize| arity(name, args, expected);
    Ok(match name {
        "contains" => {
            unary_with(1)?;
            Value::Bool(match type_or_node(cx, &args[0], name)? {
                TypeOrNode::Type(t) => p
                    .descendants_preorder(node)
                    .skip(1)
                    .any(|d| p.node_is(d, t)),
                TypeOrNode::Node(d) => p.is_proper_ancestor(node, d),
                TypeOrNode::Nothing => false,
            })
        }
        "directly_contains" => {
            unary_with(1)?;
            let target = type_or_node(cx, &args[0], name)?;
            Value::Bool(directly_contains(p, node, &target))
        }
        "isparent" => {
            unary_with(1)?;
            let kids = p.children(node);
            Value::Bool(match type_or_node(cx, &args[0], name)? {
                TypeOrNode::Type(t) => kids.iter().any(|&c| p.node_is(c, t)),
                TypeOrNode::Node(d) => kids.contains(&d),
                TypeOrNode::Nothing => false,
            })
        }
        "isnodetype" => {
            unary_with(1)?;
            match type_or_node(cx, &args[0], name)? {
                TypeOrNode::Type(t) => Value::Bool(p.node_is(node, t)),
                TypeOrNode::Nothing => Value::Bool(false),
                TypeOrNode::Node(_) => return err("isnodetype() expects a node type"),
            }
        }
        "parent" => {
            unary_with(0)?;
            opt(p.parent(node))
        }
        "position" => {
            unary_with(0)?;
            Value::Number(p.node(node).span.start as i64)
        }
        "linenumber" => {
            unary_with(0)?;
            Value::Number(p.node(node).span.line as i64)
        }
        "filename" => {
            unary_with(0)?;
            Value::Str(p.file_name(node).to_string())
        }
        "methodbinding" => {
            unary_with(0)?;
            opt(p.bindings().method.get(&node).copied())
        }
        "typebinding" => {
            unary_with(0)?;
            opt(p.bindings().types.get(&node).copied())
        }
        "depth" => {
            unary_with(0)?;
            Value::Number(p.node_depth(node) as i64)
        }
        "nodetype" => {
            unary_with(0)?;
            Value::Str(p.type_name(node).to_string())
        }
        _ => unreachable!("checked against NODE_BUILTINS"),
    })
}

/// `contains` restricted to paths with no node of the receiver's concrete
/// type strictly between the receiver and the match.
fn directly_contains(p: &ProjectAst, node: NodeId, target: &TypeOrNode) -> bool {
    let own = p.type_of(node);
    let mut stack: Vec<NodeId> = p.children(node).iter().rev().copied().collect();
    while let Some(n) = stack.pop() {
        let hit = match target {
            TypeOrNode::Type(t) => p.node_is(n, *t),
            TypeOrNode::Node(d) => n == *d,
            TypeOrNode::Nothing => return false,
        };
        if hit {
            return true;
        }
        if p.type_of(n) != own {
            stack.extend(p.children(n).iter().rev());
        }
    }
    false
}

fn eval_minmax(cx: &ExprContext<'_>, name: &str, args: &[Expr]) -> EvalResult<Value> {
    if args.len() < 2 {
        return err(format!("{name}() takes at least 2 arguments, got {}", args.len()));
    }
    let mut best: Option<i64> = None;
    for a in args {
        let v = numeric_operand(cx, a)?;
        let n = to_number(cx.project, &v, name)?;
        best = Some(match best {
            None => n,
            Some(b) if name == "max" => b.max(n),
            Some(b) => b.min(n),
        });
    }
    Ok(Value::Number(best.unwrap()))
}
