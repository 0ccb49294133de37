use std::fmt::Write;

use super::syntax::*;

/// Pretty-prints a document; the output reparses to the same IR (modulo line numbers).
pub fn unparse(doc: &QueryDocument) -> String {
    let mut out = String::new();
    for (i, q) in doc.queries.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        if let Some(l) = &q.label {
            let _ = write!(out, "{l} : ");
        }
        select(&mut out, &q.select, 0);
        out.push('\n');
    }
    out
}

pub fn unparse_expr(e: &Expr) -> String {
    let mut out = String::new();
    expr(&mut out, e);
    out
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn pattern_var(out: &mut String, v: &PatternVar) {
    let _ = write!(out, "{{{}}} {}", v.ty, v.var);
}

fn input(out: &mut String, spec: &InputSpec) {
    match spec {
        InputSpec::Project => {}
        InputSpec::In(e) => {
            out.push_str(" in ");
            expr(out, e);
        }
        InputSpec::DirectlyIn(e) => {
            out.push_str(" directly in ");
            expr(out, e);
        }
    }
}

fn select(out: &mut String, q: &SelectQuery, depth: usize) {
    out.push_str("select ");
    match q.modifier {
        Modifier::None => {}
        Modifier::Outmost => out.push_str("outmost "),
        Modifier::Inmost => out.push_str("inmost "),
    }
    out.push('(');
    pattern_var(out, &q.pattern.first);
    if let Some(second) = &q.pattern.second {
        out.push_str(match q.pattern.kind {
            PatternKind::Ellipsis => " ... ",
            _ => " * ",
        });
        pattern_var(out, second);
    }
    out.push(')');
    input(out, &q.input);
    if let Some(w) = &q.where_clause {
        out.push_str(" where ");
        expr(out, w);
    }
    out.push(' ');
    block(out, &q.body, depth);
}

fn block(out: &mut String, body: &[Stmt], depth: usize) {
    out.push_str("{\n");
    for s in body {
        stmt(out, s, depth + 1);
    }
    indent(out, depth);
    out.push('}');
}

fn stmt(out: &mut String, s: &Stmt, depth: usize) {
    indent(out, depth);
    match &s.kind {
        StmtKind::Assign { target, op, expr: e } => {
            let op = match op {
                AssignOp::Set => "=",
                AssignOp::Add => "+=",
                AssignOp::Sub => "-=",
            };
            let _ = write!(out, "{target} {op} ");
            expr(out, e);
            out.push(';');
        }
        StmtKind::Step { target, op } => {
            let op = match op {
                StepOp::Incr => "++",
                StepOp::Decr => "--",
            };
            let _ = write!(out, "{target}{op};");
        }
        StmtKind::If {
            cond,
            then,
            otherwise,
        } => {
            out.push_str("if (");
            expr(out, cond);
            out.push_str(") ");
            block(out, then, depth);
            if let Some(o) = otherwise {
                out.push_str(" else ");
                block(out, o, depth);
            }
        }
        StmtKind::While { cond, body } => {
            out.push_str("while (");
            expr(out, cond);
            out.push_str(") ");
            block(out, body, depth);
        }
        StmtKind::Select(q) => select(out, q, depth),
        StmtKind::CallQuery { label, input: spec } => {
            let _ = write!(out, "callquery({label})");
            if let Some(spec) = spec {
                input(out, spec);
            }
            out.push(';');
        }
        StmtKind::Print(e) => {
            out.push_str("print(");
            expr(out, e);
            out.push_str(");");
        }
        StmtKind::Expr(e) => {
            expr(out, e);
            out.push(';');
        }
    }
    out.push('\n');
}

fn string_literal(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
}

fn is_atomic(e: &Expr) -> bool {
    !matches!(e, Expr::Infix { .. } | Expr::Prefix { .. }) && !matches!(e, Expr::Int(n) if *n < 0)
}

fn parenthesized(out: &mut String, e: &Expr, wrap: bool) {
    if wrap {
        out.push('(');
        expr(out, e);
        out.push(')');
    } else {
        expr(out, e);
    }
}

fn expr(out: &mut String, e: &Expr) {
    match e {
        Expr::Int(n) => {
            let _ = write!(out, "{n}");
        }
        Expr::Str(s) => string_literal(out, s),
        Expr::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        Expr::Var(v) => out.push_str(v),
        Expr::NodeType(t) => {
            let _ = write!(out, "{{{t}}}");
        }
        Expr::Prop { base, accessor } => {
            parenthesized(out, base, !is_atomic(base));
            match accessor {
                Accessor::Dotted(n) => {
                    let _ = write!(out, ".{n}");
                }
                Accessor::Braced(n) => {
                    let _ = write!(out, ".{{{n}}}");
                }
            }
        }
        Expr::Call {
            name,
            receiver,
            args,
        } => {
            if let Some(r) = receiver {
                parenthesized(out, r, !is_atomic(r));
                out.push('.');
            }
            out.push_str(name);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                expr(out, a);
            }
            out.push(')');
        }
        Expr::Infix { op, lhs, rhs } => {
            let p = op.precedence();
            let wrap_l = matches!(&**lhs, Expr::Infix { op: l, .. } if l.precedence() < p);
            let wrap_r = matches!(&**rhs, Expr::Infix { op: r, .. } if r.precedence() <= p);
            parenthesized(out, lhs, wrap_l);
            let _ = write!(out, " {} ", op.symbol());
            parenthesized(out, rhs, wrap_r);
        }
        Expr::Prefix { op, expr: inner } => {
            out.push(match op {
                PrefixOp::Not => '!',
                PrefixOp::Neg => '-',
            });
            parenthesized(out, inner, !is_atomic(inner));
        }
        Expr::CountStar => out.push_str("count(*)"),
    }
}
