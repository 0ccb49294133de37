//! Statement execution and whole-document runs over a project.

use super::env::Environment;
use super::eval::{add_values, eval_expr, to_number, ExprContext};
use super::select::{select_rows, InputRoots, ResultSet, Row};
use super::value::{escape_line, Value};
use super::{EngineConfig, EvalError, ExecutionStats, RuntimeError};
use crate::ast::{NodeId, ProjectAst};
use crate::query::{
    AssignOp, Expr, InputSpec, QueryDocument, SelectQuery, StepOp, Stmt, StmtKind,
};

/// One result record of a top-level query, keyed by its first pattern variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowRecord {
    pub file: String,
    pub line: u32,
    pub node_type: String,
    pub text: String,
}

impl RowRecord {
    pub fn new(project: &ProjectAst, n: NodeId) -> Self {
        RowRecord {
            file: project.file_name(n).to_string(),
            line: project.node(n).span.line,
            node_type: project.type_name(n).to_string(),
            text: project.source_text(n).text.into_owned(),
        }
    }

    /// `file<TAB>line<TAB>type<TAB>text`, with tabs and newlines in the text escaped.
    pub fn to_tsv(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}",
            escape_line(&self.file),
            self.line,
            self.node_type,
            escape_line(&self.text)
        )
    }
}

/// Everything a run emits besides variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Output {
    pub prints: Vec<String>,
    pub rows: Vec<RowRecord>,
    /// Some node text was replaced by a placeholder (source not retained).
    pub degraded: bool,
}

/// A select as it ran: the query, its resolved input, and the rows it kept.
/// The environment is the one its where clause saw.
pub struct SelectExecution<'a> {
    pub project: &'a ProjectAst,
    pub query: &'a SelectQuery,
    pub input: &'a InputRoots,
    pub env: &'a Environment,
    pub result: &'a ResultSet,
}

/// Receives every select execution, before its body runs.
pub trait SelectObserver {
    fn observe(&mut self, exec: &SelectExecution<'_>);
}

/// An evaluation context for one project: environment, outputs and counters
/// shared by every document run through it.
pub struct Session<'p> {
    project: &'p ProjectAst,
    config: EngineConfig,
    env: Environment,
    output: Output,
    stats: ExecutionStats,
}

impl<'p> Session<'p> {
    pub fn new(project: &'p ProjectAst, env: Environment, config: EngineConfig) -> Self {
        Session {
            project,
            config,
            env,
            output: Output::default(),
            stats: ExecutionStats::default(),
        }
    }

    pub fn project(&self) -> &'p ProjectAst {
        self.project
    }

    pub fn env(&self) -> &Environment {
        &self.env
    }

    pub fn output(&self) -> &Output {
        &self.output
    }

    /// Takes the output accumulated so far, leaving an empty sink.
    pub fn take_output(&mut self) -> Output {
        std::mem::take(&mut self.output)
    }

    pub fn stats(&self) -> ExecutionStats {
        self.stats
    }

    pub fn into_env(self) -> Environment {
        self.env
    }

    /// Runs the document's entry query over the whole project.
    pub fn run(&mut self, doc: &QueryDocument) -> Result<(), RuntimeError> {
        self.run_observed(doc, None)
    }

    pub fn run_observed(
        &mut self,
        doc: &QueryDocument,
        observer: Option<&mut dyn SelectObserver>,
    ) -> Result<(), RuntimeError> {
        let Some(entry) = doc.entry() else {
            return Ok(());
        };
        let mut it = Interp {
            project: self.project,
            doc,
            config: &self.config,
            env: &mut self.env,
            output: &mut self.output,
            stats: &mut self.stats,
            observer,
        };
        let r = it.select(entry, None, true);
        if r.is_err() {
            self.env.reset_frames();
        }
        r
    }
}

/// Runs `doc` on `project` starting from `env`; returns the final environment and output.
pub fn execute_document(
    doc: &QueryDocument,
    project: &ProjectAst,
    env: Environment,
    config: EngineConfig,
) -> Result<(Environment, Output, ExecutionStats), RuntimeError> {
    let mut s = Session::new(project, env, config);
    s.run(doc)?;
    let (out, stats) = (s.take_output(), s.stats());
    Ok((s.into_env(), out, stats))
}

struct Interp<'a, 'o> {
    project: &'a ProjectAst,
    doc: &'a QueryDocument,
    config: &'a EngineConfig,
    env: &'a mut Environment,
    output: &'a mut Output,
    stats: &'a mut ExecutionStats,
    observer: Option<&'o mut dyn SelectObserver>,
}

impl Interp<'_, '_> {
    fn fail(&self, line: u32, e: EvalError) -> RuntimeError {
        // Locate the innermost bound pattern node, if any.
        let node = self
            .env
            .innermost_node()
            .map(|n| format!("{}:{}", self.project.file_name(n), self.project.node(n).span.line));
        RuntimeError {
            query: self.doc.source.clone(),
            line,
            message: e.0,
            node,
        }
    }

    fn eval(&mut self, e: &Expr, line: u32) -> Result<Value, RuntimeError> {
        let cx = ExprContext::new(self.project, self.env);
        let r = eval_expr(&cx, e);
        self.output.degraded |= cx.degraded();
        r.map_err(|err| self.fail(line, err))
    }

    fn resolve_input(&mut self, spec: &InputSpec, line: u32) -> Result<InputRoots, RuntimeError> {
        let (e, directly) = match spec {
            InputSpec::Project => return Ok(InputRoots::Project),
            InputSpec::In(e) => (e, false),
            InputSpec::DirectlyIn(e) => (e, true),
        };
        let roots = match self.eval(e, line)? {
            Value::Node(n) => vec![n],
            Value::List(l) => l,
            Value::Undefined => Vec::new(),
            other => {
                return Err(self.fail(
                    line,
                    EvalError(format!("query input must be a node or node list, got {}", other.kind())),
                ))
            }
        };
        Ok(if directly {
            InputRoots::DirectlyIn(roots)
        } else {
            InputRoots::In(roots)
        })
    }

    fn select(
        &mut self,
        q: &SelectQuery,
        input_override: Option<&InputSpec>,
        top_level: bool,
    ) -> Result<(), RuntimeError> {
        let input = self.resolve_input(input_override.unwrap_or(&q.input), q.line)?;
        let names: Vec<&str> = q.pattern.vars().map(|v| v.var.as_str()).collect();
        let result = {
            let (project, env) = (self.project, &*self.env);
            let mut degraded = false;
            let mut filter = |row: Row, count: usize| -> Result<bool, EvalError> {
                let Some(w) = &q.where_clause else {
                    return Ok(true);
                };
                let mut overlay = vec![(names[0], row.first)];
                if let Some(s) = row.second {
                    overlay.push((names[1], s));
                }
                let cx = ExprContext::new(project, env).with_overlay(&overlay, count);
                let keep = eval_expr(&cx, w)?.truthy();
                degraded |= cx.degraded();
                Ok(keep)
            };
            let r = select_rows(project, &q.pattern, q.modifier, &input, &mut filter);
            self.output.degraded |= degraded;
            r.map_err(|e| self.fail(q.line, e))?
        };
        if let Some(obs) = self.observer.as_deref_mut() {
            obs.observe(&SelectExecution {
                project: self.project,
                query: q,
                input: &input,
                env: self.env,
                result: &result,
            });
        }
        self.stats.add(&result.stats);
        if top_level {
            let recs = result
                .rows
                .iter()
                .map(|r| RowRecord::new(self.project, r.first));
            self.output.rows.extend(recs);
        }

        self.env.push_count(result.rows.len());
        let mut outcome = Ok(());
        for row in &result.rows {
            let mut scope = vec![(names[0].to_string(), Value::Node(row.first))];
            if let Some(s) = row.second {
                scope.push((names[1].to_string(), Value::Node(s)));
            }
            self.env.push_scope(scope);
            outcome = self.block(&q.body);
            self.env.pop_scope();
            if outcome.is_err() {
                break;
            }
        }
        self.env.pop_count();
        outcome
    }

    fn block(&mut self, body: &[Stmt]) -> Result<(), RuntimeError> {
        body.iter().try_for_each(|s| self.stmt(s))
    }

    fn current_number(&self, name: &str, line: u32, op: &str) -> Result<Value, RuntimeError> {
        Ok(match self.env.get(name) {
            None => Value::Number(0),
            Some(v @ Value::Str(_)) => v.clone(),
            Some(v) => Value::Number(
                to_number(self.project, v, op).map_err(|e| self.fail(line, e))?,
            ),
        })
    }

    fn stmt(&mut self, s: &Stmt) -> Result<(), RuntimeError> {
        let line = s.line;
        match &s.kind {
            StmtKind::Assign { target, op, expr } => {
                let rhs = self.eval(expr, line)?;
                let value = match op {
                    AssignOp::Set => rhs,
                    AssignOp::Add => {
                        let cur = self.current_number(target, line, "+=")?;
                        let cx = ExprContext::new(self.project, self.env);
                        let rhs = match (&rhs, expr) {
                            (Value::Undefined, Expr::Var(_)) => Value::Number(0),
                            _ => rhs,
                        };
                        let r = add_values(&cx, &cur, &rhs);
                        self.output.degraded |= cx.degraded();
                        r.map_err(|e| self.fail(line, e))?
                    }
                    AssignOp::Sub => {
                        let cur = self.current_number(target, line, "-=")?;
                        let rhs = match (&rhs, expr) {
                            (Value::Undefined, Expr::Var(_)) => Value::Number(0),
                            _ => rhs,
                        };
                        let (a, b) = (
                            to_number(self.project, &cur, "-=").map_err(|e| self.fail(line, e))?,
                            to_number(self.project, &rhs, "-=").map_err(|e| self.fail(line, e))?,
                        );
                        Value::Number(a.checked_sub(b).ok_or_else(|| {
                            self.fail(line, EvalError("integer overflow".into()))
                        })?)
                    }
                };
                self.env.set(target, value);
            }
            StmtKind::Step { target, op } => {
                let sym = if *op == StepOp::Incr { "++" } else { "--" };
                let cur = self.current_number(target, line, sym)?;
                let n = to_number(self.project, &cur, sym).map_err(|e| self.fail(line, e))?;
                let next = if *op == StepOp::Incr {
                    n.checked_add(1)
                } else {
                    n.checked_sub(1)
                };
                let next =
                    next.ok_or_else(|| self.fail(line, EvalError("integer overflow".into())))?;
                self.env.set(target, Value::Number(next));
            }
            StmtKind::If {
                cond,
                then,
                otherwise,
            } => {
                if self.eval(cond, line)?.truthy() {
                    self.block(then)?;
                } else if let Some(o) = otherwise {
                    self.block(o)?;
                }
            }
            StmtKind::While { cond, body } => {
                let mut iterations = 0u64;
                while self.eval(cond, line)?.truthy() {
                    iterations += 1;
                    if iterations > self.config.loop_limit {
                        return Err(self.fail(line, EvalError("loop iteration limit exceeded".into())));
                    }
                    self.block(body)?;
                }
            }
            StmtKind::Select(q) => self.select(q, None, false)?,
            StmtKind::CallQuery { label, input } => {
                let target = self.doc.labeled(label).ok_or_else(|| {
                    self.fail(line, EvalError(format!("unresolved query label {label}")))
                })?;
                if self.env.call_depth() >= self.config.recursion_limit {
                    return Err(self.fail(line, EvalError("query recursion limit exceeded".into())));
                }
                self.env.enter_call();
                // deep callquery chains must not depend on the caller's stack size
                let r = stacker::maybe_grow(64 * 1024, 1024 * 1024, || {
                    self.select(target, input.as_ref(), true)
                });
                self.env.leave_call();
                r?;
            }
            StmtKind::Print(e) => {
                let v = self.eval(e, line)?;
                let cx = ExprContext::new(self.project, self.env);
                let text = cx.render(&v);
                self.output.degraded |= cx.degraded();
                self.output.prints.push(text);
            }
            StmtKind::Expr(e) => {
                self.eval(e, line)?;
            }
        }
        Ok(())
    }
}
