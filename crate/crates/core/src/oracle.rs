//! Brute-force reference evaluator for the declarative subset.
//!
//! Every node under the input is enumerated; modifiers are checked afterwards
//! by materializing each candidate's ancestor path and descendant set. Only
//! where clauses are delegated to the engine's expression evaluator.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::ast::{NodeId, ProjectAst, TypeId};
use crate::engine::{
    eval_expr, EvalError, ExprContext, InputRoots, ResultSet, Row, RowFilter, SelectExecution,
    SelectObserver,
};
use crate::query::{Modifier, Pattern, PatternKind};

/// Tree position: tree rank among project roots, then child indices from the root.
pub type SortKey = (usize, Vec<usize>);

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OracleResult {
    /// Rows with their sort keys (first variable, then second), sorted.
    pub rows: Vec<((SortKey, Option<SortKey>), Row)>,
}

impl OracleResult {
    pub fn rows(&self) -> Vec<Row> {
        self.rows.iter().map(|(_, r)| *r).collect()
    }
}

/// Nodes from `n` up to its tree root, `n` first.
fn path_to_root(p: &ProjectAst, n: NodeId) -> Vec<NodeId> {
    let mut path = vec![n];
    let mut cur = n;
    while let Some(up) = p.parent(cur) {
        path.push(up);
        cur = up;
    }
    path
}

fn all_below(p: &ProjectAst, n: NodeId) -> Vec<NodeId> {
    let mut out = Vec::new();
    let mut todo = vec![n];
    while let Some(x) = todo.pop() {
        out.push(x);
        todo.extend(p.children(x).iter().copied());
    }
    out
}

pub fn sort_key(p: &ProjectAst, n: NodeId) -> SortKey {
    let path = path_to_root(p, n);
    let top = *path.last().unwrap();
    let tree = p
        .roots()
        .iter()
        .position(|&r| r == top)
        .unwrap_or(p.roots().len() + top.index());
    let mut idx: Vec<usize> = path
        .windows(2)
        .map(|w| p.children(w[1]).iter().position(|&c| c == w[0]).unwrap())
        .collect();
    idx.reverse();
    (tree, idx)
}

/// Does some node strictly between `root` and `n` satisfy `pred`? The root
/// itself counts only when `include_root` is set.
fn interposed(
    p: &ProjectAst,
    root: NodeId,
    n: NodeId,
    include_root: bool,
    pred: impl Fn(NodeId) -> bool,
) -> bool {
    let path = path_to_root(p, n);
    let Some(pos) = path.iter().position(|&x| x == root) else {
        return false;
    };
    let between = &path[1..pos];
    between.iter().any(|&x| pred(x)) || (include_root && root != n && pred(root))
}

fn first_candidates(
    p: &ProjectAst,
    ty: TypeId,
    modifier: Modifier,
    input: &InputRoots,
) -> BTreeSet<NodeId> {
    let (roots, explicit, directly) = match input {
        InputRoots::Project => (p.roots().to_vec(), false, false),
        InputRoots::In(r) => (r.clone(), true, false),
        InputRoots::DirectlyIn(r) => (r.clone(), true, true),
    };
    let mut set = BTreeSet::new();
    for &r in &roots {
        let root_ty = p.type_of(r);
        for n in all_below(p, r) {
            if explicit && n == r {
                continue;
            }
            if !p.node_is(n, ty) {
                continue;
            }
            if modifier == Modifier::Outmost && interposed(p, r, n, !explicit, |x| p.node_is(x, ty)) {
                continue;
            }
            if modifier == Modifier::Inmost
                && all_below(p, n).into_iter().any(|d| d != n && p.node_is(d, ty))
            {
                continue;
            }
            if directly && interposed(p, r, n, false, |x| p.type_of(x) == root_ty) {
                continue;
            }
            set.insert(n);
        }
    }
    set
}

/// Recomputes a select by exhaustive enumeration. `filter` is applied to
/// structurally valid rows in sorted order, with the count kept so far.
pub fn oracle_select(
    project: &ProjectAst,
    pattern: &Pattern,
    modifier: Modifier,
    input: &InputRoots,
    filter: &mut RowFilter<'_>,
) -> Result<OracleResult, EvalError> {
    let ty = |name: &str| {
        project
            .schema()
            .type_id(name)
            .ok_or_else(|| EvalError(format!("unknown node type {name}")))
    };
    let t1 = ty(&pattern.first.ty)?;
    let mut structural: Vec<((SortKey, Option<SortKey>), Row)> = Vec::new();
    match pattern.kind {
        PatternKind::Single => {
            for n in first_candidates(project, t1, modifier, input) {
                let row = Row {
                    first: n,
                    second: None,
                };
                structural.push(((sort_key(project, n), None), row));
            }
        }
        PatternKind::Star | PatternKind::Ellipsis => {
            let t2 = ty(&pattern.second.as_ref().expect("pair pattern").ty)?;
            for n1 in first_candidates(project, t1, Modifier::None, input) {
                for n2 in all_below(project, n1) {
                    if n2 != n1 && project.node_is(n2, t2) {
                        let key = (sort_key(project, n1), Some(sort_key(project, n2)));
                        structural.push((
                            key,
                            Row {
                                first: n1,
                                second: Some(n2),
                            },
                        ));
                    }
                }
            }
        }
    }
    structural.sort();
    structural.dedup();
    let mut rows = Vec::new();
    for (key, row) in structural {
        if filter(row, rows.len())? {
            rows.push((key, row));
        }
    }
    if pattern.kind == PatternKind::Ellipsis {
        let gap = |r: &Row| {
            path_to_root(project, r.second.unwrap()).len() - path_to_root(project, r.first).len()
        };
        if let Some(max) = rows.iter().map(|(_, r)| gap(r)).max() {
            rows.retain(|(_, r)| gap(r) == max);
        }
    }
    Ok(OracleResult { rows })
}

/// Differences between engine and oracle rows.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Diff {
    pub missing: Vec<String>,
    pub extra: Vec<String>,
    /// Same rows, different order.
    pub misordered: bool,
}

impl Diff {
    pub fn is_empty(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty() && !self.misordered
    }
}

impl fmt::Display for Diff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.missing {
            writeln!(f, "missing {m}")?;
        }
        for e in &self.extra {
            writeln!(f, "extra {e}")?;
        }
        if self.misordered {
            writeln!(f, "rows out of order")?;
        }
        Ok(())
    }
}

fn describe(p: &ProjectAst, r: &Row) -> String {
    let loc = |n: NodeId| format!("{}@{}:{}", p.type_name(n), p.file_name(n), p.node(n).span.line);
    match r.second {
        Some(s) => format!("({}, {})", loc(r.first), loc(s)),
        None => loc(r.first),
    }
}

/// Compares engine rows with oracle rows, order included.
pub fn compare(project: &ProjectAst, engine: &ResultSet, oracle: &OracleResult) -> Diff {
    let expected = oracle.rows();
    let got: HashSet<Row> = engine.rows.iter().copied().collect();
    let want: HashSet<Row> = expected.iter().copied().collect();
    let missing = expected
        .iter()
        .filter(|r| !got.contains(r))
        .map(|r| describe(project, r))
        .collect();
    let extra = engine
        .rows
        .iter()
        .filter(|r| !want.contains(r))
        .map(|r| describe(project, r))
        .collect();
    let mut d = Diff {
        missing,
        extra,
        misordered: false,
    };
    d.misordered = d.is_empty() && engine.rows != expected;
    d
}

/// Checks every select the engine runs against the oracle.
#[derive(Debug, Default)]
pub struct OracleObserver {
    pub checked: usize,
    /// (query line, difference or oracle error) for each disagreement.
    pub failures: Vec<(u32, String)>,
}

impl SelectObserver for OracleObserver {
    fn observe(&mut self, exec: &SelectExecution<'_>) {
        let q = exec.query;
        let names: Vec<&str> = q.pattern.vars().map(|v| v.var.as_str()).collect();
        let mut filter = |row: Row, count: usize| -> Result<bool, EvalError> {
            let Some(w) = &q.where_clause else {
                return Ok(true);
            };
            let mut overlay = vec![(names[0], row.first)];
            if let Some(s) = row.second {
                overlay.push((names[1], s));
            }
            let cx = ExprContext::new(exec.project, exec.env).with_overlay(&overlay, count);
            Ok(eval_expr(&cx, w)?.truthy())
        };
        self.checked += 1;
        match oracle_select(exec.project, &q.pattern, q.modifier, exec.input, &mut filter) {
            Ok(o) => {
                let d = compare(exec.project, exec.result, &o);
                if !d.is_empty() {
                    self.failures.push((q.line, d.to_string()));
                }
            }
            Err(e) => self.failures.push((q.line, format!("oracle error: {e}"))),
        }
    }
}
