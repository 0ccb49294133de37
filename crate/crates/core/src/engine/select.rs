//! Tree-set selection: single, star and ellipsis patterns with the pruning
//! modifiers applied during traversal.

use std::collections::HashSet;

use super::{EvalError, ExecutionStats};
use crate::ast::{NodeId, ProjectAst, TypeId};
use crate::query::{Modifier, Pattern, PatternKind};

/// Resolved input of a select.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InputRoots {
    /// Every compilation unit; a unit root is itself a candidate.
    Project,
    /// Explicit input trees; candidates are proper descendants of each root.
    In(Vec<NodeId>),
    /// As `In`, but nothing of a root's own concrete type may interpose.
    DirectlyIn(Vec<NodeId>),
}

/// One result binding: the first pattern variable and, for pair patterns, the second.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Row {
    pub first: NodeId,
    pub second: Option<NodeId>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ResultSet {
    pub rows: Vec<Row>,
    pub stats: ExecutionStats,
}

/// Decides whether a row is kept; receives the number of rows kept so far.
pub type RowFilter<'a> = dyn FnMut(Row, usize) -> Result<bool, EvalError> + 'a;

/// Runs a pattern over an input. `filter` plays the role of the where clause
/// and is consulted once per structurally valid row, in enumeration order.
pub fn select_rows(
    project: &ProjectAst,
    pattern: &Pattern,
    modifier: Modifier,
    input: &InputRoots,
    filter: &mut RowFilter<'_>,
) -> Result<ResultSet, EvalError> {
    let schema = project.schema();
    let resolve = |name: &str| {
        schema
            .type_id(name)
            .ok_or_else(|| EvalError(format!("unknown node type {name}")))
    };
    let t1 = resolve(&pattern.first.ty)?;
    let mut stats = ExecutionStats::default();

    let (roots, explicit, directly): (Vec<NodeId>, bool, bool) = match input {
        InputRoots::Project => (project.roots().to_vec(), false, false),
        InputRoots::In(r) => (r.clone(), true, false),
        InputRoots::DirectlyIn(r) => (r.clone(), true, true),
    };

    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    match pattern.kind {
        PatternKind::Single => {
            for &root in &roots {
                let scan = Scan {
                    project,
                    ty: t1,
                    outmost: modifier == Modifier::Outmost,
                    explicit,
                    directly,
                };
                for n in scan.run(root, &mut stats) {
                    if modifier == Modifier::Inmost && contains_type(project, n, t1, &mut stats) {
                        continue;
                    }
                    let row = Row {
                        first: n,
                        second: None,
                    };
                    if seen.insert(row) && filter(row, rows.len())? {
                        rows.push(row);
                    }
                }
            }
        }
        PatternKind::Star | PatternKind::Ellipsis => {
            let second = pattern
                .second
                .as_ref()
                .ok_or_else(|| EvalError("pair pattern without a second variable".into()))?;
            let t2 = resolve(&second.ty)?;
            for &root in &roots {
                let scan = Scan {
                    project,
                    ty: t1,
                    outmost: false,
                    explicit,
                    directly,
                };
                for n1 in scan.run(root, &mut stats) {
                    for n2 in project.descendants_preorder(n1).skip(1) {
                        stats.nodes_visited += 1;
                        if !project.node_is(n2, t2) {
                            continue;
                        }
                        let row = Row {
                            first: n1,
                            second: Some(n2),
                        };
                        if seen.insert(row) && filter(row, rows.len())? {
                            rows.push(row);
                        }
                    }
                }
            }
            if pattern.kind == PatternKind::Ellipsis {
                let dist = |r: &Row| {
                    project.node_depth(r.second.unwrap()) - project.node_depth(r.first)
                };
                if let Some(max) = rows.iter().map(dist).max() {
                    rows.retain(|r| dist(r) == max);
                }
            }
        }
    }
    stats.rows_yielded = rows.len() as u64;
    Ok(ResultSet { rows, stats })
}

/// Pre-order scan of one input tree for nodes of `ty`, pruning subtrees that
/// can no longer produce results.
struct Scan<'a> {
    project: &'a ProjectAst,
    ty: TypeId,
    outmost: bool,
    explicit: bool,
    directly: bool,
}

impl Scan<'_> {
    fn run(&self, root: NodeId, stats: &mut ExecutionStats) -> Vec<NodeId> {
        let p = self.project;
        let root_ty = p.type_of(root);
        let mut out = Vec::new();
        // (node, a `ty` node lies between the root and this node)
        let mut stack: Vec<(NodeId, bool)> = Vec::new();
        if self.explicit {
            stats.nodes_visited += 1;
            stack.extend(p.children(root).iter().rev().map(|&c| (c, false)));
        } else {
            stack.push((root, false));
        }
        while let Some((n, interposed)) = stack.pop() {
            stats.nodes_visited += 1;
            let is_t = p.node_is(n, self.ty);
            if is_t && !(self.outmost && interposed) {
                out.push(n);
            }
            if self.outmost && is_t {
                continue;
            }
            if self.directly && p.type_of(n) == root_ty {
                continue;
            }
            let below = interposed || is_t;
            stack.extend(p.children(n).iter().rev().map(|&c| (c, below)));
        }
        out
    }
}

/// Does some proper descendant of `n` have type `ty`?
fn contains_type(project: &ProjectAst, n: NodeId, ty: TypeId, stats: &mut ExecutionStats) -> bool {
    for d in project.descendants_preorder(n).skip(1) {
        stats.nodes_visited += 1;
        if project.node_is(d, ty) {
            return true;
        }
    }
    false
}
