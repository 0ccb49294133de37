//! Algebraic laws of the pruning modifiers and pair patterns, checked
//! against the brute-force oracle.

use std::collections::HashSet;

use super::{doc, nodes_of};
use craql::ast::{NodeId, ProjectAst};
use craql::engine::{select_rows, InputRoots, Row};
use craql::oracle::{compare, oracle_select};
use craql::query::{Modifier, Pattern};

pub const TYPES: &[&str] = &[
    "Block",
    "Statement",
    "Expression",
    "MethodInvocation",
    "ForStatement",
    "IfStatement",
    "WhileStatement",
    "ReturnStatement",
    "MethodDeclaration",
    "TypeDeclaration",
];

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

pub fn pattern(text: &str) -> Pattern {
    doc(&format!("select {text} {{ x = 1; }}")).entry().unwrap().pattern.clone()
}

pub fn single(ty: &str) -> Pattern {
    pattern(&format!("({{{ty}}} n)"))
}

pub fn rows(p: &ProjectAst, pat: &Pattern, m: Modifier, input: &InputRoots) -> Vec<Row> {
    select_rows(p, pat, m, input, &mut |_, _| Ok(true)).unwrap().rows
}

fn firsts(rows: &[Row]) -> Vec<NodeId> {
    rows.iter().map(|r| r.first).collect()
}

/// Engine and oracle agree on one unfiltered select.
pub fn agrees(p: &ProjectAst, pat: &Pattern, m: Modifier, input: &InputRoots) -> Result<(), String> {
    let e = select_rows(p, pat, m, input, &mut |_, _| Ok(true)).map_err(|e| e.0)?;
    let o = oracle_select(p, pat, m, input, &mut |_, _| Ok(true)).map_err(|e| e.0)?;
    let d = compare(p, &e, &o);
    ensure!(d.is_empty(), "{pat:?} {m:?} {input:?}: {d}");
    Ok(())
}

pub fn check_laws(p: &ProjectAst, ty: &str) -> Result<(), String> {
    let pat = single(ty);
    let all = firsts(&rows(p, &pat, Modifier::None, &InputRoots::Project));
    let out = firsts(&rows(p, &pat, Modifier::Outmost, &InputRoots::Project));
    let inn = firsts(&rows(p, &pat, Modifier::Inmost, &InputRoots::Project));

    for (name, sub) in [("outmost", &out), ("inmost", &inn)] {
        let kept: HashSet<_> = sub.iter().copied().collect();
        // a subset of the unmodified rows, in the same order
        let in_order: Vec<_> = all.iter().copied().filter(|n| kept.contains(n)).collect();
        ensure!(*sub == in_order, "{ty}: {name} is not an ordered subset");
        // no kept node lies inside another kept node
        for &n in sub {
            ensure!(!p.ancestors(n).any(|a| kept.contains(&a)), "{ty}: {name} rows nest");
        }
    }
    // every match lies at or below an outmost match and at or above an inmost one
    let out_set: HashSet<_> = out.iter().copied().collect();
    let above_inmost: HashSet<_> = inn
        .iter()
        .flat_map(|&i| std::iter::once(i).chain(p.ancestors(i)))
        .collect();
    for &n in &all {
        ensure!(
            out_set.contains(&n) || p.ancestors(n).any(|a| out_set.contains(&a)),
            "{ty}: match not covered by outmost"
        );
        ensure!(above_inmost.contains(&n), "{ty}: match not covered by inmost");
    }
    for m in [Modifier::None, Modifier::Outmost, Modifier::Inmost] {
        agrees(p, &pat, m, &InputRoots::Project)?;
    }

    // explicit inputs: directly-in and outmost narrow the plain input
    for &m in nodes_of(p, "MethodDeclaration").iter().take(5) {
        let plain = firsts(&rows(p, &pat, Modifier::None, &InputRoots::In(vec![m])));
        let direct = firsts(&rows(p, &pat, Modifier::None, &InputRoots::DirectlyIn(vec![m])));
        let both = firsts(&rows(p, &pat, Modifier::Outmost, &InputRoots::DirectlyIn(vec![m])));
        ensure!(direct.iter().all(|n| plain.contains(n)), "{ty}: directly in widened input");
        ensure!(both.iter().all(|n| direct.contains(n)), "{ty}: outmost widened input");
        ensure!(!plain.contains(&m), "{ty}: input root selected");
        for input in [InputRoots::In(vec![m]), InputRoots::DirectlyIn(vec![m])] {
            for md in [Modifier::None, Modifier::Outmost, Modifier::Inmost] {
                agrees(p, &pat, md, &input)?;
            }
        }
    }
    Ok(())
}

pub fn check_pairs(p: &ProjectAst, a: &str, b: &str) -> Result<(), String> {
    let star = pattern(&format!("({{{a}}} x * {{{b}}} y)"));
    let ell = pattern(&format!("({{{a}}} x ... {{{b}}} y)"));
    let s = rows(p, &star, Modifier::None, &InputRoots::Project);
    let e = rows(p, &ell, Modifier::None, &InputRoots::Project);
    for r in &s {
        ensure!(p.is_proper_ancestor(r.first, r.second.unwrap()), "{a}*{b}: not nested");
    }
    // ellipsis keeps exactly the star pairs at the largest depth distance
    let dist = |r: &Row| p.node_depth(r.second.unwrap()) - p.node_depth(r.first);
    let max = s.iter().map(dist).max();
    let want: Vec<Row> = s.iter().copied().filter(|r| Some(dist(r)) == max).collect();
    ensure!(e == want, "{a}...{b}: not the deepest star pairs");
    agrees(p, &star, Modifier::None, &InputRoots::Project)?;
    agrees(p, &ell, Modifier::None, &InputRoots::Project)
}
