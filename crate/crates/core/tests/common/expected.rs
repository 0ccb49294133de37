//! Expected variables and prints of every shipped query on every shipped
//! fixture, worked out by hand from the fixture sources.

use std::collections::BTreeMap;

use super::{fixtures, run_query, vars};
use craql::bundled::QUERIES;

pub type Expect = (&'static str, &'static [(&'static str, &'static str)], &'static [&'static str]);

pub const SAMPLE: &[Expect] = &[
    ("blocktop_decls", &[("num_blocktops", "1"), ("num_inlines", "1")], &[]),
    ("catch_throw", &[], &[]),
    ("nested_types", &[], &[]),
    ("isparent_pairs", &[("block_statement_pairs", "6")], &[]),
    ("getters", &[], &["int getCount() { return count; } is a getter"]),
    ("for_depth", &[], &[]),
    ("method_bindings", &[], &[]),
    ("type_bindings", &[], &[]),
    ("in_out_calls", &[("num_incoming", "0"), ("num_outgoing", "1")], &[]),
    ("pruning", &[("top_statements", "2")], &[]),
    ("unreachable", &[], &[]),
    ("recursion", &[], &[]),
    ("deepest_block", &[("block_depth", "2"), ("deepest_block_depth", "2")], &[]),
    ("count_limit", &[], &["3", "3", "3"]),
    ("call_chain", &[("max_chain_length", "1")], &[]),
];

pub const FACT: &[Expect] = &[
    ("blocktop_decls", &[], &[]),
    ("catch_throw", &[], &[]),
    ("nested_types", &[], &[]),
    ("isparent_pairs", &[("block_statement_pairs", "1")], &[]),
    ("getters", &[], &[]),
    ("for_depth", &[], &[]),
    ("method_bindings", &[("bound_calls", "1")], &[]),
    ("type_bindings", &[], &[]),
    ("in_out_calls", &[("num_incoming", "0"), ("num_outgoing", "0")], &[]),
    ("pruning", &[("top_statements", "1")], &[]),
    ("unreachable", &[], &[]),
    ("recursion", &[("recursive_calls", "1")], &[]),
    ("deepest_block", &[("block_depth", "0"), ("deepest_block_depth", "0")], &[]),
    ("count_limit", &[], &["1"]),
    ("call_chain", &[("max_chain_length", "1")], &[]),
];

pub const AB: &[Expect] = &[
    ("blocktop_decls", &[], &[]),
    ("catch_throw", &[], &[]),
    ("nested_types", &[], &[]),
    ("isparent_pairs", &[("block_statement_pairs", "3")], &[]),
    ("getters", &[], &[]),
    ("for_depth", &[], &[]),
    ("method_bindings", &[("bound_calls", "2")], &[]),
    ("type_bindings", &[], &[]),
    ("in_out_calls", &[("num_incoming", "1"), ("num_outgoing", "0")], &[]),
    ("pruning", &[("top_statements", "3")], &[]),
    ("unreachable", &[], &[]),
    ("recursion", &[], &[]),
    ("deepest_block", &[("block_depth", "0"), ("deepest_block_depth", "0")], &[]),
    ("count_limit", &[], &["3", "3", "3"]),
    ("call_chain", &[("max_chain_length", "1")], &[]),
];

pub const UNREACHABLE: &[Expect] = &[
    // `int i` in the for header follows the for statement itself; `int z` follows a throw.
    ("blocktop_decls", &[("num_blocktops", "0"), ("num_inlines", "2")], &[]),
    ("catch_throw", &[], &[]),
    ("nested_types", &[], &[]),
    ("isparent_pairs", &[("block_statement_pairs", "16")], &[]),
    ("getters", &[], &[]),
    ("for_depth", &[("nested_for_count", "1")], &[]),
    ("method_bindings", &[], &[]),
    ("type_bindings", &[], &[]),
    ("in_out_calls", &[("num_incoming", "0"), ("num_outgoing", "2")], &[]),
    ("pruning", &[("top_statements", "5")], &[]),
    (
        "unreachable",
        &[],
        &[
            "Unreachable.mj - 4",
            "Unreachable.mj - 9",
            "Unreachable.mj - 15",
            "Unreachable.mj - 20",
        ],
    ),
    ("recursion", &[], &[]),
    ("deepest_block", &[("block_depth", "2"), ("deepest_block_depth", "2")], &[]),
    ("count_limit", &[], &["9", "9", "9", "9", "9", "9", "9", "9", "9"]),
    ("call_chain", &[("max_chain_length", "1")], &[]),
];

pub const LOOPS: &[Expect] = &[
    ("blocktop_decls", &[("num_blocktops", "0"), ("num_inlines", "3")], &[]),
    ("catch_throw", &[], &[]),
    ("nested_types", &[], &[]),
    ("isparent_pairs", &[("block_statement_pairs", "4")], &[]),
    ("getters", &[], &[]),
    ("for_depth", &[("nested_for_count", "3")], &[]),
    ("method_bindings", &[], &[]),
    ("type_bindings", &[], &[]),
    ("in_out_calls", &[("num_incoming", "0"), ("num_outgoing", "1")], &[]),
    ("pruning", &[("top_statements", "1")], &[]),
    ("unreachable", &[], &[]),
    ("recursion", &[], &[]),
    ("deepest_block", &[("block_depth", "6"), ("deepest_block_depth", "6")], &[]),
    ("count_limit", &[], &["4", "4", "4", "4"]),
    ("call_chain", &[("max_chain_length", "1")], &[]),
];

pub const CHAIN: &[Expect] = &[
    ("blocktop_decls", &[], &[]),
    ("catch_throw", &[], &[]),
    ("nested_types", &[], &[]),
    ("isparent_pairs", &[("block_statement_pairs", "1")], &[]),
    ("getters", &[], &[]),
    ("for_depth", &[], &[]),
    ("method_bindings", &[], &[]),
    ("type_bindings", &[("self_typed_exprs", "1")], &[]),
    ("in_out_calls", &[("num_incoming", "0"), ("num_outgoing", "3")], &[]),
    ("pruning", &[("top_statements", "1")], &[]),
    ("unreachable", &[], &[]),
    ("recursion", &[], &[]),
    ("deepest_block", &[("block_depth", "0"), ("deepest_block_depth", "0")], &[]),
    ("count_limit", &[], &["1"]),
    ("call_chain", &[("max_chain_length", "3")], &[]),
];

/// Runs every query of `table` on one fixture; lists each mismatch.
pub fn check(fixture: &str, table: &[Expect]) -> Result<(), String> {
    assert_eq!(table.len(), QUERIES.len());
    let p = fixtures(&[fixture]);
    let mut failures = Vec::new();
    for (query, want_vars, want_prints) in table {
        let r = run_query(query, &p);
        let want: BTreeMap<String, String> = vars(want_vars);
        if r.vars != want || r.output.prints != *want_prints {
            failures.push(format!(
                "{query} on {fixture}: vars {:?} prints {:?}",
                r.vars, r.output.prints
            ));
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(failures.join("\n"))
    }
}

/// Every fixture with its expectation table.
pub const ALL: &[(&str, &[Expect])] = &[
    ("Sample.mj", SAMPLE),
    ("Fact.mj", FACT),
    ("AB.mj", AB),
    ("Unreachable.mj", UNREACHABLE),
    ("Loops.mj", LOOPS),
    ("Chain.mj", CHAIN),
];

