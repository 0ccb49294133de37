//! Every shipped query against every shipped fixture.

mod common;

use common::expected::*;
use common::*;
use craql::bundled::{self, QUERIES};
use craql::minilang::minilang_schema;
use craql::query::{parse_query_document, unparse, validate_against_schema};

#[test]
fn sample_fixture() {
    check("Sample.mj", SAMPLE).unwrap();
}

#[test]
fn fact_fixture() {
    check("Fact.mj", FACT).unwrap();
}

#[test]
fn ab_fixture() {
    check("AB.mj", AB).unwrap();
}

#[test]
fn unreachable_fixture() {
    check("Unreachable.mj", UNREACHABLE).unwrap();
}

#[test]
fn loops_fixture() {
    check("Loops.mj", LOOPS).unwrap();
}

#[test]
fn chain_fixture() {
    check("Chain.mj", CHAIN).unwrap();
}

#[test]
fn generated_fixtures() {
    let deep = source("Deep.mj", &bundled::nested_blocks(10));
    let r = run_query("deepest_block", &deep);
    assert_eq!(r.vars, vars(&[("block_depth", "9"), ("deepest_block_depth", "9")]));
    assert_eq!(run_query("count_limit", &deep).output.prints, vec!["10"; 10]);

    let many = source("Many.mj", &bundled::many_blocks(250));
    let r = run_query("count_limit", &many);
    assert_eq!(r.output.prints, vec!["100"; 100]);
    assert_eq!(r.output.rows.len(), 100);
}

#[test]
fn bundled_queries_parse_lint_and_round_trip() {
    let schema = minilang_schema();
    for q in QUERIES {
        let d = parse_query_document(q.name, q.text).unwrap_or_else(|e| panic!("{}: {e}", q.name));
        let warnings = validate_against_schema(&d, &schema);
        assert!(warnings.is_empty(), "{}: {warnings:?}", q.name);
        let again = parse_query_document(q.name, &unparse(&d)).unwrap();
        assert_eq!(again.without_locations(), d.without_locations(), "{}", q.name);
    }
}

#[test]
fn blocktop_query_shape() {
    let d = bundled_doc("blocktop_decls");
    assert_eq!(d.queries.len(), 1);
    // outer select, one nested select, one select nested in that
    assert_eq!(d.selects().len(), 3);
}

#[test]
fn unreachable_query_is_compact() {
    let body = bundled::strip_header_comment(bundled::query("unreachable").unwrap().text);
    let lines = body.lines().filter(|l| !l.trim().is_empty()).count();
    assert!(lines <= 15, "{lines} lines");
    assert!(body.chars().count() <= 418, "{} chars", body.chars().count());
}
