//! Selection, modifiers, pairs and interpreter behavior on small fixtures.
//! Expected counts are worked out by hand from the fixture sources.

mod common;

use common::*;
use craql::engine::{execute_document, EngineConfig, Environment, Session, Value};

fn n_of(query: &str, fixture: &str) -> String {
    let r = run_doc(&doc(query), &fixtures(&[fixture]));
    r.vars.get("n").cloned().unwrap_or_default()
}

const GREET_BODY: &str = r#"select ({MethodDeclaration} m) where m.name == "greet" {"#;

#[test]
fn single_pattern_and_modifiers() {
    assert_eq!(n_of("select ({Block} b) { n++; }", "Sample.mj"), "3");
    assert_eq!(n_of("select inmost ({Block} b) { n++; }", "Sample.mj"), "2");
    assert_eq!(n_of("select outmost ({Block} b) { n++; }", "Sample.mj"), "2");
    assert_eq!(n_of("select ({Statement} s) { n++; }", "Sample.mj"), "9");
    assert_eq!(n_of("select outmost ({Statement} s) { n++; }", "Sample.mj"), "2");
    assert_eq!(n_of("select inmost ({Statement} s) { n++; }", "Sample.mj"), "5");
}

#[test]
fn explicit_inputs() {
    let q = |inner: &str| format!("{GREET_BODY} {inner} }}");
    // the body block itself is never a candidate of its own input
    assert_eq!(n_of(&q("select ({Statement} s) in m.body { n++; }"), "Sample.mj"), "6");
    // Blocks below the root's type are candidates but are not entered
    assert_eq!(n_of(&q("select ({Statement} s) directly in m.body { n++; }"), "Sample.mj"), "5");
    assert_eq!(
        n_of(&q("select outmost ({Statement} s) directly in m.body { n++; }"), "Sample.mj"),
        "4"
    );
    // a MethodDeclaration root prunes nothing below it
    assert_eq!(n_of(&q("select ({Block} b) directly in m { n++; }"), "Sample.mj"), "2");
    // an undefined input selects nothing
    assert_eq!(n_of("select ({CompilationUnit} c) { n = 0; select ({Block} b) in nothing { n++; } }", "Sample.mj"), "0");
}

#[test]
fn pair_patterns() {
    assert_eq!(n_of("select ({Block} a * {Block} b) { n++; }", "Sample.mj"), "1");
    assert_eq!(
        n_of("select ({TypeDeclaration} t * {MethodInvocation} c) { n++; }", "AB.mj"),
        "2"
    );
    let r = run_doc(
        &doc("select ({Block} a ... {Statement} s) { print(a.linenumber() + \":\" + s.linenumber()); }"),
        &fixtures(&["Sample.mj"]),
    );
    assert_eq!(r.output.prints, ["4:9"]);
    // pair rows are reported by their first node
    assert_eq!(r.output.rows.len(), 1);
    assert_eq!(r.output.rows[0].line, 4);
}

#[test]
fn count_star_in_where_and_body() {
    assert_eq!(n_of("select ({Statement} s) where count(*) < 2 { n++; }", "Sample.mj"), "2");
    assert_eq!(n_of("select ({Block} b) { n = count(*); }", "Sample.mj"), "3");
    let r = run_doc(
        &doc("select ({Block} b) { select ({Statement} s) in b { x = 1; } print(count(*)); }"),
        &fixtures(&["Sample.mj"]),
    );
    assert_eq!(r.output.prints, ["3", "3", "3"]);
}

#[test]
fn where_sees_outer_variables() {
    let q = r#"select ({MethodDeclaration} m) { select ({ReturnStatement} r) in m where m.name == "getCount" { n++; } }"#;
    assert_eq!(n_of(q, "Sample.mj"), "1");
}

#[test]
fn accessors_and_builtins() {
    let p = fixtures(&["Sample.mj"]);
    let r = run_doc(
        &doc(
            r#"select ({MethodDeclaration} m) where m.name == "getCount" {
  print(m.{Block});
  print(m.body.{ReturnStatement}.expression);
  print(m.nodetype() + " " + m.filename() + " " + m.linenumber() + " " + m.depth());
  print(m.parent().name + " " + m.body.isparent(m.body.{ReturnStatement}) + " " + m.isparent(m.body.{ReturnStatement}));
  print(m.contains(m.body.{ReturnStatement}) + " " + m.directly_contains(m.body));
  print(m.isnodetype({MethodDeclaration}) + " " + m.isnodetype({Statement}) + " " + {Block});
}"#,
        ),
        &p,
    );
    assert_eq!(
        r.output.prints,
        [
            "{ return count; }",
            "count",
            "MethodDeclaration Sample.mj 3 2",
            "Greeter true false",
            "true true",
            "true false Block",
        ]
    );
}

#[test]
fn arithmetic_and_defaults() {
    let p = fixtures(&["Sample.mj"]);
    let r = run_doc(
        &doc(
            r#"select ({CompilationUnit} c) {
  a += 2; b--; z = unset * 3 + 1;
  s = "x" + 1 + true;
  m = max(q, 4) - min(-2, q);
  if (!(a > 1) || 2 * 3 != 6) print("no"); else print("yes");
  k = 0; while (k < 5) { k++; }
  print(undefinedvar);
}"#,
        ),
        &p,
    );
    assert_eq!(
        r.vars,
        vars(&[("a", "2"), ("b", "-1"), ("z", "1"), ("s", "x1true"), ("m", "6"), ("k", "5")])
    );
    assert_eq!(r.output.prints, ["yes", "undefined"]);
}

#[test]
fn pattern_variables_are_not_exported() {
    let r = run_doc(&doc("select ({Block} b) { temp_x = 1; y = b; }"), &fixtures(&["Fact.mj"]));
    assert_eq!(r.vars.keys().collect::<Vec<_>>(), ["y"]);
    assert!(r.vars["y"].starts_with("Block@Fact.mj:"));
}

#[test]
fn callquery_recurses_with_override_input() {
    let p = fixtures(&["Loops.mj"]);
    let q = "select ({MethodDeclaration} m) { callquery(f) in m; }\n\
             f: select outmost ({ForStatement} x) { n++; callquery(f) in x.body; }";
    assert_eq!(run_doc(&doc(q), &p).vars["n"], "3");
}

#[test]
fn recursion_limit_is_an_error() {
    let p = fixtures(&["Fact.mj"]);
    let d = doc("q: select ({CompilationUnit} c) { n++; callquery(q); }");
    let err = execute_document(&d, &p, Environment::new(), EngineConfig::default()).unwrap_err();
    assert_eq!(err.message, "query recursion limit exceeded");
    let mut s = Session::new(
        &p,
        Environment::new(),
        EngineConfig {
            recursion_limit: 5,
            ..EngineConfig::default()
        },
    );
    assert!(s.run(&d).is_err());
    // the entry run plus five nested calls each incremented n
    assert_eq!(s.env().get("n"), Some(&Value::Number(6)));
}

#[test]
fn loop_limit_is_an_error() {
    let p = fixtures(&["Fact.mj"]);
    let d = doc("select ({CompilationUnit} c) { while (true) { n++; } }");
    let cfg = EngineConfig {
        loop_limit: 1000,
        ..EngineConfig::default()
    };
    let err = execute_document(&d, &p, Environment::new(), cfg).unwrap_err();
    assert_eq!(err.message, "loop iteration limit exceeded");
}

#[test]
fn runtime_errors() {
    let p = fixtures(&["Sample.mj"]);
    let fail = |q: &str| execute_document(&doc(q), &p, Environment::new(), EngineConfig::default()).unwrap_err();
    assert!(fail("select ({Block} b) in 3 { n++; }").message.contains("must be a node"));
    assert!(fail("select ({Nope} b) { n++; }").message.contains("unknown node type Nope"));
    // CompilationUnit has only TypeDeclaration children, but Greeter's body has two methods
    assert!(fail("select ({TypeDeclaration} t) { x = t.{MethodDeclaration}; }")
        .message
        .contains("ambiguous child access"));
}

#[test]
fn session_state_carries_across_documents() {
    let p = fixtures(&["Sample.mj"]);
    let mut s = Session::new(&p, Environment::new(), EngineConfig::default());
    s.run(&doc("select ({Block} b) { n++; }")).unwrap();
    s.run(&doc("select ({Block} b) { n++; }")).unwrap();
    assert_eq!(s.env().get("n"), Some(&Value::Number(6)));
    assert_eq!(s.take_output().rows.len(), 6);
}

#[test]
fn runs_are_deterministic() {
    let p = fixtures(&["Sample.mj", "AB.mj", "Unreachable.mj"]);
    for q in craql::bundled::QUERIES {
        let a = run_query(q.name, &p);
        let b = run_query(q.name, &p);
        assert_eq!(a.vars, b.vars, "{}", q.name);
        assert_eq!(a.output.prints, b.output.prints, "{}", q.name);
        assert_eq!(a.output.rows, b.output.rows, "{}", q.name);
    }
}
