//! Tree interchange format, MiniLang front end and binder.

mod common;

use common::*;
use craql::ast::{deserialize_project, serialize_project, AstError};
use craql::bundled;
use craql::minilang::{build_project, default_registry, SCHEMA_NAME};
use serde_json::json;

fn reload(text: &str) -> Result<craql::ast::ProjectAst, AstError> {
    deserialize_project(text, &default_registry())
}

#[test]
fn serialization_is_a_fixed_point() {
    let p = build(
        bundled::FIXTURES
            .iter()
            .map(|f| (f.file.to_string(), f.text.to_string()))
            .collect(),
    );
    let once = serialize_project(&p);
    let back = reload(&once).unwrap();
    assert_eq!(serialize_project(&back), once);
    assert_eq!(back.node_count(), p.node_count());
    assert_eq!(back.bindings(), p.bindings());
}

#[test]
fn queries_give_identical_results_on_reloaded_trees() {
    let p = fixtures(&["AB.mj", "Unreachable.mj", "Chain.mj"]);
    let back = reload(&serialize_project(&p)).unwrap();
    for q in bundled::QUERIES {
        let a = run_query(q.name, &p);
        let b = run_query(q.name, &back);
        assert_eq!(a.vars, b.vars, "{}", q.name);
        assert_eq!(a.output.prints, b.output.prints, "{}", q.name);
        assert_eq!(a.output.rows, b.output.rows, "{}", q.name);
    }
}

fn external_doc() -> serde_json::Value {
    json!({
        "schema": SCHEMA_NAME,
        "project": "ext",
        "files": [{"name": "ext.ast"}],
        "nodes": [
            {"id": 0, "type": "CompilationUnit", "file": 0, "span": [0, 0, 1], "props": {"types": [1]}},
            {"id": 1, "type": "TypeDeclaration", "file": 0, "span": [0, 0, 1],
             "props": {"name": {"token": "X"}, "interface": {"token": "false"}, "bodyDeclarations": [2]}},
            {"id": 2, "type": "MethodDeclaration", "file": 0, "span": [0, 0, 1],
             "props": {"name": {"token": "m"}, "returnType": {"token": "void"}, "parameters": [], "body": 3}},
            {"id": 3, "type": "Block", "file": 0, "span": [0, 0, 1], "props": {"statements": [4]}},
            {"id": 4, "type": "ExpressionStatement", "file": 0, "span": [0, 0, 1], "props": {"expression": 5}},
            {"id": 5, "type": "MethodInvocation", "file": 0, "span": [0, 0, 1],
             "props": {"name": {"token": "m"}, "arguments": []}}
        ],
        "roots": [0],
        "bindings": {"method": {"5": 2}}
    })
}

#[test]
fn text_less_trees_render_placeholders() {
    let p = reload(&external_doc().to_string()).unwrap();
    let r = run_doc(&doc("select ({Block} b) { print(b); x = b; }"), &p);
    assert_eq!(r.output.prints, ["<Block@ext.ast:1>"]);
    assert!(r.output.degraded);
    assert_eq!(r.vars["x"], "Block@ext.ast:1");
    let r = run_query("recursion", &p);
    assert_eq!(r.vars, vars(&[("recursive_calls", "1")]));
}

#[test]
fn ingestion_errors() {
    let mut d = external_doc();
    d["bindings"]["method"]["5"] = json!(3);
    assert!(matches!(reload(&d.to_string()), Err(AstError::BindingTypeMismatch { .. })));
    assert!(reload(&d.to_string())
        .unwrap_err()
        .to_string()
        .contains("binding target type mismatch"));

    let mut d = external_doc();
    d["bindings"]["method"]["5"] = json!(99);
    assert!(matches!(reload(&d.to_string()), Err(AstError::DanglingBinding { .. })));

    let mut d = external_doc();
    d["nodes"][4]["type"] = json!("Statement");
    d["nodes"][4]["props"] = json!({});
    assert!(matches!(reload(&d.to_string()), Err(AstError::NotConcrete { record: 4, .. })));

    let mut d = external_doc();
    d["nodes"][3]["props"]["body"] = json!(4);
    assert!(matches!(reload(&d.to_string()), Err(AstError::UnknownProperty { .. })));

    let mut d = external_doc();
    d["nodes"][3]["type"] = json!("Blob");
    assert!(matches!(reload(&d.to_string()), Err(AstError::UnknownNodeType { .. })));

    let mut d = external_doc();
    d["nodes"][3]["props"]["statements"] = json!([42]);
    assert!(matches!(reload(&d.to_string()), Err(AstError::DanglingNode { .. })));

    let mut d = external_doc();
    d["schema"] = json!("cobol");
    assert!(matches!(reload(&d.to_string()), Err(AstError::UnknownSchema(_))));

    assert!(matches!(reload("{ not json"), Err(AstError::Malformed { line: 1, .. })));
}

#[test]
fn preorder_depth_and_text() {
    let p = fixtures(&["Sample.mj"]);
    let root = p.roots()[0];
    let order: Vec<&str> = p.descendants_preorder(root).take(4).map(|n| p.type_name(n)).collect();
    assert_eq!(order, ["CompilationUnit", "TypeDeclaration", "FieldDeclaration", "VariableDeclaration"]);
    let ret = find(&p, "ReturnStatement", "return");
    assert_eq!(p.node_depth(ret), 4);
    assert_eq!(p.source_text(ret).text, "return count;");
    assert_eq!(p.node(ret).span.line, 3);
    let w = find(&p, "WhileStatement", "while");
    assert!(p.source_text(w).text.ends_with('}'));
}

#[test]
fn binder_resolves_calls_and_types() {
    let p = fixtures(&["AB.mj"]);
    let run = find(&p, "MethodDeclaration", "int run()");
    let helper = find(&p, "MethodDeclaration", "int helper()");
    let call_run = find(&p, "MethodInvocation", "b.run()");
    let call_helper = find(&p, "MethodInvocation", "helper()");
    assert_eq!(p.bindings().method.get(&call_run), Some(&run));
    assert_eq!(p.bindings().method.get(&call_helper), Some(&helper));
    // the receiver `b` is typed by the field declaration `B b`
    let class_b = find(&p, "TypeDeclaration", "class B");
    let recv = p.children(call_run)[0];
    assert_eq!(p.bindings().types.get(&recv), Some(&class_b));
}

#[test]
fn unknown_calls_stay_unbound() {
    let p = fixtures(&["Sample.mj"]);
    let log = find(&p, "MethodInvocation", "log");
    assert_eq!(p.bindings().method.get(&log), None);
    let r = run_doc(&doc("select ({MethodInvocation} c) { x = c.methodbinding(); }"), &p);
    assert_eq!(r.vars["x"], "");
}

#[test]
fn broken_files_are_skipped() {
    let built = build_project(
        "p",
        &[
            ("Good.mj".to_string(), "class G { }".to_string()),
            ("Bad.mj".to_string(), "class A { void f() { x = 1;".to_string()),
            ("Odd.mj".to_string(), "class { } class H { }".to_string()),
        ],
    )
    .unwrap();
    assert_eq!(built.files_skipped, ["Bad.mj"]);
    assert_eq!(built.files_parsed, 3);
    assert_eq!(built.project.roots().len(), 2);
    assert!(built.diagnostics.iter().any(|d| d.file == "Bad.mj"));
    // a recoverable error drops only the broken declaration
    assert!(built.diagnostics.iter().any(|d| d.file == "Odd.mj"));
    assert_eq!(nodes_of(&built.project, "TypeDeclaration").len(), 2);
}

#[test]
fn random_corpus_parses_cleanly() {
    let corpus = bundled::random_corpus(11, 30);
    let built = build_project("r", &corpus).unwrap();
    assert!(built.files_skipped.is_empty(), "{:?}", built.diagnostics);
    assert_eq!(built.project.roots().len(), 30);
}
