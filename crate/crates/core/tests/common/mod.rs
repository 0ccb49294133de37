#![allow(dead_code)]

pub mod expected;
pub mod laws;

use std::collections::BTreeMap;

use craql::ast::{NodeId, ProjectAst};
use craql::bundled;
use craql::engine::{EngineConfig, Environment, Output, Session};
use craql::minilang::build_project;
use craql::query::{parse_query_document, QueryDocument};

pub fn build(sources: Vec<(String, String)>) -> ProjectAst {
    let built = build_project("test", &sources).expect("project builds");
    assert!(built.files_skipped.is_empty(), "{:?}", built.diagnostics);
    built.project
}

/// Project made of shipped fixtures.
pub fn fixtures(files: &[&str]) -> ProjectAst {
    build(
        files
            .iter()
            .map(|f| {
                let fx = bundled::fixture(f).unwrap_or_else(|| panic!("no fixture {f}"));
                (fx.file.to_string(), fx.text.to_string())
            })
            .collect(),
    )
}

pub fn source(file: &str, text: &str) -> ProjectAst {
    build(vec![(file.to_string(), text.to_string())])
}

pub fn doc(text: &str) -> QueryDocument {
    parse_query_document("test.craql", text).unwrap_or_else(|e| panic!("{e}\n{text}"))
}

pub fn bundled_doc(name: &str) -> QueryDocument {
    let q = bundled::query(name).unwrap_or_else(|| panic!("no query {name}"));
    parse_query_document(q.name, q.text).unwrap()
}

pub struct Run {
    pub vars: BTreeMap<String, String>,
    pub output: Output,
}

pub fn run_doc(d: &QueryDocument, p: &ProjectAst) -> Run {
    let mut s = Session::new(p, Environment::new(), EngineConfig::default());
    s.run(d).unwrap_or_else(|e| panic!("{e}"));
    let vars = s
        .env()
        .exported()
        .map(|(k, v)| (k.clone(), v.export_text(p)))
        .collect();
    Run {
        vars,
        output: s.take_output(),
    }
}

pub fn run_query(name: &str, p: &ProjectAst) -> Run {
    run_doc(&bundled_doc(name), p)
}

pub fn vars(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

/// Every node of a type, in pre-order.
pub fn nodes_of(p: &ProjectAst, ty: &str) -> Vec<NodeId> {
    let t = p.schema().type_id(ty).unwrap();
    p.roots()
        .iter()
        .flat_map(|&r| p.descendants_preorder(r))
        .filter(|&n| p.node_is(n, t))
        .collect()
}

/// The node of `ty` whose source text starts with `prefix`.
pub fn find(p: &ProjectAst, ty: &str, prefix: &str) -> NodeId {
    let hits: Vec<NodeId> = nodes_of(p, ty)
        .into_iter()
        .filter(|&n| p.source_text(n).text.starts_with(prefix))
        .collect();
    assert_eq!(hits.len(), 1, "{ty} starting with {prefix:?}: {hits:?}");
    hits[0]
}

/// A scratch batch root with projects/, queries/, properties/ and results/.
pub struct Workspace {
    pub dir: tempfile::TempDir,
}

impl Workspace {
    pub fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        for sub in ["projects", "queries", "properties"] {
            std::fs::create_dir_all(dir.path().join(sub)).unwrap();
        }
        Workspace { dir }
    }

    pub fn root(&self) -> &std::path::Path {
        self.dir.path()
    }

    pub fn write(&self, rel: &str, text: &str) {
        let p = self.root().join(rel);
        std::fs::create_dir_all(p.parent().unwrap()).unwrap();
        std::fs::write(p, text).unwrap();
    }

    pub fn project(&self, name: &str, files: &[(&str, &str)]) {
        std::fs::create_dir_all(self.root().join("projects").join(name)).unwrap();
        for (f, text) in files {
            self.write(&format!("projects/{name}/{f}"), text);
        }
    }

    pub fn fixture_project(&self, name: &str, fixture_files: &[&str]) {
        let files: Vec<(&str, &str)> = fixture_files
            .iter()
            .map(|f| {
                let fx = bundled::fixture(f).unwrap();
                (fx.file, fx.text)
            })
            .collect();
        self.project(name, &files);
    }

    pub fn bundled_queries(&self, names: &[&str]) {
        for n in names {
            self.write(&format!("queries/{n}.craql"), bundled::query(n).unwrap().text);
        }
    }

    pub fn list(&self, name: &str, items: &[&str]) -> std::path::PathBuf {
        let body: String = items.iter().map(|i| format!("{i}\n")).collect();
        self.write(name, &body);
        self.root().join(name)
    }

    pub fn read(&self, rel: &str) -> String {
        std::fs::read_to_string(self.root().join(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
    }

    /// File names under results/, sorted.
    pub fn results(&self) -> Vec<String> {
        let mut v: Vec<String> = std::fs::read_dir(self.root().join("results"))
            .map(|d| d.map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect())
            .unwrap_or_default();
        v.sort();
        v
    }

    pub fn config(&self, projects: &[&str], queries: &[&str]) -> craql::runner::RunConfig {
        let p = self.list("projects.txt", projects);
        let q = self.list("queries.txt", queries);
        craql::runner::RunConfig::new(self.root(), p, q)
    }
}
