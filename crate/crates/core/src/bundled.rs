//! Queries and MiniLang fixtures shipped with the crate, plus seeded
//! generators for synthetic fixtures.

use std::fmt::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A query file shipped under `queries/`.
#[derive(Clone, Copy, Debug)]
pub struct BundledQuery {
    pub name: &'static str,
    pub text: &'static str,
}

macro_rules! queries {
    ($($name:literal),* $(,)?) => {
        &[$(BundledQuery {
            name: $name,
            text: include_str!(concat!("../queries/", $name, ".craql")),
        }),*]
    };
}

pub const QUERIES: &[BundledQuery] = queries![
    "blocktop_decls",
    "catch_throw",
    "nested_types",
    "isparent_pairs",
    "getters",
    "for_depth",
    "method_bindings",
    "type_bindings",
    "in_out_calls",
    "pruning",
    "unreachable",
    "recursion",
    "deepest_block",
    "count_limit",
    "call_chain",
];

pub fn query(name: &str) -> Option<&'static BundledQuery> {
    QUERIES.iter().find(|q| q.name == name)
}

/// A MiniLang fixture shipped under `fixtures/`.
#[derive(Clone, Copy, Debug)]
pub struct Fixture {
    pub file: &'static str,
    pub text: &'static str,
}

macro_rules! fixtures {
    ($($file:literal),* $(,)?) => {
        &[$(Fixture {
            file: $file,
            text: include_str!(concat!("../fixtures/", $file)),
        }),*]
    };
}

pub const FIXTURES: &[Fixture] = fixtures![
    "Sample.mj",
    "Fact.mj",
    "AB.mj",
    "Unreachable.mj",
    "Loops.mj",
    "Chain.mj",
];

pub fn fixture(file: &str) -> Option<&'static Fixture> {
    FIXTURES.iter().find(|f| f.file == file)
}

/// Text after the leading `//` comment lines (and blank lines after them).
pub fn strip_header_comment(text: &str) -> &str {
    let mut rest = text;
    while rest.starts_with("//") {
        rest = rest.split_once('\n').map_or("", |(_, r)| r);
    }
    rest.trim_start_matches(['\n', '\r'])
}

/// One method whose body holds `depth` blocks, each nested in the previous.
pub fn nested_blocks(depth: usize) -> String {
    let mut s = String::from("class Deep {\n    void m() ");
    for _ in 1..depth {
        s.push_str("{ ");
    }
    s.push_str("{ x = 1; }");
    for _ in 1..depth {
        s.push_str(" }");
    }
    s.push_str("\n}\n");
    s
}

/// `n` one-block methods.
pub fn many_blocks(n: usize) -> String {
    let mut s = String::from("class Many {\n");
    for i in 0..n {
        let _ = writeln!(s, "    void m{i}() {{ x = {i}; }}");
    }
    s.push_str("}\n");
    s
}

/// Deterministic pseudo-random MiniLang source file.
pub fn random_file(seed: u64) -> String {
    Gen {
        rng: ChaCha8Rng::seed_from_u64(seed),
        out: String::new(),
        locals: 0,
    }
    .file()
}

/// `count` random files named `R{i}.mj`.
pub fn random_corpus(seed: u64, count: usize) -> Vec<(String, String)> {
    (0..count)
        .map(|i| {
            let s = seed.wrapping_mul(1_000_003).wrapping_add(i as u64);
            (format!("R{i}.mj"), random_file(s))
        })
        .collect()
}

struct Gen {
    rng: ChaCha8Rng,
    out: String,
    locals: usize,
}

const TYPES: &[&str] = &["int", "boolean", "String", "Node"];
const CALLS: &[&str] = &["run", "step", "get", "log", "next"];

impl Gen {
    fn line(&mut self, depth: usize, text: &str) {
        for _ in 0..depth {
            self.out.push_str("    ");
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn file(mut self) -> String {
        let classes = self.rng.gen_range(1..=3);
        for c in 0..classes {
            let interface = self.rng.gen_bool(0.15);
            if interface {
                self.line(0, &format!("interface I{c} {{"));
                for m in 0..self.rng.gen_range(0..3) {
                    self.line(1, &format!("int sig{m}(int a);"));
                }
                self.line(0, "}");
                continue;
            }
            self.line(0, &format!("class C{c} {{"));
            for f in 0..self.rng.gen_range(0..3) {
                let ty = TYPES[self.rng.gen_range(0..TYPES.len())];
                self.line(1, &format!("{ty} f{f};"));
            }
            for m in 0..self.rng.gen_range(1..5) {
                let params = self.rng.gen_range(0..3);
                let ps: Vec<String> = (0..params).map(|p| format!("int p{p}")).collect();
                let name = CALLS[self.rng.gen_range(0..CALLS.len())];
                self.line(1, &format!("int {name}{m}({}) {{", ps.join(", ")));
                self.locals = 0;
                let n = self.rng.gen_range(1..5);
                for _ in 0..n {
                    self.stmt(2, 0, false);
                }
                self.line(1, "}");
            }
            self.line(0, "}");
        }
        self.out
    }

    fn expr(&mut self, depth: usize) -> String {
        let pick = if depth > 2 { 0 } else { self.rng.gen_range(0..7) };
        match pick {
            0 => self.rng.gen_range(0..100).to_string(),
            1 if self.locals > 0 => format!("v{}", self.rng.gen_range(0..self.locals)),
            2 => {
                let op = ["+", "-", "*", "<", "==", "&&"][self.rng.gen_range(0..6)];
                format!("{} {op} {}", self.expr(depth + 1), self.expr(depth + 1))
            }
            3 => {
                let name = CALLS[self.rng.gen_range(0..CALLS.len())];
                format!("{name}({})", self.expr(depth + 1))
            }
            4 => {
                let links = self.rng.gen_range(1..4);
                let mut s = String::from("a");
                for _ in 0..links {
                    let name = CALLS[self.rng.gen_range(0..CALLS.len())];
                    let _ = write!(s, ".{name}()");
                }
                s
            }
            5 => "\"s\"".to_string(),
            _ => "true".to_string(),
        }
    }

    fn block(&mut self, depth: usize, nest: usize, in_loop: bool) {
        let n = self.rng.gen_range(0..4);
        for _ in 0..n {
            self.stmt(depth, nest + 1, in_loop);
        }
    }

    fn stmt(&mut self, depth: usize, nest: usize, in_loop: bool) {
        let compound = nest < 4;
        let pick = self.rng.gen_range(0..if compound { 12 } else { 6 });
        match pick {
            0 | 1 => {
                let v = self.locals;
                self.locals += 1;
                let e = self.expr(0);
                self.line(depth, &format!("int v{v} = {e};"));
            }
            2 => {
                let e = self.expr(0);
                self.line(depth, &format!("{e};"));
            }
            3 if in_loop => {
                let kw = if self.rng.gen_bool(0.5) { "break;" } else { "continue;" };
                self.line(depth, kw);
            }
            3 | 4 => {
                let e = self.expr(0);
                self.line(depth, &format!("return {e};"));
            }
            5 => {
                let e = self.expr(1);
                self.line(depth, &format!("x = {e};"));
            }
            6 => {
                self.line(depth, "{");
                self.block(depth + 1, nest, in_loop);
                self.line(depth, "}");
            }
            7 => {
                let c = self.expr(1);
                self.line(depth, &format!("if ({c}) {{"));
                self.block(depth + 1, nest, in_loop);
                if self.rng.gen_bool(0.4) {
                    self.line(depth, "} else {");
                    self.block(depth + 1, nest, in_loop);
                }
                self.line(depth, "}");
            }
            8 => {
                let c = self.expr(1);
                self.line(depth, &format!("while ({c}) {{"));
                self.block(depth + 1, nest, true);
                self.line(depth, "}");
            }
            9 => {
                self.line(depth, "for (int k = 0; k < 3; k = k + 1) {");
                self.block(depth + 1, nest, true);
                self.line(depth, "}");
            }
            10 => {
                self.line(depth, "try {");
                self.block(depth + 1, nest, in_loop);
                self.line(depth, "} catch (Error e) {");
                if self.rng.gen_bool(0.5) {
                    self.line(depth + 1, "throw e;");
                } else {
                    self.block(depth + 1, nest, in_loop);
                }
                self.line(depth, "}");
            }
            _ => {
                let e = self.expr(0);
                self.line(depth, &format!("throw new Error({e});"));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minilang::parse_minilang;

    #[test]
    fn bundled_files_are_present() {
        assert_eq!(QUERIES.len(), 15);
        assert!(fixture("Sample.mj").unwrap().text.contains("getCount"));
        assert!(query("unreachable").is_some());
    }

    #[test]
    fn header_comment_is_stripped() {
        assert_eq!(strip_header_comment("// a\n// b\n\nselect"), "select");
        assert_eq!(strip_header_comment("select // x"), "select // x");
    }

    #[test]
    fn generated_files_parse_cleanly() {
        for seed in 0..40 {
            let text = random_file(seed);
            let pf = parse_minilang("R.mj", &text);
            assert!(pf.diagnostics.is_empty(), "seed {seed}: {:?}\n{text}", pf.diagnostics);
        }
        for text in [nested_blocks(10), many_blocks(250)] {
            assert!(parse_minilang("G.mj", &text).diagnostics.is_empty());
        }
    }

    #[test]
    fn generation_is_deterministic() {
        assert_eq!(random_file(7), random_file(7));
        assert_ne!(random_file(7), random_file(8));
    }
}
