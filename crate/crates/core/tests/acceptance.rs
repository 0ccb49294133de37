//! Acceptance checks: one PASS/FAIL line per criterion; exits non-zero if any fail.

mod common;

use std::time::{Duration, Instant};

use common::expected;
use common::laws::{agrees, check_laws, check_pairs, single, TYPES};
use common::*;
use craql::bundled::{self, QUERIES};
use craql::engine::{select_rows, EngineConfig, Environment, InputRoots, Session};
use craql::oracle::OracleObserver;
use craql::query::Modifier;
use craql::runner::{collate_csv, generate_props, run_batch};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

/// Every shipped query on every fixture matches its worked-out result, in under 10 s.
fn query_suite() -> Outcome {
    let start = Instant::now();
    for (fixture, table) in expected::ALL {
        expected::check(fixture, table)?;
    }
    let deep = source("Deep.mj", &bundled::nested_blocks(10));
    let r = run_query("deepest_block", &deep);
    ensure!(
        r.vars == vars(&[("block_depth", "9"), ("deepest_block_depth", "9")]),
        "deepest_block on nested blocks: {:?}",
        r.vars
    );
    let many = source("Many.mj", &bundled::many_blocks(250));
    let r = run_query("count_limit", &many);
    ensure!(r.output.rows.len() == 100, "count_limit kept {} rows", r.output.rows.len());
    ensure!(r.output.prints == vec!["100"; 100], "count_limit prints {:?}", &r.output.prints[..3]);
    let took = start.elapsed();
    ensure!(took < Duration::from_secs(10), "took {took:?}");
    Ok(format!("{} queries x {} fixtures in {took:.2?}", QUERIES.len(), expected::ALL.len() + 2))
}

/// The unreachable-code query stays within 15 lines and 418 characters.
fn compactness() -> Outcome {
    let body = bundled::strip_header_comment(bundled::query("unreachable").unwrap().text);
    let lines = body.lines().filter(|l| !l.trim().is_empty()).count();
    let chars = body.chars().count();
    ensure!(lines <= 15 && chars <= 418, "{lines} lines, {chars} chars");
    Ok(format!("{lines} lines, {chars} chars"))
}

/// Every select the engine runs agrees with the brute-force oracle.
fn oracle_equivalence() -> Outcome {
    let mut projects: Vec<(String, craql::ast::ProjectAst)> = bundled::FIXTURES
        .iter()
        .map(|f| (f.file.to_string(), fixtures(&[f.file])))
        .collect();
    projects.push(("nested".into(), source("Deep.mj", &bundled::nested_blocks(10))));
    projects.push(("random".into(), build(bundled::random_corpus(42, 25))));
    let mut checked = 0;
    for (name, p) in &projects {
        for q in QUERIES {
            let mut obs = OracleObserver::default();
            let mut s = Session::new(p, Environment::new(), EngineConfig::default());
            s.run_observed(&bundled_doc(q.name), Some(&mut obs))
                .map_err(|e| format!("{} on {name}: {e}", q.name))?;
            ensure!(obs.failures.is_empty(), "{} on {name}: {:?}", q.name, obs.failures);
            checked += obs.checked;
        }
    }
    Ok(format!("{checked} select executions agree"))
}

/// Modifier and pair laws hold on a random corpus of at least 100 files.
fn modifier_laws() -> Outcome {
    let p = build(bundled::random_corpus(2024, 100));
    ensure!(p.roots().len() >= 100, "only {} files", p.roots().len());
    for ty in TYPES {
        check_laws(&p, ty)?;
    }
    for a in &TYPES[..4] {
        for b in TYPES {
            check_pairs(&p, a, b)?;
        }
    }
    Ok(format!("{} files, {} node types", p.roots().len(), TYPES.len()))
}

/// `outmost ... directly in` a method body visits fewer nodes than a plain select.
fn pruning_effectiveness() -> Outcome {
    let mut report = Vec::new();
    for (p, prefix) in [
        (source("Deep.mj", &bundled::nested_blocks(10)), "void m"),
        (fixtures(&["Sample.mj"]), "void greet"),
        (fixtures(&["Unreachable.mj"]), "void afterBreak"),
    ] {
        let m = find(&p, "MethodDeclaration", prefix);
        let body = *p.children(m).last().unwrap();
        let pat = single("Statement");
        let run = |md, input: &InputRoots| {
            select_rows(&p, &pat, md, input, &mut |_, _| Ok(true)).unwrap().stats.nodes_visited
        };
        let pruned_input = InputRoots::DirectlyIn(vec![body]);
        agrees(&p, &pat, Modifier::Outmost, &pruned_input)?;
        let pruned = run(Modifier::Outmost, &pruned_input);
        let plain = run(Modifier::None, &InputRoots::In(vec![body]));
        ensure!(pruned < plain, "{prefix}: pruned visited {pruned}, plain {plain}");
        report.push(format!("{pruned}<{plain}"));
    }
    Ok(format!("nodes visited {}", report.join(", ")))
}

/// Sources are parsed once per project no matter how many queries run.
fn parse_once() -> Outcome {
    let ws = Workspace::new();
    ws.project("corpus", &[]);
    for (name, text) in bundled::random_corpus(3, 20) {
        ws.write(&format!("projects/corpus/{name}"), &text);
    }
    ws.bundled_queries(&["pruning"]);
    let one = run_batch(&ws.config(&["corpus"], &["pruning"])).map_err(|e| e.to_string())?;
    let many = run_batch(&ws.config(&["corpus"], &vec!["pruning"; 50])).map_err(|e| e.to_string())?;
    let (a, b) = (one.records[0].stats.files_parsed, many.records[0].stats.files_parsed);
    ensure!(a == 20 && b == 20, "files parsed: {a} with 1 query, {b} with 50");
    Ok(format!("{a} files parsed with 1 query and with 50"))
}

/// All shipped queries over a ~10k line corpus finish in under 60 s.
fn throughput() -> Outcome {
    let ws = Workspace::new();
    ws.project("big", &[]);
    let (mut lines, mut seed) = (0usize, 0u64);
    while lines < 10_000 {
        let text = bundled::random_file(seed);
        lines += text.lines().count();
        ws.write(&format!("projects/big/R{seed}.mj"), &text);
        seed += 1;
    }
    let names: Vec<&str> = QUERIES.iter().map(|q| q.name).collect();
    ws.bundled_queries(&names);
    let start = Instant::now();
    let report = run_batch(&ws.config(&["big"], &names)).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    ensure!(report.exit_code() == 0, "{:?}", report.records[0].diagnostics);
    ensure!(took < Duration::from_secs(60), "took {took:?}");
    Ok(format!("{lines} lines in {seed} files, {} queries in {took:.2?}", names.len()))
}

/// genprops -> run -> collate reproduces the seeded values, byte-identically across runs.
fn workflow_round_trip() -> Outcome {
    let once = || -> Result<String, String> {
        let ws = Workspace::new();
        ws.fixture_project("ab", &["AB.mj"]);
        ws.fixture_project("loops", &["Loops.mj"]);
        ws.write(
            "properties/projecttags.csv",
            "project,domain,stars\nloops,\"cli, tools\",007\nab,web,12\n",
        );
        ws.bundled_queries(&["for_depth", "method_bindings"]);
        generate_props(&ws.root().join("properties")).map_err(|e| e.to_string())?;
        let mut cfg = ws.config(&["loops", "ab"], &["for_depth", "method_bindings"]);
        cfg.jobs = 2;
        run_batch(&cfg).map_err(|e| e.to_string())?;
        let csv = collate_csv(&ws.root().join("results")).map_err(|e| e.to_string())?;
        std::fs::read_to_string(csv).map_err(|e| e.to_string())
    };
    let (a, b) = (once()?, once()?);
    let want = "project,bound_calls,domain,nested_for_count,stars\n\
                ab,2,web,,12\n\
                loops,,\"cli, tools\",3,007\n";
    ensure!(a == want, "collated csv:\n{a}");
    ensure!(a == b, "runs differ");
    Ok("2 projects, seeded tags preserved, identical bytes".into())
}

/// Calls on the two-class fixture bind to the right declarations.
fn binding_correctness() -> Outcome {
    let p = fixtures(&["AB.mj"]);
    let run = find(&p, "MethodDeclaration", "int run()");
    let helper = find(&p, "MethodDeclaration", "int helper()");
    let b_run = find(&p, "MethodInvocation", "b.run()");
    let call_helper = find(&p, "MethodInvocation", "helper()");
    ensure!(p.bindings().method.get(&b_run) == Some(&run), "b.run() misbound");
    ensure!(p.bindings().method.get(&call_helper) == Some(&helper), "helper() misbound");

    let text = bundled::query("in_out_calls").unwrap().text;
    let close = text.rfind('}').unwrap();
    let per_class = format!(
        "{}  print(t.name + \" out=\" + num_outgoing + \" in=\" + num_incoming);\n}}\n",
        &text[..close]
    );
    let r = run_doc(&doc(&per_class), &p);
    ensure!(r.output.prints == ["A out=1 in=0", "B out=0 in=1"], "{:?}", r.output.prints);
    let r = run_query("method_bindings", &p);
    ensure!(r.vars == vars(&[("bound_calls", "2")]), "{:?}", r.vars);
    Ok("A out=1 in=0, B out=0 in=1, 2 bound calls".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("query suite", query_suite),
        ("query compactness", compactness),
        ("oracle equivalence", oracle_equivalence),
        ("modifier laws", modifier_laws),
        ("pruning effectiveness", pruning_effectiveness),
        ("parse once", parse_once),
        ("throughput", throughput),
        ("workflow round trip", workflow_round_trip),
        ("binding correctness", binding_correctness),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
