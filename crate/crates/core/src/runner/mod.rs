//! Batch execution of query lists over project lists.
//!
//! Layout under the root directory:
//!
//! ```text
//! projects/<name>/...      MiniLang sources, or <name>.ast.json
//! queries/<file>.craql
//! properties/<name>.properties, properties/projecttags.csv
//! results/<name>.vars, results/<name>.<query>.rows, results/<name>.<query>.out
//! ```

mod props;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

pub use props::{collate_csv, generate_props, load_properties, parse_properties, COLLATED_CSV, TAGS_CSV};

use crate::ast::{deserialize_project, AstError, ProjectAst};
use crate::engine::{EngineConfig, Environment, ExecutionStats, Session, DEFAULT_RECURSION_LIMIT};
use crate::minilang::{build_project, default_registry, SOURCE_EXTENSION};
use crate::query::{parse_query_document, validate_against_schema, QueryDocument, QueryError};

#[derive(Debug, thiserror::Error)]
pub enum RunnerError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: directory not found")]
    MissingDir { path: PathBuf },
    #[error("{path}: list is empty")]
    EmptyList { path: PathBuf },
    #[error("{file}: {error}")]
    Query { file: String, error: QueryError },
    #[error("{0}: no .vars files to collate")]
    NoVarsFiles(PathBuf),
    #[error("{path}: duplicate project {project}")]
    DuplicateProject { path: PathBuf, project: String },
    #[error("{path}: {message}")]
    Csv { path: PathBuf, message: String },
}

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunnerError + '_ {
    move |source| RunnerError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub root: PathBuf,
    pub project_list: PathBuf,
    pub query_list: PathBuf,
    pub recursion_limit: usize,
    /// Projects evaluated concurrently.
    pub jobs: usize,
}

impl RunConfig {
    pub fn new(root: impl Into<PathBuf>, project_list: impl Into<PathBuf>, query_list: impl Into<PathBuf>) -> Self {
        RunConfig {
            root: root.into(),
            project_list: project_list.into(),
            query_list: query_list.into(),
            recursion_limit: DEFAULT_RECURSION_LIMIT,
            jobs: 1,
        }
    }

    pub fn projects_dir(&self) -> PathBuf {
        self.root.join("projects")
    }

    pub fn queries_dir(&self) -> PathBuf {
        self.root.join("queries")
    }

    pub fn properties_dir(&self) -> PathBuf {
        self.root.join("properties")
    }

    pub fn results_dir(&self) -> PathBuf {
        self.root.join("results")
    }

    /// A list path is taken as given if it exists, else relative to the root.
    fn list_path(&self, p: &Path) -> PathBuf {
        if p.exists() || p.is_absolute() {
            p.to_path_buf()
        } else {
            self.root.join(p)
        }
    }
}

/// Outcome of one project.
#[derive(Clone, Debug, Default)]
pub struct ProjectRunRecord {
    pub project: String,
    /// Exported variables as written to `.vars`.
    pub variables: BTreeMap<String, String>,
    /// (query name, rows written), in list order.
    pub row_counts: Vec<(String, usize)>,
    pub diagnostics: Vec<String>,
    pub stats: ExecutionStats,
    pub aborted: bool,
}

#[derive(Clone, Debug, Default)]
pub struct BatchReport {
    pub records: Vec<ProjectRunRecord>,
}

impl BatchReport {
    pub fn failed(&self) -> impl Iterator<Item = &ProjectRunRecord> {
        self.records.iter().filter(|r| r.aborted)
    }

    /// 0 when every project completed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        i32::from(self.failed().next().is_some())
    }
}

/// Reads a list file: one entry per line, `#` starts a comment.
pub fn read_list(path: &Path) -> Result<Vec<String>, RunnerError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let items: Vec<String> = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect();
    if items.is_empty() {
        return Err(RunnerError::EmptyList {
            path: path.to_path_buf(),
        });
    }
    Ok(items)
}

/// A parsed entry of the query list.
#[derive(Clone, Debug)]
pub struct LoadedQuery {
    /// File stem, used in `.rows` file names.
    pub name: String,
    pub doc: QueryDocument,
}

/// Query names resolve under the queries directory; `.craql` may be omitted.
pub fn load_queries(dir: &Path, names: &[String]) -> Result<Vec<LoadedQuery>, RunnerError> {
    let schema = crate::minilang::minilang_schema();
    names
        .iter()
        .map(|n| {
            let mut path = dir.join(n);
            if !path.exists() && path.extension().is_none() {
                path.set_extension(crate::query::QUERY_EXTENSION);
            }
            let text = fs::read_to_string(&path).map_err(io_err(&path))?;
            let file = path.file_name().unwrap().to_string_lossy().into_owned();
            let doc = parse_query_document(&file, &text).map_err(|error| RunnerError::Query {
                file: file.clone(),
                error,
            })?;
            for w in validate_against_schema(&doc, &schema) {
                log::warn!("{file}: {w}");
            }
            let name = path.file_stem().unwrap().to_string_lossy().into_owned();
            Ok(LoadedQuery { name, doc })
        })
        .collect()
}

/// A project ready for querying.
#[derive(Debug)]
pub struct LoadedProject {
    pub ast: ProjectAst,
    pub files_parsed: usize,
    pub diagnostics: Vec<String>,
}

fn collect_sources(dir: &Path, base: &Path, out: &mut Vec<(String, String)>) -> Result<(), RunnerError> {
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()
        .map_err(io_err(dir))?;
    entries.sort();
    for p in entries {
        if p.is_dir() {
            collect_sources(&p, base, out)?;
        } else if p.extension().is_some_and(|e| e == SOURCE_EXTENSION) {
            let text = fs::read_to_string(&p).map_err(io_err(&p))?;
            let rel = p.strip_prefix(base).unwrap_or(&p);
            let name = rel
                .components()
                .map(|c| c.as_os_str().to_string_lossy())
                .collect::<Vec<_>>()
                .join("/");
            out.push((name, text));
        }
    }
    Ok(())
}

/// Loads `<dir>/<name>.ast.json` if present, else parses and binds every
/// `.mj` file below `dir`.
pub fn load_project(name: &str, dir: &Path) -> Result<LoadedProject, String> {
    let ast_file = dir.join(format!("{name}.ast.json"));
    if ast_file.is_file() {
        let text = fs::read_to_string(&ast_file).map_err(|e| format!("{}: {e}", ast_file.display()))?;
        let ast = deserialize_project(&text, &default_registry())
            .map_err(|e: AstError| format!("{}: {e}", ast_file.display()))?;
        let files_parsed = ast.files().len();
        return Ok(LoadedProject {
            ast,
            files_parsed,
            diagnostics: Vec::new(),
        });
    }
    let mut sources = Vec::new();
    collect_sources(dir, dir, &mut sources).map_err(|e| e.to_string())?;
    let built = build_project(name, &sources).map_err(|e| format!("{name}: {e}"))?;
    Ok(LoadedProject {
        files_parsed: built.files_parsed,
        diagnostics: built.diagnostics.iter().map(|d| d.to_string()).collect(),
        ast: built.project,
    })
}

/// Runs every query over every project, writing per-project results.
pub fn run_batch(config: &RunConfig) -> Result<BatchReport, RunnerError> {
    for dir in [config.projects_dir(), config.queries_dir()] {
        if !dir.is_dir() {
            return Err(RunnerError::MissingDir { path: dir });
        }
    }
    let results = config.results_dir();
    fs::create_dir_all(&results).map_err(io_err(&results))?;
    let projects = read_list(&config.list_path(&config.project_list))?;
    let query_names = read_list(&config.list_path(&config.query_list))?;
    // Every query must parse before any project runs.
    let queries = load_queries(&config.queries_dir(), &query_names)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.max(1))
        .build()
        .expect("thread pool");
    let records = pool.install(|| {
        projects
            .par_iter()
            .map(|p| run_project(config, p, &queries))
            .collect::<Vec<_>>()
    });
    Ok(BatchReport { records })
}

/// Runs the queries on one project and writes its result files.
pub fn run_project(config: &RunConfig, project: &str, queries: &[LoadedQuery]) -> ProjectRunRecord {
    let mut rec = ProjectRunRecord {
        project: project.to_string(),
        ..Default::default()
    };
    let fail = |mut rec: ProjectRunRecord, msg: String| {
        log::error!("{msg}");
        rec.diagnostics.push(msg);
        rec.aborted = true;
        rec
    };
    let dir = config.projects_dir().join(project);
    if !dir.is_dir() {
        return fail(rec, format!("{}: project directory not found", dir.display()));
    }
    let loaded = match load_project(project, &dir) {
        Ok(l) => l,
        Err(e) => return fail(rec, e),
    };
    for d in &loaded.diagnostics {
        log::warn!("{project}: {d}");
    }
    rec.diagnostics.extend(loaded.diagnostics.iter().cloned());

    let seed = match load_properties(&config.properties_dir(), project) {
        Ok(s) => s,
        Err(e) => return fail(rec, e.to_string()),
    };
    let engine = EngineConfig {
        recursion_limit: config.recursion_limit,
        ..EngineConfig::default()
    };
    rec.stats.files_parsed = loaded.files_parsed as u64;
    let mut session = Session::new(&loaded.ast, Environment::with_vars(seed), engine);
    let results = config.results_dir();
    for q in queries {
        let outcome = session.run(&q.doc);
        let out = session.take_output();
        let rows: String = out.rows.iter().map(|r| r.to_tsv() + "\n").collect();
        let prints: String = out.prints.iter().map(|p| p.clone() + "\n").collect();
        for (ext, body) in [("rows", rows), ("out", prints)] {
            let path = results.join(format!("{project}.{}.{ext}", q.name));
            if let Err(e) = fs::write(&path, body) {
                return fail(rec, format!("{}: {e}", path.display()));
            }
        }
        if out.degraded {
            rec.diagnostics
                .push(format!("{}: source text unavailable; placeholders emitted", q.name));
        }
        rec.row_counts.push((q.name.clone(), out.rows.len()));
        if let Err(e) = outcome {
            rec.stats.add(&session.stats());
            return fail(rec, format!("{project}: {e}"));
        }
    }
    rec.stats.add(&session.stats());

    let env = session.env();
    let mut vars = String::new();
    for (k, v) in env.exported() {
        let text = v.export_text(&loaded.ast);
        vars.push_str(&format!("{k}={text}\n"));
        rec.variables.insert(k.clone(), text);
    }
    let path = results.join(format!("{project}.vars"));
    if let Err(e) = fs::write(&path, vars) {
        return fail(rec, format!("{}: {e}", path.display()));
    }
    rec
}
