//! Python bindings: build or load projects, run query documents, and drive
//! the batch runner.

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyTypeError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::IntoPyObjectExt;

use craql::ast::{deserialize_project, serialize_project, ProjectAst};
use craql::engine::{EngineConfig, Environment, Session, Value, DEFAULT_RECURSION_LIMIT};
use craql::minilang::{build_project, default_registry};
use craql::query::{parse_query_document, unparse, validate_against_schema};
use craql::{bundled, runner};

create_exception!(pycraql, CraqlError, PyException);

fn err(e: impl std::fmt::Display) -> PyErr {
    CraqlError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, project: &ProjectAst, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    match v {
        Value::Undefined => Ok(py.None().into_bound(py)),
        Value::Number(n) => n.into_bound_py_any(py),
        Value::Str(s) => s.into_bound_py_any(py),
        Value::Bool(b) => b.into_bound_py_any(py),
        Value::Node(_) => v.export_text(project).into_bound_py_any(py),
        Value::List(items) => {
            let out = PyList::empty(py);
            for &n in items {
                out.append(Value::Node(n).export_text(project))?;
            }
            Ok(out.into_any())
        }
    }
}

fn from_py(v: &Bound<'_, PyAny>) -> PyResult<Value> {
    // bool first: Python bools are also ints
    if let Ok(b) = v.extract::<bool>() {
        Ok(Value::Bool(b))
    } else if let Ok(n) = v.extract::<i64>() {
        Ok(Value::Number(n))
    } else if let Ok(s) = v.extract::<String>() {
        Ok(Value::Str(s))
    } else if v.is_none() {
        Ok(Value::Undefined)
    } else {
        Err(PyTypeError::new_err(format!(
            "seed variables must be int, bool, str or None, got {}",
            v.get_type().name()?
        )))
    }
}

/// A parsed and bound project.
#[pyclass(frozen, module = "pycraql")]
struct Project {
    inner: ProjectAst,
    diagnostics: Vec<String>,
}

#[pymethods]
impl Project {
    /// Parse and bind MiniLang sources given as (file name, text) pairs.
    #[staticmethod]
    #[pyo3(signature = (sources, name = "project"))]
    fn from_sources(py: Python<'_>, sources: Vec<(String, String)>, name: &str) -> PyResult<Self> {
        let built = py.detach(|| build_project(name, &sources)).map_err(err)?;
        Ok(Project {
            diagnostics: built.diagnostics.iter().map(|d| d.to_string()).collect(),
            inner: built.project,
        })
    }

    /// Load a tree written by `to_ast_json` or an external front end.
    #[staticmethod]
    fn from_ast_json(text: &str) -> PyResult<Self> {
        let inner = deserialize_project(text, &default_registry()).map_err(err)?;
        Ok(Project {
            inner,
            diagnostics: Vec::new(),
        })
    }

    /// Load a project directory the way the batch runner does.
    #[staticmethod]
    fn load(py: Python<'_>, name: &str, dir: PathBuf) -> PyResult<Self> {
        let loaded = py.detach(|| runner::load_project(name, &dir)).map_err(err)?;
        Ok(Project {
            inner: loaded.ast,
            diagnostics: loaded.diagnostics,
        })
    }

    fn to_ast_json(&self) -> String {
        serialize_project(&self.inner)
    }

    #[getter]
    fn name(&self) -> &str {
        self.inner.name()
    }

    #[getter]
    fn files(&self) -> Vec<String> {
        self.inner.roots().iter().map(|&r| self.inner.file_name(r).to_string()).collect()
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    #[getter]
    fn diagnostics(&self) -> Vec<String> {
        self.diagnostics.clone()
    }

    /// Run a query document; `variables` seeds the environment.
    #[pyo3(signature = (query, variables = None, recursion_limit = DEFAULT_RECURSION_LIMIT))]
    fn run(
        &self,
        py: Python<'_>,
        query: &str,
        variables: Option<HashMap<String, Bound<'_, PyAny>>>,
        recursion_limit: usize,
    ) -> PyResult<RunResult> {
        let doc = parse_query_document("<query>", query).map_err(err)?;
        let mut seed = BTreeMap::new();
        for (k, v) in variables.unwrap_or_default() {
            seed.insert(k, from_py(&v)?);
        }
        let config = EngineConfig {
            recursion_limit,
            ..EngineConfig::default()
        };
        let project = &self.inner;
        let (env, output) = py
            .detach(|| {
                let mut s = Session::new(project, Environment::with_vars(seed), config);
                s.run(&doc)?;
                let out = s.take_output();
                Ok::<_, craql::engine::RuntimeError>((s.into_env(), out))
            })
            .map_err(err)?;
        let vars = PyDict::new(py);
        let mut exported = BTreeMap::new();
        for (k, v) in env.exported() {
            vars.set_item(k, to_py(py, project, v)?)?;
            exported.insert(k.clone(), v.export_text(project));
        }
        Ok(RunResult {
            variables: vars.unbind(),
            exported,
            prints: output.prints,
            rows: output
                .rows
                .into_iter()
                .map(|r| (r.file, r.line, r.node_type, r.text))
                .collect(),
            degraded: output.degraded,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Project(name={:?}, files={}, nodes={})",
            self.inner.name(),
            self.inner.roots().len(),
            self.inner.node_count()
        )
    }
}

/// Outcome of `Project.run`.
#[pyclass(frozen, get_all, module = "pycraql")]
struct RunResult {
    /// Exported variables as Python values; nodes become `Type@file:line`.
    variables: Py<PyDict>,
    /// Exported variables as written to `.vars` files.
    exported: BTreeMap<String, String>,
    prints: Vec<String>,
    /// (file, line, node type, source text) per row of each top-level select.
    rows: Vec<(String, u32, String, String)>,
    degraded: bool,
}

#[pymethods]
impl RunResult {
    fn __repr__(&self) -> String {
        format!(
            "RunResult(variables={}, prints={}, rows={})",
            self.exported.len(),
            self.prints.len(),
            self.rows.len()
        )
    }
}

/// One project of a batch run.
#[pyclass(frozen, get_all, module = "pycraql")]
struct ProjectRecord {
    project: String,
    aborted: bool,
    variables: BTreeMap<String, String>,
    row_counts: Vec<(String, usize)>,
    diagnostics: Vec<String>,
    files_parsed: u64,
    nodes_visited: u64,
}

/// Parse a query document and return its canonical text.
#[pyfunction]
fn format_query(text: &str) -> PyResult<String> {
    let doc = parse_query_document("<query>", text).map_err(err)?;
    Ok(unparse(&doc))
}

/// Schema warnings for a query document, as (line, message) pairs.
#[pyfunction]
fn lint_query(text: &str) -> PyResult<Vec<(u32, String)>> {
    let doc = parse_query_document("<query>", text).map_err(err)?;
    Ok(validate_against_schema(&doc, &craql::minilang::minilang_schema())
        .into_iter()
        .map(|w| (w.line, w.message))
        .collect())
}

/// Run every listed query over every listed project under `root`.
#[pyfunction]
#[pyo3(signature = (root, projects, queries, jobs = 1, recursion_limit = DEFAULT_RECURSION_LIMIT))]
fn run_batch(
    py: Python<'_>,
    root: PathBuf,
    projects: PathBuf,
    queries: PathBuf,
    jobs: usize,
    recursion_limit: usize,
) -> PyResult<Vec<ProjectRecord>> {
    let mut config = runner::RunConfig::new(root, projects, queries);
    config.jobs = jobs;
    config.recursion_limit = recursion_limit;
    let report = py.detach(|| runner::run_batch(&config)).map_err(err)?;
    Ok(report
        .records
        .into_iter()
        .map(|r| ProjectRecord {
            project: r.project,
            aborted: r.aborted,
            variables: r.variables,
            row_counts: r.row_counts,
            diagnostics: r.diagnostics,
            files_parsed: r.stats.files_parsed,
            nodes_visited: r.stats.nodes_visited,
        })
        .collect())
}

/// Merge `<results>/*.vars` into the collated CSV; returns its path.
#[pyfunction]
fn collate(results: PathBuf) -> PyResult<PathBuf> {
    runner::collate_csv(&results).map_err(err)
}

/// Write one properties file per row of `<dir>/projecttags.csv`.
#[pyfunction]
fn genprops(dir: PathBuf) -> PyResult<Vec<PathBuf>> {
    runner::generate_props(&dir).map_err(err)
}

/// The shipped example queries as (name, text) pairs.
#[pyfunction]
fn bundled_queries() -> Vec<(&'static str, &'static str)> {
    bundled::QUERIES.iter().map(|q| (q.name, q.text)).collect()
}

/// The shipped MiniLang fixtures as (file name, text) pairs.
#[pyfunction]
fn bundled_fixtures() -> Vec<(&'static str, &'static str)> {
    bundled::FIXTURES.iter().map(|f| (f.file, f.text)).collect()
}

#[pymodule]
fn pycraql(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("CraqlError", m.py().get_type::<CraqlError>())?;
    m.add_class::<Project>()?;
    m.add_class::<RunResult>()?;
    m.add_class::<ProjectRecord>()?;
    m.add_function(wrap_pyfunction!(format_query, m)?)?;
    m.add_function(wrap_pyfunction!(lint_query, m)?)?;
    m.add_function(wrap_pyfunction!(run_batch, m)?)?;
    m.add_function(wrap_pyfunction!(collate, m)?)?;
    m.add_function(wrap_pyfunction!(genprops, m)?)?;
    m.add_function(wrap_pyfunction!(bundled_queries, m)?)?;
    m.add_function(wrap_pyfunction!(bundled_fixtures, m)?)?;
    Ok(())
}
