//! Properties files, the tag-sheet generator and CSV collation.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use super::{io_err, RunnerError};
use crate::engine::Value;

/// Name of the collated output under the results directory.
pub const COLLATED_CSV: &str = "craql_output.csv";
/// Tag sheet read by [`generate_props`] from the properties directory.
pub const TAGS_CSV: &str = "projecttags.csv";

/// Parses `key=value` lines. Integers in canonical form become numbers,
/// `true`/`false` booleans, anything else a string. Blank lines and `#`
/// comments are ignored; malformed lines are returned as warnings.
pub fn parse_properties(text: &str) -> (BTreeMap<String, Value>, Vec<String>) {
    let mut vars = BTreeMap::new();
    let mut warnings = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            warnings.push(format!("line {}: expected key=value, got {line:?}", i + 1));
            continue;
        };
        let key = k.trim();
        if key.is_empty() {
            warnings.push(format!("line {}: empty key", i + 1));
            continue;
        }
        vars.insert(key.to_string(), typed_value(v));
    }
    (vars, warnings)
}

fn typed_value(v: &str) -> Value {
    match v {
        "true" => Value::Bool(true),
        "false" => Value::Bool(false),
        _ => match v.parse::<i64>() {
            // "007" or "+5" stay strings so they print back unchanged.
            Ok(n) if n.to_string() == v => Value::Number(n),
            _ => Value::Str(v.to_string()),
        },
    }
}

/// Seed variables for a project from `<dir>/<project>.properties`; a missing
/// file yields no variables.
pub fn load_properties(dir: &Path, project: &str) -> Result<BTreeMap<String, Value>, RunnerError> {
    let path = dir.join(format!("{project}.properties"));
    let text = match fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(BTreeMap::new()),
        Err(e) => return Err(io_err(&path)(e)),
    };
    let (vars, warnings) = parse_properties(&text);
    for w in warnings {
        log::warn!("{}: {w}", path.display());
    }
    Ok(vars)
}

fn read_vars(path: &Path) -> Result<BTreeMap<String, String>, RunnerError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    Ok(text
        .lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect())
}

/// Merges every `<project>.vars` in `results` into `craql_output.csv`: one row
/// per project (sorted), one column per variable name seen anywhere.
pub fn collate_csv(results: &Path) -> Result<PathBuf, RunnerError> {
    let mut files: Vec<PathBuf> = fs::read_dir(results)
        .map_err(io_err(results))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "vars"))
        .collect();
    if files.is_empty() {
        return Err(RunnerError::NoVarsFiles(results.to_path_buf()));
    }
    files.sort();
    let mut table = Vec::new();
    let mut columns = BTreeSet::new();
    for f in &files {
        let project = f.file_stem().unwrap().to_string_lossy().into_owned();
        let vars = read_vars(f)?;
        columns.extend(vars.keys().cloned());
        table.push((project, vars));
    }
    let out = results.join(COLLATED_CSV);
    let csv_err = |e: csv::Error| RunnerError::Csv {
        path: out.clone(),
        message: e.to_string(),
    };
    let mut w = csv::Writer::from_path(&out).map_err(csv_err)?;
    let header: Vec<&str> = std::iter::once("project")
        .chain(columns.iter().map(String::as_str))
        .collect();
    w.write_record(&header).map_err(csv_err)?;
    for (project, vars) in &table {
        let row: Vec<&str> = std::iter::once(project.as_str())
            .chain(columns.iter().map(|c| vars.get(c).map_or("", String::as_str)))
            .collect();
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(io_err(&out))?;
    Ok(out)
}

/// Writes `<dir>/<project>.properties` for every row of `<dir>/projecttags.csv`.
/// The first column names the project, the header names the properties, and
/// empty cells are omitted.
pub fn generate_props(dir: &Path) -> Result<Vec<PathBuf>, RunnerError> {
    let src = dir.join(TAGS_CSV);
    let csv_err = |e: csv::Error| RunnerError::Csv {
        path: src.clone(),
        message: e.to_string(),
    };
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(&src)
        .map_err(csv_err)?;
    let header: Vec<String> = rdr.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    let mut seen = BTreeSet::new();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let Some(project) = rec.get(0).map(str::trim).filter(|p| !p.is_empty()) else {
            continue;
        };
        if !seen.insert(project.to_string()) {
            return Err(RunnerError::DuplicateProject {
                path: src.clone(),
                project: project.to_string(),
            });
        }
        let mut body = String::new();
        for (key, cell) in header.iter().zip(rec.iter()).skip(1) {
            if !cell.is_empty() {
                body.push_str(&format!("{}={cell}\n", key.trim()));
            }
        }
        rows.push((project.to_string(), body));
    }
    let mut written = Vec::new();
    for (project, body) in rows {
        let path = dir.join(format!("{project}.properties"));
        fs::write(&path, body).map_err(io_err(&path))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn property_values_are_typed() {
        let (vars, warnings) = parse_properties("platform=android\nstars=1200\nnovalue\nflag=true\nzip=007\n");
        assert_eq!(vars["platform"], Value::from("android"));
        assert_eq!(vars["stars"], Value::Number(1200));
        assert_eq!(vars["flag"], Value::Bool(true));
        assert_eq!(vars["zip"], Value::from("007"));
        assert_eq!(warnings.len(), 1);
        assert!(!vars.contains_key("novalue"));
    }

    #[test]
    fn missing_properties_file_is_empty() {
        let dir = tempfile::tempdir().unwrap();
        assert!(load_properties(dir.path(), "nope").unwrap().is_empty());
    }

    #[test]
    fn collation_unions_columns() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("A.vars"), "x=1\n").unwrap();
        fs::write(dir.path().join("B.vars"), "y=2\nz=a,b\n").unwrap();
        let out = collate_csv(dir.path()).unwrap();
        assert_eq!(
            fs::read_to_string(out).unwrap(),
            "project,x,y,z\nA,1,,\nB,,2,\"a,b\"\n"
        );
    }

    #[test]
    fn collation_needs_input() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(collate_csv(dir.path()), Err(RunnerError::NoVarsFiles(_))));
    }

    #[test]
    fn tag_sheet_generates_sparse_files() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(
            dir.path().join(TAGS_CSV),
            "project,platform,stars\np1,android,10\np2,,20\np3,j2ee,\n",
        )
        .unwrap();
        let files = generate_props(dir.path()).unwrap();
        assert_eq!(files.len(), 3);
        assert_eq!(fs::read_to_string(dir.path().join("p2.properties")).unwrap(), "stars=20\n");
        assert_eq!(
            fs::read_to_string(dir.path().join("p1.properties")).unwrap(),
            "platform=android\nstars=10\n"
        );
    }

    #[test]
    fn duplicate_tag_rows_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join(TAGS_CSV), "project,a\np,1\np,2\n").unwrap();
        let err = generate_props(dir.path()).unwrap_err();
        assert!(err.to_string().contains("duplicate project p"));
    }
}
