//! JSON interchange format for project trees produced by external frontends.
//!
//! ```text
//! {"schema": .., "project": .., "files": [{"name", "text"?}],
//!  "nodes": [{"id", "type", "file", "span": [start, end, line], "props": {..}}],
//!  "roots": [..], "bindings"?: {"method": {..}, "type": {..}}}
//! ```
//!
//! A property value is a node id, a list of node ids, or `{"token": ".."}`.
//! Serialization is canonical, so serialize -> deserialize -> serialize is a
//! byte-level fixed point.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::schema::NodeTypeSchema;
use super::tree::{FileId, NodeId, ProjectAst, ProjectBuilder, PropValue, Span};
use super::AstError;

/// Schemas that ingested documents may name.
#[derive(Clone, Default)]
pub struct SchemaRegistry {
    schemas: HashMap<String, Arc<NodeTypeSchema>>,
}

impl SchemaRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, schema: Arc<NodeTypeSchema>) {
        self.schemas.insert(schema.name().to_string(), schema);
    }

    pub fn get(&self, name: &str) -> Option<&Arc<NodeTypeSchema>> {
        self.schemas.get(name)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    schema: String,
    project: String,
    files: Vec<FileRecord>,
    nodes: Vec<NodeRecord>,
    roots: Vec<u64>,
    #[serde(default)]
    bindings: BindingsRecord,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileRecord {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    text: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeRecord {
    id: u64,
    #[serde(rename = "type")]
    ty: String,
    file: usize,
    span: [u32; 3],
    props: BTreeMap<String, PropRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PropRecord {
    Child(u64),
    List(Vec<u64>),
    Token { token: String },
}

#[derive(Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct BindingsRecord {
    #[serde(default)]
    method: BTreeMap<u64, u64>,
    #[serde(default, rename = "type")]
    types: BTreeMap<u64, u64>,
}

pub fn serialize_project(project: &ProjectAst) -> String {
    let schema = project.schema();
    let files = project
        .files()
        .iter()
        .map(|f| FileRecord {
            name: f.name.clone(),
            text: f.text.clone(),
        })
        .collect();
    let nodes = project
        .nodes()
        .iter()
        .map(|n| {
            let mut props = BTreeMap::new();
            for (decl, value) in schema.props(n.ty).iter().zip(&n.props) {
                let rec = match value {
                    None => continue,
                    Some(PropValue::Child(c)) => PropRecord::Child(c.0 as u64),
                    Some(PropValue::List(cs)) => {
                        PropRecord::List(cs.iter().map(|c| c.0 as u64).collect())
                    }
                    Some(PropValue::Token(t)) => PropRecord::Token { token: t.clone() },
                };
                props.insert(decl.name.clone(), rec);
            }
            NodeRecord {
                id: n.id.0 as u64,
                ty: schema.type_name(n.ty).to_string(),
                file: n.span.file.0 as usize,
                span: [n.span.start, n.span.end, n.span.line],
                props,
            }
        })
        .collect();
    let convert = |m: &BTreeMap<NodeId, NodeId>| -> BTreeMap<u64, u64> {
        m.iter().map(|(k, v)| (k.0 as u64, v.0 as u64)).collect()
    };
    let doc = Document {
        schema: schema.name().to_string(),
        project: project.name().to_string(),
        files,
        nodes,
        roots: project.roots().iter().map(|r| r.0 as u64).collect(),
        bindings: BindingsRecord {
            method: convert(&project.bindings().method),
            types: convert(&project.bindings().types),
        },
    };
    let mut out = serde_json::to_string(&doc).expect("in-memory serialization cannot fail");
    out.push('\n');
    out
}

pub fn deserialize_project(text: &str, registry: &SchemaRegistry) -> Result<ProjectAst, AstError> {
    let doc: Document = serde_json::from_str(text).map_err(|e| AstError::Malformed {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let schema = registry
        .get(&doc.schema)
        .cloned()
        .ok_or_else(|| AstError::UnknownSchema(doc.schema.clone()))?;

    let node_count = doc.nodes.len() as u64;
    let id_of = |record: usize, id: u64| -> Result<NodeId, AstError> {
        if id < node_count {
            Ok(NodeId(id as u32))
        } else {
            Err(AstError::DanglingNode { record, id })
        }
    };

    let mut builder = ProjectBuilder::new(doc.project, schema.clone());
    for f in doc.files {
        builder.add_file(f.name, f.text);
    }
    let file_count = builder.file_count();

    for (record, n) in doc.nodes.into_iter().enumerate() {
        if n.id != record as u64 {
            return Err(AstError::IdOutOfSequence { record, id: n.id });
        }
        let ty = schema
            .type_id(&n.ty)
            .ok_or_else(|| AstError::UnknownNodeType {
                record,
                type_name: n.ty.clone(),
            })?;
        if n.file >= file_count {
            return Err(AstError::BadFile {
                record,
                file: n.file,
            });
        }
        let decls = schema.props(ty);
        let mut props: Vec<Option<PropValue>> = vec![None; decls.len()];
        for (name, value) in n.props {
            let idx = schema
                .prop_index(ty, &name)
                .ok_or_else(|| AstError::UnknownProperty {
                    record,
                    type_name: n.ty.clone(),
                    prop: name.clone(),
                })?;
            props[idx] = Some(match value {
                PropRecord::Child(c) => PropValue::Child(id_of(record, c)?),
                PropRecord::List(cs) => PropValue::List(
                    cs.into_iter()
                        .map(|c| id_of(record, c))
                        .collect::<Result<_, _>>()?,
                ),
                PropRecord::Token { token } => PropValue::Token(token),
            });
        }
        let [start, end, line] = n.span;
        builder.add_node(
            ty,
            Span {
                file: FileId(n.file as u32),
                start,
                end,
                line,
            },
            props,
        );
    }
    for r in doc.roots {
        if r >= node_count {
            return Err(AstError::DanglingRoot(r));
        }
        builder.add_root(NodeId(r as u32));
    }
    let table = builder.bindings_mut();
    for (kind, src, dst) in [
        ("method", &doc.bindings.method, &mut table.method),
        ("type", &doc.bindings.types, &mut table.types),
    ] {
        for (&from, &to) in src {
            if from >= node_count || to >= node_count {
                return Err(AstError::DanglingBinding { kind, from, to });
            }
            dst.insert(NodeId(from as u32), NodeId(to as u32));
        }
    }
    builder.finish()
}
