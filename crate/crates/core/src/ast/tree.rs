use std::borrow::Cow;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::schema::{NodeTypeSchema, PropKind, TypeId};
use super::AstError;

/// Identifier of a node, unique within one project.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FileId(pub u32);

/// Source location of a node. Offsets count Unicode scalar values from 0 and
/// are half-open; `line` is 1-based and refers to `start`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span {
    pub file: FileId,
    pub start: u32,
    pub end: u32,
    pub line: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PropValue {
    Child(NodeId),
    List(Vec<NodeId>),
    Token(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AstNode {
    pub id: NodeId,
    pub ty: TypeId,
    /// One slot per property declared on `ty`, in schema order.
    pub props: Vec<Option<PropValue>>,
    pub parent: Option<NodeId>,
    pub span: Span,
    children: Vec<NodeId>,
}

impl AstNode {
    /// Child nodes in property-declaration order, list elements in order.
    pub fn children(&self) -> &[NodeId] {
        &self.children
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceFile {
    pub name: String,
    pub text: Option<String>,
}

impl SourceFile {
    fn slice_chars(&self, start: u32, end: u32) -> Option<&str> {
        let text = self.text.as_deref()?;
        let (start, end) = (start as usize, end as usize);
        if text.is_ascii() {
            return text.get(start..end);
        }
        let mut indices = text.char_indices().map(|(b, _)| b).chain(Some(text.len()));
        let b0 = indices.nth(start)?;
        let b1 = if end == start {
            b0
        } else {
            indices.nth(end - start - 1)?
        };
        text.get(b0..b1)
    }
}

/// Statically resolved links from use sites to declarations.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BindingTable {
    /// Invocation -> MethodDeclaration.
    pub method: BTreeMap<NodeId, NodeId>,
    /// Expression -> TypeDeclaration.
    pub types: BTreeMap<NodeId, NodeId>,
}

/// Text of a node, or a `<Type@file:line>` placeholder when the file text was
/// not retained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceText<'a> {
    pub text: Cow<'a, str>,
    pub degraded: bool,
}

/// Parsed trees of one project plus its binding table.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectAst {
    name: String,
    schema: Arc<NodeTypeSchema>,
    files: Vec<SourceFile>,
    nodes: Vec<AstNode>,
    roots: Vec<NodeId>,
    bindings: BindingTable,
}

impl ProjectAst {
    pub fn empty(name: impl Into<String>, schema: Arc<NodeTypeSchema>) -> Self {
        ProjectAst {
            name: name.into(),
            schema,
            files: Vec::new(),
            nodes: Vec::new(),
            roots: Vec::new(),
            bindings: BindingTable::default(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn schema(&self) -> &NodeTypeSchema {
        &self.schema
    }

    pub fn schema_arc(&self) -> &Arc<NodeTypeSchema> {
        &self.schema
    }

    pub fn files(&self) -> &[SourceFile] {
        &self.files
    }

    pub fn file(&self, id: FileId) -> &SourceFile {
        &self.files[id.0 as usize]
    }

    pub fn nodes(&self) -> &[AstNode] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Compilation-unit roots forming the default query input.
    pub fn roots(&self) -> &[NodeId] {
        &self.roots
    }

    pub fn bindings(&self) -> &BindingTable {
        &self.bindings
    }

    pub fn node(&self, id: NodeId) -> &AstNode {
        &self.nodes[id.index()]
    }

    pub fn contains_id(&self, id: NodeId) -> bool {
        id.index() < self.nodes.len()
    }

    pub fn type_of(&self, id: NodeId) -> TypeId {
        self.node(id).ty
    }

    pub fn type_name(&self, id: NodeId) -> &str {
        self.schema.type_name(self.node(id).ty)
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.node(id).parent
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        self.node(id).children()
    }

    pub fn prop(&self, id: NodeId, name: &str) -> Option<&PropValue> {
        let node = self.node(id);
        let idx = self.schema.prop_index(node.ty, name)?;
        node.props[idx].as_ref()
    }

    pub fn token(&self, id: NodeId, name: &str) -> Option<&str> {
        match self.prop(id, name) {
            Some(PropValue::Token(t)) => Some(t),
            _ => None,
        }
    }

    /// Does node `id` match pattern type `ty`? Honors subtyping and virtual
    /// types (matched through a token on their supertype).
    pub fn node_is(&self, id: NodeId, ty: TypeId) -> bool {
        let schema = &*self.schema;
        let concrete = self.node(id).ty;
        match schema.virtual_match(ty) {
            Some(vm) => {
                let Some(base) = schema.supertype(ty) else {
                    return false;
                };
                schema.is_subtype(concrete, base) && self.token(id, &vm.prop) == Some(&vm.value)
            }
            None => schema.is_subtype(concrete, ty),
        }
    }

    /// Depth-first pre-order walk of the subtree rooted at `root`.
    pub fn descendants_preorder(&self, root: NodeId) -> Preorder<'_> {
        Preorder {
            project: self,
            stack: vec![root],
        }
    }

    /// Strict ancestors of `id`, nearest first.
    pub fn ancestors(&self, id: NodeId) -> Ancestors<'_> {
        Ancestors {
            project: self,
            next: self.parent(id),
        }
    }

    /// Number of parent edges from `id` to its compilation-unit root.
    pub fn node_depth(&self, id: NodeId) -> usize {
        self.ancestors(id).count()
    }

    /// True if `anc` is a strict ancestor of `id`.
    pub fn is_proper_ancestor(&self, anc: NodeId, id: NodeId) -> bool {
        self.ancestors(id).any(|a| a == anc)
    }

    pub fn file_name(&self, id: NodeId) -> &str {
        &self.file(self.node(id).span.file).name
    }

    pub fn source_text(&self, id: NodeId) -> SourceText<'_> {
        let node = self.node(id);
        let file = self.file(node.span.file);
        match file.slice_chars(node.span.start, node.span.end) {
            Some(s) => SourceText {
                text: Cow::Borrowed(s),
                degraded: false,
            },
            None => SourceText {
                text: Cow::Owned(format!(
                    "<{}@{}:{}>",
                    self.type_name(id),
                    file.name,
                    node.span.line
                )),
                degraded: true,
            },
        }
    }

    /// Replace the binding table; targets are checked like ingested bindings.
    pub fn set_bindings(&mut self, bindings: BindingTable) -> Result<(), AstError> {
        check_bindings(&self.schema, &self.nodes, &bindings)?;
        self.bindings = bindings;
        Ok(())
    }
}

pub struct Preorder<'a> {
    project: &'a ProjectAst,
    stack: Vec<NodeId>,
}

impl Iterator for Preorder<'_> {
    type Item = NodeId;

    fn next(&mut self) -> Option<NodeId> {
        let id = self.stack.pop()?;
        self.stack
            .extend(self.project.children(id).iter().rev().copied());
        Some(id)
    }
}

pub struct Ancestors<'a> {
    project: &'a ProjectAst,
    next: Option<NodeId>,
}

impl Iterator for Ancestors<'_> {
    type Item = NodeId;

    fn next(&mut self) -> Option<NodeId> {
        let cur = self.next?;
        self.next = self.project.parent(cur);
        Some(cur)
    }
}

struct PendingNode {
    ty: TypeId,
    span: Span,
    props: Vec<Option<PropValue>>,
}

/// Assembles a [`ProjectAst`]. Node ids are handed out densely in reservation
/// order; `finish` links parents and checks every structural invariant.
pub struct ProjectBuilder {
    name: String,
    schema: Arc<NodeTypeSchema>,
    files: Vec<SourceFile>,
    nodes: Vec<Option<PendingNode>>,
    roots: Vec<NodeId>,
    bindings: BindingTable,
}

impl ProjectBuilder {
    pub fn new(name: impl Into<String>, schema: Arc<NodeTypeSchema>) -> Self {
        ProjectBuilder {
            name: name.into(),
            schema,
            files: Vec::new(),
            nodes: Vec::new(),
            roots: Vec::new(),
            bindings: BindingTable::default(),
        }
    }

    pub fn schema(&self) -> &Arc<NodeTypeSchema> {
        &self.schema
    }

    pub fn add_file(&mut self, name: impl Into<String>, text: Option<String>) -> FileId {
        self.files.push(SourceFile {
            name: name.into(),
            text,
        });
        FileId(self.files.len() as u32 - 1)
    }

    pub fn file_count(&self) -> usize {
        self.files.len()
    }

    pub fn next_id(&self) -> NodeId {
        NodeId(self.nodes.len() as u32)
    }

    pub fn reserve(&mut self) -> NodeId {
        self.nodes.push(None);
        NodeId(self.nodes.len() as u32 - 1)
    }

    pub fn fill(&mut self, id: NodeId, ty: TypeId, span: Span, props: Vec<Option<PropValue>>) {
        self.nodes[id.index()] = Some(PendingNode { ty, span, props });
    }

    pub fn add_node(&mut self, ty: TypeId, span: Span, props: Vec<Option<PropValue>>) -> NodeId {
        let id = self.reserve();
        self.fill(id, ty, span, props);
        id
    }

    pub fn add_root(&mut self, id: NodeId) {
        self.roots.push(id);
    }

    pub fn bindings_mut(&mut self) -> &mut BindingTable {
        &mut self.bindings
    }

    pub fn finish(self) -> Result<ProjectAst, AstError> {
        let schema = self.schema;
        let count = self.nodes.len();
        let mut nodes: Vec<AstNode> = Vec::with_capacity(count);
        for (i, pending) in self.nodes.into_iter().enumerate() {
            let p = pending.ok_or(AstError::DanglingNode {
                record: i,
                id: i as u64,
            })?;
            let type_name = schema.type_name(p.ty).to_string();
            if !schema.is_concrete(p.ty) {
                return Err(AstError::NotConcrete { record: i, type_name });
            }
            let decls = schema.props(p.ty);
            if decls.len() != p.props.len() {
                return Err(AstError::PropertyShape {
                    record: i,
                    prop: "<arity>".to_string(),
                });
            }
            if p.span.start > p.span.end || p.span.line == 0 {
                return Err(AstError::BadSpan { record: i });
            }
            if p.span.file.0 as usize >= self.files.len() {
                return Err(AstError::BadFile {
                    record: i,
                    file: p.span.file.0 as usize,
                });
            }
            let mut children = Vec::new();
            for (decl, value) in decls.iter().zip(&p.props) {
                let ok = match (decl.kind, value) {
                    (_, None) => true,
                    (PropKind::Child, Some(PropValue::Child(c))) => {
                        children.push(*c);
                        true
                    }
                    (PropKind::ChildList, Some(PropValue::List(cs))) => {
                        children.extend(cs.iter().copied());
                        true
                    }
                    (PropKind::Token, Some(PropValue::Token(_))) => true,
                    _ => false,
                };
                if !ok {
                    return Err(AstError::PropertyShape {
                        record: i,
                        prop: decl.name.clone(),
                    });
                }
            }
            for c in &children {
                if c.index() >= count {
                    return Err(AstError::DanglingNode {
                        record: i,
                        id: c.0 as u64,
                    });
                }
            }
            nodes.push(AstNode {
                id: NodeId(i as u32),
                ty: p.ty,
                props: p.props,
                parent: None,
                span: p.span,
                children,
            });
        }

        for i in 0..count {
            let children = nodes[i].children.clone();
            for c in children {
                if nodes[c.index()].parent.is_some() || c.index() == i {
                    return Err(AstError::MultipleParents {
                        record: i,
                        child: c.0,
                    });
                }
                nodes[c.index()].parent = Some(NodeId(i as u32));
                let (ps, cs) = (nodes[i].span, nodes[c.index()].span);
                if ps.file != cs.file || cs.start < ps.start || cs.end > ps.end {
                    return Err(AstError::SpanOutsideParent { record: c.index() });
                }
            }
        }

        // every node must be reachable from a parentless node
        let mut reached = 0usize;
        let mut stack: Vec<usize> = (0..count).filter(|&i| nodes[i].parent.is_none()).collect();
        while let Some(i) = stack.pop() {
            reached += 1;
            stack.extend(nodes[i].children.iter().map(|c| c.index()));
        }
        if reached != count {
            return Err(AstError::Cycle);
        }

        for r in &self.roots {
            if r.index() >= count {
                return Err(AstError::DanglingRoot(r.0 as u64));
            }
            if nodes[r.index()].parent.is_some() {
                return Err(AstError::RootHasParent { id: r.0 });
            }
        }

        check_bindings(&schema, &nodes, &self.bindings)?;

        Ok(ProjectAst {
            name: self.name,
            schema,
            files: self.files,
            nodes,
            roots: self.roots,
            bindings: self.bindings,
        })
    }
}

fn check_bindings(
    schema: &NodeTypeSchema,
    nodes: &[AstNode],
    bindings: &BindingTable,
) -> Result<(), AstError> {
    let groups = [
        ("method", &bindings.method, schema.type_id("MethodDeclaration")),
        ("type", &bindings.types, schema.type_id("TypeDeclaration")),
    ];
    for (kind, map, target_ty) in groups {
        for (from, to) in map {
            if from.index() >= nodes.len() || to.index() >= nodes.len() {
                return Err(AstError::DanglingBinding {
                    kind,
                    from: from.0 as u64,
                    to: to.0 as u64,
                });
            }
            let ok = target_ty.is_some_and(|t| schema.is_subtype(nodes[to.index()].ty, t));
            if !ok {
                return Err(AstError::BindingTypeMismatch {
                    kind,
                    from: from.0 as u64,
                    to: to.0 as u64,
                });
            }
        }
    }
    Ok(())
}
