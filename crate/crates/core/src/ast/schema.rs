use std::collections::HashMap;
use std::fmt;

use super::SchemaError;

/// Index of a type inside a [`NodeTypeSchema`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeId(pub(crate) u16);

impl TypeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PropKind {
    /// Optional single child node.
    Child,
    /// Ordered list of child nodes.
    ChildList,
    /// Terminal text carried by the node itself.
    Token,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropDecl {
    pub name: String,
    pub kind: PropKind,
}

/// A type that is never a node's concrete type but matches nodes of its
/// supertype whose token property `prop` equals `value`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VirtualMatch {
    pub prop: String,
    pub value: String,
}

#[derive(Clone, Debug)]
struct TypeInfo {
    name: String,
    supertype: Option<TypeId>,
    is_abstract: bool,
    virtual_match: Option<VirtualMatch>,
    /// Inherited properties first, then the type's own.
    props: Vec<PropDecl>,
}

/// The node-type lattice of a target language: type names, single-inheritance
/// supertype edges, and the named properties each concrete type carries.
#[derive(Clone, Debug)]
pub struct NodeTypeSchema {
    name: String,
    types: Vec<TypeInfo>,
    by_name: HashMap<String, TypeId>,
}

impl PartialEq for NodeTypeSchema {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

impl NodeTypeSchema {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn type_id(&self, name: &str) -> Option<TypeId> {
        self.by_name.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<TypeId, SchemaError> {
        self.type_id(name)
            .ok_or_else(|| SchemaError::UnknownType(name.to_string()))
    }

    pub fn type_name(&self, ty: TypeId) -> &str {
        &self.types[ty.index()].name
    }

    pub fn supertype(&self, ty: TypeId) -> Option<TypeId> {
        self.types[ty.index()].supertype
    }

    pub fn is_abstract(&self, ty: TypeId) -> bool {
        self.types[ty.index()].is_abstract
    }

    pub fn virtual_match(&self, ty: TypeId) -> Option<&VirtualMatch> {
        self.types[ty.index()].virtual_match.as_ref()
    }

    /// True for types that may appear as a node's concrete type.
    pub fn is_concrete(&self, ty: TypeId) -> bool {
        let info = &self.types[ty.index()];
        !info.is_abstract && info.virtual_match.is_none()
    }

    pub fn props(&self, ty: TypeId) -> &[PropDecl] {
        &self.types[ty.index()].props
    }

    pub fn prop_index(&self, ty: TypeId, prop: &str) -> Option<usize> {
        self.props(ty).iter().position(|p| p.name == prop)
    }

    pub fn type_ids(&self) -> impl Iterator<Item = TypeId> + '_ {
        (0..self.types.len()).map(|i| TypeId(i as u16))
    }

    /// True if any type in the schema declares a property with this name.
    pub fn declares_property(&self, prop: &str) -> bool {
        self.types
            .iter()
            .any(|t| t.props.iter().any(|p| p.name == prop))
    }

    /// Reflexive-transitive supertype test on type ids.
    pub fn is_subtype(&self, ty: TypeId, ancestor: TypeId) -> bool {
        let mut cur = Some(ty);
        while let Some(t) = cur {
            if t == ancestor {
                return true;
            }
            cur = self.supertype(t);
        }
        false
    }

    /// Name-based form of [`is_subtype`](Self::is_subtype).
    pub fn is_subtype_named(&self, ty: &str, ancestor: &str) -> Result<bool, SchemaError> {
        let t = self.require(ty)?;
        let a = self.require(ancestor)?;
        Ok(self.is_subtype(t, a))
    }
}

impl fmt::Display for NodeTypeSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "schema {} ({} types)", self.name, self.types.len())
    }
}

struct PendingType {
    name: String,
    supertype: Option<String>,
    is_abstract: bool,
    virtual_match: Option<VirtualMatch>,
    props: Vec<PropDecl>,
}

/// Incremental construction of a [`NodeTypeSchema`]. Property helpers apply to
/// the most recently declared type.
pub struct SchemaBuilder {
    name: String,
    pending: Vec<PendingType>,
}

impl SchemaBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        SchemaBuilder {
            name: name.into(),
            pending: Vec::new(),
        }
    }

    fn push(&mut self, name: &str, supertype: Option<&str>, is_abstract: bool) -> &mut Self {
        self.pending.push(PendingType {
            name: name.to_string(),
            supertype: supertype.map(str::to_string),
            is_abstract,
            virtual_match: None,
            props: Vec::new(),
        });
        self
    }

    pub fn abstract_type(&mut self, name: &str, supertype: Option<&str>) -> &mut Self {
        self.push(name, supertype, true)
    }

    pub fn concrete(&mut self, name: &str, supertype: Option<&str>) -> &mut Self {
        self.push(name, supertype, false)
    }

    pub fn virtual_type(&mut self, name: &str, base: &str, prop: &str, value: &str) -> &mut Self {
        self.push(name, Some(base), false);
        self.pending.last_mut().unwrap().virtual_match = Some(VirtualMatch {
            prop: prop.to_string(),
            value: value.to_string(),
        });
        self
    }

    fn prop(&mut self, name: &str, kind: PropKind) -> &mut Self {
        let last = self
            .pending
            .last_mut()
            .expect("property declared before any type");
        last.props.push(PropDecl {
            name: name.to_string(),
            kind,
        });
        self
    }

    pub fn child(&mut self, name: &str) -> &mut Self {
        self.prop(name, PropKind::Child)
    }

    pub fn list(&mut self, name: &str) -> &mut Self {
        self.prop(name, PropKind::ChildList)
    }

    pub fn token(&mut self, name: &str) -> &mut Self {
        self.prop(name, PropKind::Token)
    }

    pub fn build(&mut self) -> Result<NodeTypeSchema, SchemaError> {
        let mut by_name = HashMap::new();
        for (i, t) in self.pending.iter().enumerate() {
            if by_name.insert(t.name.clone(), TypeId(i as u16)).is_some() {
                return Err(SchemaError::DuplicateType(t.name.clone()));
            }
        }
        let mut types = Vec::with_capacity(self.pending.len());
        for t in &self.pending {
            let supertype = match &t.supertype {
                Some(s) => Some(
                    *by_name
                        .get(s)
                        .ok_or_else(|| SchemaError::UnknownType(s.clone()))?,
                ),
                None => None,
            };
            let mut seen = std::collections::HashSet::new();
            for p in &t.props {
                if !seen.insert(p.name.as_str()) {
                    return Err(SchemaError::DuplicateProperty {
                        ty: t.name.clone(),
                        prop: p.name.clone(),
                    });
                }
            }
            types.push(TypeInfo {
                name: t.name.clone(),
                supertype,
                is_abstract: t.is_abstract,
                virtual_match: t.virtual_match.clone(),
                props: t.props.clone(),
            });
        }

        // acyclicity: every chain must terminate within |types| steps
        for start in 0..types.len() {
            let mut cur = types[start].supertype;
            let mut steps = 0;
            while let Some(t) = cur {
                steps += 1;
                if steps > types.len() {
                    return Err(SchemaError::Cycle(types[start].name.clone()));
                }
                cur = types[t.index()].supertype;
            }
        }

        // flatten inherited properties; supertypes may be declared after subtypes
        let own: Vec<Vec<PropDecl>> = types.iter().map(|t| t.props.clone()).collect();
        for i in 0..types.len() {
            let mut chain = Vec::new();
            let mut cur = types[i].supertype;
            while let Some(t) = cur {
                chain.push(t.index());
                cur = types[t.index()].supertype;
            }
            let mut props: Vec<PropDecl> = Vec::new();
            for &anc in chain.iter().rev() {
                props.extend(own[anc].iter().cloned());
            }
            props.extend(own[i].iter().cloned());
            let mut seen = std::collections::HashSet::new();
            for p in &props {
                if !seen.insert(p.name.clone()) {
                    return Err(SchemaError::DuplicateProperty {
                        ty: types[i].name.clone(),
                        prop: p.name.clone(),
                    });
                }
            }
            types[i].props = props;
        }

        Ok(NodeTypeSchema {
            name: self.name.clone(),
            types,
            by_name,
        })
    }
}
