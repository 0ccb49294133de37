//! Static method- and type-binding for MiniLang projects.
//!
//! Resolution is deliberately small: methods match on (receiver type, name,
//! argument count); unqualified calls resolve in the enclosing type; names
//! resolve to locals, then parameters, then fields of the enclosing type.
//! Anything that cannot be resolved this way stays unbound.

use std::collections::HashMap;

use crate::ast::{BindingTable, NodeId, ProjectAst, PropValue};

pub const BUILTINS_FILE: &str = "<builtins>";

struct TypeInfo {
    decl: NodeId,
    fields: HashMap<String, String>,
    methods: Vec<MethodInfo>,
}

struct MethodInfo {
    decl: NodeId,
    name: String,
    arity: usize,
    return_type: String,
}

#[derive(Clone, Debug, PartialEq)]
enum ExprType {
    Value(String),
    /// A bare name that denotes a type (static-style receiver).
    TypeRef(String),
    Unknown,
}

struct Binder<'a> {
    p: &'a ProjectAst,
    /// Project-local types by name; the first declaration of a name wins.
    types: HashMap<String, TypeInfo>,
    builtins: HashMap<String, NodeId>,
    table: BindingTable,
    scopes: Vec<HashMap<String, String>>,
    enclosing: Option<String>,
}

pub fn bind_project(project: &ProjectAst) -> BindingTable {
    let mut b = Binder {
        p: project,
        types: HashMap::new(),
        builtins: HashMap::new(),
        table: BindingTable::default(),
        scopes: Vec::new(),
        enclosing: None,
    };
    b.collect();
    for &root in project.roots() {
        for &td in list(project, root, "types") {
            b.bind_type(td);
        }
    }
    b.table
}

fn list<'p>(p: &'p ProjectAst, id: NodeId, prop: &str) -> &'p [NodeId] {
    match p.prop(id, prop) {
        Some(PropValue::List(xs)) => xs,
        _ => &[],
    }
}

fn child(p: &ProjectAst, id: NodeId, prop: &str) -> Option<NodeId> {
    match p.prop(id, prop) {
        Some(PropValue::Child(c)) => Some(*c),
        _ => None,
    }
}

fn tok<'p>(p: &'p ProjectAst, id: NodeId, prop: &str) -> &'p str {
    p.token(id, prop).unwrap_or("")
}

impl Binder<'_> {
    fn collect(&mut self) {
        let p = self.p;
        for &root in p.roots() {
            for &td in list(p, root, "types") {
                let name = tok(p, td, "name").to_string();
                let mut info = TypeInfo {
                    decl: td,
                    fields: HashMap::new(),
                    methods: Vec::new(),
                };
                for &member in list(p, td, "bodyDeclarations") {
                    match p.type_name(member) {
                        "FieldDeclaration" => {
                            let ty = tok(p, member, "type").to_string();
                            for &frag in list(p, member, "fragments") {
                                info.fields
                                    .entry(tok(p, frag, "name").to_string())
                                    .or_insert_with(|| ty.clone());
                            }
                        }
                        "MethodDeclaration" => info.methods.push(MethodInfo {
                            decl: member,
                            name: tok(p, member, "name").to_string(),
                            arity: list(p, member, "parameters").len(),
                            return_type: tok(p, member, "returnType").to_string(),
                        }),
                        _ => {}
                    }
                }
                self.types.entry(name).or_insert(info);
            }
        }
        // surrogate declarations for built-in types live in an auxiliary tree
        for node in p.nodes() {
            if node.parent.is_none()
                && !p.roots().contains(&node.id)
                && p.file(node.span.file).name == BUILTINS_FILE
            {
                for &td in list(p, node.id, "types") {
                    self.builtins
                        .entry(tok(p, td, "name").to_string())
                        .or_insert(td);
                }
            }
        }
    }

    fn type_decl(&self, name: &str) -> Option<NodeId> {
        self.types
            .get(name)
            .map(|t| t.decl)
            .or_else(|| self.builtins.get(name).copied())
    }

    fn record_type(&mut self, expr: NodeId, ty: &str) {
        if let Some(decl) = self.type_decl(ty) {
            self.table.types.insert(expr, decl);
        }
    }

    fn bind_type(&mut self, td: NodeId) {
        let p = self.p;
        let name = tok(p, td, "name").to_string();
        // a shadowed duplicate declaration still gets its bodies walked
        self.enclosing = Some(name);
        for &member in list(p, td, "bodyDeclarations") {
            match p.type_name(member) {
                "MethodDeclaration" => {
                    let mut params = HashMap::new();
                    for &param in list(p, member, "parameters") {
                        params.insert(
                            tok(p, param, "name").to_string(),
                            tok(p, param, "type").to_string(),
                        );
                    }
                    self.scopes = vec![params];
                    if let Some(body) = child(p, member, "body") {
                        self.stmt(body);
                    }
                    self.scopes.clear();
                }
                "FieldDeclaration" => {
                    for &frag in list(p, member, "fragments") {
                        if let Some(init) = child(p, frag, "initializer") {
                            self.expr(init);
                        }
                    }
                }
                _ => {}
            }
        }
        self.enclosing = None;
    }

    fn declare(&mut self, name: &str, ty: &str) {
        if let Some(scope) = self.scopes.last_mut() {
            scope.insert(name.to_string(), ty.to_string());
        }
    }

    fn stmt(&mut self, s: NodeId) {
        let p = self.p;
        match p.type_name(s) {
            "Block" => {
                self.scopes.push(HashMap::new());
                for &st in list(p, s, "statements") {
                    self.stmt(st);
                }
                self.scopes.pop();
            }
            "VariableDeclarationStatement" => {
                let ty = tok(p, s, "type").to_string();
                for &frag in list(p, s, "fragments") {
                    if let Some(init) = child(p, frag, "initializer") {
                        self.expr(init);
                    }
                    self.declare(tok(p, frag, "name"), &ty);
                }
            }
            "ForStatement" => {
                self.scopes.push(HashMap::new());
                for &i in list(p, s, "initializers") {
                    if p.type_name(i) == "VariableDeclarationStatement" {
                        self.stmt(i);
                    } else {
                        self.expr(i);
                    }
                }
                if let Some(c) = child(p, s, "expression") {
                    self.expr(c);
                }
                for &u in list(p, s, "updaters") {
                    self.expr(u);
                }
                if let Some(b) = child(p, s, "body") {
                    self.stmt(b);
                }
                self.scopes.pop();
            }
            "TryStatement" => {
                if let Some(b) = child(p, s, "body") {
                    self.stmt(b);
                }
                for &c in list(p, s, "catchClauses") {
                    self.scopes.push(HashMap::new());
                    if let Some(param) = child(p, c, "exception") {
                        let (n, t) = (tok(p, param, "name"), tok(p, param, "type"));
                        self.declare(n, t);
                    }
                    if let Some(b) = child(p, c, "body") {
                        self.stmt(b);
                    }
                    self.scopes.pop();
                }
            }
            _ => {
                // remaining statements hold expressions and nested statements
                for &c in p.children(s) {
                    if p.node_is(c, p.schema().type_id("Statement").expect("Statement type")) {
                        self.stmt(c);
                    } else {
                        self.expr(c);
                    }
                }
            }
        }
    }

    fn lookup_var(&self, name: &str) -> Option<String> {
        for scope in self.scopes.iter().rev() {
            if let Some(t) = scope.get(name) {
                return Some(t.clone());
            }
        }
        let enclosing = self.enclosing.as_ref()?;
        self.types.get(enclosing)?.fields.get(name).cloned()
    }

    fn expr(&mut self, e: NodeId) -> ExprType {
        let p = self.p;
        match p.type_name(e) {
            "Name" => {
                let id = tok(p, e, "identifier");
                if let Some(ty) = self.lookup_var(id) {
                    self.record_type(e, &ty);
                    ExprType::Value(ty)
                } else if self.types.contains_key(id) {
                    ExprType::TypeRef(id.to_string())
                } else {
                    ExprType::Unknown
                }
            }
            lit @ ("NumberLiteral" | "StringLiteral" | "BooleanLiteral") => {
                let ty = match lit {
                    "NumberLiteral" => "int",
                    "StringLiteral" => "String",
                    _ => "boolean",
                };
                self.record_type(e, ty);
                ExprType::Value(ty.to_string())
            }
            "ClassInstanceCreation" => {
                for &a in list(p, e, "arguments") {
                    self.expr(a);
                }
                let ty = tok(p, e, "type").to_string();
                self.record_type(e, &ty);
                ExprType::Value(ty)
            }
            "MethodInvocation" => {
                let receiver = child(p, e, "expression").map(|r| self.expr(r));
                let args = list(p, e, "arguments");
                for &a in args {
                    self.expr(a);
                }
                let target = match receiver {
                    None => self.enclosing.clone(),
                    Some(ExprType::Value(t)) | Some(ExprType::TypeRef(t)) => Some(t),
                    Some(ExprType::Unknown) => None,
                };
                let name = tok(p, e, "name");
                let Some(info) = target.and_then(|t| self.types.get(&t)) else {
                    return ExprType::Unknown;
                };
                let mut matches = info
                    .methods
                    .iter()
                    .filter(|m| m.name == name && m.arity == args.len());
                let (Some(m), None) = (matches.next(), matches.next()) else {
                    return ExprType::Unknown;
                };
                let (decl, ret) = (m.decl, m.return_type.clone());
                self.table.method.insert(e, decl);
                if ret == "void" {
                    return ExprType::Unknown;
                }
                self.record_type(e, &ret);
                ExprType::Value(ret)
            }
            "FieldAccess" => {
                let recv = child(p, e, "expression").map(|r| self.expr(r));
                let name = tok(p, e, "name");
                match recv {
                    Some(ExprType::Value(t)) | Some(ExprType::TypeRef(t)) => self
                        .types
                        .get(&t)
                        .and_then(|info| info.fields.get(name))
                        .map(|f| ExprType::Value(f.clone()))
                        .unwrap_or(ExprType::Unknown),
                    _ => ExprType::Unknown,
                }
            }
            "Assignment" => {
                let lhs = child(p, e, "leftHandSide").map(|c| self.expr(c));
                if let Some(r) = child(p, e, "rightHandSide") {
                    self.expr(r);
                }
                lhs.unwrap_or(ExprType::Unknown)
            }
            "InfixExpression" => {
                let l = child(p, e, "leftOperand").map(|c| self.expr(c));
                let r = child(p, e, "rightOperand").map(|c| self.expr(c));
                let string = ExprType::Value("String".into());
                match tok(p, e, "operator") {
                    "+" if l.as_ref() == Some(&string) || r.as_ref() == Some(&string) => string,
                    "+" | "-" | "*" | "/" => ExprType::Value("int".into()),
                    _ => ExprType::Value("boolean".into()),
                }
            }
            "PrefixExpression" => {
                if let Some(c) = child(p, e, "operand") {
                    self.expr(c);
                }
                match tok(p, e, "operator") {
                    "!" => ExprType::Value("boolean".into()),
                    _ => ExprType::Value("int".into()),
                }
            }
            _ => {
                for &c in p.children(e) {
                    self.expr(c);
                }
                ExprType::Unknown
            }
        }
    }
}
