use std::sync::Arc;

use super::lexer::{tokenize, Tok, Token};
use super::{Diagnostic, Severity};
use crate::ast::{FileId, NodeId, NodeTypeSchema, ProjectBuilder, PropValue, Span};

/// A parsed tree not yet placed in a project arena.
#[derive(Clone, Debug, PartialEq)]
pub struct RawNode {
    pub ty: &'static str,
    pub start: u32,
    pub end: u32,
    pub line: u32,
    pub props: Vec<(&'static str, RawProp)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RawProp {
    Child(Box<RawNode>),
    List(Vec<RawNode>),
    Token(String),
}

impl RawNode {
    pub fn prop(&self, name: &str) -> Option<&RawProp> {
        self.props.iter().find(|(n, _)| *n == name).map(|(_, p)| p)
    }

    pub fn count(&self) -> usize {
        1 + self
            .props
            .iter()
            .map(|(_, p)| match p {
                RawProp::Child(c) => c.count(),
                RawProp::List(cs) => cs.iter().map(RawNode::count).sum(),
                RawProp::Token(_) => 0,
            })
            .sum::<usize>()
    }

    /// Places the tree into `builder`, assigning ids in pre-order.
    pub fn emit(&self, builder: &mut ProjectBuilder, file: FileId) -> NodeId {
        let schema: Arc<NodeTypeSchema> = builder.schema().clone();
        self.emit_with(builder, &schema, file)
    }

    fn emit_with(&self, b: &mut ProjectBuilder, schema: &NodeTypeSchema, file: FileId) -> NodeId {
        let id = b.reserve();
        let ty = schema
            .type_id(self.ty)
            .unwrap_or_else(|| panic!("frontend produced unregistered type {}", self.ty));
        let mut props = vec![None; schema.props(ty).len()];
        for (name, p) in &self.props {
            let idx = schema
                .prop_index(ty, name)
                .unwrap_or_else(|| panic!("{} has no property {}", self.ty, name));
            props[idx] = Some(match p {
                RawProp::Child(c) => PropValue::Child(c.emit_with(b, schema, file)),
                RawProp::List(cs) => {
                    PropValue::List(cs.iter().map(|c| c.emit_with(b, schema, file)).collect())
                }
                RawProp::Token(t) => PropValue::Token(t.clone()),
            });
        }
        b.fill(
            id,
            ty,
            Span {
                file,
                start: self.start,
                end: self.end,
                line: self.line,
            },
            props,
        );
        id
    }
}

/// Output of [`parse_minilang`]: the compilation unit (absent when the file
/// could not be parsed at all) and every diagnostic raised.
#[derive(Clone, Debug)]
pub struct ParsedFile {
    pub name: String,
    pub unit: Option<RawNode>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ParsedFile {
    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(|d| d.severity == Severity::Error)
    }
}

#[derive(Debug)]
struct PErr {
    at: usize,
    message: String,
}

type PResult<T> = Result<T, PErr>;

pub fn parse_minilang(file: &str, text: &str) -> ParsedFile {
    let (tokens, mut diagnostics) = tokenize(file, text);
    if diagnostics.iter().any(|d| d.severity == Severity::Error) {
        return ParsedFile {
            name: file.to_string(),
            unit: None,
            diagnostics,
        };
    }
    let end = text.chars().count() as u32;
    let mut p = Parser {
        file,
        toks: tokens,
        pos: 0,
        diags: Vec::new(),
        fatal: false,
    };
    let unit = p.compilation_unit(end);
    diagnostics.append(&mut p.diags);
    ParsedFile {
        name: file.to_string(),
        unit: if p.fatal { None } else { Some(unit) },
        diagnostics,
    }
}

struct Parser<'a> {
    file: &'a str,
    toks: Vec<Token>,
    pos: usize,
    diags: Vec<Diagnostic>,
    fatal: bool,
}

fn node(ty: &'static str, first: &Token, end: u32, props: Vec<(&'static str, RawProp)>) -> RawNode {
    RawNode {
        ty,
        start: first.start,
        end,
        line: first.line,
        props,
    }
}

fn child(n: RawNode) -> RawProp {
    RawProp::Child(Box::new(n))
}

fn token(s: impl Into<String>) -> RawProp {
    RawProp::Token(s.into())
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn cur(&self) -> Token {
        self.toks[self.pos].clone()
    }

    fn prev_end(&self) -> u32 {
        self.toks[self.pos.saturating_sub(1)].end
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn at_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn at_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Keyword(q) if *q == k)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.at_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(PErr {
            at: self.pos,
            message: message.into(),
        })
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Ident(s) | Tok::Int(s) | Tok::Str(s) => format!("'{s}'"),
            Tok::Keyword(k) | Tok::Punct(k) => format!("'{k}'"),
            Tok::Eof => "end of input".to_string(),
        }
    }

    fn expect(&mut self, p: &str) -> PResult<Token> {
        if self.at_punct(p) {
            Ok(self.bump())
        } else {
            self.err(format!("expected '{p}', found {}", self.describe()))
        }
    }

    fn ident(&mut self) -> PResult<(Token, String)> {
        match self.peek().clone() {
            Tok::Ident(s) => Ok((self.bump(), s)),
            _ => self.err(format!("expected identifier, found {}", self.describe())),
        }
    }

    fn report(&mut self, e: PErr) {
        let t = &self.toks[e.at];
        let severity = if matches!(t.tok, Tok::Eof) {
            self.fatal = true;
            Severity::Error
        } else {
            Severity::Warning
        };
        self.diags.push(Diagnostic {
            file: self.file.to_string(),
            line: t.line,
            column: t.column,
            message: e.message,
            severity,
        });
    }

    /// Skip to just past the next `;` or to (not past) the next `}` at the
    /// current nesting level, stepping over balanced braces.
    fn synchronize(&mut self, start: usize) {
        if self.pos == start {
            self.bump();
        }
        let mut depth = 0usize;
        loop {
            match self.peek() {
                Tok::Eof => return,
                Tok::Punct("{") => depth += 1,
                Tok::Punct("}") => {
                    if depth == 0 {
                        return;
                    }
                    depth -= 1;
                    if depth == 0 {
                        self.bump();
                        return;
                    }
                }
                Tok::Punct(";") if depth == 0 => {
                    self.bump();
                    return;
                }
                _ => {}
            }
            self.bump();
        }
    }

    fn compilation_unit(&mut self, end: u32) -> RawNode {
        let mut types = Vec::new();
        while !matches!(self.peek(), Tok::Eof) {
            if self.at_kw("class") || self.at_kw("interface") {
                match self.type_decl() {
                    Ok(t) => types.push(t),
                    Err(e) => {
                        let fatal_eof = matches!(self.toks[e.at].tok, Tok::Eof);
                        self.report(e);
                        if fatal_eof {
                            break;
                        }
                        self.skip_to_type_start();
                    }
                }
            } else {
                let e = PErr {
                    at: self.pos,
                    message: format!("expected 'class' or 'interface', found {}", self.describe()),
                };
                self.report(e);
                self.bump();
                self.skip_to_type_start();
            }
        }
        RawNode {
            ty: "CompilationUnit",
            start: 0,
            end,
            line: 1,
            props: vec![("types", RawProp::List(types))],
        }
    }

    fn skip_to_type_start(&mut self) {
        while !(matches!(self.peek(), Tok::Eof) || self.at_kw("class") || self.at_kw("interface")) {
            self.bump();
        }
    }

    fn type_decl(&mut self) -> PResult<RawNode> {
        let first = self.bump();
        let is_interface = first.tok == Tok::Keyword("interface");
        let (_, name) = self.ident()?;
        self.expect("{")?;
        let mut members = Vec::new();
        while !self.at_punct("}") {
            if matches!(self.peek(), Tok::Eof) {
                return self.err("unexpected end of input in type body");
            }
            let start = self.pos;
            match self.member() {
                Ok(mut m) => members.append(&mut m),
                Err(e) => {
                    if matches!(self.toks[e.at].tok, Tok::Eof) {
                        return Err(e);
                    }
                    self.report(e);
                    self.synchronize(start);
                }
            }
        }
        let close = self.bump();
        Ok(node(
            "TypeDeclaration",
            &first,
            close.end,
            vec![
                ("name", token(name)),
                ("interface", token(if is_interface { "true" } else { "false" })),
                ("bodyDeclarations", RawProp::List(members)),
            ],
        ))
    }

    fn member(&mut self) -> PResult<Vec<RawNode>> {
        let (first, ty) = self.ident()?;
        let (name_tok, name) = self.ident()?;
        if self.at_punct("(") {
            self.bump();
            let mut params = Vec::new();
            if !self.at_punct(")") {
                loop {
                    let (pt, pty) = self.ident()?;
                    let (_, pname) = self.ident()?;
                    params.push(node(
                        "SingleVariableDeclaration",
                        &pt,
                        self.prev_end(),
                        vec![("type", token(pty)), ("name", token(pname))],
                    ));
                    if !self.eat_punct(",") {
                        break;
                    }
                }
            }
            self.expect(")")?;
            let mut props = vec![
                ("returnType", token(ty)),
                ("name", token(name)),
                ("parameters", RawProp::List(params)),
            ];
            if self.eat_punct(";") {
                return Ok(vec![node("MethodDeclaration", &first, self.prev_end(), props)]);
            }
            let body = self.block()?;
            let end = body.end;
            props.push(("body", child(body)));
            return Ok(vec![node("MethodDeclaration", &first, end, props)]);
        }
        let fragments = self.fragments_from(name_tok, name)?;
        self.expect(";")?;
        Ok(vec![node(
            "FieldDeclaration",
            &first,
            self.prev_end(),
            vec![("type", token(ty)), ("fragments", RawProp::List(fragments))],
        )])
    }

    /// Declarators after the type: `a = 1, b`.
    fn fragments_from(&mut self, name_tok: Token, name: String) -> PResult<Vec<RawNode>> {
        let mut out = Vec::new();
        let (mut tok, mut name) = (name_tok, name);
        loop {
            let mut props = vec![("name", token(name))];
            if self.eat_punct("=") {
                let init = self.expr()?;
                props.push(("initializer", child(init)));
            }
            out.push(node("VariableDeclaration", &tok, self.prev_end(), props));
            if !self.eat_punct(",") {
                return Ok(out);
            }
            let (t, n) = self.ident()?;
            tok = t;
            name = n;
        }
    }

    fn block(&mut self) -> PResult<RawNode> {
        let open = self.expect("{")?;
        let mut stmts = Vec::new();
        while !self.at_punct("}") {
            if matches!(self.peek(), Tok::Eof) {
                return self.err("unexpected end of input in block");
            }
            let start = self.pos;
            match self.statement() {
                Ok(s) => stmts.push(s),
                Err(e) => {
                    if matches!(self.toks[e.at].tok, Tok::Eof) {
                        return Err(e);
                    }
                    self.report(e);
                    self.synchronize(start);
                }
            }
        }
        let close = self.bump();
        Ok(node(
            "Block",
            &open,
            close.end,
            vec![("statements", RawProp::List(stmts))],
        ))
    }

    fn is_local_decl(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_)) && matches!(self.peek_at(1), Tok::Ident(_))
    }

    fn local_decl(&mut self) -> PResult<RawNode> {
        let (first, ty) = self.ident()?;
        let (nt, name) = self.ident()?;
        let fragments = self.fragments_from(nt, name)?;
        Ok(node(
            "VariableDeclarationStatement",
            &first,
            self.prev_end(),
            vec![("type", token(ty)), ("fragments", RawProp::List(fragments))],
        ))
    }

    fn statement(&mut self) -> PResult<RawNode> {
        let first = self.cur();
        match first.tok.clone() {
            Tok::Punct("{") => self.block(),
            Tok::Keyword("if") => {
                self.bump();
                self.expect("(")?;
                let cond = self.expr()?;
                self.expect(")")?;
                let then = self.statement()?;
                let mut props = vec![("expression", child(cond))];
                let mut end = then.end;
                props.push(("thenStatement", child(then)));
                if self.at_kw("else") {
                    self.bump();
                    let els = self.statement()?;
                    end = els.end;
                    props.push(("elseStatement", child(els)));
                }
                Ok(node("IfStatement", &first, end, props))
            }
            Tok::Keyword("while") => {
                self.bump();
                self.expect("(")?;
                let cond = self.expr()?;
                self.expect(")")?;
                let body = self.statement()?;
                let end = body.end;
                Ok(node(
                    "WhileStatement",
                    &first,
                    end,
                    vec![("expression", child(cond)), ("body", child(body))],
                ))
            }
            Tok::Keyword("for") => {
                self.bump();
                self.expect("(")?;
                let mut init = Vec::new();
                if !self.at_punct(";") {
                    if self.is_local_decl() {
                        init.push(self.local_decl()?);
                    } else {
                        init = self.expr_list()?;
                    }
                }
                self.expect(";")?;
                let cond = if self.at_punct(";") { None } else { Some(self.expr()?) };
                self.expect(";")?;
                let updaters = if self.at_punct(")") { Vec::new() } else { self.expr_list()? };
                self.expect(")")?;
                let body = self.statement()?;
                let end = body.end;
                let mut props = vec![("initializers", RawProp::List(init))];
                if let Some(c) = cond {
                    props.push(("expression", child(c)));
                }
                props.push(("updaters", RawProp::List(updaters)));
                props.push(("body", child(body)));
                Ok(node("ForStatement", &first, end, props))
            }
            Tok::Keyword("return") => {
                self.bump();
                let mut props = Vec::new();
                if !self.at_punct(";") {
                    props.push(("expression", child(self.expr()?)));
                }
                let semi = self.expect(";")?;
                Ok(node("ReturnStatement", &first, semi.end, props))
            }
            Tok::Keyword("break") => {
                self.bump();
                let semi = self.expect(";")?;
                Ok(node("BreakStatement", &first, semi.end, vec![]))
            }
            Tok::Keyword("continue") => {
                self.bump();
                let semi = self.expect(";")?;
                Ok(node("ContinueStatement", &first, semi.end, vec![]))
            }
            Tok::Keyword("throw") => {
                self.bump();
                let e = self.expr()?;
                let semi = self.expect(";")?;
                Ok(node(
                    "ThrowStatement",
                    &first,
                    semi.end,
                    vec![("expression", child(e))],
                ))
            }
            Tok::Keyword("try") => {
                self.bump();
                let body = self.block()?;
                let mut catches = Vec::new();
                while self.at_kw("catch") {
                    let ct = self.bump();
                    self.expect("(")?;
                    let (pt, pty) = self.ident()?;
                    let (_, pname) = self.ident()?;
                    let param = node(
                        "SingleVariableDeclaration",
                        &pt,
                        self.prev_end(),
                        vec![("type", token(pty)), ("name", token(pname))],
                    );
                    self.expect(")")?;
                    let cbody = self.block()?;
                    let end = cbody.end;
                    catches.push(node(
                        "CatchClause",
                        &ct,
                        end,
                        vec![("exception", child(param)), ("body", child(cbody))],
                    ));
                }
                if catches.is_empty() {
                    return self.err("expected 'catch' after try block");
                }
                let end = catches.last().unwrap().end;
                Ok(node(
                    "TryStatement",
                    &first,
                    end,
                    vec![("body", child(body)), ("catchClauses", RawProp::List(catches))],
                ))
            }
            _ if self.is_local_decl() => {
                let mut d = self.local_decl()?;
                let semi = self.expect(";")?;
                d.end = semi.end;
                Ok(d)
            }
            _ => {
                let e = self.expr()?;
                let semi = self.expect(";")?;
                Ok(node(
                    "ExpressionStatement",
                    &first,
                    semi.end,
                    vec![("expression", child(e))],
                ))
            }
        }
    }

    fn expr_list(&mut self) -> PResult<Vec<RawNode>> {
        let mut out = vec![self.expr()?];
        while self.eat_punct(",") {
            out.push(self.expr()?);
        }
        Ok(out)
    }

    fn expr(&mut self) -> PResult<RawNode> {
        let lhs = self.binary(0)?;
        if self.at_punct("=") {
            if !matches!(lhs.ty, "Name" | "FieldAccess") {
                return self.err("invalid assignment target");
            }
            self.bump();
            let rhs = self.expr()?;
            let (start, line, end) = (lhs.start, lhs.line, rhs.end);
            return Ok(RawNode {
                ty: "Assignment",
                start,
                end,
                line,
                props: vec![
                    ("leftHandSide", child(lhs)),
                    ("operator", token("=")),
                    ("rightHandSide", child(rhs)),
                ],
            });
        }
        Ok(lhs)
    }

    fn binary(&mut self, level: usize) -> PResult<RawNode> {
        const LEVELS: &[&[&str]] = &[
            &["||"],
            &["&&"],
            &["==", "!="],
            &["<", ">", "<=", ">="],
            &["+", "-"],
            &["*", "/"],
        ];
        if level == LEVELS.len() {
            return self.unary();
        }
        let mut lhs = self.binary(level + 1)?;
        loop {
            let op = match self.peek() {
                Tok::Punct(p) if LEVELS[level].contains(p) => *p,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.binary(level + 1)?;
            lhs = RawNode {
                ty: "InfixExpression",
                start: lhs.start,
                end: rhs.end,
                line: lhs.line,
                props: vec![
                    ("leftOperand", child(lhs)),
                    ("operator", token(op)),
                    ("rightOperand", child(rhs)),
                ],
            };
        }
    }

    fn unary(&mut self) -> PResult<RawNode> {
        let first = self.cur();
        match first.tok {
            Tok::Punct("-") if matches!(self.peek_at(1), Tok::Int(_)) => {
                self.bump();
                let lit = self.bump();
                let Tok::Int(digits) = lit.tok else { unreachable!() };
                Ok(node(
                    "NumberLiteral",
                    &first,
                    lit.end,
                    vec![("token", token(format!("-{digits}")))],
                ))
            }
            Tok::Punct(op @ ("!" | "-")) => {
                self.bump();
                let operand = self.unary()?;
                let end = operand.end;
                Ok(node(
                    "PrefixExpression",
                    &first,
                    end,
                    vec![("operator", token(op)), ("operand", child(operand))],
                ))
            }
            _ => self.postfix(),
        }
    }

    fn args(&mut self) -> PResult<Vec<RawNode>> {
        self.expect("(")?;
        let mut out = Vec::new();
        if !self.at_punct(")") {
            out = self.expr_list()?;
        }
        self.expect(")")?;
        Ok(out)
    }

    fn postfix(&mut self) -> PResult<RawNode> {
        let mut e = self.primary()?;
        while self.at_punct(".") {
            self.bump();
            let (_, name) = self.ident()?;
            let (start, line) = (e.start, e.line);
            if self.at_punct("(") {
                let args = self.args()?;
                e = RawNode {
                    ty: "MethodInvocation",
                    start,
                    end: self.prev_end(),
                    line,
                    props: vec![
                        ("expression", child(e)),
                        ("name", token(name)),
                        ("arguments", RawProp::List(args)),
                    ],
                };
            } else {
                e = RawNode {
                    ty: "FieldAccess",
                    start,
                    end: self.prev_end(),
                    line,
                    props: vec![("expression", child(e)), ("name", token(name))],
                };
            }
        }
        Ok(e)
    }

    fn primary(&mut self) -> PResult<RawNode> {
        let first = self.cur();
        match first.tok.clone() {
            Tok::Int(digits) => {
                self.bump();
                Ok(node("NumberLiteral", &first, first.end, vec![("token", token(digits))]))
            }
            Tok::Str(s) => {
                self.bump();
                Ok(node("StringLiteral", &first, first.end, vec![("escapedValue", token(s))]))
            }
            Tok::Keyword(b @ ("true" | "false")) => {
                self.bump();
                Ok(node("BooleanLiteral", &first, first.end, vec![("booleanValue", token(b))]))
            }
            Tok::Keyword("new") => {
                self.bump();
                let (_, ty) = self.ident()?;
                let args = self.args()?;
                Ok(node(
                    "ClassInstanceCreation",
                    &first,
                    self.prev_end(),
                    vec![("type", token(ty)), ("arguments", RawProp::List(args))],
                ))
            }
            Tok::Ident(name) => {
                self.bump();
                if self.at_punct("(") {
                    let args = self.args()?;
                    Ok(node(
                        "MethodInvocation",
                        &first,
                        self.prev_end(),
                        vec![("name", token(name)), ("arguments", RawProp::List(args))],
                    ))
                } else {
                    Ok(node("Name", &first, first.end, vec![("identifier", token(name))]))
                }
            }
            Tok::Punct("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect(")")?;
                Ok(e)
            }
            _ => self.err(format!("expected expression, found {}", self.describe())),
        }
    }
}
