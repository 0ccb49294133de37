use std::collections::HashSet;

use super::lexer::{tokenize, Token, TokenKind};
use super::syntax::*;
use super::QueryError;

/// Parses a complete query document from source text.
pub fn parse_query_document(source: &str, text: &str) -> Result<QueryDocument, QueryError> {
    let tokens = tokenize(text)?;
    parse_tokens(source, tokens)
}

/// Parses an already tokenized document.
pub fn parse_tokens(source: &str, tokens: Vec<Token>) -> Result<QueryDocument, QueryError> {
    let mut p = Parser {
        toks: tokens,
        pos: 0,
        scope: Vec::new(),
        calls: Vec::new(),
    };
    let mut queries = Vec::new();
    let mut labels = HashSet::new();
    while !matches!(p.peek(), TokenKind::Eof) {
        let label = if matches!(p.peek(), TokenKind::Ident(_))
            && p.peek_at(1) == &TokenKind::Punct(":")
        {
            let line = p.cur().line;
            let name = p.ident()?;
            p.bump();
            if !labels.insert(name.clone()) {
                return Err(QueryError::DuplicateLabel { label: name, line });
            }
            Some(name)
        } else {
            None
        };
        if !p.at_kw("select") {
            return Err(p.unexpected(&["select", "label"]));
        }
        let select = p.select()?;
        queries.push(TopQuery { label, select });
    }
    if let Some((label, line)) = p.calls.into_iter().find(|(l, _)| !labels.contains(l)) {
        return Err(QueryError::UnresolvedLabel { label, line });
    }
    Ok(QueryDocument {
        source: source.to_string(),
        queries,
    })
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    /// Pattern variables of the enclosing selects.
    scope: Vec<String>,
    /// callquery targets, checked once every label is known.
    calls: Vec<(String, u32)>,
}

impl Parser {
    fn cur(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek(&self) -> &TokenKind {
        &self.toks[self.pos].kind
    }

    fn peek_at(&self, k: usize) -> &TokenKind {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].kind
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn at_kw(&self, k: &str) -> bool {
        matches!(self.peek(), TokenKind::Keyword(q) if *q == k)
    }

    fn at_punct(&self, p: &str) -> bool {
        matches!(self.peek(), TokenKind::Punct(q) if *q == p)
    }

    fn unexpected(&self, expected: &[&str]) -> QueryError {
        let t = self.cur();
        QueryError::Syntax {
            line: t.line,
            column: t.column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: t.kind.to_string(),
        }
    }

    fn expect_punct(&mut self, p: &'static str) -> Result<Token, QueryError> {
        if self.at_punct(p) {
            Ok(self.bump())
        } else {
            Err(self.unexpected(&[p]))
        }
    }

    fn expect_kw(&mut self, k: &'static str) -> Result<Token, QueryError> {
        if self.at_kw(k) {
            Ok(self.bump())
        } else {
            Err(self.unexpected(&[k]))
        }
    }

    fn ident(&mut self) -> Result<String, QueryError> {
        match self.peek().clone() {
            TokenKind::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected(&["identifier"])),
        }
    }

    fn braced(&mut self) -> Result<String, QueryError> {
        match self.peek().clone() {
            TokenKind::Braced(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected(&["{NodeType}"])),
        }
    }

    fn pattern_var(&mut self) -> Result<PatternVar, QueryError> {
        let ty = self.braced()?;
        let line = self.cur().line;
        let var = self.ident()?;
        if self.scope.contains(&var) {
            return Err(QueryError::DuplicateVariable { var, line });
        }
        Ok(PatternVar { ty, var })
    }

    fn select(&mut self) -> Result<SelectQuery, QueryError> {
        let line = self.expect_kw("select")?.line;
        let modifier = if self.at_kw("outmost") {
            self.bump();
            Modifier::Outmost
        } else if self.at_kw("inmost") {
            self.bump();
            Modifier::Inmost
        } else {
            Modifier::None
        };
        self.expect_punct("(")?;
        let first = self.pattern_var()?;
        let kind = if self.at_punct("*") {
            PatternKind::Star
        } else if self.at_punct("...") {
            PatternKind::Ellipsis
        } else {
            PatternKind::Single
        };
        let second = if kind == PatternKind::Single {
            None
        } else {
            self.bump();
            let v = self.pattern_var()?;
            if v.var == first.var {
                return Err(QueryError::DuplicateVariable { var: v.var, line });
            }
            Some(v)
        };
        if !matches!(self.peek(), TokenKind::Punct(")")) {
            return Err(self.unexpected(&[")", "*", "..."]));
        }
        self.bump();
        if kind != PatternKind::Single && modifier != Modifier::None {
            return Err(QueryError::Invalid {
                line,
                message: "outmost/inmost apply only to single-variable patterns".to_string(),
            });
        }
        let input = self.input_spec()?.unwrap_or(InputSpec::Project);
        let where_clause = if self.at_kw("where") {
            self.bump();
            Some(self.expr()?)
        } else {
            None
        };
        let pattern = Pattern {
            kind,
            first,
            second,
        };
        let pushed = pattern.vars().count();
        self.scope.extend(pattern.vars().map(|v| v.var.clone()));
        let body = self.block();
        self.scope.truncate(self.scope.len() - pushed);
        Ok(SelectQuery {
            pattern,
            modifier,
            input,
            where_clause,
            body: body?,
            line,
        })
    }

    fn input_spec(&mut self) -> Result<Option<InputSpec>, QueryError> {
        if self.at_kw("in") {
            self.bump();
            Ok(Some(InputSpec::In(self.expr()?)))
        } else if self.at_kw("directly") {
            self.bump();
            self.expect_kw("in")?;
            Ok(Some(InputSpec::DirectlyIn(self.expr()?)))
        } else {
            Ok(None)
        }
    }

    fn block(&mut self) -> Result<Vec<Stmt>, QueryError> {
        self.expect_punct("{")?;
        let mut out = Vec::new();
        while !self.at_punct("}") {
            if matches!(self.peek(), TokenKind::Eof) {
                return Err(self.unexpected(&["}"]));
            }
            out.push(self.stmt()?);
        }
        self.bump();
        Ok(out)
    }

    /// A braced block, or a single statement standing in for one.
    fn body(&mut self) -> Result<Vec<Stmt>, QueryError> {
        if self.at_punct("{") {
            self.block()
        } else {
            Ok(vec![self.stmt()?])
        }
    }

    fn stmt(&mut self) -> Result<Stmt, QueryError> {
        let line = self.cur().line;
        let kind = match self.peek().clone() {
            TokenKind::Keyword("select") => StmtKind::Select(Box::new(self.select()?)),
            TokenKind::Keyword("if") => {
                self.bump();
                self.expect_punct("(")?;
                let cond = self.expr()?;
                self.expect_punct(")")?;
                let then = self.body()?;
                let otherwise = if self.at_kw("else") {
                    self.bump();
                    Some(self.body()?)
                } else {
                    None
                };
                StmtKind::If {
                    cond,
                    then,
                    otherwise,
                }
            }
            TokenKind::Keyword("while") => {
                self.bump();
                self.expect_punct("(")?;
                let cond = self.expr()?;
                self.expect_punct(")")?;
                StmtKind::While {
                    cond,
                    body: self.body()?,
                }
            }
            TokenKind::Keyword("callquery") => {
                self.bump();
                self.expect_punct("(")?;
                let label = self.ident()?;
                self.expect_punct(")")?;
                let input = self.input_spec()?;
                self.expect_punct(";")?;
                self.calls.push((label.clone(), line));
                StmtKind::CallQuery { label, input }
            }
            TokenKind::Keyword("print") => {
                self.bump();
                self.expect_punct("(")?;
                let e = self.expr()?;
                self.expect_punct(")")?;
                self.expect_punct(";")?;
                StmtKind::Print(e)
            }
            TokenKind::Ident(name) if matches!(self.peek_at(1), TokenKind::Punct(p) if ["=", "+=", "-=", "++", "--"].contains(p)) =>
            {
                self.bump();
                let TokenKind::Punct(op) = self.bump().kind else {
                    unreachable!()
                };
                let kind = match op {
                    "++" => StmtKind::Step {
                        target: name,
                        op: StepOp::Incr,
                    },
                    "--" => StmtKind::Step {
                        target: name,
                        op: StepOp::Decr,
                    },
                    _ => StmtKind::Assign {
                        target: name,
                        op: match op {
                            "=" => AssignOp::Set,
                            "+=" => AssignOp::Add,
                            _ => AssignOp::Sub,
                        },
                        expr: self.expr()?,
                    },
                };
                self.expect_punct(";")?;
                kind
            }
            TokenKind::Ident(_)
            | TokenKind::Int(_)
            | TokenKind::Str(_)
            | TokenKind::Braced(_)
            | TokenKind::Keyword("true" | "false")
            | TokenKind::Punct("(" | "!" | "-") => {
                let e = self.expr()?;
                self.expect_punct(";")?;
                StmtKind::Expr(e)
            }
            _ => {
                return Err(self.unexpected(&[
                    "select",
                    "if",
                    "while",
                    "callquery",
                    "print",
                    "assignment",
                    "expression",
                ]))
            }
        };
        Ok(Stmt { kind, line })
    }

    pub fn expr(&mut self) -> Result<Expr, QueryError> {
        self.binary(1)
    }

    fn infix_op(&self) -> Option<InfixOp> {
        let TokenKind::Punct(p) = self.peek() else {
            return None;
        };
        Some(match *p {
            "==" => InfixOp::Eq,
            "!=" => InfixOp::Ne,
            "<" => InfixOp::Lt,
            "<=" => InfixOp::Le,
            ">" => InfixOp::Gt,
            ">=" => InfixOp::Ge,
            "&&" => InfixOp::And,
            "||" => InfixOp::Or,
            "+" => InfixOp::Add,
            "-" => InfixOp::Sub,
            "*" => InfixOp::Mul,
            _ => return None,
        })
    }

    fn binary(&mut self, min_prec: u8) -> Result<Expr, QueryError> {
        if min_prec > 6 {
            return self.unary();
        }
        let mut lhs = self.binary(min_prec + 1)?;
        while let Some(op) = self.infix_op().filter(|op| op.precedence() == min_prec) {
            self.bump();
            let rhs = self.binary(min_prec + 1)?;
            lhs = Expr::Infix {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, QueryError> {
        let op = if self.at_punct("!") {
            PrefixOp::Not
        } else if self.at_punct("-") {
            PrefixOp::Neg
        } else {
            return self.postfix();
        };
        self.bump();
        Ok(Expr::Prefix {
            op,
            expr: Box::new(self.unary()?),
        })
    }

    fn args(&mut self) -> Result<Vec<Expr>, QueryError> {
        self.expect_punct("(")?;
        let mut out = Vec::new();
        if !self.at_punct(")") {
            loop {
                out.push(self.expr()?);
                if self.at_punct(",") {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect_punct(")")?;
        Ok(out)
    }

    fn postfix(&mut self) -> Result<Expr, QueryError> {
        let mut e = self.primary()?;
        while self.at_punct(".") {
            self.bump();
            match self.peek().clone() {
                TokenKind::Braced(name) => {
                    self.bump();
                    e = Expr::Prop {
                        base: Box::new(e),
                        accessor: Accessor::Braced(name),
                    };
                }
                TokenKind::Ident(name) => {
                    self.bump();
                    if self.at_punct("(") {
                        let args = self.args()?;
                        e = Expr::Call {
                            name,
                            receiver: Some(Box::new(e)),
                            args,
                        };
                    } else {
                        e = Expr::Prop {
                            base: Box::new(e),
                            accessor: Accessor::Dotted(name),
                        };
                    }
                }
                _ => return Err(self.unexpected(&["identifier", "{NodeType}"])),
            }
        }
        Ok(e)
    }

    fn primary(&mut self) -> Result<Expr, QueryError> {
        match self.peek().clone() {
            TokenKind::Int(n) => {
                self.bump();
                Ok(Expr::Int(n))
            }
            TokenKind::Str(s) => {
                self.bump();
                Ok(Expr::Str(s))
            }
            TokenKind::Keyword(b @ ("true" | "false")) => {
                self.bump();
                Ok(Expr::Bool(b == "true"))
            }
            TokenKind::Braced(name) => {
                self.bump();
                Ok(Expr::NodeType(name))
            }
            TokenKind::Ident(name) => {
                self.bump();
                if !self.at_punct("(") {
                    return Ok(Expr::Var(name));
                }
                if name == "count"
                    && self.peek_at(1) == &TokenKind::Punct("*")
                    && self.peek_at(2) == &TokenKind::Punct(")")
                {
                    self.pos += 3;
                    return Ok(Expr::CountStar);
                }
                let args = self.args()?;
                Ok(Expr::Call {
                    name,
                    receiver: None,
                    args,
                })
            }
            TokenKind::Punct("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect_punct(")")?;
                Ok(e)
            }
            _ => Err(self.unexpected(&["expression"])),
        }
    }
}
