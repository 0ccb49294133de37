//! Query IR produced by the parser.

/// A parsed query file: labeled top-level selects, the first being the entry point.
#[derive(Clone, Debug, PartialEq)]
pub struct QueryDocument {
    pub source: String,
    pub queries: Vec<TopQuery>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TopQuery {
    pub label: Option<String>,
    pub select: SelectQuery,
}

impl QueryDocument {
    pub fn entry(&self) -> Option<&SelectQuery> {
        self.queries.first().map(|q| &q.select)
    }

    pub fn labeled(&self, label: &str) -> Option<&SelectQuery> {
        self.queries
            .iter()
            .find(|q| q.label.as_deref() == Some(label))
            .map(|q| &q.select)
    }

    /// Every select in the document, outer before inner.
    pub fn selects(&self) -> Vec<&SelectQuery> {
        let mut out = Vec::new();
        for q in &self.queries {
            q.select.collect_selects(&mut out);
        }
        out
    }

    /// Zero every line number, for structural comparison of IR.
    pub fn without_locations(&self) -> QueryDocument {
        let mut d = self.clone();
        for q in &mut d.queries {
            q.select.strip_lines();
        }
        d
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelectQuery {
    pub pattern: Pattern,
    pub modifier: Modifier,
    pub input: InputSpec,
    pub where_clause: Option<Expr>,
    pub body: Vec<Stmt>,
    pub line: u32,
}

impl SelectQuery {
    fn collect_selects<'a>(&'a self, out: &mut Vec<&'a SelectQuery>) {
        out.push(self);
        for s in &self.body {
            s.collect_selects(out);
        }
    }

    fn strip_lines(&mut self) {
        self.line = 0;
        for s in &mut self.body {
            s.strip_lines();
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Modifier {
    None,
    Outmost,
    Inmost,
}

#[derive(Clone, Debug, PartialEq)]
pub enum InputSpec {
    /// Every compilation unit of the project.
    Project,
    In(Expr),
    DirectlyIn(Expr),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PatternKind {
    Single,
    /// `n1 * n2`: every (ancestor, descendant) pair.
    Star,
    /// `n1 ... n2`: only the pairs at maximum depth distance.
    Ellipsis,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternVar {
    pub ty: String,
    pub var: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    pub kind: PatternKind,
    pub first: PatternVar,
    pub second: Option<PatternVar>,
}

impl Pattern {
    pub fn vars(&self) -> impl Iterator<Item = &PatternVar> {
        std::iter::once(&self.first).chain(self.second.iter())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InfixOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Add,
    Sub,
    Mul,
}

impl InfixOp {
    pub fn symbol(self) -> &'static str {
        match self {
            InfixOp::Eq => "==",
            InfixOp::Ne => "!=",
            InfixOp::Lt => "<",
            InfixOp::Le => "<=",
            InfixOp::Gt => ">",
            InfixOp::Ge => ">=",
            InfixOp::And => "&&",
            InfixOp::Or => "||",
            InfixOp::Add => "+",
            InfixOp::Sub => "-",
            InfixOp::Mul => "*",
        }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            InfixOp::Or => 1,
            InfixOp::And => 2,
            InfixOp::Eq | InfixOp::Ne => 3,
            InfixOp::Lt | InfixOp::Le | InfixOp::Gt | InfixOp::Ge => 4,
            InfixOp::Add | InfixOp::Sub => 5,
            InfixOp::Mul => 6,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrefixOp {
    Not,
    Neg,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Accessor {
    /// `x.name`
    Dotted(String),
    /// `x.{Name}`; resolved as a property first, then as a child node type.
    Braced(String),
}

impl Accessor {
    pub fn name(&self) -> &str {
        match self {
            Accessor::Dotted(s) | Accessor::Braced(s) => s,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Int(i64),
    Str(String),
    Bool(bool),
    Var(String),
    /// `{Name}` used as a value, e.g. the argument of `isnodetype`.
    NodeType(String),
    Prop {
        base: Box<Expr>,
        accessor: Accessor,
    },
    Call {
        name: String,
        receiver: Option<Box<Expr>>,
        args: Vec<Expr>,
    },
    Infix {
        op: InfixOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Prefix {
        op: PrefixOp,
        expr: Box<Expr>,
    },
    CountStar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AssignOp {
    Set,
    Add,
    Sub,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepOp {
    Incr,
    Decr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub line: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StmtKind {
    Assign {
        target: String,
        op: AssignOp,
        expr: Expr,
    },
    Step {
        target: String,
        op: StepOp,
    },
    If {
        cond: Expr,
        then: Vec<Stmt>,
        otherwise: Option<Vec<Stmt>>,
    },
    While {
        cond: Expr,
        body: Vec<Stmt>,
    },
    Select(Box<SelectQuery>),
    CallQuery {
        label: String,
        input: Option<InputSpec>,
    },
    Print(Expr),
    Expr(Expr),
}

impl Stmt {
    fn collect_selects<'a>(&'a self, out: &mut Vec<&'a SelectQuery>) {
        match &self.kind {
            StmtKind::Select(q) => q.collect_selects(out),
            StmtKind::If {
                then, otherwise, ..
            } => {
                for s in then.iter().chain(otherwise.iter().flatten()) {
                    s.collect_selects(out);
                }
            }
            StmtKind::While { body, .. } => {
                for s in body {
                    s.collect_selects(out);
                }
            }
            _ => {}
        }
    }

    fn strip_lines(&mut self) {
        self.line = 0;
        match &mut self.kind {
            StmtKind::Select(q) => q.strip_lines(),
            StmtKind::If {
                then, otherwise, ..
            } => {
                for s in then.iter_mut().chain(otherwise.iter_mut().flatten()) {
                    s.strip_lines();
                }
            }
            StmtKind::While { body, .. } => body.iter_mut().for_each(Stmt::strip_lines),
            _ => {}
        }
    }
}
