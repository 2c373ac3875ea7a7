//! Abstract syntax of the supported Creol subset.

use std::fmt;

/// A source position (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl Pos {
    pub fn new(line: u32, col: u32) -> Pos {
        Pos { line, col }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Start and end position of a syntactic element, end inclusive of its
/// last token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Span {
    pub start: Pos,
    pub end: Pos,
}

impl Span {
    pub fn new(start: Pos, end: Pos) -> Span {
        Span { start, end }
    }

    pub fn lines(&self) -> (u32, u32) {
        (self.start.line, self.end.line)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnOp {
    Not,
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
    Div,
    Mod,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Or => "||",
            BinOp::And => "&&",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "%",
        }
    }

    pub(crate) fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne => 3,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 4,
            BinOp::Add | BinOp::Sub => 5,
            BinOp::Mul | BinOp::Div | BinOp::Mod => 6,
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge
        )
    }
}

/// Expressions over class variables, class parameters and literals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Int(i64),
    Bool(bool),
    Var(String),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Expr {
        Expr::Unary(UnOp::Not, Box::new(self))
    }

    pub fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    /// Names of all variables read by the expression, in order of appearance.
    pub fn vars(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Var(v) => out.push(v),
            Expr::Unary(_, a) => a.collect_vars(out),
            Expr::Binary(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Int(_) | Expr::Bool(_) => {}
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Expr::Binary(op, ..) => op.precedence(),
            Expr::Unary(..) => 7,
            _ => 8,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.prec() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(v) if *v < 0 => write!(f, "({v})"),
            Expr::Int(v) => write!(f, "{v}"),
            Expr::Bool(b) => write!(f, "{b}"),
            Expr::Var(v) => f.write_str(v),
            Expr::Unary(op, a) => {
                f.write_str(match op {
                    UnOp::Not => "!",
                    UnOp::Neg => "-",
                })?;
                a.fmt_child(f, 7)
            }
            Expr::Binary(op, a, b) => {
                let p = op.precedence();
                a.fmt_child(f, p)?;
                write!(f, " {} ", op.symbol())?;
                b.fmt_child(f, p + 1)
            }
        }
    }
}

/// Release-point and if/while conditions: boolean expressions that may also
/// test for the availability of a reply.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Guard {
    Bool(Expr),
    Reply(String),
    Not(Box<Guard>),
    And(Box<Guard>, Box<Guard>),
}

impl Guard {
    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Guard {
        Guard::Not(Box::new(self))
    }

    pub fn and(self, other: Guard) -> Guard {
        Guard::And(Box::new(self), Box::new(other))
    }

    /// Labels tested anywhere in the guard, in order, without duplicates.
    pub fn labels(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        self.collect_labels(&mut out);
        out
    }

    fn collect_labels<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Guard::Reply(t) => {
                if !out.contains(&t.as_str()) {
                    out.push(t);
                }
            }
            Guard::Not(g) => g.collect_labels(out),
            Guard::And(a, b) => {
                a.collect_labels(out);
                b.collect_labels(out);
            }
            Guard::Bool(_) => {}
        }
    }

    pub fn vars(&self) -> Vec<&str> {
        match self {
            Guard::Bool(e) => e.vars(),
            Guard::Reply(_) => Vec::new(),
            Guard::Not(g) => g.vars(),
            Guard::And(a, b) => {
                let mut v = a.vars();
                v.extend(b.vars());
                v
            }
        }
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Guard::Bool(e @ Expr::Binary(BinOp::And | BinOp::Or, ..)) => write!(f, "({e})"),
            Guard::Bool(e) => write!(f, "{e}"),
            Guard::Reply(t) => write!(f, "{t}?"),
            Guard::Not(g) => match **g {
                Guard::And(..) => write!(f, "~({g})"),
                _ => write!(f, "~{g}"),
            },
            Guard::And(a, b) => {
                write!(f, "{a} /\\ ")?;
                match **b {
                    Guard::And(..) => write!(f, "({b})"),
                    _ => write!(f, "{b}"),
                }
            }
        }
    }
}

/// Best- and worst-case execution time and, for calls, the deadline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct TimingAnnotation {
    pub best: u32,
    pub worst: u32,
    pub deadline: Option<u32>,
}

impl TimingAnnotation {
    pub fn new(best: u32, worst: u32, deadline: Option<u32>) -> TimingAnnotation {
        TimingAnnotation {
            best,
            worst,
            deadline,
        }
    }

    pub fn is_default(&self) -> bool {
        *self == TimingAnnotation::default()
    }
}

impl fmt::Display for TimingAnnotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("/*")?;
        let mut sep = "";
        if self.best != 0 || self.worst != 0 {
            write!(f, "@b{} @w{}", self.best, self.worst)?;
            sep = " ";
        }
        if let Some(d) = self.deadline {
            write!(f, "{sep}@d{d}")?;
        }
        f.write_str("*/")
    }
}

/// Receiver of an asynchronous call.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Target {
    SelfRef,
    Object(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StmtKind {
    Assign(String, Expr),
    AsyncCall {
        label: Option<String>,
        target: Target,
        method: String,
    },
    BlockingReply(String),
    Release,
    Await(Guard),
    While(Guard, Vec<Stmt>),
    If(Guard, Vec<Stmt>, Vec<Stmt>),
    Skip,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Stmt {
    pub kind: StmtKind,
    pub ann: TimingAnnotation,
    pub span: Span,
}

impl Stmt {
    pub fn new(kind: StmtKind, ann: TimingAnnotation) -> Stmt {
        Stmt {
            kind,
            ann,
            span: Span::default(),
        }
    }

    pub fn is_release_point(&self) -> bool {
        matches!(self.kind, StmtKind::Await(_) | StmtKind::Release)
    }

    pub fn is_call(&self) -> bool {
        matches!(self.kind, StmtKind::AsyncCall { .. })
    }

    /// Visit this statement and all nested ones, outermost first.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Stmt)) {
        f(self);
        match &self.kind {
            StmtKind::While(_, body) => body.iter().for_each(|s| s.walk(f)),
            StmtKind::If(_, t, e) => t.iter().chain(e).for_each(|s| s.walk(f)),
            _ => {}
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Param {
    pub name: String,
    pub ty: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InterfaceRef {
    pub name: String,
    pub args: Vec<Expr>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OpSig {
    pub cointerface: Option<String>,
    pub name: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InterfaceDecl {
    pub name: String,
    pub params: Vec<Param>,
    pub inherits: Vec<InterfaceRef>,
    pub ops: Vec<OpSig>,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarType {
    Int,
    Bool,
}

impl fmt::Display for VarType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VarType::Int => "int",
            VarType::Bool => "bool",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarDecl {
    pub name: String,
    pub ty: VarType,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MethodDecl {
    pub cointerface: Option<String>,
    pub name: String,
    pub body: Vec<Stmt>,
    pub span: Span,
}

impl MethodDecl {
    /// Every statement of the body, nested ones included, in source order.
    pub fn statements(&self) -> Vec<&Stmt> {
        let mut out = Vec::new();
        for s in &self.body {
            s.walk(&mut |s| out.push(s));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassDecl {
    pub name: String,
    pub params: Vec<Param>,
    pub implements: Vec<InterfaceRef>,
    pub vars: Vec<VarDecl>,
    pub methods: Vec<MethodDecl>,
    pub span: Span,
}

impl ClassDecl {
    pub fn method(&self, name: &str) -> Option<&MethodDecl> {
        self.methods.iter().find(|m| m.name == name)
    }

    pub fn var(&self, name: &str) -> Option<&VarDecl> {
        self.vars.iter().find(|v| v.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SourceModel {
    pub interfaces: Vec<InterfaceDecl>,
    pub classes: Vec<ClassDecl>,
}

impl SourceModel {
    pub fn class(&self, name: &str) -> Option<&ClassDecl> {
        self.classes.iter().find(|c| c.name == name)
    }

    pub fn interface(&self, name: &str) -> Option<&InterfaceDecl> {
        self.interfaces.iter().find(|i| i.name == name)
    }

    /// The same model with every span cleared, for structural comparison.
    pub fn without_spans(&self) -> SourceModel {
        let mut m = self.clone();
        for i in &mut m.interfaces {
            i.span = Span::default();
            for op in &mut i.ops {
                op.span = Span::default();
            }
        }
        for c in &mut m.classes {
            c.span = Span::default();
            for v in &mut c.vars {
                v.span = Span::default();
            }
            for mtd in &mut c.methods {
                mtd.span = Span::default();
                clear_spans(&mut mtd.body);
            }
        }
        m
    }
}

fn clear_spans(body: &mut [Stmt]) {
    for s in body {
        s.span = Span::default();
        match &mut s.kind {
            StmtKind::While(_, b) => clear_spans(b),
            StmtKind::If(_, t, e) => {
                clear_spans(t);
                clear_spans(e);
            }
            _ => {}
        }
    }
}
