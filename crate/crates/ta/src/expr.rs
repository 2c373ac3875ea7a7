//! Expression and statement syntax of the timed-automata language.
//!
//! This is the subset of the UPPAAL 4.x C-like language that the generated
//! models and hand-written interface automata need: bounded integers,
//! booleans, clocks, arrays, functions with scalar locals, and the
//! `forall`/`exists` quantifiers.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnOp {
    Neg,
    Not,
    PreInc,
    PreDec,
    PostInc,
    PostDec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Lt,
    Le,
    Eq,
    Ne,
    Ge,
    Gt,
    And,
    Or,
    Imply,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "%",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Ge => ">=",
            BinOp::Gt => ">",
            BinOp::And => "&&",
            BinOp::Or => "||",
            BinOp::Imply => "imply",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Imply => 3,
            BinOp::Or => 4,
            BinOp::And => 5,
            BinOp::Eq | BinOp::Ne => 6,
            BinOp::Lt | BinOp::Le | BinOp::Ge | BinOp::Gt => 7,
            BinOp::Add | BinOp::Sub => 8,
            BinOp::Mul | BinOp::Div | BinOp::Mod => 9,
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            BinOp::Lt | BinOp::Le | BinOp::Eq | BinOp::Ne | BinOp::Ge | BinOp::Gt
        )
    }

    /// The relation obtained by swapping operands (`a < b` iff `b > a`).
    pub fn flipped(self) -> BinOp {
        match self {
            BinOp::Lt => BinOp::Gt,
            BinOp::Le => BinOp::Ge,
            BinOp::Ge => BinOp::Le,
            BinOp::Gt => BinOp::Lt,
            other => other,
        }
    }

    /// The complementary relation (`!(a < b)` iff `a >= b`).
    pub fn negated(self) -> Option<BinOp> {
        Some(match self {
            BinOp::Lt => BinOp::Ge,
            BinOp::Le => BinOp::Gt,
            BinOp::Eq => BinOp::Ne,
            BinOp::Ne => BinOp::Eq,
            BinOp::Ge => BinOp::Lt,
            BinOp::Gt => BinOp::Le,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AssignOp {
    Set,
    Add,
    Sub,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Int(i64),
    Bool(bool),
    Ident(String),
    Index(Box<Expr>, Box<Expr>),
    /// `Process.location` or `Process.variable`, only meaningful in queries.
    Member(Box<Expr>, String),
    Call(String, Vec<Expr>),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Cond(Box<Expr>, Box<Expr>, Box<Expr>),
    Assign(AssignOp, Box<Expr>, Box<Expr>),
    Quant {
        q: Quantifier,
        var: String,
        lo: Box<Expr>,
        hi: Box<Expr>,
        body: Box<Expr>,
    },
}

impl Expr {
    pub fn ident(name: impl Into<String>) -> Expr {
        Expr::Ident(name.into())
    }

    pub fn int(v: i64) -> Expr {
        Expr::Int(v)
    }

    pub fn index(self, i: Expr) -> Expr {
        Expr::Index(Box::new(self), Box::new(i))
    }

    pub fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Expr {
        Expr::Unary(UnOp::Not, Box::new(self))
    }

    pub fn and(self, other: Expr) -> Expr {
        Expr::bin(BinOp::And, self, other)
    }

    pub fn or(self, other: Expr) -> Expr {
        Expr::bin(BinOp::Or, self, other)
    }

    pub fn assign(target: Expr, value: Expr) -> Expr {
        Expr::Assign(AssignOp::Set, Box::new(target), Box::new(value))
    }

    /// Conjunction of all expressions; `true` when empty.
    pub fn conj(parts: impl IntoIterator<Item = Expr>) -> Expr {
        let mut it = parts.into_iter();
        match it.next() {
            None => Expr::Bool(true),
            Some(first) => it.fold(first, Expr::and),
        }
    }

    /// Disjunction of all expressions; `false` when empty.
    pub fn disj(parts: impl IntoIterator<Item = Expr>) -> Expr {
        let mut it = parts.into_iter();
        match it.next() {
            None => Expr::Bool(false),
            Some(first) => it.fold(first, Expr::or),
        }
    }

    /// Split a conjunction into its conjuncts.
    pub fn conjuncts(&self) -> Vec<&Expr> {
        let mut out = Vec::new();
        fn walk<'a>(e: &'a Expr, out: &mut Vec<&'a Expr>) {
            match e {
                Expr::Binary(BinOp::And, a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                other => out.push(other),
            }
        }
        walk(self, &mut out);
        out
    }

    /// Visit every identifier that is read or written, with its innermost
    /// binding scope ignored (quantifier variables are reported as well).
    pub fn visit_idents<'a>(&'a self, f: &mut impl FnMut(&'a str)) {
        match self {
            Expr::Int(_) | Expr::Bool(_) => {}
            Expr::Ident(n) => f(n),
            Expr::Index(a, b) => {
                a.visit_idents(f);
                b.visit_idents(f);
            }
            Expr::Member(a, _) => a.visit_idents(f),
            Expr::Call(name, args) => {
                f(name);
                for a in args {
                    a.visit_idents(f);
                }
            }
            Expr::Unary(_, a) => a.visit_idents(f),
            Expr::Binary(_, a, b) | Expr::Assign(_, a, b) => {
                a.visit_idents(f);
                b.visit_idents(f);
            }
            Expr::Cond(a, b, c) => {
                a.visit_idents(f);
                b.visit_idents(f);
                c.visit_idents(f);
            }
            Expr::Quant { lo, hi, body, .. } => {
                lo.visit_idents(f);
                hi.visit_idents(f);
                body.visit_idents(f);
            }
        }
    }

    /// Root variable name of an lvalue such as `a[i][j]`.
    pub fn lvalue_root(&self) -> Option<&str> {
        match self {
            Expr::Ident(n) => Some(n),
            Expr::Index(a, _) => a.lvalue_root(),
            _ => None,
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Assign(..) => 1,
            Expr::Quant { .. } => 1,
            Expr::Cond(..) => 2,
            Expr::Binary(op, ..) => op.precedence(),
            Expr::Unary(UnOp::PostInc | UnOp::PostDec, _) => 11,
            Expr::Unary(..) => 10,
            _ => 12,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(v) => write!(f, "{v}"),
            Expr::Bool(b) => write!(f, "{b}"),
            Expr::Ident(n) => f.write_str(n),
            Expr::Index(a, i) => {
                a.fmt_child(f, 11)?;
                write!(f, "[{i}]")
            }
            Expr::Member(a, m) => {
                a.fmt_child(f, 11)?;
                write!(f, ".{m}")
            }
            Expr::Call(name, args) => {
                write!(f, "{name}(")?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Expr::Unary(op, a) => match op {
                UnOp::Neg => {
                    // `- -a` must not print as the decrement `--a`
                    let starts_with_minus = matches!(**a, Expr::Unary(UnOp::Neg | UnOp::PreDec, _))
                        || matches!(**a, Expr::Int(v) if v < 0);
                    if starts_with_minus {
                        write!(f, "-({a})")
                    } else {
                        f.write_str("-")?;
                        a.fmt_child(f, 10)
                    }
                }
                UnOp::Not => {
                    f.write_str("!")?;
                    a.fmt_child(f, 10)
                }
                UnOp::PreInc => {
                    f.write_str("++")?;
                    a.fmt_child(f, 10)
                }
                UnOp::PreDec => {
                    f.write_str("--")?;
                    a.fmt_child(f, 10)
                }
                UnOp::PostInc => {
                    a.fmt_child(f, 11)?;
                    f.write_str("++")
                }
                UnOp::PostDec => {
                    a.fmt_child(f, 11)?;
                    f.write_str("--")
                }
            },
            Expr::Binary(BinOp::Imply, a, b) => {
                write!(f, "(")?;
                a.fmt_child(f, 4)?;
                f.write_str(") imply (")?;
                b.fmt_child(f, 4)?;
                f.write_str(")")
            }
            Expr::Binary(op, a, b) => {
                let p = op.precedence();
                a.fmt_child(f, p)?;
                write!(f, " {} ", op.symbol())?;
                // left-associative: right operand needs strictly higher precedence
                b.fmt_child(f, p + 1)
            }
            Expr::Cond(c, a, b) => {
                c.fmt_child(f, 3)?;
                f.write_str(" ? ")?;
                a.fmt_child(f, 3)?;
                f.write_str(" : ")?;
                b.fmt_child(f, 2)
            }
            Expr::Assign(op, a, b) => {
                let sym = match op {
                    AssignOp::Set => "=",
                    AssignOp::Add => "+=",
                    AssignOp::Sub => "-=",
                };
                a.fmt_child(f, 2)?;
                write!(f, " {sym} ")?;
                b.fmt_child(f, 1)
            }
            Expr::Quant {
                q,
                var,
                lo,
                hi,
                body,
            } => {
                let kw = match q {
                    Quantifier::Forall => "forall",
                    Quantifier::Exists => "exists",
                };
                write!(f, "{kw} ({var} : int[{lo},{hi}]) ")?;
                body.fmt_child(f, 12)
            }
        }
    }
}

/// Base types of declared variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BaseType {
    /// Bounded integer; `None` means the default range `[-32768, 32767]`.
    Int(Option<(Expr, Expr)>),
    Bool,
    Clock,
    Chan,
    Void,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum TypePrefix {
    #[default]
    None,
    Const,
    Meta,
    Urgent,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Type {
    pub prefix: TypePrefix,
    pub base: BaseType,
}

impl Type {
    pub fn int() -> Type {
        Type {
            prefix: TypePrefix::None,
            base: BaseType::Int(None),
        }
    }

    pub fn const_int() -> Type {
        Type {
            prefix: TypePrefix::Const,
            base: BaseType::Int(None),
        }
    }

    pub fn ranged(lo: Expr, hi: Expr) -> Type {
        Type {
            prefix: TypePrefix::None,
            base: BaseType::Int(Some((lo, hi))),
        }
    }

    pub fn bool() -> Type {
        Type {
            prefix: TypePrefix::None,
            base: BaseType::Bool,
        }
    }

    pub fn clock() -> Type {
        Type {
            prefix: TypePrefix::None,
            base: BaseType::Clock,
        }
    }

    pub fn chan(urgent: bool) -> Type {
        Type {
            prefix: if urgent {
                TypePrefix::Urgent
            } else {
                TypePrefix::None
            },
            base: BaseType::Chan,
        }
    }

    pub fn with_prefix(mut self, prefix: TypePrefix) -> Type {
        self.prefix = prefix;
        self
    }

    pub fn is_const(&self) -> bool {
        self.prefix == TypePrefix::Const
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.prefix {
            TypePrefix::None => {}
            TypePrefix::Const => f.write_str("const ")?,
            TypePrefix::Meta => f.write_str("meta ")?,
            TypePrefix::Urgent => f.write_str("urgent ")?,
        }
        match &self.base {
            BaseType::Int(None) => f.write_str("int"),
            BaseType::Int(Some((lo, hi))) => write!(f, "int[{lo},{hi}]"),
            BaseType::Bool => f.write_str("bool"),
            BaseType::Clock => f.write_str("clock"),
            BaseType::Chan => f.write_str("chan"),
            BaseType::Void => f.write_str("void"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Initializer {
    Expr(Expr),
    List(Vec<Initializer>),
}

impl From<Expr> for Initializer {
    fn from(e: Expr) -> Initializer {
        Initializer::Expr(e)
    }
}

impl fmt::Display for Initializer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Initializer::Expr(e) => write!(f, "{e}"),
            Initializer::List(items) => {
                f.write_str("{ ")?;
                for (k, it) in items.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{it}")?;
                }
                f.write_str(" }")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarDecl {
    pub name: String,
    pub ty: Type,
    pub dims: Vec<Expr>,
    pub init: Option<Initializer>,
}

impl VarDecl {
    pub fn new(name: impl Into<String>, ty: Type) -> VarDecl {
        VarDecl {
            name: name.into(),
            ty,
            dims: Vec::new(),
            init: None,
        }
    }

    pub fn dims(mut self, dims: impl IntoIterator<Item = Expr>) -> VarDecl {
        self.dims = dims.into_iter().collect();
        self
    }

    pub fn init(mut self, init: impl Into<Initializer>) -> VarDecl {
        self.init = Some(init.into());
        self
    }
}

impl fmt::Display for VarDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.ty, self.name)?;
        for d in &self.dims {
            write!(f, "[{d}]")?;
        }
        if let Some(init) = &self.init {
            write!(f, " = {init}")?;
        }
        f.write_str(";")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Param {
    pub ty: Type,
    pub name: String,
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.ty, self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Stmt {
    Local(VarDecl),
    Expr(Expr),
    If(Expr, Box<Stmt>, Option<Box<Stmt>>),
    While(Expr, Box<Stmt>),
    For {
        init: Option<Expr>,
        cond: Option<Expr>,
        step: Option<Expr>,
        body: Box<Stmt>,
    },
    /// `for (i : int[lo,hi]) body`
    ForRange {
        var: String,
        lo: Expr,
        hi: Expr,
        body: Box<Stmt>,
    },
    Return(Option<Expr>),
    Block(Vec<Stmt>),
    Empty,
}

impl Stmt {
    fn write(&self, f: &mut fmt::Formatter<'_>, indent: usize) -> fmt::Result {
        let pad = "    ".repeat(indent);
        match self {
            Stmt::Local(v) => writeln!(f, "{pad}{v}"),
            Stmt::Expr(e) => writeln!(f, "{pad}{e};"),
            Stmt::If(c, t, e) => {
                writeln!(f, "{pad}if ({c})")?;
                t.write_nested(f, indent)?;
                if let Some(e) = e {
                    writeln!(f, "{pad}else")?;
                    e.write_nested(f, indent)?;
                }
                Ok(())
            }
            Stmt::While(c, b) => {
                writeln!(f, "{pad}while ({c})")?;
                b.write_nested(f, indent)
            }
            Stmt::For {
                init,
                cond,
                step,
                body,
            } => {
                let opt = |e: &Option<Expr>| e.as_ref().map(|e| e.to_string()).unwrap_or_default();
                writeln!(f, "{pad}for ({}; {}; {})", opt(init), opt(cond), opt(step))?;
                body.write_nested(f, indent)
            }
            Stmt::ForRange { var, lo, hi, body } => {
                writeln!(f, "{pad}for ({var} : int[{lo},{hi}])")?;
                body.write_nested(f, indent)
            }
            Stmt::Return(None) => writeln!(f, "{pad}return;"),
            Stmt::Return(Some(e)) => writeln!(f, "{pad}return {e};"),
            Stmt::Block(items) => {
                writeln!(f, "{pad}{{")?;
                for s in items {
                    s.write(f, indent + 1)?;
                }
                writeln!(f, "{pad}}}")
            }
            Stmt::Empty => writeln!(f, "{pad};"),
        }
    }

    fn write_nested(&self, f: &mut fmt::Formatter<'_>, indent: usize) -> fmt::Result {
        match self {
            Stmt::Block(_) => self.write(f, indent),
            other => other.write(f, indent + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FuncDecl {
    pub ret: Type,
    pub name: String,
    pub params: Vec<Param>,
    pub body: Vec<Stmt>,
}

impl fmt::Display for FuncDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}(", self.ret, self.name)?;
        for (k, p) in self.params.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        writeln!(f, ")")?;
        Stmt::Block(self.body.clone()).write(f, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Decl {
    Var(VarDecl),
    Func(FuncDecl),
}

impl Decl {
    pub fn name(&self) -> &str {
        match self {
            Decl::Var(v) => &v.name,
            Decl::Func(fd) => &fd.name,
        }
    }
}

/// An ordered list of declarations (global or template-local).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Declarations {
    pub items: Vec<Decl>,
}

impl Declarations {
    pub fn new() -> Declarations {
        Declarations::default()
    }

    pub fn push_var(&mut self, v: VarDecl) {
        self.items.push(Decl::Var(v));
    }

    pub fn push_func(&mut self, f: FuncDecl) {
        self.items.push(Decl::Func(f));
    }

    pub fn extend(&mut self, other: Declarations) {
        self.items.extend(other.items);
    }

    pub fn vars(&self) -> impl Iterator<Item = &VarDecl> {
        self.items.iter().filter_map(|d| match d {
            Decl::Var(v) => Some(v),
            _ => None,
        })
    }

    pub fn funcs(&self) -> impl Iterator<Item = &FuncDecl> {
        self.items.iter().filter_map(|d| match d {
            Decl::Func(fd) => Some(fd),
            _ => None,
        })
    }

    pub fn get_var(&self, name: &str) -> Option<&VarDecl> {
        self.vars().find(|v| v.name == name)
    }

    pub fn get_func(&self, name: &str) -> Option<&FuncDecl> {
        self.funcs().find(|fd| fd.name == name)
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

impl fmt::Display for Declarations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.items {
            match d {
                Decl::Var(v) => writeln!(f, "{v}")?,
                Decl::Func(fd) => write!(f, "{fd}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printing_respects_precedence() {
        let e = Expr::bin(
            BinOp::Sub,
            Expr::ident("a"),
            Expr::bin(BinOp::Sub, Expr::ident("b"), Expr::ident("c")),
        );
        assert_eq!(e.to_string(), "a - (b - c)");
        let e = Expr::ident("s1")
            .index(Expr::ident("self"))
            .and(Expr::ident("s2").index(Expr::ident("self")).not());
        assert_eq!(e.to_string(), "s1[self] && !s2[self]");
        let e = Expr::ident("a").or(Expr::ident("b")).and(Expr::ident("c"));
        assert_eq!(e.to_string(), "(a || b) && c");
    }

    #[test]
    fn conj_of_nothing_is_true() {
        assert_eq!(Expr::conj(Vec::new()), Expr::Bool(true));
        assert_eq!(Expr::conj([Expr::ident("a")]).to_string(), "a");
    }
}
