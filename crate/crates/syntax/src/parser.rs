//! Recursive-descent parser for interfaces and classes.

use crate::annotation::extract_annotation;
use crate::ast::*;
use crate::error::SyntaxError;
use crate::lexer::{tokenize, Tok, Token};

const KEYWORDS: &[&str] = &[
    "interface",
    "inherits",
    "begin",
    "end",
    "with",
    "op",
    "class",
    "implements",
    "var",
    "int",
    "bool",
    "release",
    "await",
    "while",
    "do",
    "od",
    "if",
    "then",
    "else",
    "fi",
    "skip",
    "self",
    "true",
    "false",
];

/// Tokens that close a statement sequence.
const SEQ_END: &[&str] = &["od", "else", "fi", "end", "op", "with"];

type PResult<T> = Result<T, SyntaxError>;

pub fn parse_model(src: &str) -> PResult<SourceModel> {
    let mut p = Parser::new(src)?;
    let mut model = SourceModel::default();
    loop {
        match p.peek() {
            Tok::Eof => break,
            Tok::Ident(k) if k == "interface" => model.interfaces.push(p.interface()?),
            Tok::Ident(k) if k == "class" => model.classes.push(p.class()?),
            _ => return Err(p.unexpected("`interface` or `class`")),
        }
    }
    Ok(model)
}

/// Parse a standalone guard, as written after `await`.
pub fn parse_guard(src: &str) -> PResult<Guard> {
    let mut p = Parser::new(src)?;
    let g = p.guard()?;
    p.expect_eof()?;
    Ok(g)
}

/// Parse a standalone expression.
pub fn parse_expr(src: &str) -> PResult<Expr> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
}

impl Parser {
    fn new(src: &str) -> PResult<Parser> {
        Ok(Parser {
            toks: tokenize(src)?,
            at: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.at + k).min(self.toks.len() - 1)].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    fn last_end(&self) -> Pos {
        self.toks[self.at.saturating_sub(1)].end
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn describe(t: &Tok) -> String {
        match t {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(v) => format!("`{v}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Annotation(_) => "a timing annotation".to_string(),
            Tok::Eof => "end of input".to_string(),
        }
    }

    fn unexpected(&self, wanted: &str) -> SyntaxError {
        SyntaxError::new(
            self.pos(),
            format!("expected {wanted}, found {}", Self::describe(self.peek())),
        )
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == k)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        if self.is_kw(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{s}`")))
        }
    }

    fn expect_kw(&mut self, k: &str) -> PResult<()> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{k}`")))
        }
    }

    fn expect_eof(&mut self) -> PResult<()> {
        if matches!(self.peek(), Tok::Eof) {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    fn stray_annotation(&self) -> PResult<()> {
        if matches!(self.peek(), Tok::Annotation(_)) {
            return Err(SyntaxError::new(
                self.pos(),
                "timing annotation does not follow a statement",
            ));
        }
        Ok(())
    }

    fn params(&mut self) -> PResult<Vec<Param>> {
        let mut out = Vec::new();
        if !self.eat_sym("(") {
            return Ok(out);
        }
        if self.eat_sym(")") {
            return Ok(out);
        }
        loop {
            let name = self.ident()?;
            self.expect_sym(":")?;
            let ty = match self.peek().clone() {
                Tok::Ident(t) if t == "int" || t == "bool" || !KEYWORDS.contains(&t.as_str()) => {
                    self.bump();
                    t
                }
                _ => return Err(self.unexpected("a type name")),
            };
            out.push(Param { name, ty });
            if !self.eat_sym(",") {
                break;
            }
        }
        self.expect_sym(")")?;
        Ok(out)
    }

    fn interface_ref(&mut self) -> PResult<InterfaceRef> {
        let name = self.ident()?;
        let mut args = Vec::new();
        if self.eat_sym("(") {
            loop {
                args.push(self.expr()?);
                if !self.eat_sym(",") {
                    break;
                }
            }
            self.expect_sym(")")?;
        }
        Ok(InterfaceRef { name, args })
    }

    fn interface(&mut self) -> PResult<InterfaceDecl> {
        let start = self.pos();
        self.expect_kw("interface")?;
        let name = self.ident()?;
        let params = self.params()?;
        let mut inherits = Vec::new();
        if self.eat_kw("inherits") {
            loop {
                inherits.push(self.interface_ref()?);
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        self.expect_kw("begin")?;
        let mut ops = Vec::new();
        loop {
            let op_start = self.pos();
            let cointerface = if self.eat_kw("with") {
                Some(self.ident()?)
            } else {
                None
            };
            if cointerface.is_none() && !self.is_kw("op") {
                break;
            }
            self.expect_kw("op")?;
            let name = self.ident()?;
            ops.push(OpSig {
                cointerface,
                name,
                span: Span::new(op_start, self.last_end()),
            });
        }
        if ops.is_empty() {
            return Err(self.unexpected("`op`"));
        }
        self.expect_kw("end")?;
        Ok(InterfaceDecl {
            name,
            params,
            inherits,
            ops,
            span: Span::new(start, self.last_end()),
        })
    }

    fn class(&mut self) -> PResult<ClassDecl> {
        let start = self.pos();
        self.expect_kw("class")?;
        let name = self.ident()?;
        let params = self.params()?;
        let mut implements = Vec::new();
        if self.eat_kw("implements") {
            loop {
                implements.push(self.interface_ref()?);
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        self.expect_kw("begin")?;
        let mut vars = Vec::new();
        while self.eat_kw("var") {
            let mut names = Vec::new();
            loop {
                let p = self.pos();
                names.push((self.ident()?, p));
                if !self.eat_sym(",") {
                    break;
                }
            }
            self.expect_sym(":")?;
            let ty = if self.eat_kw("int") {
                VarType::Int
            } else if self.eat_kw("bool") {
                VarType::Bool
            } else {
                return Err(self.unexpected("`int` or `bool`"));
            };
            let end = self.last_end();
            for (n, p) in names {
                vars.push(VarDecl {
                    name: n,
                    ty,
                    span: Span::new(p, end),
                });
            }
            self.eat_sym(";");
        }
        let mut methods = Vec::new();
        while self.is_kw("with") || self.is_kw("op") {
            methods.push(self.method()?);
        }
        if methods.is_empty() {
            return Err(self.unexpected("a method (`op`)"));
        }
        self.stray_annotation()?;
        self.expect_kw("end")?;
        Ok(ClassDecl {
            name,
            params,
            implements,
            vars,
            methods,
            span: Span::new(start, self.last_end()),
        })
    }

    fn method(&mut self) -> PResult<MethodDecl> {
        let start = self.pos();
        let cointerface = if self.eat_kw("with") {
            Some(self.ident()?)
        } else {
            None
        };
        self.expect_kw("op")?;
        let name = self.ident()?;
        self.expect_sym("==")?;
        let body = self.seq()?;
        Ok(MethodDecl {
            cointerface,
            name,
            body,
            span: Span::new(start, self.last_end()),
        })
    }

    fn at_seq_end(&self) -> bool {
        match self.peek() {
            Tok::Eof => true,
            Tok::Ident(k) => SEQ_END.contains(&k.as_str()),
            _ => false,
        }
    }

    /// `s (; s)*`, tolerating a trailing `;`. An annotation directly after
    /// a `;` belongs to the statement before it.
    fn seq(&mut self) -> PResult<Vec<Stmt>> {
        let mut out = Vec::new();
        loop {
            let (mut s, annotated) = self.stmt()?;
            let more = self.eat_sym(";");
            if more {
                if let Tok::Annotation(text) = self.peek().clone() {
                    if annotated {
                        return Err(SyntaxError::new(
                            self.pos(),
                            "statement already has a timing annotation",
                        ));
                    }
                    s.ann = self.annotation(&text)?;
                    self.bump();
                }
            }
            out.push(s);
            if !more || self.at_seq_end() {
                break;
            }
        }
        self.stray_annotation()?;
        Ok(out)
    }

    fn annotation(&self, text: &str) -> PResult<TimingAnnotation> {
        extract_annotation(text).map_err(|e| SyntaxError::new(self.pos(), e.to_string()))
    }

    fn stmt(&mut self) -> PResult<(Stmt, bool)> {
        self.stray_annotation()?;
        let start = self.pos();
        let kind = self.stmt_kind()?;
        let span = Span::new(start, self.last_end());
        let mut ann = TimingAnnotation::default();
        let mut annotated = false;
        if let Tok::Annotation(text) = self.peek().clone() {
            ann = self.annotation(&text)?;
            annotated = true;
            self.bump();
        }
        Ok((Stmt { kind, ann, span }, annotated))
    }

    fn call_tail(&mut self, label: Option<String>) -> PResult<StmtKind> {
        // after `!`: [x .] m ( )
        let first = if self.eat_kw("self") {
            None
        } else {
            Some(self.ident()?)
        };
        let (target, method) = if self.eat_sym(".") {
            let target = match first {
                None => Target::SelfRef,
                Some(x) => Target::Object(x),
            };
            (target, self.ident()?)
        } else {
            match first {
                Some(m) => (Target::SelfRef, m),
                None => return Err(self.unexpected("`.`")),
            }
        };
        self.expect_sym("(")?;
        if !self.is_sym(")") {
            return Err(SyntaxError::new(
                self.pos(),
                "method parameters are not supported",
            ));
        }
        self.expect_sym(")")?;
        Ok(StmtKind::AsyncCall {
            label,
            target,
            method,
        })
    }

    fn stmt_kind(&mut self) -> PResult<StmtKind> {
        let at = self.pos();
        match self.peek().clone() {
            Tok::Ident(k) if k == "skip" => {
                self.bump();
                Ok(StmtKind::Skip)
            }
            Tok::Ident(k) if k == "release" => {
                self.bump();
                Ok(StmtKind::Release)
            }
            Tok::Ident(k) if k == "await" => {
                self.bump();
                if !self.starts_guard() {
                    return Err(SyntaxError::new(at, "`await` needs a guard"));
                }
                Ok(StmtKind::Await(self.guard()?))
            }
            Tok::Ident(k) if k == "while" => {
                self.bump();
                let g = self.guard()?;
                self.expect_kw("do")?;
                let body = self.seq()?;
                self.expect_kw("od")?;
                Ok(StmtKind::While(g, body))
            }
            Tok::Ident(k) if k == "if" => {
                self.bump();
                let g = self.guard()?;
                self.expect_kw("then")?;
                let then = self.seq()?;
                self.expect_kw("else")?;
                let other = self.seq()?;
                if !self.eat_kw("fi") {
                    self.expect_kw("end")?;
                }
                Ok(StmtKind::If(g, then, other))
            }
            Tok::Sym("!") => {
                self.bump();
                self.call_tail(None)
            }
            Tok::Ident(_) => {
                let name = self.ident()?;
                if self.eat_sym(":=") {
                    Ok(StmtKind::Assign(name, self.expr()?))
                } else if self.eat_sym("!") {
                    self.call_tail(Some(name))
                } else if self.eat_sym("?") {
                    Ok(StmtKind::BlockingReply(name))
                } else {
                    Err(self.unexpected("`:=`, `!` or `?`"))
                }
            }
            _ => Err(self.unexpected("a statement")),
        }
    }

    fn starts_guard(&self) -> bool {
        match self.peek() {
            Tok::Ident(k) => !KEYWORDS.contains(&k.as_str()) || k == "true" || k == "false",
            Tok::Int(_) => true,
            Tok::Sym(s) => matches!(*s, "(" | "~" | "!" | "-"),
            _ => false,
        }
    }

    fn guard(&mut self) -> PResult<Guard> {
        let mut g = self.guard_term()?;
        while self.eat_sym("/\\") {
            let r = self.guard_term()?;
            g = g.and(r);
        }
        Ok(g)
    }

    fn continues_expr(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Sym(
                "||" | "\\/"
                    | "&&"
                    | "=="
                    | "!="
                    | "<"
                    | "<="
                    | ">"
                    | ">="
                    | "+"
                    | "-"
                    | "*"
                    | "/"
                    | "%"
            )
        )
    }

    fn guard_term(&mut self) -> PResult<Guard> {
        if self.eat_sym("~") {
            return Ok(self.guard_term()?.not());
        }
        if let (Tok::Ident(t), Tok::Sym("?")) = (self.peek().clone(), self.peek_at(1)) {
            if !KEYWORDS.contains(&t.as_str()) {
                self.bump();
                self.bump();
                return Ok(Guard::Reply(t));
            }
        }
        if self.is_sym("(") {
            let save = self.at;
            self.bump();
            if let Ok(g) = self.guard() {
                if self.eat_sym(")") && !self.continues_expr() {
                    return Ok(g);
                }
            }
            self.at = save;
        }
        Ok(Guard::Bool(self.expr()?))
    }

    pub(crate) fn expr(&mut self) -> PResult<Expr> {
        self.binary(1)
    }

    fn binop(&self) -> Option<BinOp> {
        Some(match self.peek() {
            Tok::Sym("||" | "\\/") => BinOp::Or,
            Tok::Sym("&&") => BinOp::And,
            Tok::Sym("==") => BinOp::Eq,
            Tok::Sym("!=") => BinOp::Ne,
            Tok::Sym("<") => BinOp::Lt,
            Tok::Sym("<=") => BinOp::Le,
            Tok::Sym(">") => BinOp::Gt,
            Tok::Sym(">=") => BinOp::Ge,
            Tok::Sym("+") => BinOp::Add,
            Tok::Sym("-") => BinOp::Sub,
            Tok::Sym("*") => BinOp::Mul,
            Tok::Sym("/") => BinOp::Div,
            Tok::Sym("%") => BinOp::Mod,
            _ => return None,
        })
    }

    fn binary(&mut self, min: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binop() {
            let p = op.precedence();
            if p < min {
                break;
            }
            self.bump();
            let rhs = self.binary(p + 1)?;
            lhs = Expr::bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.eat_sym("!") {
            return Ok(Expr::Unary(UnOp::Not, Box::new(self.unary()?)));
        }
        if self.eat_sym("-") {
            return Ok(Expr::Unary(UnOp::Neg, Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(Expr::Int(v))
            }
            Tok::Ident(k) if k == "true" || k == "false" => {
                self.bump();
                Ok(Expr::Bool(k == "true"))
            }
            Tok::Ident(_) => Ok(Expr::Var(self.ident()?)),
            Tok::Sym("(") => {
                self.bump();
                // a parenthesized negative literal prints back as `(-n)`
                if let (Tok::Sym("-"), Tok::Int(v), Tok::Sym(")")) = (
                    self.peek().clone(),
                    self.peek_at(1).clone(),
                    self.peek_at(2),
                ) {
                    self.bump();
                    self.bump();
                    self.bump();
                    return Ok(Expr::Int(-v));
                }
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            _ => Err(self.unexpected("an expression")),
        }
    }
}
