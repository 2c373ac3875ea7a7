//! Recursive-descent parser for the expression language, declarations and
//! the XTA-style textual automaton format.

use crate::error::SyntaxError;
use crate::expr::*;
use crate::lexer::{tokenize, Tok, Token};
use crate::model::{Direction, Edge, Instance, Location, Sync, Template, Urgency};

pub struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, SyntaxError>;

const TYPE_WORDS: &[&str] = &[
    "const", "meta", "urgent", "int", "bool", "clock", "chan", "void",
];

impl Parser {
    pub fn new(src: &str) -> PResult<Parser> {
        Ok(Parser {
            toks: tokenize(src)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        let t = &self.toks[self.pos];
        let found = match &t.tok {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(v) => format!("`{v}`"),
            Tok::Punct(p) => format!("`{p}`"),
            Tok::Eof => "end of input".to_string(),
        };
        Err(SyntaxError::new(
            t.line,
            t.col,
            format!("{}, found {found}", msg.into()),
        ))
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            self.err(format!("expected `{p}`"))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            self.err(format!("expected `{kw}`"))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.err("expected identifier"),
        }
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    fn expect_eof(&self) -> PResult<()> {
        if self.at_eof() {
            Ok(())
        } else {
            self.err("expected end of input")
        }
    }

    // ---- expressions ----

    pub fn expr(&mut self) -> PResult<Expr> {
        let lhs = self.cond()?;
        let op = if self.eat_punct("=") || self.eat_punct(":=") {
            AssignOp::Set
        } else if self.eat_punct("+=") {
            AssignOp::Add
        } else if self.eat_punct("-=") {
            AssignOp::Sub
        } else {
            return Ok(lhs);
        };
        let rhs = self.expr()?;
        Ok(Expr::Assign(op, Box::new(lhs), Box::new(rhs)))
    }

    fn cond(&mut self) -> PResult<Expr> {
        let c = self.imply()?;
        if self.eat_punct("?") {
            let a = self.expr()?;
            self.expect_punct(":")?;
            let b = self.cond()?;
            return Ok(Expr::Cond(Box::new(c), Box::new(a), Box::new(b)));
        }
        Ok(c)
    }

    fn imply(&mut self) -> PResult<Expr> {
        let mut lhs = self.or()?;
        while self.eat_kw("imply") {
            let rhs = self.or()?;
            lhs = Expr::bin(BinOp::Imply, lhs, rhs);
        }
        Ok(lhs)
    }

    fn or(&mut self) -> PResult<Expr> {
        let mut lhs = self.and()?;
        while self.eat_punct("||") || self.eat_kw("or") {
            let rhs = self.and()?;
            lhs = Expr::bin(BinOp::Or, lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> PResult<Expr> {
        let mut lhs = self.equality()?;
        while self.eat_punct("&&") || self.eat_kw("and") {
            let rhs = self.equality()?;
            lhs = Expr::bin(BinOp::And, lhs, rhs);
        }
        Ok(lhs)
    }

    fn equality(&mut self) -> PResult<Expr> {
        let mut lhs = self.relational()?;
        loop {
            let op = if self.eat_punct("==") {
                BinOp::Eq
            } else if self.eat_punct("!=") {
                BinOp::Ne
            } else {
                return Ok(lhs);
            };
            let rhs = self.relational()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn relational(&mut self) -> PResult<Expr> {
        let mut lhs = self.additive()?;
        loop {
            let op = if self.eat_punct("<") {
                BinOp::Lt
            } else if self.eat_punct("<=") {
                BinOp::Le
            } else if self.eat_punct(">=") {
                BinOp::Ge
            } else if self.eat_punct(">") {
                BinOp::Gt
            } else {
                return Ok(lhs);
            };
            let rhs = self.additive()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn additive(&mut self) -> PResult<Expr> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = if self.eat_punct("+") {
                BinOp::Add
            } else if self.eat_punct("-") {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.multiplicative()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn multiplicative(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat_punct("*") {
                BinOp::Mul
            } else if self.eat_punct("/") {
                BinOp::Div
            } else if self.eat_punct("%") {
                BinOp::Mod
            } else {
                return Ok(lhs);
            };
            let rhs = self.unary()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        let op = if self.eat_punct("-") {
            UnOp::Neg
        } else if self.eat_punct("!") || self.eat_kw("not") {
            UnOp::Not
        } else if self.eat_punct("++") {
            UnOp::PreInc
        } else if self.eat_punct("--") {
            UnOp::PreDec
        } else if self.eat_punct("+") {
            return self.unary();
        } else {
            return self.postfix();
        };
        let e = self.unary()?;
        // fold negative literals so that `-1` round-trips as a literal
        if let (UnOp::Neg, Expr::Int(v)) = (op, &e) {
            return Ok(Expr::Int(-v));
        }
        Ok(Expr::Unary(op, Box::new(e)))
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        loop {
            if self.eat_punct("[") {
                let i = self.expr()?;
                self.expect_punct("]")?;
                e = e.index(i);
            } else if self.is_punct(".") {
                self.bump();
                let m = self.ident()?;
                e = Expr::Member(Box::new(e), m);
            } else if self.eat_punct("++") {
                e = Expr::Unary(UnOp::PostInc, Box::new(e));
            } else if self.eat_punct("--") {
                e = Expr::Unary(UnOp::PostDec, Box::new(e));
            } else {
                return Ok(e);
            }
        }
    }

    fn primary(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(Expr::Int(v))
            }
            Tok::Punct("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect_punct(")")?;
                Ok(e)
            }
            Tok::Ident(s) => match s.as_str() {
                "true" => {
                    self.bump();
                    Ok(Expr::Bool(true))
                }
                "false" => {
                    self.bump();
                    Ok(Expr::Bool(false))
                }
                "forall" | "exists" => {
                    self.bump();
                    let q = if s == "forall" {
                        Quantifier::Forall
                    } else {
                        Quantifier::Exists
                    };
                    self.expect_punct("(")?;
                    let var = self.ident()?;
                    self.expect_punct(":")?;
                    let (lo, hi) = self.int_range()?;
                    self.expect_punct(")")?;
                    let body = self.unary()?;
                    Ok(Expr::Quant {
                        q,
                        var,
                        lo: Box::new(lo),
                        hi: Box::new(hi),
                        body: Box::new(body),
                    })
                }
                _ => {
                    self.bump();
                    if self.eat_punct("(") {
                        let mut args = Vec::new();
                        if !self.eat_punct(")") {
                            loop {
                                args.push(self.expr()?);
                                if self.eat_punct(")") {
                                    break;
                                }
                                self.expect_punct(",")?;
                            }
                        }
                        Ok(Expr::Call(s, args))
                    } else {
                        Ok(Expr::Ident(s))
                    }
                }
            },
            _ => self.err("expected expression"),
        }
    }

    fn int_range(&mut self) -> PResult<(Expr, Expr)> {
        self.expect_kw("int")?;
        self.expect_punct("[")?;
        let lo = self.expr()?;
        self.expect_punct(",")?;
        let hi = self.expr()?;
        self.expect_punct("]")?;
        Ok((lo, hi))
    }

    // ---- types and declarations ----

    fn at_type(&self) -> bool {
        matches!(self.peek(), Tok::Ident(s) if TYPE_WORDS.contains(&s.as_str()))
    }

    fn ty(&mut self) -> PResult<Type> {
        let prefix = if self.eat_kw("const") {
            TypePrefix::Const
        } else if self.eat_kw("meta") {
            TypePrefix::Meta
        } else if self.eat_kw("urgent") {
            TypePrefix::Urgent
        } else {
            TypePrefix::None
        };
        let base = if self.eat_kw("int") {
            if self.eat_punct("[") {
                let lo = self.expr()?;
                self.expect_punct(",")?;
                let hi = self.expr()?;
                self.expect_punct("]")?;
                BaseType::Int(Some((lo, hi)))
            } else {
                BaseType::Int(None)
            }
        } else if self.eat_kw("bool") {
            BaseType::Bool
        } else if self.eat_kw("clock") {
            BaseType::Clock
        } else if self.eat_kw("chan") {
            BaseType::Chan
        } else if self.eat_kw("void") {
            BaseType::Void
        } else {
            return self.err("expected type");
        };
        Ok(Type { prefix, base })
    }

    fn initializer(&mut self) -> PResult<Initializer> {
        if self.eat_punct("{") {
            let mut items = Vec::new();
            if !self.eat_punct("}") {
                loop {
                    items.push(self.initializer()?);
                    if self.eat_punct("}") {
                        break;
                    }
                    self.expect_punct(",")?;
                }
            }
            Ok(Initializer::List(items))
        } else {
            Ok(Initializer::Expr(self.cond()?))
        }
    }

    fn declarators(&mut self, ty: Type, first: String) -> PResult<Vec<VarDecl>> {
        let mut out = Vec::new();
        let mut name = first;
        loop {
            let mut dims = Vec::new();
            while self.eat_punct("[") {
                dims.push(self.expr()?);
                self.expect_punct("]")?;
            }
            let init = if self.eat_punct("=") || self.eat_punct(":=") {
                Some(self.initializer()?)
            } else {
                None
            };
            out.push(VarDecl {
                name,
                ty: ty.clone(),
                dims,
                init,
            });
            if self.eat_punct(";") {
                return Ok(out);
            }
            self.expect_punct(",")?;
            name = self.ident()?;
        }
    }

    fn params(&mut self) -> PResult<Vec<Param>> {
        let mut ps = Vec::new();
        self.expect_punct("(")?;
        if self.eat_punct(")") {
            return Ok(ps);
        }
        loop {
            let ty = self.ty()?;
            if self.is_punct("&") {
                return self.err("reference parameters are not supported");
            }
            let name = self.ident()?;
            ps.push(Param { ty, name });
            if self.eat_punct(")") {
                return Ok(ps);
            }
            self.expect_punct(",")?;
        }
    }

    /// Parse one declaration (variables or a function) and append it.
    fn decl_into(&mut self, out: &mut Declarations) -> PResult<()> {
        let ty = self.ty()?;
        let name = self.ident()?;
        if self.is_punct("(") {
            let params = self.params()?;
            self.expect_punct("{")?;
            let body = self.block_items()?;
            out.push_func(FuncDecl {
                ret: ty,
                name,
                params,
                body,
            });
        } else {
            for v in self.declarators(ty, name)? {
                out.push_var(v);
            }
        }
        Ok(())
    }

    fn block_items(&mut self) -> PResult<Vec<Stmt>> {
        let mut items = Vec::new();
        while !self.eat_punct("}") {
            if self.at_eof() {
                return self.err("expected `}`");
            }
            items.extend(self.stmt()?);
        }
        Ok(items)
    }

    fn stmt(&mut self) -> PResult<Vec<Stmt>> {
        if self.at_type() {
            let ty = self.ty()?;
            let name = self.ident()?;
            return Ok(self
                .declarators(ty, name)?
                .into_iter()
                .map(Stmt::Local)
                .collect());
        }
        Ok(vec![self.single_stmt()?])
    }

    fn single_stmt(&mut self) -> PResult<Stmt> {
        if self.eat_punct("{") {
            return Ok(Stmt::Block(self.block_items()?));
        }
        if self.eat_punct(";") {
            return Ok(Stmt::Empty);
        }
        if self.eat_kw("if") {
            self.expect_punct("(")?;
            let c = self.expr()?;
            self.expect_punct(")")?;
            let t = self.single_or_block()?;
            let e = if self.eat_kw("else") {
                Some(Box::new(self.single_or_block()?))
            } else {
                None
            };
            return Ok(Stmt::If(c, Box::new(t), e));
        }
        if self.eat_kw("while") {
            self.expect_punct("(")?;
            let c = self.expr()?;
            self.expect_punct(")")?;
            let b = self.single_or_block()?;
            return Ok(Stmt::While(c, Box::new(b)));
        }
        if self.eat_kw("for") {
            self.expect_punct("(")?;
            if matches!(self.peek(), Tok::Ident(_)) && matches!(self.peek_at(1), Tok::Punct(":")) {
                let var = self.ident()?;
                self.expect_punct(":")?;
                let (lo, hi) = self.int_range()?;
                self.expect_punct(")")?;
                let body = self.single_or_block()?;
                return Ok(Stmt::ForRange {
                    var,
                    lo,
                    hi,
                    body: Box::new(body),
                });
            }
            let init = if self.is_punct(";") {
                None
            } else {
                Some(self.expr()?)
            };
            self.expect_punct(";")?;
            let cond = if self.is_punct(";") {
                None
            } else {
                Some(self.expr()?)
            };
            self.expect_punct(";")?;
            let step = if self.is_punct(")") {
                None
            } else {
                Some(self.expr()?)
            };
            self.expect_punct(")")?;
            let body = self.single_or_block()?;
            return Ok(Stmt::For {
                init,
                cond,
                step,
                body: Box::new(body),
            });
        }
        if self.eat_kw("return") {
            if self.eat_punct(";") {
                return Ok(Stmt::Return(None));
            }
            let e = self.expr()?;
            self.expect_punct(";")?;
            return Ok(Stmt::Return(Some(e)));
        }
        let e = self.expr()?;
        self.expect_punct(";")?;
        Ok(Stmt::Expr(e))
    }

    fn single_or_block(&mut self) -> PResult<Stmt> {
        if self.at_type() {
            return self.err("declaration not allowed here");
        }
        self.single_stmt()
    }

    // ---- XTA ----

    fn process(&mut self) -> PResult<Template> {
        let name = self.ident()?;
        let params = self.params()?;
        self.expect_punct("{")?;
        let mut declarations = Declarations::new();
        while self.at_type()
            && !(self.is_kw("urgent") && !matches!(self.peek_at(1), Tok::Ident(s) if s == "chan"))
        {
            self.decl_into(&mut declarations)?;
        }
        self.expect_kw("state")?;
        let mut locations = Vec::new();
        loop {
            let id = self.ident()?;
            let mut loc = Location::new(id.clone()).named(id);
            if self.eat_punct("{") {
                loc.invariant = Some(self.expr()?);
                self.expect_punct("}")?;
            }
            locations.push(loc);
            if self.eat_punct(";") {
                break;
            }
            self.expect_punct(",")?;
        }
        let mark = |p: &mut Parser, urgency: Urgency, locs: &mut Vec<Location>| -> PResult<()> {
            loop {
                let id = p.ident()?;
                match locs.iter_mut().find(|l| l.id == id) {
                    Some(l) => l.urgency = urgency,
                    None => return p.err(format!("unknown location `{id}`")),
                }
                if p.eat_punct(";") {
                    return Ok(());
                }
                p.expect_punct(",")?;
            }
        };
        loop {
            if self.eat_kw("commit") {
                mark(self, Urgency::Committed, &mut locations)?;
            } else if self.eat_kw("urgent") {
                mark(self, Urgency::Urgent, &mut locations)?;
            } else {
                break;
            }
        }
        self.expect_kw("init")?;
        let init = self.ident()?;
        self.expect_punct(";")?;
        let mut edges = Vec::new();
        if self.eat_kw("trans") {
            let mut last_src: Option<String> = None;
            loop {
                let src = if self.is_punct("->") {
                    match &last_src {
                        Some(s) => s.clone(),
                        None => return self.err("transition without source"),
                    }
                } else {
                    self.ident()?
                };
                self.expect_punct("->")?;
                let dst = self.ident()?;
                let mut edge = Edge::new(src.clone(), dst);
                self.expect_punct("{")?;
                loop {
                    if self.eat_kw("guard") {
                        edge.guard = Some(self.expr()?);
                        self.expect_punct(";")?;
                    } else if self.eat_kw("sync") {
                        edge.sync = Some(self.sync_label()?);
                        self.expect_punct(";")?;
                    } else if self.eat_kw("assign") {
                        loop {
                            edge.updates.push(self.expr()?);
                            if !self.eat_punct(",") {
                                break;
                            }
                        }
                        self.expect_punct(";")?;
                    } else {
                        break;
                    }
                }
                self.expect_punct("}")?;
                edges.push(edge);
                last_src = Some(src);
                if self.eat_punct(";") {
                    break;
                }
                self.expect_punct(",")?;
            }
        }
        self.expect_punct("}")?;
        Ok(Template {
            name,
            params,
            declarations,
            locations,
            init,
            edges,
        })
    }

    fn sync_label(&mut self) -> PResult<Sync> {
        let channel = self.ident()?;
        let mut indices = Vec::new();
        while self.eat_punct("[") {
            indices.push(self.expr()?);
            self.expect_punct("]")?;
        }
        let dir = if self.eat_punct("!") {
            Direction::Send
        } else if self.eat_punct("?") {
            Direction::Receive
        } else {
            return self.err("expected `!` or `?`");
        };
        Ok(Sync {
            channel,
            indices,
            dir,
        })
    }
}

/// Parse a single expression.
pub fn parse_expr(src: &str) -> Result<Expr, SyntaxError> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

/// Parse a comma-separated list of expressions (an assignment label).
pub fn parse_expr_list(src: &str) -> Result<Vec<Expr>, SyntaxError> {
    let mut p = Parser::new(src)?;
    let mut out = Vec::new();
    if p.at_eof() {
        return Ok(out);
    }
    loop {
        out.push(p.expr()?);
        if !p.eat_punct(",") {
            break;
        }
    }
    p.expect_eof()?;
    Ok(out)
}

/// Parse a synchronisation label such as `invoke[0][m][self][k]!`.
pub fn parse_sync(src: &str) -> Result<Sync, SyntaxError> {
    let mut p = Parser::new(src)?;
    let s = p.sync_label()?;
    p.expect_eof()?;
    Ok(s)
}

/// Parse a sequence of declarations.
pub fn parse_declarations(src: &str) -> Result<Declarations, SyntaxError> {
    let mut p = Parser::new(src)?;
    let mut out = Declarations::new();
    while !p.at_eof() {
        p.decl_into(&mut out)?;
    }
    Ok(out)
}

/// Parse a template parameter list without the surrounding parentheses.
pub fn parse_params(src: &str) -> Result<Vec<Param>, SyntaxError> {
    let mut p = Parser::new(&format!("({src})"))?;
    let ps = p.params()?;
    p.expect_eof()?;
    Ok(ps)
}

/// Contents of an XTA file: global declarations, process templates, and an
/// optional system line with its instantiations.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct XtaFile {
    pub declarations: Declarations,
    pub templates: Vec<Template>,
    pub instances: Vec<Instance>,
    pub system: Vec<String>,
}

pub fn parse_xta(src: &str) -> Result<XtaFile, SyntaxError> {
    let mut p = Parser::new(src)?;
    let mut file = XtaFile::default();
    while !p.at_eof() {
        if p.eat_kw("process") {
            file.templates.push(p.process()?);
        } else if p.eat_kw("system") {
            loop {
                file.system.push(p.ident()?);
                if p.eat_punct(";") {
                    break;
                }
                p.expect_punct(",")?;
            }
        } else if p.at_type() {
            p.decl_into(&mut file.declarations)?;
        } else if matches!(p.peek(), Tok::Ident(_)) && matches!(p.peek_at(1), Tok::Punct("=")) {
            let name = p.ident()?;
            p.expect_punct("=")?;
            let template = p.ident()?;
            let mut args = Vec::new();
            p.expect_punct("(")?;
            if !p.eat_punct(")") {
                loop {
                    args.push(p.expr()?);
                    if p.eat_punct(")") {
                        break;
                    }
                    p.expect_punct(",")?;
                }
            }
            p.expect_punct(";")?;
            file.instances.push(Instance {
                name,
                template,
                args,
            });
        } else {
            return p.err("expected declaration, process or system");
        }
    }
    Ok(file)
}
