//! Lowering of a [`SystemModel`] into an executable form: every variable and
//! clock gets a slot, every channel element an id, constants are folded and
//! template parameters replaced by instance arguments.

use std::collections::HashMap;

use crate::dbm::MAX_CONSTANT;
use crate::error::CompileError;
use crate::expr::*;
use crate::model::{Direction, SystemModel, Urgency};

pub const DEFAULT_INT_MIN: i64 = -32768;
pub const DEFAULT_INT_MAX: i64 = 32767;

#[derive(Debug, Clone)]
pub struct VarInfo {
    pub name: String,
    pub lo: i32,
    pub hi: i32,
    pub meta: bool,
    pub is_bool: bool,
}

#[derive(Debug, Clone)]
pub struct ChanInfo {
    pub name: String,
    pub urgent: bool,
}

/// Index expression into a flattened array: `(index, dimension size, stride)`.
#[derive(Debug, Clone)]
pub struct IndexPart {
    pub index: CExpr,
    pub size: u32,
    pub stride: u32,
}

/// A (possibly dynamically indexed) element of a flattened array.
#[derive(Debug, Clone)]
pub struct Place {
    pub base: u32,
    /// Number of elements reachable from `base` (the whole array when
    /// indices are dynamic, 1 otherwise).
    pub span: u32,
    pub parts: Vec<IndexPart>,
}

#[derive(Debug, Clone)]
pub enum LValue {
    Var(Place),
    Clock(Place),
    Local(u32),
}

#[derive(Debug, Clone)]
pub enum CExpr {
    Const(i64),
    Var(Box<Place>),
    Clock(Box<Place>),
    Local(u32),
    Unary(UnOp, Box<CExpr>),
    Binary(BinOp, Box<CExpr>, Box<CExpr>),
    /// Comparison where at least one side mentions a clock.
    ClockCmp(BinOp, Box<CExpr>, Box<CExpr>),
    Cond(Box<CExpr>, Box<CExpr>, Box<CExpr>),
    Assign(AssignOp, Box<LValue>, Box<CExpr>),
    IncDec {
        pre: bool,
        inc: bool,
        target: Box<LValue>,
    },
    Call(u32, Vec<CExpr>),
    Quant {
        exists: bool,
        slot: u32,
        lo: Box<CExpr>,
        hi: Box<CExpr>,
        body: Box<CExpr>,
    },
    /// True iff the instance is in the location (queries only).
    AtLocation {
        instance: u32,
        location: u32,
    },
}

impl CExpr {
    pub fn mentions_clock(&self) -> bool {
        match self {
            CExpr::Clock(_) | CExpr::ClockCmp(..) => true,
            CExpr::Const(_) | CExpr::Local(_) | CExpr::AtLocation { .. } => false,
            CExpr::Var(p) => p.parts.iter().any(|q| q.index.mentions_clock()),
            CExpr::Unary(_, a) => a.mentions_clock(),
            CExpr::Binary(_, a, b) => a.mentions_clock() || b.mentions_clock(),
            CExpr::Cond(a, b, c) => a.mentions_clock() || b.mentions_clock() || c.mentions_clock(),
            CExpr::Assign(_, l, v) => matches!(**l, LValue::Clock(_)) || v.mentions_clock(),
            CExpr::IncDec { target, .. } => matches!(**target, LValue::Clock(_)),
            CExpr::Call(_, args) => args.iter().any(|a| a.mentions_clock()),
            CExpr::Quant { lo, hi, body, .. } => {
                lo.mentions_clock() || hi.mentions_clock() || body.mentions_clock()
            }
        }
    }

    pub fn as_const(&self) -> Option<i64> {
        match self {
            CExpr::Const(v) => Some(*v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub enum CStmt {
    Expr(CExpr),
    Init(u32, CExpr),
    If(CExpr, Box<CStmt>, Option<Box<CStmt>>),
    While(CExpr, Box<CStmt>),
    For {
        init: Option<CExpr>,
        cond: Option<CExpr>,
        step: Option<CExpr>,
        body: Box<CStmt>,
    },
    ForRange {
        slot: u32,
        lo: CExpr,
        hi: CExpr,
        body: Box<CStmt>,
    },
    Return(Option<CExpr>),
    Block(Vec<CStmt>),
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RetKind {
    Void,
    Int,
    Bool,
}

#[derive(Debug, Clone)]
pub struct CFunc {
    pub name: String,
    pub nparams: usize,
    pub nslots: usize,
    pub ret: RetKind,
    pub body: Vec<CStmt>,
}

#[derive(Debug, Clone)]
pub struct CSync {
    pub channel: String,
    pub base: u32,
    pub parts: Vec<IndexPart>,
    pub dir: Direction,
    pub urgent: bool,
}

#[derive(Debug, Clone)]
pub struct CLocation {
    pub id: String,
    pub name: String,
    pub urgency: Urgency,
    pub invariant: Option<CExpr>,
}

#[derive(Debug, Clone)]
pub struct CEdge {
    pub src: u32,
    pub dst: u32,
    pub guard: Option<CExpr>,
    pub sync: Option<CSync>,
    pub updates: Vec<CExpr>,
    /// Position of the edge in its template.
    pub index: usize,
}

#[derive(Debug, Clone)]
pub struct CInstance {
    pub name: String,
    pub template: String,
    pub locations: Vec<CLocation>,
    pub edges: Vec<CEdge>,
    pub outgoing: Vec<Vec<u32>>,
    pub init: u32,
}

impl CInstance {
    pub fn location_index(&self, id_or_name: &str) -> Option<u32> {
        self.locations
            .iter()
            .position(|l| l.id == id_or_name)
            .or_else(|| self.locations.iter().position(|l| l.name == id_or_name))
            .map(|i| i as u32)
    }
}

#[derive(Debug, Clone)]
enum Sym {
    Const(i64),
    Var {
        base: u32,
        dims: Vec<u32>,
    },
    Clock {
        base: u32,
        dims: Vec<u32>,
    },
    Chan {
        base: u32,
        dims: Vec<u32>,
        urgent: bool,
    },
    Func(u32),
    Local(u32),
}

#[derive(Debug, Clone)]
pub struct CompiledSystem {
    pub vars: Vec<VarInfo>,
    pub init_vars: Vec<i32>,
    /// Clock names; index 0 is the reference clock.
    pub clocks: Vec<String>,
    pub chans: Vec<ChanInfo>,
    pub funcs: Vec<CFunc>,
    pub instances: Vec<CInstance>,
    /// Frame slots needed by top-level expressions (quantifier variables).
    pub frame_size: usize,
    pub meta_slots: Vec<usize>,
    /// Optional discrete predicate per clock; when it is false the clock's
    /// value is irrelevant and the clock is freed.
    pub clock_liveness: Vec<Option<(u32, CExpr)>>,
    /// Per-clock maximal constants for extrapolation (index 0 unused).
    pub max_constants: Vec<i32>,
    global_scope: HashMap<String, Sym>,
    instance_scopes: Vec<HashMap<String, Sym>>,
}

struct Compiler<'a> {
    sys: &'a mut CompiledSystem,
    scopes: Vec<HashMap<String, Sym>>,
    context: String,
    slots: u32,
    max_slots: u32,
    /// Instance whose scope is used for `Inst.member` references in queries.
    allow_members: bool,
}

fn err<T>(ctx: &str, msg: impl Into<String>) -> Result<T, CompileError> {
    Err(CompileError::new(ctx, msg))
}

fn fold_binary(op: BinOp, x: i64, y: i64) -> Option<i64> {
    Some(match op {
        BinOp::Add => x.checked_add(y)?,
        BinOp::Sub => x.checked_sub(y)?,
        BinOp::Mul => x.checked_mul(y)?,
        BinOp::Div => x.checked_div(y)?,
        BinOp::Mod => x.checked_rem(y)?,
        BinOp::Lt => (x < y) as i64,
        BinOp::Le => (x <= y) as i64,
        BinOp::Eq => (x == y) as i64,
        BinOp::Ne => (x != y) as i64,
        BinOp::Ge => (x >= y) as i64,
        BinOp::Gt => (x > y) as i64,
        BinOp::And => (x != 0 && y != 0) as i64,
        BinOp::Or => (x != 0 || y != 0) as i64,
        BinOp::Imply => (x == 0 || y != 0) as i64,
    })
}

fn strides(dims: &[u32]) -> Vec<u32> {
    let mut s = vec![1u32; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

fn element_suffixes(dims: &[u32]) -> Vec<String> {
    let mut out = vec![String::new()];
    for &d in dims {
        let mut next = Vec::with_capacity(out.len() * d as usize);
        for prefix in &out {
            for i in 0..d {
                next.push(format!("{prefix}[{i}]"));
            }
        }
        out = next;
    }
    out
}

impl<'a> Compiler<'a> {
    fn lookup(&self, name: &str) -> Option<&Sym> {
        self.scopes.iter().rev().find_map(|s| s.get(name))
    }

    fn define(&mut self, name: &str, sym: Sym) -> Result<(), CompileError> {
        let top = self.scopes.last_mut().expect("scope");
        if top.insert(name.to_string(), sym).is_some() {
            return err(&self.context, format!("duplicate declaration `{name}`"));
        }
        Ok(())
    }

    fn const_eval(&mut self, e: &Expr) -> Result<i64, CompileError> {
        match self.expr(e)? {
            CExpr::Const(v) => Ok(v),
            _ => err(&self.context, format!("`{e}` is not a constant expression")),
        }
    }

    fn new_slot(&mut self) -> u32 {
        let s = self.slots;
        self.slots += 1;
        self.max_slots = self.max_slots.max(self.slots);
        s
    }

    fn flatten_init(&mut self, init: &Initializer, out: &mut Vec<i64>) -> Result<(), CompileError> {
        match init {
            Initializer::Expr(e) => out.push(self.const_eval(e)?),
            Initializer::List(items) => {
                for i in items {
                    self.flatten_init(i, out)?;
                }
            }
        }
        Ok(())
    }

    fn declare_var(&mut self, v: &VarDecl, prefix: &str) -> Result<(), CompileError> {
        let mut dims = Vec::new();
        for d in &v.dims {
            let n = self.const_eval(d)?;
            if n <= 0 || n > 1 << 20 {
                return err(&self.context, format!("bad dimension {n} for `{}`", v.name));
            }
            dims.push(n as u32);
        }
        let count: u32 = dims.iter().product();
        match &v.ty.base {
            BaseType::Clock => {
                if v.init.is_some() {
                    return err(
                        &self.context,
                        format!("clock `{}` has an initializer", v.name),
                    );
                }
                let base = self.sys.clocks.len() as u32;
                for suffix in element_suffixes(&dims) {
                    self.sys.clocks.push(format!("{prefix}{}{suffix}", v.name));
                }
                self.define(&v.name, Sym::Clock { base, dims })
            }
            BaseType::Chan => {
                let base = self.sys.chans.len() as u32;
                let urgent = v.ty.prefix == TypePrefix::Urgent;
                for suffix in element_suffixes(&dims) {
                    self.sys.chans.push(ChanInfo {
                        name: format!("{prefix}{}{suffix}", v.name),
                        urgent,
                    });
                }
                self.define(&v.name, Sym::Chan { base, dims, urgent })
            }
            BaseType::Void => err(
                &self.context,
                format!("variable `{}` has type void", v.name),
            ),
            BaseType::Int(_) | BaseType::Bool => {
                let is_bool = v.ty.base == BaseType::Bool;
                let (lo, hi) = match &v.ty.base {
                    BaseType::Int(Some((lo, hi))) => (self.const_eval(lo)?, self.const_eval(hi)?),
                    BaseType::Int(None) => (DEFAULT_INT_MIN, DEFAULT_INT_MAX),
                    _ => (0, 1),
                };
                if lo > hi {
                    return err(&self.context, format!("empty range for `{}`", v.name));
                }
                let mut values = Vec::new();
                if let Some(init) = &v.init {
                    self.flatten_init(init, &mut values)?;
                }
                if values.is_empty() {
                    values = vec![0; count as usize];
                } else if values.len() != count as usize {
                    return err(
                        &self.context,
                        format!(
                            "initializer of `{}` has {} element(s), expected {count}",
                            v.name,
                            values.len()
                        ),
                    );
                }
                if is_bool {
                    for x in values.iter_mut() {
                        *x = (*x != 0) as i64;
                    }
                }
                if v.ty.is_const() && dims.is_empty() {
                    return self.define(&v.name, Sym::Const(values[0]));
                }
                let base = self.sys.vars.len() as u32;
                let meta = v.ty.prefix == TypePrefix::Meta;
                for (suffix, value) in element_suffixes(&dims).into_iter().zip(&values) {
                    if *value < lo || *value > hi {
                        return err(
                            &self.context,
                            format!("initial value {value} of `{}` outside [{lo}, {hi}]", v.name),
                        );
                    }
                    if meta {
                        self.sys.meta_slots.push(self.sys.vars.len());
                    }
                    self.sys.vars.push(VarInfo {
                        name: format!("{prefix}{}{suffix}", v.name),
                        lo: lo as i32,
                        hi: hi as i32,
                        meta,
                        is_bool,
                    });
                    self.sys.init_vars.push(*value as i32);
                }
                self.define(&v.name, Sym::Var { base, dims })
            }
        }
    }

    fn declarations(&mut self, d: &Declarations, prefix: &str) -> Result<(), CompileError> {
        for item in &d.items {
            match item {
                Decl::Var(v) => self.declare_var(v, prefix)?,
                Decl::Func(f) => {
                    let id = self.function(f, prefix)?;
                    self.define(&f.name, Sym::Func(id))?;
                }
            }
        }
        Ok(())
    }

    fn function(&mut self, f: &FuncDecl, prefix: &str) -> Result<u32, CompileError> {
        let ret = match f.ret.base {
            BaseType::Void => RetKind::Void,
            BaseType::Bool => RetKind::Bool,
            BaseType::Int(_) => RetKind::Int,
            _ => {
                return err(
                    &self.context,
                    format!("function `{}` has bad return type", f.name),
                )
            }
        };
        let saved = (self.slots, self.max_slots);
        self.slots = 0;
        self.max_slots = 0;
        self.scopes.push(HashMap::new());
        for p in &f.params {
            if !matches!(p.ty.base, BaseType::Int(_) | BaseType::Bool) {
                return err(
                    &self.context,
                    format!("parameter `{}` must be int or bool", p.name),
                );
            }
            let s = self.new_slot();
            self.define(&p.name, Sym::Local(s))?;
        }
        let mut body = Vec::new();
        for s in &f.body {
            body.push(self.stmt(s)?);
        }
        self.scopes.pop();
        let nslots = self.max_slots as usize;
        (self.slots, self.max_slots) = saved;
        let id = self.sys.funcs.len() as u32;
        self.sys.funcs.push(CFunc {
            name: format!("{prefix}{}", f.name),
            nparams: f.params.len(),
            nslots,
            ret,
            body,
        });
        Ok(id)
    }

    fn stmt(&mut self, s: &Stmt) -> Result<CStmt, CompileError> {
        Ok(match s {
            Stmt::Local(v) => {
                if !v.dims.is_empty() {
                    return err(
                        &self.context,
                        format!("local array `{}` unsupported", v.name),
                    );
                }
                let init = match &v.init {
                    Some(Initializer::Expr(e)) => self.expr(e)?,
                    Some(_) => return err(&self.context, "list initializer for scalar"),
                    None => CExpr::Const(0),
                };
                if v.ty.is_const() {
                    if let CExpr::Const(c) = init {
                        self.define(&v.name, Sym::Const(c))?;
                        return Ok(CStmt::Empty);
                    }
                }
                let slot = self.new_slot();
                self.define(&v.name, Sym::Local(slot))?;
                CStmt::Init(slot, init)
            }
            Stmt::Expr(e) => CStmt::Expr(self.expr(e)?),
            Stmt::If(c, t, e) => {
                let c = self.expr(c)?;
                let t = self.nested(t)?;
                let e = match e {
                    Some(e) => Some(Box::new(self.nested(e)?)),
                    None => None,
                };
                CStmt::If(c, Box::new(t), e)
            }
            Stmt::While(c, b) => {
                let c = self.expr(c)?;
                CStmt::While(c, Box::new(self.nested(b)?))
            }
            Stmt::For {
                init,
                cond,
                step,
                body,
            } => {
                let init = init.as_ref().map(|e| self.expr(e)).transpose()?;
                let cond = cond.as_ref().map(|e| self.expr(e)).transpose()?;
                let step = step.as_ref().map(|e| self.expr(e)).transpose()?;
                let body = Box::new(self.nested(body)?);
                CStmt::For {
                    init,
                    cond,
                    step,
                    body,
                }
            }
            Stmt::ForRange { var, lo, hi, body } => {
                let lo = self.expr(lo)?;
                let hi = self.expr(hi)?;
                self.scopes.push(HashMap::new());
                let slot = self.new_slot();
                self.define(var, Sym::Local(slot))?;
                let body = self.nested(body);
                self.scopes.pop();
                CStmt::ForRange {
                    slot,
                    lo,
                    hi,
                    body: Box::new(body?),
                }
            }
            Stmt::Return(e) => CStmt::Return(e.as_ref().map(|e| self.expr(e)).transpose()?),
            Stmt::Block(items) => {
                self.scopes.push(HashMap::new());
                let r: Result<Vec<_>, _> = items.iter().map(|s| self.stmt(s)).collect();
                self.scopes.pop();
                CStmt::Block(r?)
            }
            Stmt::Empty => CStmt::Empty,
        })
    }

    fn nested(&mut self, s: &Stmt) -> Result<CStmt, CompileError> {
        self.scopes.push(HashMap::new());
        let r = self.stmt(s);
        self.scopes.pop();
        r
    }

    fn place(
        &mut self,
        base: u32,
        dims: &[u32],
        indices: &[&Expr],
        name: &str,
    ) -> Result<Place, CompileError> {
        if dims.len() != indices.len() {
            return err(
                &self.context,
                format!(
                    "`{name}` has {} dimension(s) but is used with {} index(es)",
                    dims.len(),
                    indices.len()
                ),
            );
        }
        let st = strides(dims);
        let mut compiled = Vec::with_capacity(indices.len());
        for ix in indices {
            let c = self.expr(ix)?;
            if c.mentions_clock() {
                return err(&self.context, format!("clock used as index in `{name}`"));
            }
            compiled.push(c);
        }
        let mut place = Place {
            base,
            span: 1,
            parts: Vec::new(),
        };
        if compiled.iter().all(|c| c.as_const().is_some()) {
            for ((&d, &s), c) in dims.iter().zip(&st).zip(&compiled) {
                let v = c.as_const().unwrap_or_default();
                if v < 0 || v >= d as i64 {
                    return err(
                        &self.context,
                        format!("index {v} out of bounds for `{name}` (size {d})"),
                    );
                }
                place.base += v as u32 * s;
            }
        } else {
            // the whole array may be addressed
            place.span = dims.iter().product();
            for ((&d, &s), c) in dims.iter().zip(&st).zip(compiled) {
                place.parts.push(IndexPart {
                    index: c,
                    size: d,
                    stride: s,
                });
            }
        }
        Ok(place)
    }

    fn split_reference<'e>(&self, e: &'e Expr) -> (&'e Expr, Vec<&'e Expr>) {
        let mut indices = Vec::new();
        let mut cur = e;
        while let Expr::Index(a, i) = cur {
            indices.push(i.as_ref());
            cur = a;
        }
        indices.reverse();
        (cur, indices)
    }

    fn resolve_root(&self, root: &Expr) -> Result<(String, Sym), CompileError> {
        match root {
            Expr::Ident(n) => match self.lookup(n) {
                Some(s) => Ok((n.clone(), s.clone())),
                None => err(&self.context, format!("undeclared identifier `{n}`")),
            },
            Expr::Member(inst, m) if self.allow_members => {
                let Expr::Ident(iname) = inst.as_ref() else {
                    return err(&self.context, format!("bad member access `{root}`"));
                };
                let Some(ix) = self.sys.instances.iter().position(|i| &i.name == iname) else {
                    return err(&self.context, format!("unknown instance `{iname}`"));
                };
                match self.sys.instance_scopes[ix].get(m) {
                    Some(s) => Ok((format!("{iname}.{m}"), s.clone())),
                    None => err(&self.context, format!("`{iname}` has no member `{m}`")),
                }
            }
            other => err(
                &self.context,
                format!("`{other}` is not a variable reference"),
            ),
        }
    }

    fn reference(&mut self, e: &Expr) -> Result<CExpr, CompileError> {
        let (root, indices) = self.split_reference(e);
        if let Expr::Member(inst, m) = root {
            if self.allow_members && indices.is_empty() {
                if let Expr::Ident(iname) = inst.as_ref() {
                    if let Some(ix) = self.sys.instances.iter().position(|i| &i.name == iname) {
                        if let Some(l) = self.sys.instances[ix].location_index(m) {
                            if !self.sys.instance_scopes[ix].contains_key(m) {
                                return Ok(CExpr::AtLocation {
                                    instance: ix as u32,
                                    location: l,
                                });
                            }
                        }
                    }
                }
            }
        }
        let (name, sym) = self.resolve_root(root)?;
        match sym {
            Sym::Const(v) if indices.is_empty() => Ok(CExpr::Const(v)),
            Sym::Local(s) if indices.is_empty() => Ok(CExpr::Local(s)),
            Sym::Var { base, dims } => Ok(CExpr::Var(Box::new(
                self.place(base, &dims, &indices, &name)?,
            ))),
            Sym::Clock { base, dims } => Ok(CExpr::Clock(Box::new(
                self.place(base, &dims, &indices, &name)?,
            ))),
            Sym::Chan { .. } => err(&self.context, format!("channel `{name}` used as a value")),
            Sym::Func(_) => err(&self.context, format!("function `{name}` used as a value")),
            _ => err(&self.context, format!("`{name}` cannot be indexed")),
        }
    }

    fn lvalue(&mut self, e: &Expr) -> Result<LValue, CompileError> {
        let (root, indices) = self.split_reference(e);
        let (name, sym) = self.resolve_root(root)?;
        match sym {
            Sym::Var { base, dims } => Ok(LValue::Var(self.place(base, &dims, &indices, &name)?)),
            Sym::Clock { base, dims } => {
                Ok(LValue::Clock(self.place(base, &dims, &indices, &name)?))
            }
            Sym::Local(s) if indices.is_empty() => Ok(LValue::Local(s)),
            Sym::Const(_) => err(&self.context, format!("assignment to constant `{name}`")),
            _ => err(&self.context, format!("`{e}` is not assignable")),
        }
    }

    fn expr(&mut self, e: &Expr) -> Result<CExpr, CompileError> {
        Ok(match e {
            Expr::Int(v) => CExpr::Const(*v),
            Expr::Bool(b) => CExpr::Const(*b as i64),
            Expr::Ident(_) | Expr::Index(..) | Expr::Member(..) => self.reference(e)?,
            Expr::Call(name, args) => {
                let Some(Sym::Func(id)) = self.lookup(name).cloned() else {
                    return err(&self.context, format!("`{name}` is not a function"));
                };
                let arity = self.sys.funcs[id as usize].nparams;
                if arity != args.len() {
                    return err(
                        &self.context,
                        format!("`{name}` expects {arity} argument(s), got {}", args.len()),
                    );
                }
                let args: Result<Vec<_>, _> = args.iter().map(|a| self.expr(a)).collect();
                CExpr::Call(id, args?)
            }
            Expr::Unary(op, a) => match op {
                UnOp::Neg | UnOp::Not => {
                    let a = self.expr(a)?;
                    match (op, &a) {
                        (UnOp::Neg, CExpr::Const(v)) => CExpr::Const(-v),
                        (UnOp::Not, CExpr::Const(v)) => CExpr::Const((*v == 0) as i64),
                        _ => CExpr::Unary(*op, Box::new(a)),
                    }
                }
                UnOp::PreInc | UnOp::PreDec | UnOp::PostInc | UnOp::PostDec => CExpr::IncDec {
                    pre: matches!(op, UnOp::PreInc | UnOp::PreDec),
                    inc: matches!(op, UnOp::PreInc | UnOp::PostInc),
                    target: Box::new(self.lvalue(a)?),
                },
            },
            Expr::Binary(op, a, b) => {
                let a = self.expr(a)?;
                let b = self.expr(b)?;
                if let (CExpr::Const(x), CExpr::Const(y)) = (&a, &b) {
                    match fold_binary(*op, *x, *y) {
                        Some(v) => return Ok(CExpr::Const(v)),
                        None => return err(&self.context, format!("cannot fold `{e}`")),
                    }
                }
                if op.is_comparison() && (a.mentions_clock() || b.mentions_clock()) {
                    CExpr::ClockCmp(*op, Box::new(a), Box::new(b))
                } else {
                    CExpr::Binary(*op, Box::new(a), Box::new(b))
                }
            }
            Expr::Cond(c, a, b) => {
                let c = self.expr(c)?;
                let a = self.expr(a)?;
                let b = self.expr(b)?;
                match c {
                    CExpr::Const(v) => {
                        if v != 0 {
                            a
                        } else {
                            b
                        }
                    }
                    c => CExpr::Cond(Box::new(c), Box::new(a), Box::new(b)),
                }
            }
            Expr::Assign(op, l, r) => {
                let l = self.lvalue(l)?;
                let r = self.expr(r)?;
                if matches!(l, LValue::Clock(_)) && *op != AssignOp::Set {
                    return err(
                        &self.context,
                        format!("compound assignment to clock in `{e}`"),
                    );
                }
                CExpr::Assign(*op, Box::new(l), Box::new(r))
            }
            Expr::Quant {
                q,
                var,
                lo,
                hi,
                body,
            } => {
                let lo = self.expr(lo)?;
                let hi = self.expr(hi)?;
                self.scopes.push(HashMap::new());
                let slot = self.new_slot();
                self.define(var, Sym::Local(slot))?;
                let body = self.expr(body);
                self.scopes.pop();
                CExpr::Quant {
                    exists: *q == Quantifier::Exists,
                    slot,
                    lo: Box::new(lo),
                    hi: Box::new(hi),
                    body: Box::new(body?),
                }
            }
        })
    }

    /// Compile an expression that lives outside any function.
    fn top_expr(&mut self, e: &Expr) -> Result<CExpr, CompileError> {
        self.slots = 0;
        let r = self.expr(e);
        self.sys.frame_size = self.sys.frame_size.max(self.max_slots as usize);
        r
    }
}

/// Lower a system into its executable form.
pub fn compile(model: &SystemModel) -> Result<CompiledSystem, CompileError> {
    let mut sys = CompiledSystem {
        vars: Vec::new(),
        init_vars: Vec::new(),
        clocks: vec!["0".to_string()],
        chans: Vec::new(),
        funcs: Vec::new(),
        instances: Vec::new(),
        frame_size: 0,
        meta_slots: Vec::new(),
        clock_liveness: Vec::new(),
        max_constants: Vec::new(),
        global_scope: HashMap::new(),
        instance_scopes: Vec::new(),
    };
    let mut c = Compiler {
        sys: &mut sys,
        scopes: vec![HashMap::new()],
        context: "<global>".to_string(),
        slots: 0,
        max_slots: 0,
        allow_members: false,
    };
    c.declarations(&model.globals, "")?;
    let mut instance_scopes = Vec::new();
    for inst in &model.instances {
        c.context = inst.name.clone();
        let Some(t) = model.template(&inst.template) else {
            return err(&inst.name, format!("unknown template `{}`", inst.template));
        };
        if t.params.len() != inst.args.len() {
            return err(
                &inst.name,
                format!(
                    "expects {} argument(s), got {}",
                    t.params.len(),
                    inst.args.len()
                ),
            );
        }
        let mut args = Vec::new();
        for a in &inst.args {
            args.push(c.const_eval(a)?);
        }
        c.scopes.push(HashMap::new());
        for (p, v) in t.params.iter().zip(args) {
            if !matches!(p.ty.base, BaseType::Int(_) | BaseType::Bool) {
                return err(
                    &inst.name,
                    format!("parameter `{}` must be an integer", p.name),
                );
            }
            c.define(&p.name, Sym::Const(v))?;
        }
        let prefix = format!("{}.", inst.name);
        c.declarations(&t.declarations, &prefix)?;
        if t.declarations.vars().any(|v| v.ty.base == BaseType::Chan) {
            return err(&inst.name, "template-local channels are not supported");
        }
        let mut locations = Vec::new();
        for l in &t.locations {
            let invariant = match &l.invariant {
                Some(inv) => Some(c.top_expr(inv)?),
                None => None,
            };
            locations.push(CLocation {
                id: l.id.clone(),
                name: l.label().to_string(),
                urgency: l.urgency,
                invariant,
            });
        }
        let loc_ix = |id: &str| t.location_index(id).map(|i| i as u32);
        let Some(init) = loc_ix(&t.init) else {
            return err(&inst.name, format!("unknown initial location `{}`", t.init));
        };
        let mut edges = Vec::new();
        for (k, e) in t.edges.iter().enumerate() {
            let (Some(src), Some(dst)) = (loc_ix(&e.src), loc_ix(&e.dst)) else {
                return err(
                    &inst.name,
                    format!("edge {k} references an unknown location"),
                );
            };
            let guard = match &e.guard {
                Some(g) => match c.top_expr(g)? {
                    CExpr::Const(v) if v != 0 => None,
                    g => Some(g),
                },
                None => None,
            };
            let sync = match &e.sync {
                None => None,
                Some(s) => {
                    let Some(Sym::Chan { base, dims, urgent }) = c.lookup(&s.channel).cloned()
                    else {
                        return err(&inst.name, format!("`{}` is not a channel", s.channel));
                    };
                    let refs: Vec<&Expr> = s.indices.iter().collect();
                    c.slots = 0;
                    let place = c.place(base, &dims, &refs, &s.channel)?;
                    Some(CSync {
                        channel: s.channel.clone(),
                        base: place.base,
                        parts: place.parts,
                        dir: s.dir,
                        urgent,
                    })
                }
            };
            let mut updates = Vec::new();
            for u in &e.updates {
                updates.push(c.top_expr(u)?);
            }
            edges.push(CEdge {
                src,
                dst,
                guard,
                sync,
                updates,
                index: k,
            });
        }
        let mut outgoing = vec![Vec::new(); locations.len()];
        for (k, e) in edges.iter().enumerate() {
            outgoing[e.src as usize].push(k as u32);
        }
        instance_scopes.push(c.scopes.pop().expect("instance scope"));
        c.sys.instances.push(CInstance {
            name: inst.name.clone(),
            template: t.name.clone(),
            locations,
            edges,
            outgoing,
            init,
        });
        // later instances must not see this one's locals
    }
    let global_scope = c.scopes.pop().expect("global scope");
    drop(c);
    sys.global_scope = global_scope;
    sys.instance_scopes = instance_scopes;
    sys.clock_liveness = vec![None; sys.clocks.len()];
    sys.max_constants = compute_max_constants(&sys);
    Ok(sys)
}

type Interval = (i64, i64);

fn interval(sys: &CompiledSystem, e: &CExpr) -> Interval {
    let default = (DEFAULT_INT_MIN, DEFAULT_INT_MAX);
    match e {
        CExpr::Const(v) => (*v, *v),
        CExpr::Var(p) => {
            let slots = p.base as usize..(p.base + p.span) as usize;
            let lo = sys.vars[slots.clone()].iter().map(|v| v.lo as i64).min();
            let hi = sys.vars[slots].iter().map(|v| v.hi as i64).max();
            match (lo, hi) {
                (Some(lo), Some(hi)) => (lo, hi),
                _ => default,
            }
        }
        CExpr::Unary(UnOp::Neg, a) => {
            let (lo, hi) = interval(sys, a);
            (-hi, -lo)
        }
        CExpr::Unary(UnOp::Not, _) | CExpr::ClockCmp(..) | CExpr::Quant { .. } => (0, 1),
        CExpr::Binary(op, a, b) => {
            if op.is_comparison() || matches!(op, BinOp::And | BinOp::Or | BinOp::Imply) {
                return (0, 1);
            }
            let (al, ah) = interval(sys, a);
            let (bl, bh) = interval(sys, b);
            match op {
                BinOp::Add => (al + bl, ah + bh),
                BinOp::Sub => (al - bh, ah - bl),
                BinOp::Mul => {
                    let c = [al * bl, al * bh, ah * bl, ah * bh];
                    (*c.iter().min().unwrap(), *c.iter().max().unwrap())
                }
                _ => default,
            }
        }
        CExpr::Cond(_, a, b) => {
            let (al, ah) = interval(sys, a);
            let (bl, bh) = interval(sys, b);
            (al.min(bl), ah.max(bh))
        }
        CExpr::Call(f, _) => match sys.funcs[*f as usize].ret {
            RetKind::Bool => (0, 1),
            _ => default,
        },
        _ => default,
    }
}

/// Static linear form of a clock comparison side: clock index sets with
/// coefficients and the interval of the constant part.
fn static_linear(sys: &CompiledSystem, e: &CExpr, sign: i64, clocks: &mut Vec<u32>) -> Interval {
    match e {
        CExpr::Clock(p) => {
            clocks.extend(p.base..p.base + p.span);
            (0, 0)
        }
        CExpr::Binary(BinOp::Add, a, b) => {
            let (al, ah) = static_linear(sys, a, sign, clocks);
            let (bl, bh) = static_linear(sys, b, sign, clocks);
            (al + bl, ah + bh)
        }
        CExpr::Binary(BinOp::Sub, a, b) => {
            let (al, ah) = static_linear(sys, a, sign, clocks);
            let (bl, bh) = static_linear(sys, b, -sign, clocks);
            (al + bl, ah + bh)
        }
        CExpr::Unary(UnOp::Neg, a) => static_linear(sys, a, -sign, clocks),
        other => {
            let (lo, hi) = interval(sys, other);
            if sign > 0 {
                (lo, hi)
            } else {
                (-hi, -lo)
            }
        }
    }
}

fn visit_clock_cmps(e: &CExpr, f: &mut impl FnMut(&CExpr, &CExpr)) {
    match e {
        CExpr::ClockCmp(_, a, b) => f(a, b),
        CExpr::Unary(_, a) => visit_clock_cmps(a, f),
        CExpr::Binary(_, a, b) => {
            visit_clock_cmps(a, f);
            visit_clock_cmps(b, f);
        }
        CExpr::Cond(a, b, c) => {
            visit_clock_cmps(a, f);
            visit_clock_cmps(b, f);
            visit_clock_cmps(c, f);
        }
        CExpr::Quant { body, .. } => visit_clock_cmps(body, f),
        _ => {}
    }
}

fn compute_max_constants(sys: &CompiledSystem) -> Vec<i32> {
    let mut max = vec![0i64; sys.clocks.len()];
    let mut visit = |e: &CExpr| {
        visit_clock_cmps(e, &mut |a, b| {
            let mut clocks = Vec::new();
            let (al, ah) = static_linear(sys, a, 1, &mut clocks);
            let (bl, bh) = static_linear(sys, b, 1, &mut clocks);
            let k = (al - bh).abs().max((ah - bl).abs());
            for c in clocks {
                max[c as usize] = max[c as usize].max(k);
            }
        })
    };
    for inst in &sys.instances {
        for l in &inst.locations {
            if let Some(inv) = &l.invariant {
                visit(inv);
            }
        }
        for e in &inst.edges {
            if let Some(g) = &e.guard {
                visit(g);
            }
        }
    }
    max.into_iter()
        .map(|m| m.min(MAX_CONSTANT as i64 / 4) as i32)
        .collect()
}

impl CompiledSystem {
    pub fn num_clocks(&self) -> usize {
        self.clocks.len()
    }

    pub fn instance_index(&self, name: &str) -> Option<usize> {
        self.instances.iter().position(|i| i.name == name)
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    pub fn clock_index(&self, name: &str) -> Option<usize> {
        self.clocks.iter().position(|c| c == name)
    }

    fn compiler(&mut self, scope_of: Option<usize>, allow_members: bool) -> Compiler<'_> {
        let mut scopes = vec![self.global_scope.clone()];
        if let Some(i) = scope_of {
            scopes.push(self.instance_scopes[i].clone());
        }
        Compiler {
            sys: self,
            scopes,
            context: "<query>".to_string(),
            slots: 0,
            max_slots: 0,
            allow_members,
        }
    }

    /// Compile a state predicate. `Inst.location` tests a location and
    /// `Inst.var` reads an instance-local variable.
    pub fn compile_predicate(&mut self, e: &Expr) -> Result<CExpr, CompileError> {
        let mut c = self.compiler(None, true);
        c.top_expr(e)
    }

    /// Compile an expression in the scope of one instance.
    pub fn compile_in_instance(
        &mut self,
        instance: usize,
        e: &Expr,
    ) -> Result<CExpr, CompileError> {
        let mut c = self.compiler(Some(instance), true);
        c.top_expr(e)
    }

    /// Declare that clock `clock[k]` only matters while `predicate` (with
    /// `index_var` bound to `k`) holds. Names resolve in the scope of
    /// `instance`, then globally; `Inst.location` tests are allowed.
    pub fn set_clock_liveness(
        &mut self,
        instance: &str,
        clock: &str,
        index_var: &str,
        predicate: &Expr,
    ) -> Result<(), CompileError> {
        let Some(ix) = self.instance_index(instance) else {
            return err("<liveness>", format!("unknown instance `{instance}`"));
        };
        let sym = self.instance_scopes[ix]
            .get(clock)
            .or_else(|| self.global_scope.get(clock))
            .cloned();
        let Some(Sym::Clock { base, dims }) = sym else {
            return err(
                "<liveness>",
                format!("`{clock}` is not a clock of `{instance}`"),
            );
        };
        if dims.len() > 1 {
            return err(
                "<liveness>",
                "only scalar or one-dimensional clocks are supported",
            );
        }
        let n = dims.first().copied().unwrap_or(1);
        for k in 0..n {
            let mut c = self.compiler(Some(ix), true);
            c.scopes.push(HashMap::from([(
                index_var.to_string(),
                Sym::Const(k as i64),
            )]));
            let p = c.top_expr(predicate)?;
            if p.mentions_clock() {
                return err("<liveness>", "liveness predicate mentions a clock");
            }
            self.clock_liveness[(base + k) as usize] = Some((ix as u32, p));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_xta;

    fn build(src: &str) -> CompiledSystem {
        let f = parse_xta(src).unwrap();
        compile(&SystemModel {
            globals: f.declarations,
            templates: f.templates,
            instances: f.instances,
        })
        .unwrap()
    }

    #[test]
    fn layout_and_constants() {
        let s = build(
            r#"
            const int N = 3;
            int[0,N] a[N] = { 1, 2, 3 };
            bool b[2][2];
            clock g;
            meta int[0,9] m = 4;
            process P(const int self) {
                clock x[2];
                int k;
                state A { x[self] <= N + 2 };
                init A;
                trans A -> A { guard g > a[self] - 1; };
            }
            p = P(1);
        "#,
        );
        assert_eq!(s.vars.len(), 3 + 4 + 1 + 1);
        assert_eq!(s.vars[4].name, "b[0][1]");
        assert_eq!(s.init_vars[..3], [1, 2, 3]);
        assert_eq!(s.clocks, vec!["0", "g", "p.x[0]", "p.x[1]"]);
        assert_eq!(s.meta_slots, vec![7]);
        assert_eq!(s.var_index("p.k"), Some(8));
        assert_eq!(s.max_constants[3], 5);
        // guard g > a[1] - 1 with a[1] in [0,3]
        assert_eq!(s.max_constants[1], 2);
    }

    #[test]
    fn errors_are_reported() {
        let f = parse_xta("int a[2]; process P() { state A; init A; trans A -> A { assign a[5] = 1; }; } p = P();").unwrap();
        let m = SystemModel {
            globals: f.declarations,
            templates: f.templates,
            instances: f.instances,
        };
        let e = compile(&m).unwrap_err();
        assert!(e.message.contains("out of bounds"), "{e}");
    }
}
