//! Structural checks on a [`SystemModel`]: unique names, resolvable
//! identifiers, array/channel dimensionality, upper-bound-only invariants and
//! instance arity.

use std::collections::{HashMap, HashSet};

use crate::error::Diagnostic;
use crate::expr::*;
use crate::model::{SystemModel, Template};

#[derive(Debug, Clone)]
enum Sym {
    Const(Option<i64>),
    Var { dims: Vec<Option<i64>> },
    Clock { dims: Vec<Option<i64>> },
    Chan { dims: usize },
    Func { arity: usize },
    Scalar,
}

struct Checker<'a> {
    context: String,
    scopes: Vec<HashMap<String, Sym>>,
    out: &'a mut Vec<Diagnostic>,
}

/// Fold an expression over known constants.
pub(crate) fn fold_const(e: &Expr, lookup: &dyn Fn(&str) -> Option<i64>) -> Option<i64> {
    Some(match e {
        Expr::Int(v) => *v,
        Expr::Bool(b) => *b as i64,
        Expr::Ident(n) => lookup(n)?,
        Expr::Unary(UnOp::Neg, a) => -fold_const(a, lookup)?,
        Expr::Unary(UnOp::Not, a) => (fold_const(a, lookup)? == 0) as i64,
        Expr::Binary(op, a, b) => {
            let (x, y) = (fold_const(a, lookup)?, fold_const(b, lookup)?);
            match op {
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
            }
        }
        Expr::Cond(c, a, b) => {
            if fold_const(c, lookup)? != 0 {
                fold_const(a, lookup)?
            } else {
                fold_const(b, lookup)?
            }
        }
        _ => return None,
    })
}

fn has_side_effect(e: &Expr) -> bool {
    match e {
        Expr::Assign(..) => true,
        Expr::Unary(UnOp::PreInc | UnOp::PreDec | UnOp::PostInc | UnOp::PostDec, _) => true,
        Expr::Unary(_, a) | Expr::Member(a, _) => has_side_effect(a),
        Expr::Index(a, b) | Expr::Binary(_, a, b) => has_side_effect(a) || has_side_effect(b),
        Expr::Cond(a, b, c) => has_side_effect(a) || has_side_effect(b) || has_side_effect(c),
        Expr::Call(_, args) => args.iter().any(has_side_effect),
        Expr::Quant { lo, hi, body, .. } => {
            has_side_effect(lo) || has_side_effect(hi) || has_side_effect(body)
        }
        Expr::Int(_) | Expr::Bool(_) | Expr::Ident(_) => false,
    }
}

impl<'a> Checker<'a> {
    fn diag(&mut self, msg: impl Into<String>) {
        self.out.push(Diagnostic::new(self.context.clone(), msg));
    }

    fn lookup(&self, name: &str) -> Option<&Sym> {
        self.scopes.iter().rev().find_map(|s| s.get(name))
    }

    fn const_value(&self, e: &Expr) -> Option<i64> {
        fold_const(e, &|n| match self.lookup(n) {
            Some(Sym::Const(v)) => *v,
            _ => None,
        })
    }

    fn define(&mut self, name: &str, sym: Sym) {
        let top = self.scopes.last_mut().expect("scope");
        if top.insert(name.to_string(), sym).is_some() {
            let msg = format!("duplicate declaration `{name}`");
            self.diag(msg);
        }
    }

    fn declare_var(&mut self, v: &VarDecl) {
        if let BaseType::Int(Some((lo, hi))) = &v.ty.base {
            self.expr(lo);
            self.expr(hi);
        }
        let dims: Vec<Option<i64>> = v
            .dims
            .iter()
            .map(|d| {
                self.expr(d);
                let n = self.const_value(d);
                if let Some(n) = n {
                    if n <= 0 {
                        self.diag(format!("array `{}` has non-positive dimension {n}", v.name));
                    }
                }
                n
            })
            .collect();
        if let Some(init) = &v.init {
            self.initializer(init);
        }
        let sym = match v.ty.base {
            BaseType::Clock => Sym::Clock { dims },
            BaseType::Chan => Sym::Chan { dims: dims.len() },
            _ if v.ty.is_const() => {
                let val = match &v.init {
                    Some(Initializer::Expr(e)) if dims.is_empty() => self.const_value(e),
                    _ => None,
                };
                if dims.is_empty() {
                    Sym::Const(val)
                } else {
                    Sym::Var { dims }
                }
            }
            _ => Sym::Var { dims },
        };
        self.define(&v.name, sym);
    }

    fn initializer(&mut self, init: &Initializer) {
        match init {
            Initializer::Expr(e) => self.expr(e),
            Initializer::List(items) => items.iter().for_each(|i| self.initializer(i)),
        }
    }

    fn declarations(&mut self, d: &Declarations) {
        for item in &d.items {
            match item {
                Decl::Var(v) => self.declare_var(v),
                Decl::Func(f) => {
                    self.define(
                        &f.name,
                        Sym::Func {
                            arity: f.params.len(),
                        },
                    );
                    self.scopes.push(HashMap::new());
                    for p in &f.params {
                        self.define(&p.name, Sym::Scalar);
                    }
                    for s in &f.body {
                        self.stmt(s);
                    }
                    self.scopes.pop();
                }
            }
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        match s {
            Stmt::Local(v) => {
                if !v.dims.is_empty() {
                    self.diag(format!("local array `{}` is not supported", v.name));
                }
                if let Some(init) = &v.init {
                    self.initializer(init);
                }
                let sym = if v.ty.is_const() {
                    match &v.init {
                        Some(Initializer::Expr(e)) => Sym::Const(self.const_value(e)),
                        _ => Sym::Const(None),
                    }
                } else {
                    Sym::Scalar
                };
                self.define(&v.name, sym);
            }
            Stmt::Expr(e) => self.expr(e),
            Stmt::If(c, t, e) => {
                self.expr(c);
                self.nested(t);
                if let Some(e) = e {
                    self.nested(e);
                }
            }
            Stmt::While(c, b) => {
                self.expr(c);
                self.nested(b);
            }
            Stmt::For {
                init,
                cond,
                step,
                body,
            } => {
                for e in [init, cond, step].into_iter().flatten() {
                    self.expr(e);
                }
                self.nested(body);
            }
            Stmt::ForRange { var, lo, hi, body } => {
                self.expr(lo);
                self.expr(hi);
                self.scopes.push(HashMap::new());
                self.define(var, Sym::Scalar);
                self.nested(body);
                self.scopes.pop();
            }
            Stmt::Return(e) => {
                if let Some(e) = e {
                    self.expr(e);
                }
            }
            Stmt::Block(items) => {
                self.scopes.push(HashMap::new());
                for s in items {
                    self.stmt(s);
                }
                self.scopes.pop();
            }
            Stmt::Empty => {}
        }
    }

    fn nested(&mut self, s: &Stmt) {
        self.scopes.push(HashMap::new());
        self.stmt(s);
        self.scopes.pop();
    }

    /// Resolve an indexed reference `name[i]...[k]` and check its arity.
    fn reference(&mut self, e: &Expr) -> Option<Sym> {
        let mut indices = Vec::new();
        let mut cur = e;
        while let Expr::Index(a, i) = cur {
            indices.push(i.as_ref());
            cur = a;
        }
        indices.reverse();
        for i in &indices {
            self.expr(i);
        }
        let Expr::Ident(name) = cur else {
            self.diag(format!("`{e}` is not a variable reference"));
            return None;
        };
        let Some(sym) = self.lookup(name).cloned() else {
            self.diag(format!("undeclared identifier `{name}`"));
            return None;
        };
        let dims: Vec<Option<i64>> = match &sym {
            Sym::Var { dims } | Sym::Clock { dims } => dims.clone(),
            Sym::Chan { dims } => vec![None; *dims],
            Sym::Const(_) | Sym::Scalar => Vec::new(),
            Sym::Func { .. } => {
                self.diag(format!("function `{name}` used as a value"));
                return None;
            }
        };
        if dims.len() != indices.len() {
            self.diag(format!(
                "`{name}` has {} dimension(s) but is used with {} index(es)",
                dims.len(),
                indices.len()
            ));
            return Some(sym);
        }
        for (d, i) in dims.iter().zip(&indices) {
            if let (Some(d), Some(v)) = (d, self.const_value(i)) {
                if v < 0 || v >= *d {
                    self.diag(format!("index {v} out of bounds for `{name}` (size {d})"));
                }
            }
        }
        Some(sym)
    }

    fn expr(&mut self, e: &Expr) {
        match e {
            Expr::Int(_) | Expr::Bool(_) => {}
            Expr::Ident(_) | Expr::Index(..) => {
                if let Some(Sym::Chan { .. }) = self.reference(e) {
                    self.diag(format!("channel used in expression `{e}`"));
                }
            }
            Expr::Member(..) => self.diag(format!("member access `{e}` outside a query")),
            Expr::Call(name, args) => {
                match self.lookup(name).cloned() {
                    Some(Sym::Func { arity }) => {
                        if arity != args.len() {
                            self.diag(format!(
                                "function `{name}` expects {arity} argument(s), got {}",
                                args.len()
                            ));
                        }
                    }
                    Some(_) => self.diag(format!("`{name}` is not a function")),
                    None => self.diag(format!("undeclared function `{name}`")),
                }
                args.iter().for_each(|a| self.expr(a));
            }
            Expr::Unary(_, a) => self.expr(a),
            Expr::Binary(_, a, b) | Expr::Assign(_, a, b) => {
                self.expr(a);
                self.expr(b);
            }
            Expr::Cond(a, b, c) => {
                self.expr(a);
                self.expr(b);
                self.expr(c);
            }
            Expr::Quant {
                var, lo, hi, body, ..
            } => {
                self.expr(lo);
                self.expr(hi);
                self.scopes.push(HashMap::new());
                self.define(var, Sym::Scalar);
                self.expr(body);
                self.scopes.pop();
            }
        }
    }

    fn mentions_clock(&self, e: &Expr) -> bool {
        let mut found = false;
        e.visit_idents(&mut |n| {
            if matches!(self.lookup(n), Some(Sym::Clock { .. })) {
                found = true;
            }
        });
        found
    }

    fn invariant(&mut self, loc: &str, inv: &Expr) {
        self.expr(inv);
        if has_side_effect(inv) {
            self.diag(format!("invariant of `{loc}` has side effects"));
        }
        for c in inv.conjuncts() {
            if !self.mentions_clock(c) {
                continue;
            }
            let ok = match c {
                Expr::Binary(op @ (BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge), a, b) => {
                    let (upper, lower) = if matches!(op, BinOp::Lt | BinOp::Le) {
                        (a, b)
                    } else {
                        (b, a)
                    };
                    self.mentions_clock(upper) && !self.mentions_clock(lower)
                }
                _ => false,
            };
            if !ok {
                self.diag(format!(
                    "invariant of `{loc}` is not an upper bound on clocks: `{c}`"
                ));
            }
        }
    }

    fn template(&mut self, t: &Template) {
        self.scopes.push(HashMap::new());
        for p in &t.params {
            let sym = match p.ty.base {
                BaseType::Int(_) | BaseType::Bool => Sym::Const(None),
                _ => {
                    self.diag(format!(
                        "parameter `{}` must be an integer constant",
                        p.name
                    ));
                    Sym::Scalar
                }
            };
            self.define(&p.name, sym);
        }
        self.declarations(&t.declarations);
        let mut ids = HashSet::new();
        for l in &t.locations {
            if !ids.insert(l.id.as_str()) {
                self.diag(format!("duplicate location id `{}`", l.id));
            }
            if let Some(inv) = &l.invariant {
                self.invariant(&l.id, inv);
            }
        }
        if !ids.contains(t.init.as_str()) {
            self.diag(format!("initial location `{}` does not exist", t.init));
        }
        for e in &t.edges {
            for end in [&e.src, &e.dst] {
                if !ids.contains(end.as_str()) {
                    self.diag(format!("edge references unknown location `{end}`"));
                }
            }
            if let Some(g) = &e.guard {
                self.expr(g);
                if has_side_effect(g) {
                    self.diag(format!("guard `{g}` has side effects"));
                }
            }
            if let Some(s) = &e.sync {
                match self.lookup(&s.channel).cloned() {
                    Some(Sym::Chan { dims }) => {
                        if dims != s.indices.len() {
                            self.diag(format!(
                                "channel `{}` has {dims} dimension(s) but sync `{s}` uses {}",
                                s.channel,
                                s.indices.len()
                            ));
                        }
                    }
                    Some(_) => self.diag(format!("`{}` is not a channel", s.channel)),
                    None => self.diag(format!("undeclared channel `{}`", s.channel)),
                }
                for i in &s.indices {
                    self.expr(i);
                    if has_side_effect(i) {
                        self.diag(format!("channel index `{i}` has side effects"));
                    }
                }
            }
            for u in &e.updates {
                self.expr(u);
                let ok = matches!(
                    u,
                    Expr::Assign(..)
                        | Expr::Call(..)
                        | Expr::Unary(
                            UnOp::PreInc | UnOp::PreDec | UnOp::PostInc | UnOp::PostDec,
                            _
                        )
                );
                if !ok {
                    self.diag(format!("update `{u}` has no effect"));
                }
            }
        }
        self.scopes.pop();
    }
}

/// Check a system; the result is empty iff the system is well formed.
pub fn well_formed(m: &SystemModel) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut ck = Checker {
        context: "<global>".to_string(),
        scopes: vec![HashMap::new()],
        out: &mut out,
    };
    ck.declarations(&m.globals);
    let mut names = HashSet::new();
    for t in &m.templates {
        ck.context = t.name.clone();
        if !names.insert(t.name.as_str()) {
            ck.diag(format!("duplicate template `{}`", t.name));
        }
        ck.template(t);
    }
    ck.context = "<system>".to_string();
    let mut inst_names = HashSet::new();
    for i in &m.instances {
        if !inst_names.insert(i.name.as_str()) {
            ck.diag(format!("duplicate instance `{}`", i.name));
        }
        match m.template(&i.template) {
            None => ck.diag(format!(
                "instance `{}` refers to unknown template `{}`",
                i.name, i.template
            )),
            Some(t) => {
                if t.params.len() != i.args.len() {
                    ck.diag(format!(
                        "instance `{}` passes {} argument(s) to `{}` which expects {}",
                        i.name,
                        i.args.len(),
                        t.name,
                        t.params.len()
                    ));
                }
            }
        }
        for a in &i.args {
            ck.expr(a);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_xta;

    fn system(src: &str) -> SystemModel {
        let f = parse_xta(src).unwrap();
        SystemModel {
            globals: f.declarations,
            templates: f.templates,
            instances: f.instances,
        }
    }

    #[test]
    fn undeclared_clock_is_named() {
        let m = system(
            "process P() { clock x; state A; init A; trans A -> A { guard y >= 2; }; } p = P(); system p;",
        );
        let d = well_formed(&m);
        assert_eq!(d.len(), 1);
        assert!(d[0].message.contains("`y`"), "{d:?}");
    }

    #[test]
    fn wrong_arity_instance() {
        let m = system("process P(const int a) { state A; init A; } p = P(); system p;");
        let d = well_formed(&m);
        assert_eq!(d.len(), 1);
        assert!(d[0].message.contains("expects 1"));
    }

    #[test]
    fn lower_bound_invariant_rejected() {
        let m = system("process P() { clock x; state A { x >= 2 }; init A; } p = P(); system p;");
        assert_eq!(well_formed(&m).len(), 1);
        let m = system(
            "process P() { clock x; state A { x <= 2 && 3 > x }; init A; } p = P(); system p;",
        );
        assert!(well_formed(&m).is_empty());
    }

    #[test]
    fn channel_dimensions_checked() {
        let m = system(
            "chan c[2][2]; process P() { state A; init A; trans A -> A { sync c[0]!; }; } p = P(); system p;",
        );
        let d = well_formed(&m);
        assert_eq!(d.len(), 1);
        assert!(d[0].message.contains("dimension"));
    }

    #[test]
    fn constant_index_bounds_checked() {
        let m = system("const int N = 2; int a[N]; process P() { state A; init A; trans A -> A { assign a[2] = 1; }; } p = P(); system p;");
        let d = well_formed(&m);
        assert_eq!(d.len(), 1);
        assert!(d[0].message.contains("out of bounds"));
    }

    #[test]
    fn idempotent() {
        let m = system("process P() { state A; init B; } p = P(1); system p, q;");
        let a = well_formed(&m);
        let b = well_formed(&m);
        assert_eq!(a, b);
        assert_eq!(a.len(), 2);
    }
}
