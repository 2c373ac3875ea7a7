//! Interpreter for compiled expressions, statements and functions.

use smallvec::SmallVec;

use crate::compile::{CExpr, CStmt, CSync, CompiledSystem, IndexPart, LValue, Place, RetKind};
use crate::dbm::{le, lt, Constraint, MAX_CONSTANT};
use crate::error::EvalError;
use crate::expr::{AssignOp, BinOp, UnOp};

const LOOP_LIMIT: u64 = 1_000_000;

/// Result of evaluating a guard that may mention clocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GuardVal {
    False,
    /// A conjunction of clock constraints; empty means `true`.
    Clocks(SmallVec<[Constraint; 4]>),
}

impl GuardVal {
    pub fn tt() -> GuardVal {
        GuardVal::Clocks(SmallVec::new())
    }

    pub fn is_false(&self) -> bool {
        matches!(self, GuardVal::False)
    }

    pub fn is_true(&self) -> bool {
        matches!(self, GuardVal::Clocks(c) if c.is_empty())
    }

    fn and(self, other: GuardVal) -> GuardVal {
        match (self, other) {
            (GuardVal::Clocks(mut a), GuardVal::Clocks(b)) => {
                a.extend(b);
                GuardVal::Clocks(a)
            }
            _ => GuardVal::False,
        }
    }

    fn not(self) -> Result<GuardVal, EvalError> {
        match self {
            GuardVal::False => Ok(GuardVal::tt()),
            GuardVal::Clocks(c) if c.is_empty() => Ok(GuardVal::False),
            GuardVal::Clocks(c) if c.len() == 1 => {
                Ok(GuardVal::Clocks(SmallVec::from_elem(c[0].negated(), 1)))
            }
            GuardVal::Clocks(_) => Err(EvalError::NonConvex(
                "negation of a clock conjunction".to_string(),
            )),
        }
    }

    fn or(self, other: GuardVal) -> Result<GuardVal, EvalError> {
        if self.is_true() || other.is_true() {
            return Ok(GuardVal::tt());
        }
        match (self, other) {
            (GuardVal::False, g) | (g, GuardVal::False) => Ok(g),
            (GuardVal::Clocks(a), GuardVal::Clocks(b)) => {
                if a == b {
                    Ok(GuardVal::Clocks(a))
                } else {
                    Err(EvalError::NonConvex(
                        "disjunction of clock constraints".to_string(),
                    ))
                }
            }
        }
    }
}

enum Flow {
    Normal,
    Return(i64),
}

/// Variable storage seen by the evaluator. Read-only storage rejects writes,
/// which catches side effects in guards.
pub enum Vars<'a> {
    Ro(&'a [i32]),
    Rw(&'a mut [i32]),
}

impl Vars<'_> {
    #[inline]
    fn get(&self, i: usize) -> i32 {
        match self {
            Vars::Ro(v) => v[i],
            Vars::Rw(v) => v[i],
        }
    }
}

pub struct Evaluator<'s> {
    sys: &'s CompiledSystem,
    stack: Vec<i64>,
    bp: usize,
    /// Clock resets `(clock, value)` collected while running updates.
    pub resets: Vec<(u32, i32)>,
    /// Current location vector, needed by location predicates.
    pub locations: Vec<u32>,
    steps: u64,
}

impl<'s> Evaluator<'s> {
    pub fn new(sys: &'s CompiledSystem) -> Evaluator<'s> {
        Evaluator {
            sys,
            stack: vec![0; sys.frame_size],
            bp: 0,
            resets: Vec::new(),
            locations: Vec::new(),
            steps: 0,
        }
    }

    pub fn system(&self) -> &'s CompiledSystem {
        self.sys
    }

    fn reset_frame(&mut self) {
        self.stack.truncate(self.sys.frame_size);
        self.stack.resize(self.sys.frame_size, 0);
        self.bp = 0;
        self.steps = 0;
    }

    fn offset(&mut self, parts: &[IndexPart], vars: &mut Vars) -> Result<u32, EvalError> {
        let mut off = 0u32;
        for p in parts {
            let i = self.eval_in(&p.index, vars)?;
            if i < 0 || i >= p.size as i64 {
                return Err(EvalError::IndexOutOfBounds {
                    index: i,
                    size: p.size as usize,
                });
            }
            off += i as u32 * p.stride;
        }
        Ok(off)
    }

    fn place_index(&mut self, p: &Place, vars: &mut Vars) -> Result<usize, EvalError> {
        Ok((p.base + self.offset(&p.parts, vars)?) as usize)
    }

    /// Flattened channel id of a synchronisation.
    pub fn channel(&mut self, s: &CSync, vars: &[i32]) -> Result<u32, EvalError> {
        self.reset_frame();
        let mut v = Vars::Ro(vars);
        Ok(s.base + self.offset(&s.parts, &mut v)?)
    }

    /// Evaluate a discrete expression against read-only variables.
    pub fn eval(&mut self, e: &CExpr, vars: &[i32]) -> Result<i64, EvalError> {
        self.reset_frame();
        self.eval_in(e, &mut Vars::Ro(vars))
    }

    /// Run an update; clock assignments are appended to `self.resets`.
    pub fn update(&mut self, e: &CExpr, vars: &mut [i32]) -> Result<(), EvalError> {
        self.reset_frame();
        self.eval_in(e, &mut Vars::Rw(vars)).map(|_| ())
    }

    /// Evaluate a guard or invariant to clock constraints.
    pub fn guard(&mut self, e: &CExpr, vars: &[i32]) -> Result<GuardVal, EvalError> {
        self.reset_frame();
        self.guard_in(e, &mut Vars::Ro(vars))
    }

    fn write(&mut self, lv: &LValue, value: i64, vars: &mut Vars) -> Result<(), EvalError> {
        match lv {
            LValue::Local(s) => {
                self.stack[self.bp + *s as usize] = value;
                Ok(())
            }
            LValue::Clock(p) => {
                let ix = self.place_index(p, vars)?;
                if value < 0 || value > MAX_CONSTANT as i64 {
                    return Err(EvalError::OutOfRange {
                        var: self.sys.clocks[ix].clone(),
                        value,
                        lo: 0,
                        hi: MAX_CONSTANT as i64,
                    });
                }
                self.resets.push((ix as u32, value as i32));
                Ok(())
            }
            LValue::Var(p) => {
                let ix = self.place_index(p, vars)?;
                let info = &self.sys.vars[ix];
                let value = if info.is_bool {
                    (value != 0) as i64
                } else {
                    value
                };
                if value < info.lo as i64 || value > info.hi as i64 {
                    return Err(EvalError::OutOfRange {
                        var: info.name.clone(),
                        value,
                        lo: info.lo as i64,
                        hi: info.hi as i64,
                    });
                }
                match vars {
                    Vars::Rw(v) => {
                        v[ix] = value as i32;
                        Ok(())
                    }
                    Vars::Ro(_) => Err(EvalError::SideEffect(info.name.clone())),
                }
            }
        }
    }

    fn read(&mut self, lv: &LValue, vars: &mut Vars) -> Result<i64, EvalError> {
        match lv {
            LValue::Local(s) => Ok(self.stack[self.bp + *s as usize]),
            LValue::Var(p) => {
                let ix = self.place_index(p, vars)?;
                Ok(vars.get(ix) as i64)
            }
            LValue::Clock(_) => Err(EvalError::ClockInDiscreteContext),
        }
    }

    fn eval_in(&mut self, e: &CExpr, vars: &mut Vars) -> Result<i64, EvalError> {
        Ok(match e {
            CExpr::Const(v) => *v,
            CExpr::Var(p) => {
                let ix = self.place_index(p, vars)?;
                vars.get(ix) as i64
            }
            CExpr::Local(s) => self.stack[self.bp + *s as usize],
            CExpr::Clock(_) | CExpr::ClockCmp(..) => return Err(EvalError::ClockInDiscreteContext),
            CExpr::Unary(op, a) => {
                let v = self.eval_in(a, vars)?;
                match op {
                    UnOp::Neg => -v,
                    UnOp::Not => (v == 0) as i64,
                    _ => unreachable!("increments are compiled separately"),
                }
            }
            CExpr::Binary(op, a, b) => match op {
                BinOp::And => (self.eval_in(a, vars)? != 0 && self.eval_in(b, vars)? != 0) as i64,
                BinOp::Or => (self.eval_in(a, vars)? != 0 || self.eval_in(b, vars)? != 0) as i64,
                BinOp::Imply => (self.eval_in(a, vars)? == 0 || self.eval_in(b, vars)? != 0) as i64,
                _ => {
                    let x = self.eval_in(a, vars)?;
                    let y = self.eval_in(b, vars)?;
                    match op {
                        BinOp::Add => x + y,
                        BinOp::Sub => x - y,
                        BinOp::Mul => x * y,
                        BinOp::Div => {
                            if y == 0 {
                                return Err(EvalError::DivisionByZero);
                            }
                            x / y
                        }
                        BinOp::Mod => {
                            if y == 0 {
                                return Err(EvalError::DivisionByZero);
                            }
                            x % y
                        }
                        BinOp::Lt => (x < y) as i64,
                        BinOp::Le => (x <= y) as i64,
                        BinOp::Eq => (x == y) as i64,
                        BinOp::Ne => (x != y) as i64,
                        BinOp::Ge => (x >= y) as i64,
                        BinOp::Gt => (x > y) as i64,
                        BinOp::And | BinOp::Or | BinOp::Imply => unreachable!(),
                    }
                }
            },
            CExpr::Cond(c, a, b) => {
                if self.eval_in(c, vars)? != 0 {
                    self.eval_in(a, vars)?
                } else {
                    self.eval_in(b, vars)?
                }
            }
            CExpr::Assign(op, lv, rhs) => {
                let r = self.eval_in(rhs, vars)?;
                let v = match op {
                    AssignOp::Set => r,
                    AssignOp::Add => self.read(lv, vars)? + r,
                    AssignOp::Sub => self.read(lv, vars)? - r,
                };
                self.write(lv, v, vars)?;
                v
            }
            CExpr::IncDec { pre, inc, target } => {
                let old = self.read(target, vars)?;
                let new = if *inc { old + 1 } else { old - 1 };
                self.write(target, new, vars)?;
                if *pre {
                    new
                } else {
                    old
                }
            }
            CExpr::Call(f, args) => self.call(*f, args, vars)?,
            CExpr::Quant {
                exists,
                slot,
                lo,
                hi,
                body,
            } => {
                let lo = self.eval_in(lo, vars)?;
                let hi = self.eval_in(hi, vars)?;
                let mut result = !*exists;
                for k in lo..=hi {
                    self.stack[self.bp + *slot as usize] = k;
                    let b = self.eval_in(body, vars)? != 0;
                    if *exists && b {
                        result = true;
                        break;
                    }
                    if !*exists && !b {
                        result = false;
                        break;
                    }
                }
                result as i64
            }
            CExpr::AtLocation { instance, location } => {
                (self.locations.get(*instance as usize) == Some(location)) as i64
            }
        })
    }

    fn call(&mut self, f: u32, args: &[CExpr], vars: &mut Vars) -> Result<i64, EvalError> {
        let func = &self.sys.funcs[f as usize];
        let mut vals: SmallVec<[i64; 4]> = SmallVec::new();
        for a in args {
            vals.push(self.eval_in(a, vars)?);
        }
        let saved_bp = self.bp;
        let new_bp = self.stack.len();
        self.stack.extend_from_slice(&vals);
        self.stack.resize(new_bp + func.nslots.max(vals.len()), 0);
        self.bp = new_bp;
        let r = self.block(&func.body, vars);
        self.stack.truncate(new_bp);
        self.bp = saved_bp;
        match r? {
            Flow::Return(v) => Ok(match func.ret {
                RetKind::Bool => (v != 0) as i64,
                _ => v,
            }),
            Flow::Normal if func.ret == RetKind::Void => Ok(0),
            Flow::Normal => Err(EvalError::MissingReturn(func.name.clone())),
        }
    }

    fn tick(&mut self) -> Result<(), EvalError> {
        self.steps += 1;
        if self.steps > LOOP_LIMIT {
            return Err(EvalError::LoopLimit);
        }
        Ok(())
    }

    fn block(&mut self, body: &[CStmt], vars: &mut Vars) -> Result<Flow, EvalError> {
        for s in body {
            if let Flow::Return(v) = self.stmt(s, vars)? {
                return Ok(Flow::Return(v));
            }
        }
        Ok(Flow::Normal)
    }

    fn stmt(&mut self, s: &CStmt, vars: &mut Vars) -> Result<Flow, EvalError> {
        match s {
            CStmt::Expr(e) => {
                self.eval_in(e, vars)?;
            }
            CStmt::Init(slot, e) => {
                let v = self.eval_in(e, vars)?;
                self.stack[self.bp + *slot as usize] = v;
            }
            CStmt::If(c, t, e) => {
                if self.eval_in(c, vars)? != 0 {
                    return self.stmt(t, vars);
                } else if let Some(e) = e {
                    return self.stmt(e, vars);
                }
            }
            CStmt::While(c, b) => {
                while self.eval_in(c, vars)? != 0 {
                    self.tick()?;
                    if let Flow::Return(v) = self.stmt(b, vars)? {
                        return Ok(Flow::Return(v));
                    }
                }
            }
            CStmt::For {
                init,
                cond,
                step,
                body,
            } => {
                if let Some(i) = init {
                    self.eval_in(i, vars)?;
                }
                loop {
                    if let Some(c) = cond {
                        if self.eval_in(c, vars)? == 0 {
                            break;
                        }
                    }
                    self.tick()?;
                    if let Flow::Return(v) = self.stmt(body, vars)? {
                        return Ok(Flow::Return(v));
                    }
                    if let Some(s) = step {
                        self.eval_in(s, vars)?;
                    }
                }
            }
            CStmt::ForRange { slot, lo, hi, body } => {
                let lo = self.eval_in(lo, vars)?;
                let hi = self.eval_in(hi, vars)?;
                for k in lo..=hi {
                    self.tick()?;
                    self.stack[self.bp + *slot as usize] = k;
                    if let Flow::Return(v) = self.stmt(body, vars)? {
                        return Ok(Flow::Return(v));
                    }
                }
            }
            CStmt::Return(e) => {
                let v = match e {
                    Some(e) => self.eval_in(e, vars)?,
                    None => 0,
                };
                return Ok(Flow::Return(v));
            }
            CStmt::Block(items) => return self.block(items, vars),
            CStmt::Empty => {}
        }
        Ok(Flow::Normal)
    }

    fn guard_in(&mut self, e: &CExpr, vars: &mut Vars) -> Result<GuardVal, EvalError> {
        match e {
            CExpr::ClockCmp(op, a, b) => self.clock_cmp(*op, a, b, vars),
            CExpr::Binary(BinOp::And, a, b) => {
                let ga = self.guard_in(a, vars)?;
                if ga.is_false() {
                    return Ok(ga);
                }
                Ok(ga.and(self.guard_in(b, vars)?))
            }
            CExpr::Binary(BinOp::Or, a, b) => {
                let ga = self.guard_in(a, vars)?;
                if ga.is_true() {
                    return Ok(ga);
                }
                ga.or(self.guard_in(b, vars)?)
            }
            CExpr::Binary(BinOp::Imply, a, b) => {
                let na = self.guard_in(a, vars)?.not()?;
                if na.is_true() {
                    return Ok(na);
                }
                na.or(self.guard_in(b, vars)?)
            }
            CExpr::Unary(UnOp::Not, a) => self.guard_in(a, vars)?.not(),
            CExpr::Cond(c, a, b) => {
                if self.eval_in(c, vars)? != 0 {
                    self.guard_in(a, vars)
                } else {
                    self.guard_in(b, vars)
                }
            }
            CExpr::Quant {
                exists,
                slot,
                lo,
                hi,
                body,
            } => {
                let lo = self.eval_in(lo, vars)?;
                let hi = self.eval_in(hi, vars)?;
                let mut acc = if *exists {
                    GuardVal::False
                } else {
                    GuardVal::tt()
                };
                for k in lo..=hi {
                    self.stack[self.bp + *slot as usize] = k;
                    let g = self.guard_in(body, vars)?;
                    acc = if *exists { acc.or(g)? } else { acc.and(g) };
                    if (*exists && acc.is_true()) || (!*exists && acc.is_false()) {
                        break;
                    }
                }
                Ok(acc)
            }
            other => Ok(if self.eval_in(other, vars)? != 0 {
                GuardVal::tt()
            } else {
                GuardVal::False
            }),
        }
    }

    fn linear(
        &mut self,
        e: &CExpr,
        coef: i64,
        terms: &mut SmallVec<[(u32, i64); 4]>,
        vars: &mut Vars,
    ) -> Result<i64, EvalError> {
        match e {
            CExpr::Clock(p) => {
                let ix = self.place_index(p, vars)? as u32;
                terms.push((ix, coef));
                Ok(0)
            }
            CExpr::Binary(BinOp::Add, a, b) => {
                Ok(self.linear(a, coef, terms, vars)? + self.linear(b, coef, terms, vars)?)
            }
            CExpr::Binary(BinOp::Sub, a, b) => {
                Ok(self.linear(a, coef, terms, vars)? + self.linear(b, -coef, terms, vars)?)
            }
            CExpr::Unary(UnOp::Neg, a) => self.linear(a, -coef, terms, vars),
            CExpr::Binary(BinOp::Mul, a, b) if a.mentions_clock() && !b.mentions_clock() => {
                let k = self.eval_in(b, vars)?;
                self.linear(a, coef * k, terms, vars)
            }
            CExpr::Binary(BinOp::Mul, a, b) if b.mentions_clock() && !a.mentions_clock() => {
                let k = self.eval_in(a, vars)?;
                self.linear(b, coef * k, terms, vars)
            }
            other => Ok(coef * self.eval_in(other, vars)?),
        }
    }

    fn clock_cmp(
        &mut self,
        op: BinOp,
        a: &CExpr,
        b: &CExpr,
        vars: &mut Vars,
    ) -> Result<GuardVal, EvalError> {
        let mut terms: SmallVec<[(u32, i64); 4]> = SmallVec::new();
        // lhs - rhs  op  0
        let k = self.linear(a, 1, &mut terms, vars)? + self.linear(b, -1, &mut terms, vars)?;
        terms.sort_unstable_by_key(|t| t.0);
        let mut merged: SmallVec<[(u32, i64); 2]> = SmallVec::new();
        for (c, w) in terms {
            match merged.last_mut() {
                Some(last) if last.0 == c => last.1 += w,
                _ => merged.push((c, w)),
            }
        }
        merged.retain(|t| t.1 != 0);
        let bound = -k;
        // x_i - x_j  op  bound
        let (i, j, op, bound) = match merged.as_slice() {
            [] => {
                let holds = match op {
                    BinOp::Lt => 0 < bound,
                    BinOp::Le => 0 <= bound,
                    BinOp::Eq => 0 == bound,
                    BinOp::Ne => 0 != bound,
                    BinOp::Ge => 0 >= bound,
                    BinOp::Gt => 0 > bound,
                    _ => unreachable!(),
                };
                return Ok(if holds {
                    GuardVal::tt()
                } else {
                    GuardVal::False
                });
            }
            [(x, 1)] => (*x, 0, op, bound),
            [(x, -1)] => (*x, 0, op.flipped(), -bound),
            [(x, 1), (y, -1)] => (*x, *y, op, bound),
            [(x, -1), (y, 1)] => (*y, *x, op, bound),
            _ => {
                return Err(EvalError::NonConvex(
                    "clock comparison is not of the form x ~ c or x - y ~ c".to_string(),
                ))
            }
        };
        if bound.abs() > MAX_CONSTANT as i64 {
            return Err(EvalError::OutOfRange {
                var: "clock bound".to_string(),
                value: bound,
                lo: -(MAX_CONSTANT as i64),
                hi: MAX_CONSTANT as i64,
            });
        }
        let c = bound as i32;
        let (i, j) = (i as usize, j as usize);
        let mut out: SmallVec<[Constraint; 4]> = SmallVec::new();
        match op {
            BinOp::Le => out.push(Constraint::new(i, j, le(c))),
            BinOp::Lt => out.push(Constraint::new(i, j, lt(c))),
            BinOp::Ge => out.push(Constraint::new(j, i, le(-c))),
            BinOp::Gt => out.push(Constraint::new(j, i, lt(-c))),
            BinOp::Eq => {
                out.push(Constraint::new(i, j, le(c)));
                out.push(Constraint::new(j, i, le(-c)));
            }
            BinOp::Ne => {
                return Err(EvalError::NonConvex("clock disequality".to_string()));
            }
            _ => unreachable!(),
        }
        Ok(GuardVal::Clocks(out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile::compile;
    use crate::model::SystemModel;
    use crate::parser::{parse_expr, parse_xta};

    fn system() -> CompiledSystem {
        let f = parse_xta(
            r#"
            const int MAX = 3;
            int[0,5] a[MAX] = { 1, 4, 2 };
            bool flag;
            clock x[MAX];
            int best() {
                int i = 0;
                int k = 0;
                for (i = 1; i < MAX; i++) { if (a[i] > a[k]) k = i; }
                return k;
            }
            process P() { state A; init A; }
            p = P();
        "#,
        )
        .unwrap();
        compile(&SystemModel {
            globals: f.declarations,
            templates: f.templates,
            instances: f.instances,
        })
        .unwrap()
    }

    fn pred(sys: &mut CompiledSystem, src: &str) -> CExpr {
        sys.compile_predicate(&parse_expr(src).unwrap()).unwrap()
    }

    #[test]
    fn functions_and_quantifiers() {
        let mut sys = system();
        let e = pred(&mut sys, "best()");
        let s = sys.clone();
        let mut ev = Evaluator::new(&s);
        assert_eq!(ev.eval(&e, &s.init_vars).unwrap(), 1);
        let q = pred(&mut sys, "forall (i : int[0,MAX-1]) a[i] >= 1");
        let s = sys.clone();
        let mut ev = Evaluator::new(&s);
        assert_eq!(ev.eval(&q, &s.init_vars).unwrap(), 1);
    }

    #[test]
    fn range_violation_is_reported() {
        let mut sys = system();
        let u = pred(&mut sys, "a[1] = a[1] + 2");
        let s = sys.clone();
        let mut ev = Evaluator::new(&s);
        let mut vars = s.init_vars.clone();
        let e = ev.update(&u, &mut vars).unwrap_err();
        assert!(matches!(e, EvalError::OutOfRange { value: 6, .. }));
    }

    #[test]
    fn guard_side_effects_are_rejected() {
        let mut sys = system();
        let g = pred(&mut sys, "(flag = true)");
        let s = sys.clone();
        let mut ev = Evaluator::new(&s);
        assert!(matches!(
            ev.guard(&g, &s.init_vars),
            Err(EvalError::SideEffect(_))
        ));
    }

    #[test]
    fn clock_guards_become_constraints() {
        let mut sys = system();
        let g = pred(
            &mut sys,
            "forall (m : int[0,MAX-1]) (m != 1 imply x[m] - x[1] <= a[m] - a[1])",
        );
        let s = sys.clone();
        let mut ev = Evaluator::new(&s);
        let GuardVal::Clocks(c) = ev.guard(&g, &s.init_vars).unwrap() else {
            panic!()
        };
        // x[0] - x[1] <= -3 and x[2] - x[1] <= -2; clock indices are shifted by one
        assert_eq!(
            c.as_slice(),
            &[Constraint::new(1, 2, le(-3)), Constraint::new(3, 2, le(-2))]
        );
        let g = pred(&mut sys, "x[0] > 2 || flag");
        let s = sys.clone();
        let mut ev = Evaluator::new(&s);
        let GuardVal::Clocks(c) = ev.guard(&g, &s.init_vars).unwrap() else {
            panic!()
        };
        assert_eq!(c.as_slice(), &[Constraint::new(0, 1, lt(-2))]);
        let g = pred(&mut sys, "x[0] > 2 || x[1] < 1");
        let s = sys.clone();
        let mut ev = Evaluator::new(&s);
        assert!(matches!(
            ev.guard(&g, &s.init_vars),
            Err(EvalError::NonConvex(_))
        ));
        let g = pred(&mut sys, "!(x[0] > 2)");
        let s = sys.clone();
        let mut ev = Evaluator::new(&s);
        let GuardVal::Clocks(c) = ev.guard(&g, &s.init_vars).unwrap() else {
            panic!()
        };
        assert_eq!(c.as_slice(), &[Constraint::new(1, 0, le(2))]);
    }

    #[test]
    fn clock_assignment_collects_reset() {
        let mut sys = system();
        let u = pred(&mut sys, "x[best()] = 0");
        let s = sys.clone();
        let mut ev = Evaluator::new(&s);
        let mut vars = s.init_vars.clone();
        ev.update(&u, &mut vars).unwrap();
        assert_eq!(ev.resets, vec![(2, 0)]);
    }
}
