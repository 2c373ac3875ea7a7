//! Reference semantics for guards over `a`, `b` (booleans), `n`, `m`
//! (integers) and the reply label `t`, before and after abstraction.

use std::collections::{BTreeMap, BTreeSet};

use creol_syntax::{BinOp, Expr, Guard, UnOp};
use creol_translate::{abstract_guard, AbstractionPolicy, Domain};
use ta_model::{BinOp as TBinOp, Expr as TExpr, UnOp as TUnOp};

#[derive(Debug, Clone)]
pub struct Valuation {
    pub a: bool,
    pub b: bool,
    pub n: i64,
    pub m: i64,
    pub t: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Val {
    I(i64),
    B(bool),
}

impl Val {
    pub fn int(self) -> i64 {
        match self {
            Val::I(v) => v,
            Val::B(b) => b as i64,
        }
    }
    pub fn truth(self) -> bool {
        self.int() != 0
    }
}

fn lookup(v: &Valuation, name: &str) -> Val {
    match name {
        "a" => Val::B(v.a),
        "b" => Val::B(v.b),
        "n" => Val::I(v.n),
        "m" => Val::I(v.m),
        other => panic!("unknown variable {other}"),
    }
}

fn arith(op: BinOp) -> Option<fn(i64, i64) -> i64> {
    Some(match op {
        BinOp::Add => |x, y| x + y,
        BinOp::Sub => |x, y| x - y,
        BinOp::Mul => |x, y| x * y,
        _ => return None,
    })
}

fn compare(symbol: &str, x: i64, y: i64) -> bool {
    match symbol {
        "==" => x == y,
        "!=" => x != y,
        "<" => x < y,
        "<=" => x <= y,
        ">" => x > y,
        ">=" => x >= y,
        other => panic!("not a comparison: {other}"),
    }
}

pub fn eval(e: &Expr, v: &Valuation) -> Val {
    match e {
        Expr::Int(i) => Val::I(*i),
        Expr::Bool(b) => Val::B(*b),
        Expr::Var(x) => lookup(v, x),
        Expr::Unary(UnOp::Not, a) => Val::B(!eval(a, v).truth()),
        Expr::Unary(UnOp::Neg, a) => Val::I(-eval(a, v).int()),
        Expr::Binary(BinOp::And, a, b) => Val::B(eval(a, v).truth() && eval(b, v).truth()),
        Expr::Binary(BinOp::Or, a, b) => Val::B(eval(a, v).truth() || eval(b, v).truth()),
        Expr::Binary(op, a, b) => {
            let (x, y) = (eval(a, v).int(), eval(b, v).int());
            match arith(*op) {
                Some(f) => Val::I(f(x, y)),
                None => Val::B(compare(op.symbol(), x, y)),
            }
        }
    }
}

pub fn holds(g: &Guard, v: &Valuation) -> bool {
    match g {
        Guard::Bool(e) => eval(e, v).truth(),
        Guard::Reply(_) => v.t,
        Guard::Not(a) => !holds(a, v),
        Guard::And(a, b) => holds(a, v) && holds(b, v),
    }
}

pub fn teval(e: &TExpr, v: &Valuation) -> Val {
    match e {
        TExpr::Int(i) => Val::I(*i),
        TExpr::Bool(b) => Val::B(*b),
        TExpr::Index(base, _) => match &**base {
            TExpr::Index(labels, _) if matches!(&**labels, TExpr::Ident(l) if l == "labels") => {
                Val::B(v.t)
            }
            TExpr::Ident(x) => lookup(v, x),
            other => panic!("unexpected array {other}"),
        },
        TExpr::Unary(TUnOp::Not, a) => Val::B(!teval(a, v).truth()),
        TExpr::Unary(TUnOp::Neg, a) => Val::I(-teval(a, v).int()),
        TExpr::Binary(TBinOp::And, a, b) => Val::B(teval(a, v).truth() && teval(b, v).truth()),
        TExpr::Binary(TBinOp::Or, a, b) => Val::B(teval(a, v).truth() || teval(b, v).truth()),
        TExpr::Binary(op, a, b) => {
            let (x, y) = (teval(a, v).int(), teval(b, v).int());
            match op {
                TBinOp::Add => Val::I(x + y),
                TBinOp::Sub => Val::I(x - y),
                TBinOp::Mul => Val::I(x * y),
                other => Val::B(compare(other.symbol(), x, y)),
            }
        }
        other => panic!("unexpected expression {other}"),
    }
}

pub fn policy(kept_ints: &[&str], dropped: &[&str]) -> AbstractionPolicy {
    let mut keep = BTreeMap::from([
        ("a".to_string(), Domain::Bool),
        ("b".to_string(), Domain::Bool),
    ]);
    for &n in kept_ints {
        keep.insert(n.to_string(), Domain::Int { lo: -4, hi: 4 });
    }
    AbstractionPolicy {
        keep,
        drop: dropped
            .iter()
            .map(|s| s.to_string())
            .collect::<BTreeSet<_>>(),
    }
}

/// For both polarities: whenever the guard holds so does its abstraction,
/// dropping more variables keeps it so, and keeping all of them is exact.
pub fn check_over_approximation(g: &Guard, v: &Valuation) -> Result<(), String> {
    let policies = [
        policy(&["n", "m"], &[]),
        policy(&["n"], &["m"]),
        policy(&[], &["n", "m"]),
    ];
    for negate in [false, true] {
        let concrete = holds(g, v) != negate;
        let mut previous = concrete;
        for p in &policies {
            let abs = teval(&abstract_guard(g, negate, p), v).truth();
            if previous && !abs {
                return Err(format!(
                    "{g:?} negate={negate} dropping {:?} under {v:?}",
                    p.drop
                ));
            }
            previous = abs;
        }
        if teval(&abstract_guard(g, negate, &policies[0]), v).truth() != concrete {
            return Err(format!(
                "{g:?} negate={negate} is not exact when everything is kept"
            ));
        }
    }
    Ok(())
}
