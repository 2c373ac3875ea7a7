//! Abstraction of Creol guards, expressions and assignments into the
//! automaton expression language.
//!
//! Guards are brought into negation normal form first, then every atom that
//! mentions a dropped variable becomes `true`. Abstracting `!g` therefore
//! never yields `!true`: both `g` and its negation over-approximate.

use std::collections::{BTreeMap, BTreeSet};

use creol_syntax::{BinOp, ClassDecl, Expr, Guard, UnOp, VarType};
use ta_model::{BinOp as TBinOp, Expr as TExpr};

use crate::error::TranslateError;

/// Finite domain of a kept variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Bool,
    Int { lo: i64, hi: i64 },
}

/// Which class variables survive translation. Kept variables become
/// per-object arrays; conditions on dropped ones are erased.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AbstractionPolicy {
    pub keep: BTreeMap<String, Domain>,
    pub drop: BTreeSet<String>,
}

impl AbstractionPolicy {
    /// Default policy for a class: booleans are kept, an integer is kept
    /// when `ranges` gives it a domain, everything in `drop` is dropped.
    pub fn for_class(
        class: &ClassDecl,
        ranges: &BTreeMap<String, (i64, i64)>,
        drop: &BTreeSet<String>,
    ) -> Result<AbstractionPolicy, TranslateError> {
        let mut p = AbstractionPolicy::default();
        for name in ranges.keys().chain(drop.iter()) {
            if class.var(name).is_none() {
                return Err(TranslateError::Policy(format!(
                    "`{name}` is not a variable of class `{}`",
                    class.name
                )));
            }
        }
        for v in &class.vars {
            if drop.contains(&v.name) {
                if ranges.contains_key(&v.name) {
                    return Err(TranslateError::Policy(format!(
                        "`{}` is both kept and dropped",
                        v.name
                    )));
                }
                p.drop.insert(v.name.clone());
                continue;
            }
            match (v.ty, ranges.get(&v.name)) {
                (VarType::Bool, None) => {
                    p.keep.insert(v.name.clone(), Domain::Bool);
                }
                (VarType::Bool, Some(_)) => {
                    return Err(TranslateError::Policy(format!(
                        "range given for boolean `{}`",
                        v.name
                    )))
                }
                (VarType::Int, Some(&(lo, hi))) if lo <= hi => {
                    p.keep.insert(v.name.clone(), Domain::Int { lo, hi });
                }
                (VarType::Int, Some(&(lo, hi))) => {
                    return Err(TranslateError::Policy(format!(
                        "empty range [{lo}, {hi}] for `{}`",
                        v.name
                    )))
                }
                (VarType::Int, None) => {
                    p.drop.insert(v.name.clone());
                }
            }
        }
        Ok(p)
    }

    /// Check that the policy covers exactly the class variables.
    pub fn check(&self, class: &ClassDecl) -> Result<(), TranslateError> {
        for v in &class.vars {
            let kept = self.keep.contains_key(&v.name);
            let dropped = self.drop.contains(&v.name);
            if kept == dropped {
                return Err(TranslateError::Policy(format!(
                    "variable `{}` must be either kept or dropped",
                    v.name
                )));
            }
        }
        for name in self.keep.keys().chain(self.drop.iter()) {
            if class.var(name).is_none() {
                return Err(TranslateError::Policy(format!(
                    "`{name}` is not a variable of class `{}`",
                    class.name
                )));
            }
        }
        Ok(())
    }

    pub fn is_dropped(&self, name: &str) -> bool {
        self.drop.contains(name)
    }
}

fn this() -> TExpr {
    TExpr::ident("self")
}

/// `labels[t][self]`
pub fn label_flag(label: &str) -> TExpr {
    TExpr::ident("labels")
        .index(TExpr::ident(label))
        .index(this())
}

fn tbin(op: BinOp) -> TBinOp {
    match op {
        BinOp::Or => TBinOp::Or,
        BinOp::And => TBinOp::And,
        BinOp::Eq => TBinOp::Eq,
        BinOp::Ne => TBinOp::Ne,
        BinOp::Lt => TBinOp::Lt,
        BinOp::Le => TBinOp::Le,
        BinOp::Gt => TBinOp::Gt,
        BinOp::Ge => TBinOp::Ge,
        BinOp::Add => TBinOp::Add,
        BinOp::Sub => TBinOp::Sub,
        BinOp::Mul => TBinOp::Mul,
        BinOp::Div => TBinOp::Div,
        BinOp::Mod => TBinOp::Mod,
    }
}

/// Rename an expression over kept variables: `v` becomes `v[self]`, class
/// parameters stay as template arguments. `None` if a dropped variable
/// occurs.
pub fn rename(e: &Expr, policy: &AbstractionPolicy) -> Option<TExpr> {
    Some(match e {
        Expr::Int(v) => TExpr::Int(*v),
        Expr::Bool(b) => TExpr::Bool(*b),
        Expr::Var(v) if policy.is_dropped(v) => return None,
        Expr::Var(v) if policy.keep.contains_key(v) => TExpr::ident(v.as_str()).index(this()),
        Expr::Var(v) => TExpr::ident(v.as_str()),
        Expr::Unary(UnOp::Not, a) => rename(a, policy)?.not(),
        Expr::Unary(UnOp::Neg, a) => {
            TExpr::Unary(ta_model::UnOp::Neg, Box::new(rename(a, policy)?))
        }
        Expr::Binary(op, a, b) => TExpr::bin(tbin(*op), rename(a, policy)?, rename(b, policy)?),
    })
}

fn and(a: TExpr, b: TExpr) -> TExpr {
    match (a, b) {
        (TExpr::Bool(true), x) | (x, TExpr::Bool(true)) => x,
        (TExpr::Bool(false), _) | (_, TExpr::Bool(false)) => TExpr::Bool(false),
        (a, b) => a.and(b),
    }
}

fn or(a: TExpr, b: TExpr) -> TExpr {
    match (a, b) {
        (TExpr::Bool(true), _) | (_, TExpr::Bool(true)) => TExpr::Bool(true),
        (TExpr::Bool(false), x) | (x, TExpr::Bool(false)) => x,
        (a, b) => a.or(b),
    }
}

/// `Abs(g)`, or `Abs(!g)` when `negate` is set.
pub fn abstract_guard(g: &Guard, negate: bool, policy: &AbstractionPolicy) -> TExpr {
    match g {
        Guard::And(a, b) => {
            let (x, y) = (
                abstract_guard(a, negate, policy),
                abstract_guard(b, negate, policy),
            );
            if negate {
                or(x, y)
            } else {
                and(x, y)
            }
        }
        Guard::Not(a) => abstract_guard(a, !negate, policy),
        Guard::Reply(t) if negate => label_flag(t).not(),
        Guard::Reply(t) => label_flag(t),
        Guard::Bool(e) => abstract_cond(e, negate, policy),
    }
}

/// Abstraction of a boolean-valued expression in negation normal form.
pub fn abstract_cond(e: &Expr, negate: bool, policy: &AbstractionPolicy) -> TExpr {
    match e {
        Expr::Binary(op @ (BinOp::And | BinOp::Or), a, b) => {
            let (x, y) = (
                abstract_cond(a, negate, policy),
                abstract_cond(b, negate, policy),
            );
            if (*op == BinOp::And) != negate {
                and(x, y)
            } else {
                or(x, y)
            }
        }
        Expr::Unary(UnOp::Not, a) => abstract_cond(a, !negate, policy),
        Expr::Bool(b) => TExpr::Bool(*b != negate),
        Expr::Binary(op, a, b) if op.is_comparison() => {
            let (Some(x), Some(y)) = (rename(a, policy), rename(b, policy)) else {
                return TExpr::Bool(true);
            };
            let op = tbin(*op);
            let op = if negate {
                op.negated().expect("comparison")
            } else {
                op
            };
            TExpr::bin(op, x, y)
        }
        other => match rename(other, policy) {
            None => TExpr::Bool(true),
            Some(x) if negate => x.not(),
            Some(x) => x,
        },
    }
}

/// `Abs(v := ex)`: `None` when `v` is dropped.
pub fn abstract_assign(
    var: &str,
    value: &Expr,
    policy: &AbstractionPolicy,
) -> Result<Option<TExpr>, TranslateError> {
    if policy.is_dropped(var) {
        return Ok(None);
    }
    let Some(rhs) = rename(value, policy) else {
        return Err(TranslateError::Unabstractable {
            var: var.to_string(),
            expr: value.to_string(),
        });
    };
    Ok(Some(TExpr::assign(TExpr::ident(var).index(this()), rhs)))
}

/// `labels[t][self] = false` for every reply test in `g`, first occurrence
/// order, without duplicates.
pub fn label_reset(g: &Guard) -> Vec<TExpr> {
    let mut seen = BTreeSet::new();
    g.labels()
        .into_iter()
        .filter(|t| seen.insert(*t))
        .map(|t| TExpr::assign(label_flag(t), TExpr::Bool(false)))
        .collect()
}
