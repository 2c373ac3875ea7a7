//! Determinism of a single template: no location may have two outgoing edges
//! with the same action whose guards can hold together.

use std::collections::BTreeSet;

use crate::compile::{compile, CEdge, CExpr, CompiledSystem, LValue, Place};
use crate::dbm::Dbm;
use crate::error::CompileError;
use crate::eval::{Evaluator, GuardVal};
use crate::expr::{Declarations, Expr};
use crate::model::{Direction, Instance, SystemModel, Template};

/// Valuations enumerated per edge pair before giving up.
const ENUMERATION_LIMIT: u64 = 1_000_000;

/// Two edges (by template position) that can fire on the same action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub location: String,
    pub first: usize,
    pub second: usize,
    /// Set when the overlap was not proven but could not be excluded either.
    pub inconclusive: bool,
}

/// Check `template` instantiated with `args` against the given globals.
pub fn check_deterministic(
    globals: &Declarations,
    template: &Template,
    args: &[Expr],
) -> Result<Option<Witness>, CompileError> {
    let model = SystemModel {
        globals: globals.clone(),
        templates: vec![template.clone()],
        instances: vec![Instance::new("_", template.name.clone(), args.to_vec())],
    };
    let sys = compile(&model)?;
    Ok(first_overlap(&sys, 0))
}

/// First overlapping edge pair of one instance of a compiled system.
pub fn first_overlap(sys: &CompiledSystem, instance: usize) -> Option<Witness> {
    let inst = &sys.instances[instance];
    for (l, out) in inst.outgoing.iter().enumerate() {
        for (a, &i) in out.iter().enumerate() {
            for &j in &out[a + 1..] {
                let (e1, e2) = (&inst.edges[i as usize], &inst.edges[j as usize]);
                let verdict = overlap(sys, e1, e2);
                if verdict != Overlap::Disjoint {
                    return Some(Witness {
                        location: inst.locations[l].id.clone(),
                        first: e1.index,
                        second: e2.index,
                        inconclusive: verdict == Overlap::Unknown,
                    });
                }
            }
        }
    }
    None
}

#[derive(Debug, PartialEq, Eq)]
enum Overlap {
    Disjoint,
    Overlapping,
    Unknown,
}

fn overlap(sys: &CompiledSystem, e1: &CEdge, e2: &CEdge) -> Overlap {
    let dir = |e: &CEdge| e.sync.as_ref().map(|s| s.dir);
    if dir(e1) != dir(e2) {
        return Overlap::Disjoint;
    }
    let mut read = BTreeSet::new();
    for e in [e1, e2] {
        if let Some(g) = &e.guard {
            vars_of(g, &mut read);
        }
        if let Some(s) = &e.sync {
            for p in &s.parts {
                vars_of(&p.index, &mut read);
            }
        }
    }
    let read: Vec<usize> = read.into_iter().collect();
    let mut count: u64 = 1;
    for &v in &read {
        let info = &sys.vars[v];
        count = count.saturating_mul((info.hi as i64 - info.lo as i64 + 1) as u64);
    }
    if count > ENUMERATION_LIMIT {
        return Overlap::Unknown;
    }
    let mut vars = sys.init_vars.clone();
    for &v in &read {
        vars[v] = sys.vars[v].lo;
    }
    let mut ev = Evaluator::new(sys);
    loop {
        match overlap_at(&mut ev, sys, e1, e2, &vars) {
            Ok(true) => return Overlap::Overlapping,
            Ok(false) => {}
            Err(()) => return Overlap::Unknown,
        }
        // next valuation, odometer style
        let mut k = 0;
        loop {
            if k == read.len() {
                return Overlap::Disjoint;
            }
            let v = read[k];
            if vars[v] < sys.vars[v].hi {
                vars[v] += 1;
                break;
            }
            vars[v] = sys.vars[v].lo;
            k += 1;
        }
    }
}

/// Whether both edges are enabled on a common clock valuation with the same
/// action under the discrete valuation `vars`. Non-convex guards make the
/// answer unknown.
fn overlap_at(
    ev: &mut Evaluator,
    sys: &CompiledSystem,
    e1: &CEdge,
    e2: &CEdge,
    vars: &[i32],
) -> Result<bool, ()> {
    let mut guard = |e: &CEdge| match &e.guard {
        None => Ok(GuardVal::tt()),
        Some(g) => match ev.guard(g, vars) {
            Ok(v) => Ok(v),
            // a failing guard (bad index, division by zero) never enables the edge
            Err(crate::error::EvalError::NonConvex(_)) => Err(()),
            Err(_) => Ok(GuardVal::False),
        },
    };
    let (GuardVal::Clocks(c1), GuardVal::Clocks(c2)) = (guard(e1)?, guard(e2)?) else {
        return Ok(false);
    };
    let action = |ev: &mut Evaluator, e: &CEdge| -> Option<Option<(u32, Direction)>> {
        match &e.sync {
            None => Some(None),
            Some(s) => ev.channel(s, vars).ok().map(|c| Some((c, s.dir))),
        }
    };
    let (Some(a1), Some(a2)) = (action(ev, e1), action(ev, e2)) else {
        return Ok(false);
    };
    if a1 != a2 {
        return Ok(false);
    }
    let mut z = Dbm::universe(sys.num_clocks());
    for c in c1.iter().chain(c2.iter()) {
        if !z.apply(*c) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn place_vars(p: &Place, out: &mut BTreeSet<usize>) {
    out.extend((p.base..p.base + p.span).map(|v| v as usize));
    for part in &p.parts {
        vars_of(&part.index, out);
    }
}

fn vars_of(e: &CExpr, out: &mut BTreeSet<usize>) {
    match e {
        CExpr::Var(p) => place_vars(p, out),
        CExpr::Clock(p) => {
            for part in &p.parts {
                vars_of(&part.index, out);
            }
        }
        CExpr::Const(_) | CExpr::Local(_) | CExpr::AtLocation { .. } => {}
        CExpr::Unary(_, a) => vars_of(a, out),
        CExpr::Binary(_, a, b) | CExpr::ClockCmp(_, a, b) => {
            vars_of(a, out);
            vars_of(b, out);
        }
        CExpr::Cond(a, b, c) => {
            vars_of(a, out);
            vars_of(b, out);
            vars_of(c, out);
        }
        CExpr::Assign(_, lv, v) => {
            lvalue_vars(lv, out);
            vars_of(v, out);
        }
        CExpr::IncDec { target, .. } => lvalue_vars(target, out),
        CExpr::Call(_, args) => {
            // function bodies may read any global; be exhaustive over arguments only
            for a in args {
                vars_of(a, out);
            }
        }
        CExpr::Quant { lo, hi, body, .. } => {
            vars_of(lo, out);
            vars_of(hi, out);
            vars_of(body, out);
        }
    }
}

fn lvalue_vars(lv: &LValue, out: &mut BTreeSet<usize>) {
    match lv {
        LValue::Var(p) => place_vars(p, out),
        LValue::Clock(p) => {
            for part in &p.parts {
                vars_of(&part.index, out);
            }
        }
        LValue::Local(_) => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_xta;

    fn check(src: &str) -> Option<Witness> {
        let f = parse_xta(src).unwrap();
        check_deterministic(&f.declarations, &f.templates[0], &[]).unwrap()
    }

    #[test]
    fn disjoint_clock_guards() {
        let w = check(
            "chan a; process P() { clock x; state l0, l1, l2; init l0;
             trans l0 -> l1 { guard x < 5; sync a!; }, l0 -> l2 { guard x >= 5; sync a!; }; }",
        );
        assert_eq!(w, None);
    }

    #[test]
    fn overlapping_clock_guards() {
        let w = check(
            "chan a; process P() { clock x; state l0, l1, l2; init l0;
             trans l0 -> l1 { guard x < 5; sync a!; }, l0 -> l2 { guard x < 7; sync a!; }; }",
        )
        .unwrap();
        assert_eq!((w.first, w.second, w.inconclusive), (0, 1, false));
        assert_eq!(w.location, "l0");
    }

    #[test]
    fn different_actions_or_discrete_guards() {
        let w = check(
            "chan a[2]; int[0,3] n; process P() { clock x; state l0, l1; init l0;
             trans l0 -> l1 { sync a[0]!; }, l0 -> l1 { sync a[1]!; },
                   l0 -> l1 { guard n < 2; }, l0 -> l1 { guard n >= 2 && x > 1; }; }",
        );
        assert_eq!(w, None);
        let w = check(
            "chan a[2]; int[0,3] n; process P() { state l0, l1; init l0;
             trans l0 -> l1 { sync a[n]!; }, l0 -> l1 { sync a[1]!; }; }",
        );
        assert!(w.is_some());
    }
}
