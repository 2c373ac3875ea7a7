//! Timing bounds read off the method automata, and the queue capacity they
//! imply.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use ta_model::{AssignOp, BinOp, Direction, Expr, Template};

use crate::error::TranslateError;
use crate::method::{FINAL, INITIAL};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimingBounds {
    /// Largest deadline assigned on any call edge.
    pub d_max: u32,
    /// Smallest positive best-case time of a start-to-finish path.
    pub b_min: u32,
    /// Templates with a start-to-finish path of zero best-case time; such
    /// paths are left out of `b_min`.
    pub zero_paths: Vec<String>,
}

/// `ceil(d_max / b_min)`
pub fn queue_bound(d_max: u32, b_min: u32) -> Result<usize, TranslateError> {
    if b_min == 0 {
        return Err(TranslateError::Bounds(
            "shortest execution time is 0, the queue is unbounded".into(),
        ));
    }
    Ok(d_max.div_ceil(b_min) as usize)
}

/// Lower bound `b` of a guard starting with `c >= b`.
fn best_case(guard: Option<&Expr>) -> u32 {
    let Some(g) = guard else { return 0 };
    for part in g.conjuncts() {
        if let Expr::Binary(BinOp::Ge, lhs, rhs) = part {
            if let (Expr::Ident(c), Expr::Int(b)) = (&**lhs, &**rhs) {
                if c == "c" {
                    return (*b).max(0) as u32;
                }
            }
        }
    }
    0
}

fn assigned_deadline(updates: &[Expr]) -> Option<i64> {
    updates.iter().find_map(|u| match u {
        Expr::Assign(AssignOp::Set, lhs, rhs) if **lhs == Expr::ident("deadline") => match **rhs {
            Expr::Int(v) => Some(v),
            _ => None,
        },
        _ => None,
    })
}

fn is_channel(e: &ta_model::Edge, name: &str, dir: Direction) -> bool {
    e.sync
        .as_ref()
        .is_some_and(|s| s.channel == name && s.dir == dir)
}

/// Shortest positive and zero-length start-to-finish paths of one method
/// automaton. Returns `(positive minimum, has zero path)`; `None` when no
/// start reaches the final location.
fn shortest_paths(t: &Template) -> Option<(Option<u32>, bool)> {
    let mut adj: HashMap<&str, Vec<(&str, u32)>> = HashMap::new();
    let mut sources = Vec::new();
    for e in &t.edges {
        if e.src == INITIAL && is_channel(e, "start", Direction::Receive) {
            sources.push(e.dst.as_str());
        } else if !is_channel(e, "finish", Direction::Send) {
            adj.entry(&e.src)
                .or_default()
                .push((&e.dst, best_case(e.guard.as_ref())));
        }
    }
    // states are (location, some positive delay taken)
    let mut dist: HashMap<(&str, bool), u32> = HashMap::new();
    let mut heap = BinaryHeap::new();
    for s in sources {
        dist.insert((s, false), 0);
        heap.push(Reverse((0u32, s, false)));
    }
    while let Some(Reverse((d, l, pos))) = heap.pop() {
        if dist.get(&(l, pos)).is_some_and(|&best| best < d) {
            continue;
        }
        for &(next, w) in adj.get(l).map(Vec::as_slice).unwrap_or(&[]) {
            let key = (next, pos || w > 0);
            let nd = d + w;
            if dist.get(&key).is_none_or(|&best| nd < best) {
                dist.insert(key, nd);
                heap.push(Reverse((nd, next, key.1)));
            }
        }
    }
    let positive = dist.get(&(FINAL, true)).copied();
    let zero = dist.contains_key(&(FINAL, false));
    (positive.is_some() || zero).then_some((positive, zero))
}

/// Compute `d_max` and `b_min` over the method templates; `extra_deadlines`
/// adds deadlines injected by the environment.
pub fn extract_timing_bounds(
    templates: &[Template],
    extra_deadlines: &[i64],
) -> Result<TimingBounds, TranslateError> {
    let mut d_max = extra_deadlines.iter().copied().max().unwrap_or(0);
    let mut b_min: Option<u32> = None;
    let mut zero_paths = Vec::new();
    for t in templates {
        for e in &t.edges {
            if is_channel(e, "invoke", Direction::Send) {
                if let Some(d) = assigned_deadline(&e.updates) {
                    d_max = d_max.max(d);
                }
            }
        }
        match shortest_paths(t) {
            None => {
                return Err(TranslateError::Bounds(format!(
                    "`{}` never reaches its final location",
                    t.name
                )))
            }
            Some((pos, zero)) => {
                if zero {
                    zero_paths.push(t.name.clone());
                }
                if let Some(p) = pos {
                    b_min = Some(b_min.map_or(p, |b| b.min(p)));
                }
            }
        }
    }
    Ok(TimingBounds {
        d_max: d_max.max(0) as u32,
        b_min: b_min.unwrap_or(0),
        zero_paths,
    })
}
