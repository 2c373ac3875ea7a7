//! Brute-force reachability with integer clocks advanced in unit steps.
//!
//! For networks whose clock constraints are all non-strict, reachability
//! over the integer-time semantics coincides with the dense-time answer,
//! which makes this search an independent check of the zone engine.
//!
//! Strict constraints are refused unless [`OracleOptions::integer_strict`]
//! is set. Then `x - y < c` is read as `x - y <= c - 1`, which is exact on
//! integer points: every run found is a genuine dense-time run, but runs
//! that need fractional delays are not explored.

use std::collections::{HashSet, VecDeque};

use ta_model::compile::{CExpr, CompiledSystem};
use ta_model::dbm::{constant, is_strict, INF};
use ta_model::eval::GuardVal;
use ta_model::{Constraint, Dbm};

use crate::engine::{Engine, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleVerdict {
    Reachable,
    Unreachable,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("horizon {horizon} is too small; it must be at least {needed}")]
    HorizonTooSmall { horizon: i32, needed: i32 },
    #[error("the oracle only handles non-strict clock constraints")]
    StrictConstraint,
    #[error("diagonal constraint on a clock beyond the horizon")]
    DiagonalBeyondHorizon,
    #[error("more than {0} states")]
    Budget(usize),
    #[error("{0}")]
    Model(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleOptions {
    /// Clock values are capped here; must exceed every constant.
    pub horizon: i32,
    /// Maximal number of stored points.
    pub budget: usize,
    /// Accept strict constraints and evaluate them on integer points.
    pub integer_strict: bool,
}

impl OracleOptions {
    pub fn new(horizon: i32, budget: usize) -> OracleOptions {
        OracleOptions {
            horizon,
            budget,
            integer_strict: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Point {
    locs: Vec<u32>,
    vars: Vec<i32>,
    clocks: Vec<i32>,
}

struct Oracle<'s> {
    engine: Engine<'s>,
    horizon: i32,
    integer_strict: bool,
}

impl Oracle<'_> {
    fn holds(&self, g: GuardVal, clocks: &[i32]) -> Result<bool, OracleError> {
        let GuardVal::Clocks(cs) = g else {
            return Ok(false);
        };
        for c in cs {
            if !self.check(c, clocks)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn check(&self, c: Constraint, clocks: &[i32]) -> Result<bool, OracleError> {
        if c.raw == INF {
            return Ok(true);
        }
        let mut bound = constant(c.raw) as i64;
        if is_strict(c.raw) {
            if !self.integer_strict {
                return Err(OracleError::StrictConstraint);
            }
            bound -= 1;
        }
        let (i, j) = (c.i as usize, c.j as usize);
        if i != 0 && j != 0 && (clocks[i] >= self.horizon || clocks[j] >= self.horizon) {
            return Err(OracleError::DiagonalBeyondHorizon);
        }
        Ok((clocks[i] - clocks[j]) as i64 <= bound)
    }

    fn invariants_hold(&mut self, p: &Point) -> Result<bool, OracleError> {
        let sys = self.engine.system();
        for (i, inst) in sys.instances.iter().enumerate() {
            let Some(inv) = &inst.locations[p.locs[i] as usize].invariant else {
                continue;
            };
            let g = self
                .engine
                .guard(inv, &p.locs, &p.vars)
                .map_err(|e| OracleError::Model(e.to_string()))?;
            if !self.holds(g, &p.clocks)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn successors(&mut self, p: &Point) -> Result<Vec<Point>, OracleError> {
        let sys = self.engine.system();
        let model = |e: String| OracleError::Model(e);
        let mut out = Vec::new();
        let symbolic = State::new(&p.locs, &p.vars, Dbm::universe(sys.num_clocks()));
        for t in self
            .engine
            .candidates(&symbolic)
            .map_err(|e| model(e.to_string()))?
        {
            let mut enabled = true;
            for (i, k) in t.parts() {
                let e = &sys.instances[i as usize].edges[k as usize];
                if let Some(g) = &e.guard {
                    let g = self
                        .engine
                        .guard(g, &p.locs, &p.vars)
                        .map_err(|e| model(e.to_string()))?;
                    if !self.holds(g, &p.clocks)? {
                        enabled = false;
                        break;
                    }
                }
            }
            if !enabled {
                continue;
            }
            let mut eval = ta_model::eval::Evaluator::new(sys);
            let mut q = p.clone();
            for (i, k) in t.parts() {
                for u in &sys.instances[i as usize].edges[k as usize].updates {
                    eval.update(u, &mut q.vars)
                        .map_err(|e| model(e.to_string()))?;
                }
            }
            for &(c, v) in &eval.resets {
                q.clocks[c as usize] = v.min(self.horizon);
            }
            for &m in &sys.meta_slots {
                q.vars[m] = sys.init_vars[m];
            }
            for (i, k) in t.parts() {
                q.locs[i as usize] = sys.instances[i as usize].edges[k as usize].dst;
            }
            if self.invariants_hold(&q)? {
                out.push(q);
            }
        }
        if self
            .engine
            .delay_allowed(&p.locs, &p.vars)
            .map_err(|e| model(e.to_string()))?
        {
            let mut q = p.clone();
            for c in q.clocks.iter_mut().skip(1) {
                *c = (*c + 1).min(self.horizon);
            }
            if self.invariants_hold(&q)? {
                out.push(q);
            }
        }
        Ok(out)
    }
}

/// Explicit-state search over integer clock values, capped at the horizon.
pub fn discrete_oracle(
    sys: &CompiledSystem,
    goal: &CExpr,
    opts: OracleOptions,
) -> Result<OracleVerdict, OracleError> {
    let OracleOptions {
        horizon, budget, ..
    } = opts;
    let needed = sys.max_constants.iter().copied().max().unwrap_or(0) + 1;
    if horizon < needed {
        return Err(OracleError::HorizonTooSmall { horizon, needed });
    }
    let mut o = Oracle {
        engine: Engine::new(sys),
        horizon,
        integer_strict: opts.integer_strict,
    };
    let init = Point {
        locs: sys.instances.iter().map(|i| i.init).collect(),
        vars: sys.init_vars.clone(),
        clocks: vec![0; sys.num_clocks()],
    };
    if !o.invariants_hold(&init)? {
        return Ok(OracleVerdict::Unreachable);
    }
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(init.clone());
    queue.push_back(init);
    while let Some(p) = queue.pop_front() {
        let g = o
            .engine
            .guard(goal, &p.locs, &p.vars)
            .map_err(|e| OracleError::Model(e.to_string()))?;
        if o.holds(g, &p.clocks)? {
            return Ok(OracleVerdict::Reachable);
        }
        for q in o.successors(&p)? {
            if seen.insert(q.clone()) {
                if seen.len() > budget {
                    return Err(OracleError::Budget(budget));
                }
                queue.push_back(q);
            }
        }
    }
    Ok(OracleVerdict::Unreachable)
}
