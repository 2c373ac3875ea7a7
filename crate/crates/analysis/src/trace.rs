//! Concrete timed traces: turning a symbolic path into delays and
//! transitions, and replaying such a trace step by step without zones.

use std::fmt;

use num_rational::Ratio;
use ta_model::compile::{CExpr, CompiledSystem};
use ta_model::dbm::{constant, is_strict, le, Raw, INF};
use ta_model::eval::{Evaluator, GuardVal};
use ta_model::{Constraint, Dbm};

use crate::engine::{Engine, Fired, State, Transition, ZoneMode};

pub type Time = Ratio<i64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Delay(Time),
    Fire(Transition),
}

/// Delays and transitions from the initial state.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConcreteTrace {
    pub actions: Vec<Action>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcreteState {
    pub locs: Vec<u32>,
    pub vars: Vec<i32>,
    /// Clock values; index 0 is the reference clock.
    pub clocks: Vec<Time>,
    /// Time elapsed since the start.
    pub now: Time,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayError {
    /// Index of the offending action.
    pub action: usize,
    pub message: String,
}

impl fmt::Display for ReplayError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "action {}: {}", self.action, self.message)
    }
}

impl std::error::Error for ReplayError {}

fn fail<T>(action: usize, message: impl Into<String>) -> Result<T, ReplayError> {
    Err(ReplayError {
        action,
        message: message.into(),
    })
}

/// Zone with every bound multiplied by `den` and strict bounds tightened to
/// the next integer, so its integer points are the points of the original
/// zone on the grid `1/den` that lie strictly inside strict bounds.
fn scaled(z: &Dbm, den: i32) -> Dbm {
    let n = z.dim();
    let raw: Vec<Raw> = z
        .raw()
        .iter()
        .map(|&r| {
            if r == INF {
                INF
            } else if is_strict(r) {
                le(constant(r) * den - 1)
            } else {
                le(constant(r) * den)
            }
        })
        .collect();
    Dbm::from_raw(n, raw)
}

/// An integer point of a closed integer zone, lowest values first.
fn pick_point(z: &Dbm) -> Option<Vec<i64>> {
    if z.is_empty() {
        return None;
    }
    let mut z = z.clone();
    let mut p = vec![0i64; z.dim()];
    for (x, slot) in p.iter_mut().enumerate().skip(1) {
        let v = -constant(z.get(0, x));
        if !z.constrain(x, 0, le(v)) {
            return None;
        }
        *slot = v as i64;
    }
    Some(p)
}

fn point_zone(p: &[i64]) -> Dbm {
    let n = p.len();
    let mut raw = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            raw.push(le((p[i] - p[j]) as i32));
        }
    }
    Dbm::from_raw(n, raw)
}

fn satisfied(c: Constraint, clocks: &[Time]) -> bool {
    if c.raw == INF {
        return true;
    }
    let diff = clocks[c.i as usize] - clocks[c.j as usize];
    let b = Time::from_integer(constant(c.raw) as i64);
    if is_strict(c.raw) {
        diff < b
    } else {
        diff <= b
    }
}

#[derive(Debug, Clone)]
struct PathStep {
    fired: Fired,
    /// Time-closed exact zone after the step.
    zone: Dbm,
}

/// Concrete delays realising the symbolic path `transitions` into a state
/// satisfying `goal`. Zones are recomputed exactly (no extrapolation, no
/// freeing); an error means the path only exists in the abstraction.
pub fn concretize(
    sys: &CompiledSystem,
    transitions: &[Transition],
    goal: &CExpr,
) -> Result<ConcreteTrace, String> {
    let mut engine = Engine::new(sys);
    let s0 = engine
        .initial(ZoneMode::EXACT)
        .map_err(|e| e.to_string())?
        .ok_or("the initial state violates its invariants")?;
    let mut steps: Vec<PathStep> = Vec::new();
    let mut cur = s0.clone();
    for (k, &t) in transitions.iter().enumerate() {
        let fired = engine
            .fire(&cur, t)
            .map_err(|e| e.to_string())?
            .ok_or_else(|| {
                format!(
                    "step {}: `{}` is not enabled in the exact semantics",
                    k + 1,
                    engine.describe(t)
                )
            })?;
        let next = engine
            .step(&cur, t, ZoneMode::EXACT)
            .map_err(|e| e.to_string())?
            .ok_or_else(|| {
                format!(
                    "step {}: target invariant fails in the exact semantics",
                    k + 1
                )
            })?;
        steps.push(PathStep {
            fired,
            zone: next.zone.clone(),
        });
        cur = next;
    }
    let last = engine
        .satisfies(&cur, goal)
        .map_err(|e| e.to_string())?
        .ok_or("the final state does not satisfy the query in the exact semantics")?;

    // backwards: target[i] is the part of zone i from which the rest of the
    // path can be followed into the goal
    let mut target = vec![Dbm::zero(1); steps.len() + 1];
    target[steps.len()] = last;
    for i in (0..steps.len()).rev() {
        let step = &steps[i];
        let mut e = target[i + 1].clone();
        if step.fired.delay_allowed {
            e.down();
        }
        if !e.intersect(&step.fired.entry) {
            return Err(format!("step {}: no entry point leads on", i + 1));
        }
        let mut reset: Vec<u32> = step.fired.resets.iter().map(|r| r.0).collect();
        reset.sort_unstable();
        reset.dedup();
        for c in reset {
            e.free(c as usize);
        }
        let prev = if i == 0 { &s0.zone } else { &steps[i - 1].zone };
        if !e.intersect(prev) {
            return Err(format!("step {}: no source point leads on", i + 1));
        }
        for &c in &step.fired.guard {
            if !e.apply(c) {
                return Err(format!("step {}: guard excludes every source point", i + 1));
            }
        }
        target[i] = e;
    }

    let dim = sys.num_clocks();
    'scale: for den in (0..14).map(|k| 1i32 << k) {
        let mut actions = Vec::new();
        let Some(mut p) = pick_point(&scaled(&target[0], den)) else {
            continue;
        };
        let first = if dim > 1 { p[1] } else { 0 };
        actions.push(Action::Delay(Time::new(first, den as i64)));
        for (i, step) in steps.iter().enumerate() {
            let mut q = p.clone();
            for &(c, v) in &step.fired.resets {
                q[c as usize] = v as i64 * den as i64;
            }
            let mut z = point_zone(&q);
            if step.fired.delay_allowed {
                z.up();
            }
            if !z.intersect(&scaled(&target[i + 1], den)) {
                continue 'scale;
            }
            let Some(next) = pick_point(&z) else {
                continue 'scale;
            };
            let delay = if dim > 1 { next[1] - q[1] } else { 0 };
            actions.push(Action::Fire(transitions[i]));
            actions.push(Action::Delay(Time::new(delay, den as i64)));
            p = next;
        }
        return Ok(ConcreteTrace { actions });
    }
    Err("no concrete point found on any grid up to 1/8192".into())
}

/// Execute `actions` with exact rational clocks, checking guards,
/// invariants, urgency and the committed-location rule at every step.
/// Returns the state after each action, preceded by the initial state.
pub fn replay(sys: &CompiledSystem, actions: &[Action]) -> Result<Vec<ConcreteState>, ReplayError> {
    let mut engine = Engine::new(sys);
    let mut eval = Evaluator::new(sys);
    let mut st = ConcreteState {
        locs: sys.instances.iter().map(|i| i.init).collect(),
        vars: sys.init_vars.clone(),
        clocks: vec![Time::from_integer(0); sys.num_clocks()],
        now: Time::from_integer(0),
    };
    let check_invariants =
        |engine: &mut Engine, st: &ConcreteState, k: usize| -> Result<(), ReplayError> {
            for (i, inst) in sys.instances.iter().enumerate() {
                let Some(inv) = &inst.locations[st.locs[i] as usize].invariant else {
                    continue;
                };
                match engine.guard(inv, &st.locs, &st.vars) {
                    Err(e) => return fail(k, e.to_string()),
                    Ok(GuardVal::False) => {
                        return fail(
                            k,
                            format!(
                                "invariant of {}.{} is false",
                                inst.name, inst.locations[st.locs[i] as usize].id
                            ),
                        )
                    }
                    Ok(GuardVal::Clocks(cs)) => {
                        if let Some(c) = cs.iter().find(|&&c| !satisfied(c, &st.clocks)) {
                            return fail(k, format!("invariant of {} violated ({c:?})", inst.name));
                        }
                    }
                }
            }
            Ok(())
        };
    check_invariants(&mut engine, &st, 0)?;
    let mut out = vec![st.clone()];
    for (k, a) in actions.iter().enumerate() {
        match *a {
            Action::Delay(d) => {
                if d < Time::from_integer(0) {
                    return fail(k, "negative delay");
                }
                if d > Time::from_integer(0) {
                    match engine.delay_allowed(&st.locs, &st.vars) {
                        Ok(true) => {}
                        Ok(false) => return fail(k, "time cannot pass here"),
                        Err(e) => return fail(k, e.to_string()),
                    }
                    for c in st.clocks.iter_mut().skip(1) {
                        *c += d;
                    }
                    st.now += d;
                    check_invariants(&mut engine, &st, k)?;
                }
            }
            Action::Fire(t) => {
                let symbolic = State::new(&st.locs, &st.vars, Dbm::universe(sys.num_clocks()));
                let legal = engine.candidates(&symbolic).map_err(|e| ReplayError {
                    action: k,
                    message: e.to_string(),
                })?;
                if !legal.contains(&t) {
                    return fail(k, format!("`{}` is not available here", engine.describe(t)));
                }
                for (i, e) in t.parts() {
                    let edge = &sys.instances[i as usize].edges[e as usize];
                    let Some(g) = &edge.guard else { continue };
                    match engine.guard(g, &st.locs, &st.vars) {
                        Err(e) => return fail(k, e.to_string()),
                        Ok(GuardVal::False) => return fail(k, "guard is false"),
                        Ok(GuardVal::Clocks(cs)) => {
                            if cs.iter().any(|&c| !satisfied(c, &st.clocks)) {
                                return fail(k, "clock guard is not satisfied");
                            }
                        }
                    }
                }
                eval.resets.clear();
                for (i, e) in t.parts() {
                    for u in &sys.instances[i as usize].edges[e as usize].updates {
                        if let Err(e) = eval.update(u, &mut st.vars) {
                            return fail(k, e.to_string());
                        }
                    }
                }
                for &(c, v) in &eval.resets {
                    st.clocks[c as usize] = Time::from_integer(v as i64);
                }
                for &m in &sys.meta_slots {
                    st.vars[m] = sys.init_vars[m];
                }
                for (i, e) in t.parts() {
                    st.locs[i as usize] = sys.instances[i as usize].edges[e as usize].dst;
                }
                check_invariants(&mut engine, &st, k)?;
            }
        }
        out.push(st.clone());
    }
    Ok(out)
}

/// Replay `trace` and check that its last state satisfies `goal`.
pub fn replay_to(
    sys: &CompiledSystem,
    trace: &ConcreteTrace,
    goal: &CExpr,
) -> Result<ConcreteState, ReplayError> {
    let states = replay(sys, &trace.actions)?;
    let last = states.last().cloned().expect("initial state");
    let mut engine = Engine::new(sys);
    let end = trace.actions.len();
    match engine.guard(goal, &last.locs, &last.vars) {
        Err(e) => fail(end, e.to_string()),
        Ok(GuardVal::False) => fail(end, "the final state does not satisfy the query"),
        Ok(GuardVal::Clocks(cs)) => {
            if cs.iter().all(|&c| satisfied(c, &last.clocks)) {
                Ok(last)
            } else {
                fail(end, "the final clock values do not satisfy the query")
            }
        }
    }
}
