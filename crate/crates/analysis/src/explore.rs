//! Breadth-first reachability over the zone graph with inclusion checking.

use std::collections::{HashMap, VecDeque};
use std::time::{Duration, Instant};

use ta_model::compile::{CExpr, CompiledSystem};
use ta_model::Dbm;

use crate::engine::{Discrete, Engine, State, StepError, Transition, ZoneMode};

pub const DEFAULT_BUDGET: usize = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExploreOptions {
    /// Maximal number of stored symbolic states.
    pub budget: usize,
    pub mode: ZoneMode,
}

impl Default for ExploreOptions {
    fn default() -> Self {
        ExploreOptions {
            budget: DEFAULT_BUDGET,
            mode: ZoneMode::ABSTRACT,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TraceStep {
    /// `None` for the initial state.
    pub via: Option<Transition>,
    pub state: State,
}

/// A path through the zone graph.
#[derive(Debug, Clone, Default)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
}

impl Trace {
    pub fn transitions(&self) -> Vec<Transition> {
        self.steps.iter().filter_map(|s| s.via).collect()
    }

    pub fn last(&self) -> Option<&State> {
        self.steps.last().map(|s| &s.state)
    }
}

#[derive(Debug, Clone)]
pub enum Verdict {
    Reachable(Trace),
    Unreachable,
    /// An update failed (range violation, bad index, ...); the trace ends
    /// in the state the failing transition left from.
    ModelingError {
        trace: Trace,
        error: StepError,
    },
    BudgetExhausted,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Reachable(_) => "reachable",
            Verdict::Unreachable => "unreachable",
            Verdict::ModelingError { .. } => "modeling-error",
            Verdict::BudgetExhausted => "budget-exhausted",
        }
    }

    pub fn is_reachable(&self) -> bool {
        matches!(self, Verdict::Reachable(_))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    /// Symbolic states kept in the passed list.
    pub stored: usize,
    /// States whose successors were computed.
    pub explored: usize,
    pub transitions: usize,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct Exploration {
    pub verdict: Verdict,
    pub stats: Stats,
}

struct Node {
    state: State,
    parent: u32,
    via: Option<Transition>,
    covered: bool,
}

const NO_PARENT: u32 = u32::MAX;

fn trace_to(nodes: &[Node], mut k: u32) -> Trace {
    let mut steps = Vec::new();
    while k != NO_PARENT {
        let n = &nodes[k as usize];
        steps.push(TraceStep {
            via: n.via,
            state: n.state.clone(),
        });
        k = n.parent;
    }
    steps.reverse();
    Trace { steps }
}

/// Search for a state satisfying `goal`. `visit` sees every state that is
/// stored (each reachable discrete state at least once).
pub fn explore(
    sys: &CompiledSystem,
    goal: &CExpr,
    opts: ExploreOptions,
    visit: &mut dyn FnMut(&State),
) -> Exploration {
    let start = Instant::now();
    let mut engine = Engine::new(sys);
    let mut stats = Stats::default();
    let mut nodes: Vec<Node> = Vec::new();
    let mut passed: HashMap<Discrete, Vec<u32>> = HashMap::new();
    let mut queue: VecDeque<u32> = VecDeque::new();

    let finish = |verdict: Verdict, mut stats: Stats| {
        stats.elapsed = start.elapsed();
        Exploration { verdict, stats }
    };
    let modeling = |nodes: &[Node], k: u32, error: StepError| Verdict::ModelingError {
        trace: trace_to(nodes, k),
        error,
    };

    let init = match engine.initial(opts.mode) {
        Ok(Some(s)) => s,
        Ok(None) => return finish(Verdict::Unreachable, stats),
        Err(error) => {
            return finish(
                Verdict::ModelingError {
                    trace: Trace::default(),
                    error,
                },
                stats,
            )
        }
    };

    // returns the stored index, or None when the state was already covered
    let mut store = |nodes: &mut Vec<Node>,
                     state: State,
                     parent: u32,
                     via: Option<Transition>|
     -> Option<u32> {
        let entry = passed.entry(state.discrete.clone());
        let list = entry.or_default();
        if list
            .iter()
            .any(|&k| nodes[k as usize].state.zone.includes(&state.zone))
        {
            return None;
        }
        list.retain(|&k| {
            let n = &mut nodes[k as usize];
            if state.zone.includes(&n.state.zone) {
                n.covered = true;
                false
            } else {
                true
            }
        });
        // share the discrete part with states already stored
        let state = match list.first() {
            Some(&k) => State {
                discrete: nodes[k as usize].state.discrete.clone(),
                zone: state.zone,
            },
            None => state,
        };
        let k = nodes.len() as u32;
        list.push(k);
        nodes.push(Node {
            state,
            parent,
            via,
            covered: false,
        });
        Some(k)
    };

    let goal_hit = |engine: &mut Engine, s: &State| -> Result<Option<Dbm>, StepError> {
        engine.satisfies(s, goal).map_err(|e| StepError {
            transition: None,
            error: format!("query: {e}"),
        })
    };

    let k0 = store(&mut nodes, init, NO_PARENT, None).expect("first state");
    stats.stored = 1;
    visit(&nodes[0].state);
    match goal_hit(&mut engine, &nodes[0].state) {
        Ok(Some(z)) => {
            let mut t = trace_to(&nodes, k0);
            t.steps.last_mut().expect("initial").state.zone = z;
            return finish(Verdict::Reachable(t), stats);
        }
        Ok(None) => {}
        Err(e) => return finish(modeling(&nodes, k0, e), stats),
    }
    queue.push_back(k0);

    while let Some(k) = queue.pop_front() {
        if nodes[k as usize].covered {
            continue;
        }
        stats.explored += 1;
        let s = nodes[k as usize].state.clone();
        let succ = match engine.successors(&s, opts.mode) {
            Ok(v) => v,
            Err(e) => return finish(modeling(&nodes, k, e), stats),
        };
        for (t, next) in succ {
            stats.transitions += 1;
            let Some(j) = store(&mut nodes, next, k, Some(t)) else {
                continue;
            };
            stats.stored += 1;
            let stored = &nodes[j as usize].state;
            visit(stored);
            match goal_hit(&mut engine, stored) {
                Ok(Some(z)) => {
                    let mut tr = trace_to(&nodes, j);
                    tr.steps.last_mut().expect("goal").state.zone = z;
                    return finish(Verdict::Reachable(tr), stats);
                }
                Ok(None) => {}
                Err(e) => return finish(modeling(&nodes, j, e), stats),
            }
            if stats.stored >= opts.budget {
                return finish(Verdict::BudgetExhausted, stats);
            }
            queue.push_back(j);
        }
    }
    finish(Verdict::Unreachable, stats)
}
