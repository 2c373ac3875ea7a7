//! Schedulability of a composed object and source-level reading of traces.

use std::fmt::Write;

use creol_translate::system::SCHEDULER_INSTANCE;
use creol_translate::{ComposedSystem, Role};
use ta_model::compile::{CExpr, CompiledSystem};
use ta_model::{compile, CompileError, Expr};

use crate::engine::{State, Transition};
use crate::explore::{explore, ExploreOptions, Stats, Trace, Verdict};
use crate::query::{Query, Target};
use crate::trace::{concretize, replay, Action, ConcreteState, ConcreteTrace, Time};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error("{0}")]
    Query(String),
}

/// Lower the composed model and register which clocks are live when.
pub fn compile_composed(sys: &ComposedSystem) -> Result<CompiledSystem, AnalysisError> {
    let mut c = compile(&sys.model)?;
    for (clock, index, pred) in sys.scheduler.liveness(SCHEDULER_INSTANCE) {
        c.set_clock_liveness(SCHEDULER_INSTANCE, &clock, &index, &pred)?;
    }
    Ok(c)
}

/// State predicate for a query target, compiled against `compiled`.
pub fn resolve_target(
    target: &Target,
    sys: &ComposedSystem,
    compiled: &mut CompiledSystem,
) -> Result<CExpr, AnalysisError> {
    let expr = target_expr(target, sys)?;
    Ok(compiled.compile_predicate(&expr)?)
}

/// State predicate for a query target over the instances of `sys`.
pub fn target_expr(target: &Target, sys: &ComposedSystem) -> Result<Expr, AnalysisError> {
    let model = &sys.model;
    let instance = |name: &str| model.instances.iter().find(|i| i.name == name);
    let at = |instance: &str, location: &str| {
        Expr::Member(Box::new(Expr::ident(instance)), location.to_string())
    };
    let expr = match target {
        Target::Error => at(SCHEDULER_INSTANCE, "Error"),
        Target::Location {
            instance: name,
            location,
        } => {
            let Some(i) = instance(name) else {
                return Err(AnalysisError::Query(format!("no instance `{name}`")));
            };
            let has = model
                .template(&i.template)
                .is_some_and(|t| t.location(location).is_some());
            if !has {
                return Err(AnalysisError::Query(format!(
                    "`{name}` has no location `{location}`"
                )));
            }
            at(name, location)
        }
        Target::Line { method, line } => {
            let Some(mi) = sys.method_instance(method) else {
                return Err(AnalysisError::Query(format!("no method `{method}`")));
            };
            let locs: Vec<&String> = sys
                .translation
                .locmap
                .iter()
                .filter(|((t, _), span)| *t == mi.template && span.start.line as usize == *line)
                .map(|((_, l), _)| l)
                .collect();
            let Some((first, rest)) = locs.split_first() else {
                return Err(AnalysisError::Query(format!(
                    "no location of `{method}` stems from line {line}"
                )));
            };
            rest.iter().fold(at(&mi.instance, first), |acc, l| {
                Expr::bin(ta_model::BinOp::Or, acc, at(&mi.instance, l))
            })
        }
        Target::State(text) => ta_model::parser::parse_expr(text)
            .map_err(|e| AnalysisError::Query(format!("`{text}`: {e}")))?,
    };
    Ok(expr)
}

/// Why the scheduler entered `Error`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ErrorCause {
    DeadlineMiss {
        slot: usize,
        task: String,
        deadline: i32,
    },
    Overflow,
    Unknown,
}

#[derive(Debug, Clone)]
pub enum Schedulability {
    Schedulable,
    NonSchedulable {
        trace: Trace,
        /// Delays realising the trace, or why none were found.
        concrete: Result<ConcreteTrace, String>,
        cause: ErrorCause,
    },
    BudgetExhausted,
    ModelingError {
        trace: Trace,
        error: String,
    },
}

impl Schedulability {
    pub fn name(&self) -> &'static str {
        match self {
            Schedulability::Schedulable => "schedulable",
            Schedulability::NonSchedulable { .. } => "nonschedulable",
            Schedulability::BudgetExhausted => "budget-exhausted",
            Schedulability::ModelingError { .. } => "modeling-error",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SchedulabilityReport {
    pub verdict: Schedulability,
    /// Largest number of queued tasks in any reachable state.
    pub max_occupancy: usize,
    pub queue_capacity: usize,
    pub stats: Stats,
}

/// Slots of the scheduler's queue variables, for reading states.
#[derive(Debug, Clone)]
pub struct QueueLayout {
    pub n_instances: usize,
    pub tail: usize,
    pub run: usize,
    pub q: Vec<usize>,
    pub s: Vec<usize>,
    pub ca: Vec<usize>,
    pub d: Vec<usize>,
    pub caller: Vec<usize>,
    pub waitl: Vec<usize>,
    pub counter: Vec<usize>,
    /// Clock index of `x[k]`.
    pub x: Vec<usize>,
}

impl QueueLayout {
    pub fn new(compiled: &CompiledSystem, max_queue: usize) -> QueueLayout {
        let var = |n: String| {
            compiled
                .var_index(&n)
                .unwrap_or_else(|| panic!("scheduler variable `{n}` missing"))
        };
        let arr = |n: &str| -> Vec<usize> {
            (0..max_queue)
                .map(|i| var(format!("{SCHEDULER_INSTANCE}.{n}[{i}]")))
                .collect()
        };
        QueueLayout {
            n_instances: compiled.instances.len(),
            tail: var(format!("{SCHEDULER_INSTANCE}.tail")),
            run: var(format!("{SCHEDULER_INSTANCE}.run")),
            q: arr("q"),
            s: arr("s"),
            ca: arr("ca"),
            d: arr("d"),
            caller: arr("caller"),
            waitl: arr("waitl"),
            counter: arr("counter"),
            x: (0..max_queue)
                .map(|i| {
                    compiled
                        .clock_index(&format!("{SCHEDULER_INSTANCE}.x[{i}]"))
                        .expect("scheduler clock")
                })
                .collect(),
        }
    }

    pub fn tail(&self, vars: &[i32]) -> usize {
        vars[self.tail] as usize
    }

    /// Structural invariants of the queue: entries are packed below
    /// `tail`, and the clock reference counters add up to the entries.
    pub fn check_invariants(&self, vars: &[i32]) -> Result<(), String> {
        let max = self.q.len();
        let tail = vars[self.tail];
        if !(0..=max as i32).contains(&tail) {
            return Err(format!("tail {tail} out of range"));
        }
        let tail = tail as usize;
        for i in 0..max {
            let used = vars[self.q[i]] != -1;
            if used != (i < tail) {
                return Err(format!("slot {i} used={used} with tail {tail}"));
            }
            if i < tail && vars[self.counter[vars[self.ca[i]] as usize]] < 1 {
                return Err(format!("slot {i} holds a clock with no references"));
            }
        }
        let total: i32 = self.counter.iter().map(|&c| vars[c]).sum();
        if total != tail as i32 {
            return Err(format!("{total} clock references for {tail} entries"));
        }
        Ok(())
    }
}

fn sched_role(
    sys: &ComposedSystem,
    compiled: &CompiledSystem,
    t: Transition,
) -> Option<(Role, Option<usize>)> {
    let si = compiled.instance_index(SCHEDULER_INSTANCE)? as u32;
    t.parts().find(|p| p.0 == si).map(|(_, k)| {
        let idx = compiled.instances[si as usize].edges[k as usize].index;
        (sys.scheduler.roles[idx], sys.scheduler.slots[idx])
    })
}

fn error_cause(
    sys: &ComposedSystem,
    compiled: &CompiledSystem,
    layout: &QueueLayout,
    trace: &Trace,
) -> ErrorCause {
    let n = trace.steps.len();
    let Some(t) = trace.steps.last().and_then(|s| s.via) else {
        return ErrorCause::Unknown;
    };
    match sched_role(sys, compiled, t) {
        Some((Role::DeadlineMiss, Some(slot))) if n >= 2 => {
            let vars = trace.steps[n - 2].state.vars(layout.n_instances);
            let task = usize::try_from(vars[layout.q[slot]])
                .ok()
                .and_then(|id| sys.translation.table.tasks.get(id))
                .map(|t| t.name.clone())
                .unwrap_or_else(|| "?".into());
            let k = vars[layout.ca[slot]] as usize;
            ErrorCause::DeadlineMiss {
                slot,
                task,
                deadline: vars[layout.d[k]],
            }
        }
        Some((Role::Overflow, _)) => ErrorCause::Overflow,
        _ => ErrorCause::Unknown,
    }
}

/// Is `Error` unreachable? Also reports the largest queue occupancy seen.
/// `visit` sees every stored state.
pub fn check_schedulability(
    sys: &ComposedSystem,
    opts: ExploreOptions,
    visit: &mut dyn FnMut(&CompiledSystem, &QueueLayout, &State),
) -> Result<SchedulabilityReport, AnalysisError> {
    let mut compiled = compile_composed(sys)?;
    let goal = resolve_target(&Target::Error, sys, &mut compiled)?;
    let layout = QueueLayout::new(&compiled, sys.max_queue);
    let mut max_occupancy = 0;
    let run = explore(&compiled, &goal, opts, &mut |s| {
        max_occupancy = max_occupancy.max(layout.tail(s.vars(layout.n_instances)));
        visit(&compiled, &layout, s);
    });
    let verdict = match run.verdict {
        Verdict::Unreachable => Schedulability::Schedulable,
        Verdict::BudgetExhausted => Schedulability::BudgetExhausted,
        Verdict::ModelingError { trace, error } => Schedulability::ModelingError {
            trace,
            error: error.to_string(),
        },
        Verdict::Reachable(trace) => {
            let concrete = concretize(&compiled, &trace.transitions(), &goal);
            let cause = error_cause(sys, &compiled, &layout, &trace);
            Schedulability::NonSchedulable {
                trace,
                concrete,
                cause,
            }
        }
    };
    Ok(SchedulabilityReport {
        verdict,
        max_occupancy,
        queue_capacity: sys.max_queue,
        stats: run.stats,
    })
}

#[derive(Debug, Clone)]
pub struct QueryOutcome {
    pub query: Query,
    pub verdict: Verdict,
    /// `None` when the search did not finish.
    pub holds: Option<bool>,
    pub concrete: Option<Result<ConcreteTrace, String>>,
    pub stats: Stats,
}

/// Answer one query on the composed system.
pub fn run_query(
    sys: &ComposedSystem,
    query: &Query,
    opts: ExploreOptions,
) -> Result<QueryOutcome, AnalysisError> {
    let mut compiled = compile_composed(sys)?;
    let goal = resolve_target(&query.target, sys, &mut compiled)?;
    let run = explore(&compiled, &goal, opts, &mut |_| {});
    let holds = match &run.verdict {
        Verdict::Reachable(_) => Some(query.holds_if_reachable()),
        Verdict::Unreachable => Some(!query.holds_if_reachable()),
        _ => None,
    };
    let concrete = match &run.verdict {
        Verdict::Reachable(t) => Some(concretize(&compiled, &t.transitions(), &goal)),
        _ => None,
    };
    Ok(QueryOutcome {
        query: query.clone(),
        verdict: run.verdict,
        holds,
        concrete,
        stats: run.stats,
    })
}

/// Source position of an instance's current location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceRef {
    pub instance: String,
    pub method: String,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueueEntry {
    pub slot: usize,
    pub task: String,
    pub sender: i32,
    pub deadline: i32,
    /// Time since the task (or the call it belongs to) was queued.
    pub elapsed: Time,
    /// Label the entry is blocked on, 0 when not blocked.
    pub waiting_on: i32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedStep {
    /// What led here: a delay, a transition, or nothing for the start.
    pub action: Option<String>,
    pub now: Time,
    pub at: Vec<SourceRef>,
    pub queue: Vec<QueueEntry>,
    /// Slot the scheduler is running, if any.
    pub running: Option<usize>,
}

/// Link every state of a concrete trace to source lines and the queue.
pub fn trace_to_source(
    sys: &ComposedSystem,
    compiled: &CompiledSystem,
    trace: &ConcreteTrace,
) -> Result<Vec<AnnotatedStep>, String> {
    let states = replay(compiled, &trace.actions).map_err(|e| e.to_string())?;
    let layout = QueueLayout::new(compiled, sys.max_queue);
    let engine = crate::engine::Engine::new(compiled);
    let mut out = Vec::new();
    for (k, st) in states.iter().enumerate() {
        let action = if k == 0 {
            None
        } else {
            match trace.actions[k - 1] {
                Action::Delay(d) => Some(format!("delay {d}")),
                Action::Fire(t) => Some(engine.describe(t)),
            }
        };
        out.push(annotate(sys, compiled, &layout, st, action));
    }
    Ok(out)
}

fn annotate(
    sys: &ComposedSystem,
    compiled: &CompiledSystem,
    layout: &QueueLayout,
    st: &ConcreteState,
    action: Option<String>,
) -> AnnotatedStep {
    let mut at = Vec::new();
    for m in &sys.methods {
        let Some(i) = compiled.instance_index(&m.instance) else {
            continue;
        };
        let loc = &compiled.instances[i].locations[st.locs[i] as usize].id;
        if let Some(span) = sys
            .translation
            .locmap
            .get(&(m.template.clone(), loc.clone()))
        {
            at.push(SourceRef {
                instance: m.instance.clone(),
                method: m.method.clone(),
                line: span.start.line as usize,
            });
        }
    }
    let tail = layout.tail(&st.vars).min(layout.q.len());
    let queue = (0..tail)
        .map(|i| {
            let k = st.vars[layout.ca[i]] as usize;
            QueueEntry {
                slot: i,
                task: usize::try_from(st.vars[layout.q[i]])
                    .ok()
                    .and_then(|id| sys.translation.table.tasks.get(id))
                    .map(|t| t.name.clone())
                    .unwrap_or_else(|| "?".into()),
                sender: st.vars[layout.s[i]],
                deadline: st.vars[layout.d[k]],
                elapsed: st.clocks[layout.x[k]],
                waiting_on: st.vars[layout.waitl[i]],
            }
        })
        .collect();
    let run = st.vars[layout.run] as usize;
    AnnotatedStep {
        action,
        now: st.now,
        at,
        queue,
        running: (run < tail).then_some(run),
    }
}

/// Plain-text rendering of an annotated trace.
pub fn render_trace(steps: &[AnnotatedStep], cause: Option<&ErrorCause>) -> String {
    let mut out = String::new();
    for (k, s) in steps.iter().enumerate() {
        let _ = write!(out, "{k:>4} t={}", s.now);
        if let Some(a) = &s.action {
            let _ = write!(out, "  {a}");
        }
        out.push('\n');
        for r in &s.at {
            let _ = writeln!(
                out,
                "       {} at line {} ({})",
                r.method, r.line, r.instance
            );
        }
        if !s.queue.is_empty() {
            let q: Vec<String> = s
                .queue
                .iter()
                .map(|e| {
                    let mark = if s.running == Some(e.slot) { "*" } else { "" };
                    let wait = if e.waiting_on > 0 {
                        format!(" wait {}", e.waiting_on)
                    } else {
                        String::new()
                    };
                    format!("{mark}{}[{}/{}{wait}]", e.task, e.elapsed, e.deadline)
                })
                .collect();
            let _ = writeln!(out, "       queue {}", q.join(" "));
        }
    }
    match cause {
        Some(ErrorCause::DeadlineMiss {
            slot,
            task,
            deadline,
        }) => {
            let _ = writeln!(
                out,
                "task `{task}` in slot {slot} missed its deadline {deadline}"
            );
        }
        Some(ErrorCause::Overflow) => {
            let _ = writeln!(out, "the queue overflowed");
        }
        _ => {}
    }
    out
}
