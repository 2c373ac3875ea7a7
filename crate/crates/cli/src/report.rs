//! Machine-readable analysis reports and their human-readable rendering.

use std::fmt::Write;

use serde::{Deserialize, Serialize};
use ta_analysis::{render_trace, AnnotatedStep, ErrorCause, QueueEntry, SourceRef, Stats, Time};

use crate::config::ProjectConfig;

/// Bumped whenever a field changes meaning or disappears.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: Tool,
    /// The configuration that was analysed, overrides applied.
    pub config: ProjectConfig,
    pub system: SystemInfo,
    pub schedulability: Option<SchedulabilityEntry>,
    pub queries: Vec<QueryEntry>,
    pub sweep: Option<Sweep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tool {
    pub name: String,
    pub version: String,
}

impl Tool {
    pub fn current() -> Tool {
        Tool {
            name: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemInfo {
    pub class: String,
    pub strategy: String,
    pub queue_capacity: usize,
    /// Bound derived from the longest deadline and the shortest method.
    pub computed_queue_bound: Option<usize>,
    pub d_max: u32,
    pub b_min: u32,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatsEntry {
    pub stored: usize,
    pub explored: usize,
    pub transitions: usize,
    pub elapsed_ms: f64,
}

impl From<&Stats> for StatsEntry {
    fn from(s: &Stats) -> StatsEntry {
        StatsEntry {
            stored: s.stored,
            explored: s.explored,
            transitions: s.transitions,
            elapsed_ms: s.elapsed.as_secs_f64() * 1000.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Cause {
    DeadlineMiss {
        slot: usize,
        task: String,
        deadline: i32,
    },
    Overflow,
    Unknown,
}

impl From<&ErrorCause> for Cause {
    fn from(c: &ErrorCause) -> Cause {
        match c {
            ErrorCause::DeadlineMiss {
                slot,
                task,
                deadline,
            } => Cause::DeadlineMiss {
                slot: *slot,
                task: task.clone(),
                deadline: *deadline,
            },
            ErrorCause::Overflow => Cause::Overflow,
            ErrorCause::Unknown => Cause::Unknown,
        }
    }
}

impl From<&Cause> for ErrorCause {
    fn from(c: &Cause) -> ErrorCause {
        match c {
            Cause::DeadlineMiss {
                slot,
                task,
                deadline,
            } => ErrorCause::DeadlineMiss {
                slot: *slot,
                task: task.clone(),
                deadline: *deadline,
            },
            Cause::Overflow => ErrorCause::Overflow,
            Cause::Unknown => ErrorCause::Unknown,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceEntry {
    pub instance: String,
    pub method: String,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueueSlot {
    pub slot: usize,
    pub task: String,
    pub sender: i32,
    pub deadline: i32,
    /// Exact rational, e.g. `7` or `13/2`.
    pub elapsed: String,
    pub waiting_on: i32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub action: Option<String>,
    /// Exact rational time since the start.
    pub now: String,
    pub at: Vec<SourceEntry>,
    pub queue: Vec<QueueSlot>,
    pub running: Option<usize>,
}

impl From<&AnnotatedStep> for Step {
    fn from(s: &AnnotatedStep) -> Step {
        Step {
            action: s.action.clone(),
            now: s.now.to_string(),
            at: s
                .at
                .iter()
                .map(|r| SourceEntry {
                    instance: r.instance.clone(),
                    method: r.method.clone(),
                    line: r.line,
                })
                .collect(),
            queue: s
                .queue
                .iter()
                .map(|e| QueueSlot {
                    slot: e.slot,
                    task: e.task.clone(),
                    sender: e.sender,
                    deadline: e.deadline,
                    elapsed: e.elapsed.to_string(),
                    waiting_on: e.waiting_on,
                })
                .collect(),
            running: s.running,
        }
    }
}

fn time(text: &str) -> Time {
    text.parse().unwrap_or_default()
}

impl From<&Step> for AnnotatedStep {
    fn from(s: &Step) -> AnnotatedStep {
        AnnotatedStep {
            action: s.action.clone(),
            now: time(&s.now),
            at: s
                .at
                .iter()
                .map(|r| SourceRef {
                    instance: r.instance.clone(),
                    method: r.method.clone(),
                    line: r.line,
                })
                .collect(),
            queue: s
                .queue
                .iter()
                .map(|e| QueueEntry {
                    slot: e.slot,
                    task: e.task.clone(),
                    sender: e.sender,
                    deadline: e.deadline,
                    elapsed: time(&e.elapsed),
                    waiting_on: e.waiting_on,
                })
                .collect(),
            running: s.running,
        }
    }
}

/// A witness trace, or why no concrete one could be built.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Witness {
    Trace(Vec<Step>),
    Unavailable(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchedulabilityEntry {
    /// `schedulable`, `nonschedulable`, `budget-exhausted` or `modeling-error`.
    pub verdict: String,
    pub expected_schedulable: bool,
    pub as_expected: bool,
    pub max_occupancy: usize,
    pub queue_capacity: usize,
    pub cause: Option<Cause>,
    pub error: Option<String>,
    pub witness: Option<Witness>,
    pub stats: StatsEntry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryEntry {
    pub query: String,
    /// `reachable`, `unreachable`, `budget-exhausted` or `modeling-error`.
    pub verdict: String,
    pub expected: bool,
    /// `None` when the search did not finish.
    pub holds: Option<bool>,
    pub as_expected: bool,
    pub witness: Option<Witness>,
    pub stats: StatsEntry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub variable: String,
    pub rows: Vec<SweepRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: i64,
    pub verdict: String,
    pub max_occupancy: usize,
    pub cause: Option<Cause>,
    pub stats: StatsEntry,
}

impl Report {
    /// Every verdict came out, and came out as expected.
    pub fn all_as_expected(&self) -> bool {
        self.schedulability.as_ref().is_none_or(|s| s.as_expected)
            && self.queries.iter().all(|q| q.as_expected)
    }

    /// Some search ran out of budget.
    pub fn incomplete(&self) -> bool {
        let exhausted = |v: &str| v == "budget-exhausted";
        self.schedulability
            .as_ref()
            .is_some_and(|s| exhausted(&s.verdict))
            || self.queries.iter().any(|q| exhausted(&q.verdict))
            || self
                .sweep
                .as_ref()
                .is_some_and(|s| s.rows.iter().any(|r| exhausted(&r.verdict)))
    }
}

fn render_witness(out: &mut String, w: &Witness, cause: Option<&Cause>) {
    match w {
        Witness::Trace(steps) => {
            // zero delays between instantaneous transitions only add noise
            let steps: Vec<AnnotatedStep> = steps
                .iter()
                .filter(|s| s.action.as_deref() != Some("delay 0"))
                .map(AnnotatedStep::from)
                .collect();
            let cause = cause.map(ErrorCause::from);
            for line in render_trace(&steps, cause.as_ref()).lines() {
                let _ = writeln!(out, "    {line}");
            }
        }
        Witness::Unavailable(why) => {
            let _ = writeln!(out, "    no concrete trace: {why}");
        }
    }
}

fn render_stats(s: &StatsEntry) -> String {
    format!(
        "{} states, {} transitions, {:.1} ms",
        s.stored, s.transitions, s.elapsed_ms
    )
}

/// Human-readable form of a report.
pub fn render(r: &Report) -> String {
    let mut out = String::new();
    let sys = &r.system;
    let _ = writeln!(
        out,
        "{} {} (report schema {})",
        r.tool.name, r.tool.version, r.schema_version
    );
    let _ = writeln!(
        out,
        "class {} under {}, queue capacity {} (timing bound {})",
        sys.class,
        sys.strategy,
        sys.queue_capacity,
        sys.computed_queue_bound
            .map_or("none".to_string(), |b| b.to_string())
    );
    let _ = writeln!(
        out,
        "longest deadline {}, shortest method {}",
        sys.d_max, sys.b_min
    );
    for w in &sys.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    if let Some(s) = &r.schedulability {
        let mark = if s.as_expected { "ok" } else { "UNEXPECTED" };
        let _ = writeln!(
            out,
            "\nschedulability: {} [{mark}], max queue occupancy {} of {} ({})",
            s.verdict,
            s.max_occupancy,
            s.queue_capacity,
            render_stats(&s.stats)
        );
        if let Some(e) = &s.error {
            let _ = writeln!(out, "  error: {e}");
        }
        if let Some(w) = &s.witness {
            render_witness(&mut out, w, s.cause.as_ref());
        }
    }
    if !r.queries.is_empty() {
        let _ = writeln!(out, "\nqueries:");
    }
    for q in &r.queries {
        let mark = if q.as_expected { "ok" } else { "UNEXPECTED" };
        let holds = match q.holds {
            Some(true) => "holds",
            Some(false) => "fails",
            None => "undecided",
        };
        let _ = writeln!(
            out,
            "  {}: {} ({holds}) [{mark}], {}",
            q.query,
            q.verdict,
            render_stats(&q.stats)
        );
        if let Some(w) = &q.witness {
            render_witness(&mut out, w, None);
        }
    }
    if let Some(sw) = &r.sweep {
        let _ = writeln!(out, "\nsweep over {}:", sw.variable);
        let _ = writeln!(
            out,
            "  {:>8}  {:<16} {:>9}  {:>9}",
            sw.variable, "verdict", "occupancy", "states"
        );
        for row in &sw.rows {
            let _ = writeln!(
                out,
                "  {:>8}  {:<16} {:>9}  {:>9}",
                row.value, row.verdict, row.max_occupancy, row.stats.stored
            );
        }
    }
    out
}
